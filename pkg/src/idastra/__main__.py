import sys

from idastra.cli import main

sys.exit(main())
