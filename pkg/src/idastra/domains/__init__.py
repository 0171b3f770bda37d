from idastra.domains.puzzle import PuzzleProblem
from idastra.domains.synthetic import ArtificialProblem, ArtificialSpec

__all__ = ["ArtificialProblem", "ArtificialSpec", "PuzzleProblem"]
