from idastra.engine.config import (AXES, DEFAULT_CONFIG, ExecutionMode,
                                   StrategyConfig, config_for_axis_value,
                                   default_config, plan_clusters,
                                   validate_config)
from idastra.engine.parts import (anticipatory_check, detect_termination,
                                  donate, poll_target)
from idastra.engine.report import EngineReport, WorkerStats
from idastra.engine.sim import run_sim
from idastra.engine.run import run_parallel

__all__ = [
    "AXES",
    "DEFAULT_CONFIG",
    "ExecutionMode",
    "StrategyConfig",
    "config_for_axis_value",
    "default_config",
    "plan_clusters",
    "validate_config",
    "anticipatory_check",
    "detect_termination",
    "donate",
    "poll_target",
    "EngineReport",
    "WorkerStats",
    "run_sim",
    "run_parallel",
]
