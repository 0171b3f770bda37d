"""Mode dispatch for the parallel engine."""

from idastra.engine.config import ExecutionMode


def run_parallel(problem, config, workers, mode=None, seed=0,
                 serial_outcome=None, timeout=60.0):
    """Run the engine under the given execution mode (sim by default)."""
    from idastra.engine.sim import run_sim
    from idastra.engine.threads import run_threads

    if mode is None:
        mode = ExecutionMode()
    mode.validate()
    if mode.kind == "DeterministicSim":
        return run_sim(problem, config, workers,
                       latency=mode.message_latency_ticks, seed=seed,
                       serial_outcome=serial_outcome)
    return run_threads(problem, config, workers, seed=seed, timeout=timeout,
                       serial_outcome=serial_outcome)
