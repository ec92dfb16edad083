from .handlers import EXIT_FAILURE, EXIT_INVALID, EXIT_OK, accept, audit, gen, learn, run_command, solve, trials

__all__ = ["EXIT_FAILURE", "EXIT_INVALID", "EXIT_OK", "accept", "audit", "gen", "learn", "run_command", "solve", "trials"]
