"""Multi-objective branch-and-bound for 0-1 integer linear programs."""
