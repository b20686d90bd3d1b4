"""
Configuration Module
Search bounds and truncation degrees shared by the solvers
"""
import os


def _env_int(name: str, default: int) -> int:
    """Read an integer override from the environment, falling back to default"""
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}")


# Exhaustive isotropic-vector search box [-bound, bound]^rank
ISOTROPIC_BOUND = _env_int("HASSETT_ISOTROPIC_BOUND", 50)

# Generalized Pell: most unit steps walked along one solution class
ORBIT_BOUND = _env_int("HASSETT_ORBIT_BOUND", 10**6)

# Cutoff N0 of the (***)/(***') double-loop search oracles
SEARCH_N0 = _env_int("HASSETT_SEARCH_N0", 10**5)

# Enumeration shards
THREADS = _env_int("HASSETT_THREADS", 1)

# Chern/Todd series truncation: dim (X x P^5) = 7
SERIES_DEGREE = _env_int("HASSETT_SERIES_DEGREE", 7)
