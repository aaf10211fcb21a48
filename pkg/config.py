"""
Description: Numeric tolerances, enumeration budgets and Monte Carlo defaults.
             Environment overrides are read here and nowhere else.
Date created: October 19th, 2026
Date last modified: October 19th, 2026
"""

import logging
import os
from dataclasses import dataclass

from errors import ConfigError

logger = logging.getLogger(__name__)

BUDGET_ENV_VAR = "ZONOVOL_BUDGET"
DEFAULT_BUDGET = 10 ** 8
GENERATOR_GUARD = 20            # 2^N sign patterns when listing zonotope vertices
POLARIZATION_MAX_DIM = 5
POLARIZATION_MAX_POINTS = 10 ** 5

MC_SAMPLES = 10_000
MC_MIN_SAMPLES = 100
MC_SEED = 0
RNG_ALGORITHM = "PCG64"

STABILITY_DIRECTIONS = 1024     # quasi-uniform directions for support-function slacks
PROJECTION_SAMPLES = 1000       # Haar samples when maximizing projection volumes

MVIE_MAX_ITERATIONS = 500


@dataclass(frozen=True)
class Tolerances:
    rank: float = 1e-10             # relative singular-value cutoff
    dedup: float = 1e-9             # vertex deduplication, absolute
    facet_merge: float = 1e-8       # merging coplanar hull facets
    subspace_merge: float = 1e-8    # principal-angle distance for merging measure atoms
    holds: float = 1e-9             # scaled by max(1, |rhs|)
    equality: float = 1e-7          # relative tightness counted as equality
    mvie_feasibility: float = 1e-7
    john: float = 1e-6
    mvie_convergence: float = 1e-8
    polarization_clamp: float = 1e-10
    slack: float = 1e-8
    degenerate: float = 1e-12       # lhs below this fraction of rhs counts as vanishing


DEFAULT_TOLERANCES = Tolerances()


def enumeration_budget():
    """
    Desc: Returns the largest number of generator tuples an exact enumeration may visit.
    returns:
    (int): ZONOVOL_BUDGET when set in the environment, otherwise 10^8.
    raises:
    ConfigError: If the environment value is not a positive integer.
    """
    raw = os.environ.get(BUDGET_ENV_VAR)
    if raw is None or raw.strip() == "":
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{BUDGET_ENV_VAR} must be an integer, got {raw!r}") from None
    if value <= 0:
        raise ConfigError(f"{BUDGET_ENV_VAR} must be positive, got {value}")
    logger.debug("enumeration budget overridden to %d", value)
    return value


def generator_guard():
    """Largest generator count for which zonotope vertices are enumerated."""
    return GENERATOR_GUARD
