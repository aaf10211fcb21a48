"""
Description: Brute-force evaluators kept independent of the generator formulas so the two can
             check each other: mixed volumes of arbitrary polytopes by polarization over all
             Minkowski sub-sums, and intrinsic volumes by Kubota's average of projection volumes
             over Haar-random subspaces.
Date created: October 19th, 2026
Date last modified: October 19th, 2026
"""

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from bodies import Zonotope, as_vpolytope, minkowski_sum, project_body, volume
from config import (DEFAULT_TOLERANCES, MC_MIN_SAMPLES, MC_SAMPLES, MC_SEED, POLARIZATION_MAX_DIM,
                    POLARIZATION_MAX_POINTS, RNG_ALGORITHM)
from errors import ApplicabilityError, BudgetError, ContractError, NumericalInconsistencyError
from linalg import sample_grassmannian
from util import KahanAccumulator, binom, kappa, rng_label, spawn_rngs

logger = logging.getLogger(__name__)

EXACT = "exact"
MONTECARLO = "montecarlo"
EVALUATORS = (EXACT, MONTECARLO)


@dataclass(frozen=True)
class McEstimate:
    """A value with its standard error; samples == 0 marks an exact value."""

    value: float
    stderr: float = 0.0
    samples: int = 0
    seed: object = None
    algorithm: str = RNG_ALGORITHM

    @property
    def exact(self):
        return self.samples == 0

    def to_json(self):
        data = {"value": self.value, "stderr": self.stderr, "samples": self.samples}
        if not self.exact:
            data.update(rng_label(self.seed))
        return data


def exact_value(value):
    return McEstimate(float(value))


def root_seed(rng_state):
    """Integer seed for a run; a Generator contributes one draw so callers stay reproducible."""
    if isinstance(rng_state, np.random.Generator):
        return int(rng_state.integers(2 ** 63))
    if rng_state is None:
        return MC_SEED
    return int(rng_state)


def polarization_mixed_volume(slots, tol=DEFAULT_TOLERANCES):
    """
    Desc: V(K_1,...,K_n) = (1/n!) sum_k (-1)^(n+k) sum_{i_1<...<i_k} V_n(K_i1 + ... + K_ik).
          Sub-sums are built incrementally, each from the sum of its prefix.
    Parameters:
        slots (list of VPolytope | Zonotope): n bodies in R^n, repeats allowed.
        tol (Tolerances): polarization_clamp decides when a negative result is round-off.
    returns:
    (float): Nonnegative mixed volume.
    raises:
    BudgetError: If n > 5 or a Minkowski sum would have too many candidate points.
    NumericalInconsistencyError: If the alternating sum is negative beyond the clamp.
    """
    n = len(slots)
    if n == 0:
        raise ContractError("polarization needs at least one body")
    if n > POLARIZATION_MAX_DIM:
        raise BudgetError(f"polarization is limited to n <= {POLARIZATION_MAX_DIM}, got n={n}")
    polys = [as_vpolytope(body) for body in slots]
    if any(p.ambient_dim != n for p in polys):
        raise ContractError(f"polarization needs {n} bodies in R^{n}")

    sums = {}
    largest = 0.0
    total = KahanAccumulator()
    for k in range(1, n + 1):
        sign = 1.0 if (n + k) % 2 == 0 else -1.0
        for subset in itertools.combinations(range(n), k):
            if k == 1:
                summed = polys[subset[0]]
            else:
                prefix, last = sums[subset[:-1]], polys[subset[-1]]
                points = len(prefix.vertices) * len(last.vertices)
                if points > POLARIZATION_MAX_POINTS:
                    raise BudgetError(f"Minkowski sum over {subset} needs {points} points "
                                      f"(limit {POLARIZATION_MAX_POINTS})")
                summed = minkowski_sum(prefix, last)
            sums[subset] = summed
            vol = volume(summed)
            largest = max(largest, vol)
            total.add(sign * vol)
    value = total.value / math.factorial(n)
    if value < 0.0:
        if value >= -tol.polarization_clamp * max(1.0, largest):
            return 0.0
        raise NumericalInconsistencyError(f"polarization produced a negative mixed volume {value:.3e}")
    return value


def _projected_volume(body, L):
    proj = project_body(body, L, coordinates=True)
    return proj.affine_volume() if proj.dim == L.dim else 0.0


def kubota_intrinsic_volume_mc(K, i, samples=MC_SAMPLES, rng_state=MC_SEED, workers=None):
    """
    Desc: Monte Carlo Kubota estimate binom(n,i) kappa_n / (kappa_i kappa_(n-i)) * mean lambda_i(K|L)
          over Haar-random L in G(n,i). Sample k draws its subspace from its own substream, so
          the estimate does not depend on how the samples are split across workers.
    Parameters:
        K (VPolytope | Zonotope): The body.
        i (int): 1 <= i <= n-1.
        samples (int): At least 100.
        rng_state (int or np.random.Generator): Root seed.
        workers (int): Threads for the projection volumes, or None.
    returns:
    (McEstimate): Estimate with stderr = sample std / sqrt(samples).
    """
    body = as_vpolytope(K)
    n = body.ambient_dim
    if not 1 <= i <= n - 1:
        raise ContractError(f"Kubota estimate needs 1 <= i <= n-1, got i={i}, n={n}")
    if samples < MC_MIN_SAMPLES:
        raise ContractError(f"Kubota estimate needs at least {MC_MIN_SAMPLES} samples, got {samples}")
    seed = root_seed(rng_state)
    rngs = spawn_rngs(seed, samples)

    def one(rng):
        return _projected_volume(body, sample_grassmannian(n, i, rng))

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            volumes = np.fromiter(pool.map(one, rngs), dtype=float, count=samples)
    else:
        volumes = np.fromiter(map(one, rngs), dtype=float, count=samples)
    constant = binom(n, i) * kappa(n) / (kappa(i) * kappa(n - i))
    value = constant * float(np.mean(volumes))
    stderr = constant * float(np.std(volumes, ddof=1)) / math.sqrt(samples)
    logger.debug("kubota i=%d n=%d samples=%d seed=%d: %.6g +- %.2g", i, n, samples, seed, value, stderr)
    return McEstimate(value, stderr, samples, seed)


def polytope_intrinsic_volume(K, i, evaluator=MONTECARLO, samples=MC_SAMPLES, rng_state=MC_SEED):
    """
    Desc: V_i of a polytope: exact when i = 0, i >= dim K (the Lebesgue measure in the affine
          hull, or 0), otherwise by the Kubota estimate.
    Parameters:
        K (VPolytope | Zonotope): The body.
        i (int): 0 <= i <= n.
        evaluator (str): "exact" refuses cases that need sampling.
        samples (int): Monte Carlo sample count.
        rng_state (int or np.random.Generator): Root seed.
    returns:
    (McEstimate): Exact values carry samples == 0.
    raises:
    ApplicabilityError: If sampling is needed but evaluator is "exact".
    """
    if evaluator not in EVALUATORS:
        raise ContractError(f"unknown evaluator {evaluator!r}")
    body = as_vpolytope(K) if isinstance(K, Zonotope) else K
    n = body.ambient_dim
    if not 0 <= i <= n:
        raise ContractError(f"intrinsic volume index must satisfy 0 <= i <= {n}, got {i}")
    if i == 0:
        return exact_value(1.0)
    d = body.dim
    if i > d:
        return exact_value(0.0)
    if i == d:
        return exact_value(body.affine_volume())
    if evaluator == EXACT:
        raise ApplicabilityError(f"needs Monte Carlo: V_{i} of a {d}-dimensional polytope has no "
                                 "exact evaluator here (use the montecarlo evaluator)")
    return kubota_intrinsic_volume_mc(body, i, samples, rng_state)
