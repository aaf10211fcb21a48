"""
Description: Exact mixed and intrinsic volumes built on generating measures. A zonotope
             generator w contributes the atoms +-w/|w| with mass |w|/2, so every integral over
             the sphere or the Grassmannian becomes a finite sum of parallelepiped volumes
             (reductions worked out in MATH_NOTES.md). The unit ball enters symbolically
             through kappa_j and never as a polytope.
Date created: October 19th, 2026
Date last modified: October 19th, 2026
"""

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from bodies import UnitBall, VPolytope, Zonotope, project_body, volume
from config import DEFAULT_TOLERANCES, MC_SAMPLES, MC_SEED, POLARIZATION_MAX_DIM, enumeration_budget
from errors import ApplicabilityError, BudgetError, ContractError
from linalg import bracket, orthonormalize, parallelepiped_volumes, sum_subspace
from oracle import (EXACT, EVALUATORS, McEstimate, exact_value, polarization_mixed_volume,
                    polytope_intrinsic_volume, root_seed)
from util import KahanAccumulator, KappaTable, binom, chunked, kappa, log_binom, log_kappa, multinomial

logger = logging.getLogger(__name__)

CHUNK_SIZE = 4096


def _check_budget(count, what):
    budget = enumeration_budget()
    if count > budget:
        raise BudgetError(f"{what}: {count} tuples exceed the enumeration budget {budget} "
                          "(raise it with ZONOVOL_BUDGET)")
    logger.debug("%s: enumerating %d tuples", what, count)


class DiscreteSubspaceMeasure:
    def __init__(self, ambient_dim, grassmann_dim, atoms=(), tol=DEFAULT_TOLERANCES.subspace_merge):
        """
        Desc: Finite measure on G(n, j). Atoms whose principal-angle distance is below `tol`
              are merged and their masses added; atoms keep their order of first appearance.
        Parameters:
            ambient_dim (int): n.
            grassmann_dim (int): j.
            atoms (iterable of (Subspace, float)): Initial atoms.
            tol (float): Merge distance.
        """
        self.ambient_dim = ambient_dim
        self.grassmann_dim = grassmann_dim
        self.tol = tol
        self._subspaces = []
        self._masses = []
        self._projectors = np.empty((0, ambient_dim * ambient_dim))
        for subspace, mass in atoms:
            self.add(subspace, mass)

    def add(self, subspace, mass):
        if mass < 0.0:
            raise ContractError(f"measure masses must be nonnegative, got {mass}")
        if subspace.ambient_dim != self.ambient_dim or subspace.dim != self.grassmann_dim:
            raise ContractError(f"atom of G({subspace.ambient_dim},{subspace.dim}) added to a measure "
                                f"on G({self.ambient_dim},{self.grassmann_dim})")
        flat = subspace.projector().reshape(1, -1)
        # entrywise gaps bound the spectral distance from below
        gaps = np.abs(self._projectors - flat).max(axis=1) if len(self._subspaces) else np.empty(0)
        for index in np.flatnonzero(gaps < self.tol):
            if self._subspaces[index].distance(subspace) < self.tol:
                self._masses[index].add(mass)
                return int(index)
        self._subspaces.append(subspace)
        acc = KahanAccumulator()
        acc.add(mass)
        self._masses.append(acc)
        self._projectors = np.vstack([self._projectors, flat])
        return len(self._subspaces) - 1

    @property
    def atoms(self):
        return [(s, m.value) for s, m in zip(self._subspaces, self._masses)]

    @property
    def total_mass(self):
        acc = KahanAccumulator()
        for m in self._masses:
            acc.add(m.value)
        return acc.value

    def __len__(self):
        return len(self._subspaces)

    def __iter__(self):
        return iter(self.atoms)

    def to_json(self):
        return {"ambient_dim": self.ambient_dim, "grassmann_dim": self.grassmann_dim,
                "atoms": [{"subspace": s.to_json(), "mass": m} for s, m in self.atoms]}

    def __repr__(self):
        return (f"DiscreteSubspaceMeasure(G({self.ambient_dim},{self.grassmann_dim}), "
                f"atoms={len(self)}, total={self.total_mass:.6g})")


def _ambient_dim(entries, fallback=None):
    dims = {body.ambient_dim for body, _ in entries}
    if len(dims) > 1:
        raise ContractError(f"bodies live in different dimensions {sorted(dims)}")
    if dims:
        return dims.pop()
    if fallback is None:
        raise ContractError("no bodies given")
    return fallback


def _multiplicities(entries):
    alphas = [int(a) for _, a in entries]
    if any(a < 1 for a in alphas):
        raise ContractError(f"multiplicities must be >= 1, got {alphas}")
    return alphas


def zonotope_mixed_volume(slots, workers=None):
    """
    Desc: V(Z_1,...,Z_n) = (2^n / n!) * sum over one generator per slot of |det(w_j1,...,w_jn)|.
          Tuples are visited in lexicographic order in fixed chunks whose partial sums are
          Kahan-accumulated, so the result is the same with or without workers.
    Parameters:
        slots (list of Zonotope): n zonotopes in R^n, repeats allowed.
        workers (int): Threads evaluating chunks, or None.
    returns:
    (float): The mixed volume.
    raises:
    BudgetError: If the product of generator counts exceeds the budget.
    """
    n = len(slots)
    if n == 0:
        raise ContractError("mixed volume needs n >= 1 slots")
    for z in slots:
        if not isinstance(z, Zonotope):
            raise ContractError(f"zonotope_mixed_volume takes zonotopes, got {type(z).__name__}")
        if z.ambient_dim != n:
            raise ContractError(f"{n} slots need zonotopes in R^{n}, got R^{z.ambient_dim}")
    counts = [z.count for z in slots]
    if 0 in counts:
        return 0.0
    total = math.prod(counts)
    _check_budget(total, "generator tuples")

    def chunk_sum(start):
        flat = np.arange(start, min(start + CHUNK_SIZE, total))
        index = np.unravel_index(flat, counts)
        stacks = np.stack([slots[k].generators[index[k]] for k in range(n)], axis=1)
        return float(np.sum(parallelepiped_volumes(stacks)))

    starts = range(0, total, CHUNK_SIZE)
    acc = KahanAccumulator()
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            acc.extend(pool.map(chunk_sum, starts))
    else:
        acc.extend(map(chunk_sum, starts))
    return 2.0 ** n / math.factorial(n) * acc.value


def projection_generating_measure(Z, j, tol=DEFAULT_TOLERANCES):
    """
    Desc: rho_(j)(Z, .) for a zonotope: one atom lin{w_i1,...,w_ij} per j-subset with
          D_j > 0, carrying mass (2^j / kappa_j) * D_j(w_i1,...,w_ij).
    Parameters:
        Z (Zonotope): The zonotope.
        j (int): 1 <= j <= n.
        tol (Tolerances): rank decides dependent subsets, subspace_merge merges atoms.
    returns:
    (DiscreteSubspaceMeasure): Empty when rank(Z) < j.
    """
    n = Z.ambient_dim
    if not 1 <= j <= n:
        raise ContractError(f"projection generating measure needs 1 <= j <= {n}, got {j}")
    measure = DiscreteSubspaceMeasure(n, j, tol=tol.subspace_merge)
    if Z.dim < j:
        return measure
    _check_budget(math.comb(Z.count, j), f"{j}-subsets of {Z.count} generators")
    gens = Z.generators
    weight = 2.0 ** j / kappa(j)
    for chunk in chunked(itertools.combinations(range(Z.count), j), CHUNK_SIZE):
        index = np.array(chunk)
        # singular values decide dependence; D_j is their product
        s = np.linalg.svd(gens[index], compute_uv=False)
        vols = np.prod(s, axis=1)
        independent = s[:, -1] > tol.rank * s[:, 0]
        for subset, vol, keep in zip(chunk, vols, independent):
            if not keep:
                continue
            measure.add(orthonormalize(gens[list(subset)]), weight * float(vol))
    logger.debug("rho_(%d) of %r: %d atoms", j, Z, len(measure))
    return measure


def zonotope_intrinsic_volume(Z, j, tol=DEFAULT_TOLERANCES):
    """V_j(Z) = kappa_j * total mass of rho_(j)(Z, .); V_0 = 1."""
    n = Z.ambient_dim
    if not 0 <= j <= n:
        raise ContractError(f"intrinsic volume index must satisfy 0 <= j <= {n}, got {j}")
    if j == 0:
        return 1.0
    return kappa(j) * projection_generating_measure(Z, j, tol).total_mass


def ball_intrinsic_volume(n, j):
    """V_j(B^n) = binom(n,j) kappa_n / kappa_(n-j), evaluated in log space."""
    if not 0 <= j <= n:
        raise ContractError(f"intrinsic volume index must satisfy 0 <= j <= {n}, got {j}")
    return math.exp(log_binom(n, j) + log_kappa(n) - log_kappa(n - j))


def _atom_arrays(measure):
    bases = np.array([s.basis for s, _ in measure.atoms])
    masses = np.array([m for _, m in measure.atoms])
    return bases, masses


def _bracket_sum(measures, span_dim, tol):
    """sum over atom tuples of [U_1,...,U_m]_{span_dim} * prod(masses), batched by chunk."""
    arrays = [_atom_arrays(m) for m in measures]
    counts = [len(m) for m in measures]
    if sum(m.grassmann_dim for m in measures) != span_dim:
        raise ContractError(f"atom dimensions do not sum to the bracket dimension {span_dim}")
    total = math.prod(counts)
    _check_budget(total, "atom tuples")
    acc = KahanAccumulator()
    for start in range(0, total, CHUNK_SIZE):
        flat = np.arange(start, min(start + CHUNK_SIZE, total))
        index = np.unravel_index(flat, counts)
        stacked = np.concatenate([arrays[k][0][index[k]] for k in range(len(measures))], axis=2)
        s = np.linalg.svd(np.swapaxes(stacked, 1, 2), compute_uv=False)
        brackets = np.prod(s, axis=1)
        brackets[s[:, -1] <= tol * s[:, 0]] = 0.0
        brackets = np.clip(brackets, 0.0, 1.0)
        masses = np.prod(np.stack([arrays[k][1][index[k]] for k in range(len(measures))]), axis=0)
        acc.add(float(np.sum(brackets * masses)))
    return acc.value


def mixed_volume_zonotopes_ball(Zs, beta, tol=DEFAULT_TOLERANCES):
    """
    Desc: V(Z_1[a_1],...,Z_m[a_m], B[beta]) =
          multinomial(n; beta, a)^-1 * kappa_beta * prod kappa_ai
          * sum over atom tuples of [U_1,...,U_m]_(n-beta) * prod masses.
    Parameters:
        Zs (list of (Zonotope, int)): Zonotopes with multiplicities a_i >= 1.
        beta (int): Copies of the unit ball.
        tol (Tolerances): Rank and merge tolerances.
    returns:
    (float): The mixed volume.
    raises:
    ContractError: If sum a_i + beta differs from n.
    """
    if beta < 0:
        raise ContractError(f"ball copies must be >= 0, got {beta}")
    n = _ambient_dim(Zs, fallback=beta)
    alphas = _multiplicities(Zs)
    if sum(alphas) + beta != n:
        raise ContractError(f"multiplicities {alphas} plus {beta} ball copies do not sum to n={n}")
    if not Zs:
        return kappa(n)
    measures = [projection_generating_measure(Z, a, tol) for Z, a in Zs]
    if any(len(m) == 0 for m in measures):
        return 0.0
    kappas = KappaTable(n)
    coefficient = kappas[beta] * math.prod(kappas[a] for a in alphas) / multinomial([beta] + alphas)
    return coefficient * _bracket_sum(measures, n - beta, tol.rank)


class _Substreams:
    """Independent child generators drawn in order from one root seed."""

    def __init__(self, seed):
        self.seed = seed
        self._root = np.random.SeedSequence(seed)

    def next(self):
        child = self._root.spawn(1)[0]
        return np.random.Generator(np.random.PCG64(child))


def _combine(value, variance, used_mc, samples, seed):
    if used_mc:
        return McEstimate(value, math.sqrt(variance), samples, seed)
    return exact_value(value)


def mixed_volume_body_ball_zonotopes(K, gamma, ball_copies, Zs, evaluator=EXACT,
                                     samples=MC_SAMPLES, seed=MC_SEED, tol=DEFAULT_TOLERANCES):
    """
    Desc: V(K[gamma], B[beta-gamma], Z_1[a_1],...,Z_m[a_m]) with beta = gamma + ball_copies:
          multinomial(n; beta, a)^-1 * prod kappa_ai * sum over atom tuples of
          [U_1..U_m]_(n-beta) * V_gamma(K|W^perp) * kappa_(beta-gamma) / binom(beta, gamma)
          * prod masses, where W = U_1 + ... + U_m.
    Parameters:
        K (VPolytope | Zonotope | None): The general body; a zonotope takes the exact zonotope path.
        gamma (int): Multiplicity of K.
        ball_copies (int): beta - gamma.
        Zs (list of (Zonotope, int)): Zonotopes with multiplicities.
        evaluator (str): "exact" or "montecarlo" for V_gamma of the projections.
        samples (int): Kubota samples per projection.
        seed (int): Root seed; each atom tuple draws its own substream.
        tol (Tolerances): Rank and merge tolerances.
    returns:
    (McEstimate): Value and combined standard error.
    raises:
    ApplicabilityError: If a projection needs Monte Carlo and evaluator is "exact".
    """
    if evaluator not in EVALUATORS:
        raise ContractError(f"unknown evaluator {evaluator!r}")
    if gamma < 0 or ball_copies < 0:
        raise ContractError(f"gamma and ball copies must be >= 0, got {gamma}, {ball_copies}")
    if K is None or gamma == 0:
        if K is None and gamma:
            raise ContractError("gamma > 0 needs a body K")
        return exact_value(mixed_volume_zonotopes_ball(Zs, gamma + ball_copies, tol))
    if isinstance(K, Zonotope):
        return exact_value(mixed_volume_zonotopes_ball([(K, gamma)] + list(Zs), ball_copies, tol))
    if isinstance(K, UnitBall):
        return exact_value(mixed_volume_zonotopes_ball(Zs, gamma + ball_copies, tol))

    n = _ambient_dim([(K, gamma)] + list(Zs))
    alphas = _multiplicities(Zs)
    beta = gamma + ball_copies
    if sum(alphas) + beta != n:
        raise ContractError(f"multiplicities {alphas}, gamma {gamma} and {ball_copies} ball copies "
                            f"do not sum to n={n}")
    measures = [projection_generating_measure(Z, a, tol) for Z, a in Zs]
    if any(len(m) == 0 for m in measures):
        return exact_value(0.0)
    _check_budget(math.prod(len(m) for m in measures), "atom tuples")

    seed = root_seed(seed)
    streams = _Substreams(seed)
    inner_factor = kappa(ball_copies) / binom(beta, gamma)
    value, variance = KahanAccumulator(), KahanAccumulator()
    used_mc = False
    for combo in itertools.product(*(m.atoms for m in measures)):
        subspaces = [s for s, _ in combo]
        b = bracket(subspaces, n - beta, tol.rank)
        if b == 0.0:
            continue
        complement = sum_subspace(subspaces, n).complement()
        projected = project_body(K, complement, coordinates=True)
        estimate = polytope_intrinsic_volume(projected, gamma, evaluator, samples, streams.next())
        weight = b * math.prod(m for _, m in combo) * inner_factor
        value.add(weight * estimate.value)
        variance.add((weight * estimate.stderr) ** 2)
        used_mc = used_mc or not estimate.exact
    coefficient = math.prod(kappa(a) for a in alphas) / multinomial([beta] + alphas)
    return _combine(coefficient * value.value, coefficient ** 2 * variance.value, used_mc, samples, seed)


def _split_entries(entries):
    zonotopes, generals, balls = [], [], 0
    for body, mult in entries:
        if mult == 0:
            continue
        if isinstance(body, Zonotope):
            zonotopes.append((body, int(mult)))
        elif isinstance(body, UnitBall):
            balls += int(mult)
        elif isinstance(body, VPolytope):
            generals.append((body, int(mult)))
        else:
            raise ContractError(f"unsupported body type {type(body).__name__}")
    return zonotopes, generals, balls


def mixed_volume(entries, evaluator=EXACT, samples=MC_SAMPLES, seed=MC_SEED, tol=DEFAULT_TOLERANCES):
    """
    Desc: Mixed volume of zonotopes, unit-ball copies and general polytopes, choosing the exact
          formula that applies: zonotopes and balls only; one general polytope; several general
          polytopes without balls, whose inner mixed volume in W^perp is taken by polarization.
    Parameters:
        entries (list of (body, int)): Bodies with multiplicities summing to n.
        evaluator (str): Passed to the one-polytope path.
        samples (int): Monte Carlo samples when sampling is allowed.
        seed (int): Root seed.
        tol (Tolerances): Tolerances.
    returns:
    (McEstimate): The mixed volume.
    raises:
    ApplicabilityError: For several general polytopes together with ball copies.
    BudgetError: When polarization would run in more than 5 dimensions.
    """
    n = _ambient_dim(entries)
    _multiplicities([e for e in entries if e[1] != 0])
    if sum(int(a) for _, a in entries) != n:
        raise ContractError(f"multiplicities {[a for _, a in entries]} do not sum to n={n}")
    zonotopes, generals, balls = _split_entries(entries)
    if not generals:
        return exact_value(mixed_volume_zonotopes_ball(zonotopes, balls, tol))
    if len(generals) == 1:
        K, gamma = generals[0]
        return mixed_volume_body_ball_zonotopes(K, gamma, balls, zonotopes, evaluator, samples, seed, tol)
    if balls:
        raise ApplicabilityError("several general polytopes together with unit-ball copies have "
                                 "no exact formula here")
    beta = sum(g for _, g in generals)
    if beta > POLARIZATION_MAX_DIM:
        raise BudgetError(f"general polytopes fill {beta} slots; polarization is limited to "
                          f"{POLARIZATION_MAX_DIM}")
    slots = [K for K, g in generals for _ in range(g)]
    if not zonotopes:
        return exact_value(polarization_mixed_volume(slots, tol))

    alphas = [a for _, a in zonotopes]
    measures = [projection_generating_measure(Z, a, tol) for Z, a in zonotopes]
    if any(len(m) == 0 for m in measures):
        return exact_value(0.0)
    _check_budget(math.prod(len(m) for m in measures), "atom tuples")
    acc = KahanAccumulator()
    for combo in itertools.product(*(m.atoms for m in measures)):
        subspaces = [s for s, _ in combo]
        b = bracket(subspaces, n - beta, tol.rank)
        if b == 0.0:
            continue
        complement = sum_subspace(subspaces, n).complement()
        inner = polarization_mixed_volume([project_body(K, complement, coordinates=True) for K in slots], tol)
        acc.add(b * math.prod(m for _, m in combo) * inner)
    coefficient = math.prod(kappa(a) for a in alphas) / multinomial([beta] + alphas)
    return exact_value(coefficient * acc.value)


def intrinsic_volume(body, j, evaluator=EXACT, samples=MC_SAMPLES, seed=MC_SEED, tol=DEFAULT_TOLERANCES):
    """
    Desc: V_j of any supported body: exact for zonotopes and the ball, exact or Monte Carlo
          for general polytopes.
    Parameters:
        body (Zonotope | VPolytope | UnitBall): The body.
        j (int): 0 <= j <= n.
        evaluator (str): "exact" or "montecarlo".
        samples (int): Kubota samples.
        seed (int): Root seed.
        tol (Tolerances): Tolerances.
    returns:
    (McEstimate): The intrinsic volume.
    """
    if isinstance(body, Zonotope):
        return exact_value(zonotope_intrinsic_volume(body, j, tol))
    if isinstance(body, UnitBall):
        return exact_value(ball_intrinsic_volume(body.ambient_dim, j))
    return polytope_intrinsic_volume(body, j, evaluator, samples, seed)


def body_volume(body, tol=DEFAULT_TOLERANCES):
    """n-volume without vertex enumeration for zonotopes."""
    if isinstance(body, Zonotope):
        return zonotope_intrinsic_volume(body, body.ambient_dim, tol)
    if isinstance(body, UnitBall):
        return kappa(body.ambient_dim)
    return volume(body)


def measure_atom_volumes(Z, j, tol=DEFAULT_TOLERANCES):
    """
    Desc: For every atom L of rho_(j)(Z, .) the projection volume V_j(Z|L), computed exactly as
          2^j * sum over j-subsets of |det| of the generators in L's coordinates.
    Parameters:
        Z (Zonotope): The zonotope.
        j (int): 1 <= j <= n.
        tol (Tolerances): Tolerances.
    returns:
    (list of (Subspace, float)): Atoms in measure order with their projection volumes.
    """
    measure = projection_generating_measure(Z, j, tol)
    result = []
    for subspace, _ in measure.atoms:
        projected = project_body(Z, subspace, coordinates=True)
        result.append((subspace, zonotope_intrinsic_volume(projected, j, tol)))
    return result

