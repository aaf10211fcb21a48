"""
Description: Numeric side of the stability results: inscribed radii r_m (exact where a closed
             form exists, otherwise an interval from the maximum-volume inscribed ellipsoid),
             subspace recovery from projection generating measures, containment slacks and the
             certificates that check each stability conclusion on a concrete instance.
Date created: October 19th, 2026
Date last modified: October 19th, 2026
"""

import logging
import math
from dataclasses import dataclass, field

import cvxpy as cp
import numpy as np
from scipy.optimize import linprog
from scipy.spatial.distance import pdist

from bodies import UnitBall, VPolytope, Zonotope, as_vpolytope, hrep, project_body, sphere_directions
from config import (DEFAULT_TOLERANCES, MC_SAMPLES, MC_SEED, MVIE_MAX_ITERATIONS, PROJECTION_SAMPLES,
                    STABILITY_DIRECTIONS)
from errors import ApplicabilityError, ContractError, ConvergenceError, DegenerateBodyError
from inequalities import CONJ_1_1, THM_1_3, check_reverse_af
from linalg import Subspace, bracket, full_space, orthonormalize, sample_grassmannian, sum_subspace
from oracle import MONTECARLO, root_seed
from util import log_binom, log_kappa, spawn_rngs
from zonoid import intrinsic_volume, measure_atom_volumes

logger = logging.getLogger(__name__)

THM_1_5 = "THM_1_5"
THM_5_1 = "THM_5_1"
PROP_4_5 = "PROP_4_5"
LEMMA_4_6 = "LEMMA_4_6"
THEOREM_IDS = (THM_1_5, THM_5_1, PROP_4_5, LEMMA_4_6)

EXACT_BOX = "exact_box"
MVIE = "mvie"
INRADIUS_LP = "inradius_lp"
DIAMETER = "diameter"
DIMENSION = "dimension"


@dataclass(frozen=True, eq=False)
class Ellipsoid:
    """center + sum_k t_k a_k d_k with |t| <= 1; directions are orthonormal columns."""

    center: np.ndarray
    directions: np.ndarray
    lengths: np.ndarray

    @property
    def semi_axes(self):
        return [(self.directions[:, k], float(self.lengths[k])) for k in range(len(self.lengths))]

    @property
    def dim(self):
        return len(self.lengths)

    def gauge(self, points):
        """Ellipsoid norm of points - center (inf for points off its affine hull)."""
        diff = np.atleast_2d(points) - self.center
        coords = diff @ self.directions
        off = np.linalg.norm(diff - coords @ self.directions.T, axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            values = np.linalg.norm(coords / self.lengths, axis=1)
        return np.where(off > 1e-9, np.inf, values)

    def to_json(self):
        return {"center": self.center.tolist(),
                "semi_axes": [{"direction": d.tolist(), "length": a} for d, a in self.semi_axes]}


@dataclass(frozen=True)
class RadiusEstimate:
    m: int
    lower: float
    upper: float
    method: str

    def __post_init__(self):
        if self.lower > self.upper:
            raise ContractError(f"radius interval [{self.lower}, {self.upper}] is empty")

    def to_json(self):
        return {"m": self.m, "lower": self.lower, "upper": self.upper, "method": self.method}


@dataclass(frozen=True)
class StabilityCertificate:
    theorem_id: str
    epsilon: object
    recovered_subspaces: list
    bracket_value: float
    bracket_bound: float
    containment_slacks: list
    holds: bool
    applicable: bool = True
    trivial_bound: bool = False
    containment_radii: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def to_json(self):
        return {"epsilon": self.epsilon,
                "recovered_subspaces": [s.to_json() for s in self.recovered_subspaces],
                "bracket_value": self.bracket_value, "bracket_bound": self.bracket_bound,
                "containment_slacks": self.containment_slacks, "theorem_id": self.theorem_id,
                "holds": self.holds, "applicable": self.applicable,
                "trivial_bound": self.trivial_bound, "containment_radii": self.containment_radii,
                "diagnostics": self.diagnostics}


@dataclass(frozen=True)
class BoundCheck:
    """Outcome of a single numeric lemma check: lhs <= rhs (or >=, per check_id)."""

    check_id: str
    lhs: float
    rhs: float
    holds: bool
    applicable: bool = True
    diagnostics: dict = field(default_factory=dict)

    def to_json(self):
        return {"check_id": self.check_id, "lhs": self.lhs, "rhs": self.rhs, "holds": self.holds,
                "applicable": self.applicable, "diagnostics": self.diagnostics}


def _polytope(body):
    if isinstance(body, UnitBall):
        raise ContractError("radius estimates take polytopes or zonotopes, not the symbolic ball")
    return as_vpolytope(body)


def _hull_body(P):
    """P in coordinates of its own affine hull, as a full-dimensional polytope of R^dim."""
    return VPolytope(P.hull_coordinates())


def inradius(P, tol=DEFAULT_TOLERANCES):
    """
    Desc: Largest r with a ball of radius r inside P: maximize r subject to <a_i, x> + r <= b_i.
    Parameters:
        P (VPolytope | Zonotope): Full-dimensional body.
        tol (Tolerances): Facet merge tolerance.
    returns:
    (float): The inradius r_n(P).
    raises:
    DegenerateBodyError: If P is not full-dimensional.
    """
    P = _polytope(P)
    if not P.is_full_dimensional:
        raise DegenerateBodyError(f"degenerate body: inradius needs dimension {P.ambient_dim}, got {P.dim}")
    n = P.ambient_dim
    if n == 1:
        return P.affine_volume() / 2.0
    H = hrep(P, tol.facet_merge)
    c = np.zeros(n + 1)
    c[-1] = -1.0
    a_ub = np.hstack([H.normals, np.ones((len(H), 1))])
    bounds = [(None, None)] * n + [(0, None)]
    result = linprog(c, A_ub=a_ub, b_ub=H.offsets, bounds=bounds, method="highs")
    if not result.success:
        raise ConvergenceError(f"inradius LP failed: {result.message}")
    return float(result.x[-1])


def _solve_mvie(H, tol):
    d = H.ambient_dim
    A, b = H.normals, H.offsets
    B = cp.Variable((d, d), PSD=True)
    c = cp.Variable(d)
    constraints = [cp.norm(A @ B, 2, axis=1) + A @ c <= b]
    problem = cp.Problem(cp.Maximize(cp.log_det(B)), constraints)
    try:
        problem.solve(solver=cp.CLARABEL, max_iter=MVIE_MAX_ITERATIONS,
                      tol_gap_abs=tol.mvie_convergence, tol_gap_rel=tol.mvie_convergence,
                      tol_feas=tol.mvie_convergence)
    except cp.SolverError as exc:
        raise ConvergenceError(f"ellipsoid solver failed: {exc}") from exc
    if B.value is None or problem.status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
        residual = None
        if B.value is not None:
            residual = float(np.max(np.linalg.norm(A @ B.value, axis=1) + A @ c.value - b))
        raise ConvergenceError(f"ellipsoid solver stopped with status {problem.status} "
                               f"after at most {MVIE_MAX_ITERATIONS} iterations", residual)
    logger.info("MVIE solved in R^%d with %d facets: %s", d, len(H), problem.status)
    return (B.value + B.value.T) / 2.0, np.asarray(c.value, dtype=float)


def max_inscribed_ellipsoid(P, tol=DEFAULT_TOLERANCES):
    """
    Desc: Maximum-volume inscribed ellipsoid {B u + c : |u| <= 1} of a full-dimensional
          polytope, found by maximizing log det B under |B a_i| + <a_i, c> <= b_i. The result
          is shrunk if needed so every facet constraint holds, and its n-fold dilate is checked
          to cover every vertex.
    Parameters:
        P (VPolytope | Zonotope): Full-dimensional body, n <= 6.
        tol (Tolerances): Solver and containment tolerances.
    returns:
    (Ellipsoid): Semi-axes sorted by decreasing length.
    raises:
    DegenerateBodyError: If P is not full-dimensional.
    ConvergenceError: If the solver fails or the containment checks do not pass.
    """
    P = _polytope(P)
    if not P.is_full_dimensional:
        raise DegenerateBodyError(f"degenerate body: MVIE needs dimension {P.ambient_dim}, got {P.dim}")
    n = P.ambient_dim
    if n > 6:
        raise ContractError(f"MVIE is supported for n <= 6, got n={n}")
    if n == 1:
        lo, hi = float(P.vertices.min()), float(P.vertices.max())
        return Ellipsoid(np.array([(lo + hi) / 2.0]), np.eye(1), np.array([(hi - lo) / 2.0]))
    H = hrep(P, tol.facet_merge)
    Bm, c = _solve_mvie(H, tol)
    lengths, directions = np.linalg.eigh(Bm)
    lengths = np.clip(lengths, 0.0, None)
    order = np.argsort(lengths)[::-1]
    lengths, directions = lengths[order], directions[:, order]

    room = H.offsets - H.normals @ c
    if np.any(room <= 0.0):
        raise ConvergenceError("ellipsoid center left the polytope", float(-room.min()))
    reach = np.linalg.norm(H.normals @ Bm, axis=1)
    shrink = float(np.min(room / np.maximum(reach, 1e-300)))
    if shrink < 1.0:
        if 1.0 - shrink > tol.mvie_feasibility * 100:
            logger.warning("MVIE shrunk by %.3e to restore containment", 1.0 - shrink)
        lengths = lengths * shrink
    ellipsoid = Ellipsoid(c, directions, lengths)
    gauge = ellipsoid.gauge(P.vertices)
    if np.any(gauge > n + tol.john):
        raise ConvergenceError("John containment failed: a vertex lies outside the n-fold dilate",
                               float(gauge.max() - n))
    return ellipsoid


def _box_half_widths(P, tol=1e-9):
    """Half-widths (descending) when P is an axis-aligned box of its own dimension, else None."""
    lo, hi = P.vertices.min(axis=0), P.vertices.max(axis=0)
    widths = hi - lo
    active = widths > tol
    d = int(active.sum())
    if d != P.dim or len(P.vertices) != 2 ** d:
        return None
    at_bounds = (np.abs(P.vertices - lo) <= tol) | (np.abs(P.vertices - hi) <= tol)
    if not np.all(at_bounds):
        return None
    corners = {tuple(np.isclose(v[active], hi[active], atol=tol)) for v in P.vertices}
    if len(corners) != 2 ** d:
        return None
    return np.sort(widths[active] / 2.0)[::-1]


def r_m_estimate(body, m, tol=DEFAULT_TOLERANCES):
    """
    Desc: r_m(K), the largest radius of an m-dimensional ball inside K, in the coordinates of
          the affine hull (dimension d): m > d gives 0, m = 1 half the diameter, m = d the
          smallest half-width of an axis-aligned box or else the inradius LP. For 1 < m < d the
          value is the interval [a_m, g * a_m] from the inscribed ellipsoid E, where g <= d is the
          largest gauge of a vertex in E (about sqrt(d) for symmetric bodies). Boxes take this
          path too: a tilted m-disc can be wider than the m-th half-width.
    Parameters:
        body (VPolytope | Zonotope): The body.
        m (int): 1 <= m <= n.
        tol (Tolerances): Tolerances.
    returns:
    (RadiusEstimate): Interval with the method used.
    """
    P = _polytope(body)
    n = P.ambient_dim
    if not 1 <= m <= n:
        raise ContractError(f"r_m needs 1 <= m <= {n}, got m={m}")
    d = P.dim
    if m > d:
        return RadiusEstimate(m, 0.0, 0.0, DIMENSION)
    if m == 1:
        half = float(pdist(P.vertices).max()) / 2.0 if len(P.vertices) > 1 else 0.0
        return RadiusEstimate(m, half, half, DIAMETER)
    if m == d:
        widths = _box_half_widths(P)
        if widths is not None:
            value = float(widths[-1])
            return RadiusEstimate(m, value, value, EXACT_BOX)
    hull_body = _hull_body(P)
    if m == d:
        value = inradius(hull_body, tol)
        return RadiusEstimate(m, value, value, INRADIUS_LP)
    ellipsoid = max_inscribed_ellipsoid(hull_body, tol)
    a_m = float(ellipsoid.lengths[m - 1])
    # the hull lies in center + g (E - center), g the largest vertex gauge (at most d by John)
    dilation = max(1.0, float(ellipsoid.gauge(hull_body.vertices).max()))
    return RadiusEstimate(m, a_m, dilation * a_m, MVIE)


def recover_subspaces(Zs, tol=DEFAULT_TOLERANCES):
    """
    Desc: For each (Z_i, alpha_i) the atom L of rho_(alpha_i)(Z_i, .) maximizing V_alpha_i(Z_i|L);
          ties go to the smallest projector key.
    Parameters:
        Zs (list of (Zonotope, int)): Zonotopes with multiplicities.
        tol (Tolerances): Tolerances.
    returns:
    (list of Subspace): One subspace per zonotope.
    raises:
    ContractError: If rank(Z_i) < alpha_i.
    """
    recovered = []
    for Z, alpha in Zs:
        if Z.dim < alpha:
            raise ContractError(f"rank deficiency: zonotope of rank {Z.dim} cannot recover a "
                                f"{alpha}-dimensional subspace")
        candidates = measure_atom_volumes(Z, alpha, tol)
        best = max(v for _, v in candidates)
        ties = [s for s, v in candidates if v >= best * (1.0 - 1e-12)]
        chosen = min(ties, key=lambda s: s.sort_key())
        logger.debug("recovered L of dim %d from %d atoms, projection volume %.6g", alpha,
                     len(candidates), best)
        recovered.append(chosen)
    return recovered


def projection_volume(body, L):
    """lambda_dim(L)(K|L), the volume of the projection measured inside L."""
    projected = project_body(_polytope(body), L, coordinates=True)
    return projected.affine_volume() if projected.dim == L.dim else 0.0


def _candidate_subspaces(body, dim, extra=(), samples=PROJECTION_SAMPLES, seed=MC_SEED):
    """Haar samples plus structured guesses: PCA frame, diameter line, facet hyperplanes, atoms."""
    P = _polytope(body)
    n = P.ambient_dim
    candidates = list(extra)
    if dim == n:
        return [full_space(n)]
    centered = P.vertices - P.vertices.mean(axis=0)
    if np.any(centered):
        _, _, vt = np.linalg.svd(centered, full_matrices=True)
        candidates.append(Subspace(vt[:dim].T))
    if dim == 1 and len(P.vertices) > 1:
        diffs = P.vertices[:, None, :] - P.vertices[None, :, :]
        i, j = np.unravel_index(np.argmax(np.linalg.norm(diffs, axis=2)), diffs.shape[:2])
        candidates.append(orthonormalize(diffs[i, j][None, :]))
    if dim == n - 1 and P.is_full_dimensional and n > 1:
        for normal in hrep(P).normals:
            candidates.append(orthonormalize(normal[None, :]).complement())
    if isinstance(body, Zonotope) and body.dim >= dim:
        candidates.extend(s for s, _ in measure_atom_volumes(body, dim))
    candidates.extend(sample_grassmannian(n, dim, rng) for rng in spawn_rngs(seed, samples))
    return candidates


def best_projection_subspace(body, dim, extra=(), samples=PROJECTION_SAMPLES, seed=MC_SEED):
    """
    Desc: Approximate maximizer of V_dim(K|L) over G(n, dim) among sampled and structured
          candidates.
    returns:
    (tuple): (Subspace, projection volume).
    """
    best, best_volume = None, -1.0
    for candidate in _candidate_subspaces(body, dim, extra, samples, seed):
        volume = projection_volume(body, candidate)
        if volume > best_volume:
            best, best_volume = candidate, volume
    return best, best_volume


def min_offset_containment(points, L):
    """
    Desc: Smallest rho with points - q inside L + rho B^n over all q: the radius of the smallest
          ball enclosing the points projected onto L^perp (second-order cone program).
    Parameters:
        points (np.ndarray): Points as rows.
        L (Subspace): The linear subspace.
    returns:
    (tuple): (q as np.ndarray, rho).
    """
    points = np.atleast_2d(points)
    complement = L.complement()
    if complement.dim == 0:
        return np.zeros(points.shape[1]), 0.0
    coords = points @ complement.basis
    if len(coords) == 1 or float(np.ptp(coords, axis=0).max()) <= 1e-12:
        return complement.basis @ coords[0], 0.0
    center = cp.Variable(complement.dim)
    radius = cp.Variable()
    problem = cp.Problem(cp.Minimize(radius), [cp.norm(coords - center[None, :], 2, axis=1) <= radius])
    try:
        problem.solve(solver=cp.CLARABEL)
    except cp.SolverError as exc:
        raise ConvergenceError(f"containment program failed: {exc}") from exc
    if center.value is None:
        raise ConvergenceError(f"containment program stopped with status {problem.status}")
    q = complement.basis @ np.asarray(center.value)
    rho = float(np.max(np.linalg.norm(coords - center.value[None, :], axis=1)))
    return q, rho


def zonotope_containment_excess(Z, L, directions):
    """
    Desc: max over sampled unit u of h(Z - c, u) - h((Z - c)|L, u) for the centered zonotope,
          a support-function estimate of sup_x dist(x, Z|L).
    Parameters:
        Z (Zonotope): The zonotope.
        L (Subspace): Subspace onto which Z is projected.
        directions (np.ndarray): Unit directions as rows.
    returns:
    (float): Nonnegative excess.
    """
    gens = Z.generators
    complement = L.complement()
    extra = (gens @ complement.projector()) if complement.dim else np.zeros((0, Z.ambient_dim))
    norms = np.linalg.norm(extra, axis=1)
    extra = extra[norms > 1e-12] / norms[norms > 1e-12, None]
    u = np.vstack([directions, extra]) if len(extra) else directions
    h = np.sum(np.abs(u @ gens.T), axis=1)
    h_projected = np.sum(np.abs((u @ L.projector()) @ gens.T), axis=1)
    return float(max(0.0, np.max(h - h_projected)))


def _not_applicable(theorem_id, epsilon, reason, subspaces=(), diagnostics=None):
    details = dict(diagnostics or {})
    details["reason"] = reason
    logger.info("%s not applicable: %s", theorem_id, reason)
    return StabilityCertificate(theorem_id, epsilon, list(subspaces), None, None, [],
                                holds=False, applicable=False, diagnostics=details)


def _contained(slacks, radii, tol):
    return all(s <= tol.holds * max(1.0, r) for s, r in zip(slacks, radii))


def _zonotope_entries(entries, start=0):
    for body, _ in entries[start:]:
        if not isinstance(body, Zonotope):
            raise ApplicabilityError(f"expected zonotopes, got {type(body).__name__}")
    return [(b, int(a)) for b, a in entries[start:]]


def check_stability(theorem_id, entries, samples=MC_SAMPLES, seed=MC_SEED, tol=DEFAULT_TOLERANCES):
    """
    Desc: Certificate for one stability statement: the tightness epsilon of the matching reverse
          inequality, recovered subspaces L_i, their bracket against the theorem's bound and the
          containment slacks (measured excess minus the theorem's radius).
    Parameters:
        theorem_id (str): THM_1_5, THM_5_1, PROP_4_5 or LEMMA_4_6.
        entries (list of (body, int)): Bodies with multiplicities; for THM_5_1 and PROP_4_5 the
                                       first body is the general one.
        samples (int): Monte Carlo samples for intrinsic volumes and candidate subspaces.
        seed (int): Root seed.
        tol (Tolerances): Tolerances.
    returns:
    (StabilityCertificate): Not-applicable certificates carry applicable=False, never holds=True.
    """
    if theorem_id not in THEOREM_IDS:
        raise ContractError(f"unknown theorem {theorem_id!r}; expected one of {THEOREM_IDS}")
    if theorem_id == THM_1_5:
        return _check_thm15(entries, samples, seed, tol)
    if theorem_id == LEMMA_4_6:
        return _check_lemma46(entries, samples, seed, tol)
    return _check_one_general(theorem_id, entries, samples, seed, tol)


def _check_thm15(entries, samples, seed, tol):
    zonotopes = _zonotope_entries(entries)
    n = zonotopes[0][0].ambient_dim
    report = check_reverse_af(entries, CONJ_1_1, samples=samples, seed=seed, tol=tol)
    if report.degenerate:
        return _not_applicable(THM_1_5, None, "mixed volume vanishes")
    epsilon = max(report.epsilon, 0.0)
    subspaces = recover_subspaces(zonotopes, tol)
    value = bracket(subspaces, tol=tol.rank) if sum(s.dim for s in subspaces) <= n else 0.0
    bound = 1.0 - n ** 10 * 2 ** (n / 2) * math.sqrt(epsilon)
    directions = sphere_directions(n, STABILITY_DIRECTIONS)
    radii, slacks, radius_estimates = [], [], []
    for (Z, alpha), L in zip(zonotopes, subspaces):
        r = r_m_estimate(Z, alpha, tol)
        radius = n ** 4.5 * 2 ** (n / 2) * r.upper * math.sqrt(epsilon)
        radii.append(radius)
        slacks.append(zonotope_containment_excess(Z, L, directions) - radius)
        radius_estimates.append(r.to_json())
    holds = value >= bound - tol.holds and _contained(slacks, radii, tol)
    return StabilityCertificate(THM_1_5, epsilon, subspaces, value, bound, slacks, holds,
                                trivial_bound=bound <= 0.0, containment_radii=radii,
                                diagnostics={"radii": radius_estimates, "lhs": report.lhs, "rhs": report.rhs})


def _general_subspace(K, alpha, zonotope_subspaces, n, samples, seed):
    extra = []
    spanned = sum_subspace(zonotope_subspaces, n) if zonotope_subspaces else None
    if spanned is not None and spanned.dim == n - alpha:
        extra.append(spanned.complement())
    count = min(samples, PROJECTION_SAMPLES)
    L, _ = best_projection_subspace(K, alpha, extra, count, seed)
    return L


def _check_one_general(theorem_id, entries, samples, seed, tol):
    K, alpha = entries[0][0], int(entries[0][1])
    if isinstance(K, UnitBall):
        raise ApplicabilityError(f"{theorem_id} needs a polytope as its first body")
    zonotopes = _zonotope_entries(entries, start=1)
    n = K.ambient_dim
    report = check_reverse_af(entries, THM_1_3, gamma=alpha, samples=samples, seed=seed, tol=tol)
    if report.degenerate:
        return _not_applicable(theorem_id, None, "mixed volume vanishes")
    epsilon = max(report.epsilon, 0.0)
    if theorem_id == THM_5_1:
        limit = float(n) ** -16 * 2.0 ** (-2 * n)
        if epsilon > limit:
            return _not_applicable(theorem_id, epsilon, f"epsilon {epsilon:.3e} outside [0, {limit:.3e}]")

    zonotope_subspaces = recover_subspaces(zonotopes, tol)
    if isinstance(K, Zonotope):
        L1 = recover_subspaces([(K, alpha)], tol)[0]
    else:
        L1 = _general_subspace(K, alpha, zonotope_subspaces, n, samples, seed)
    subspaces = [L1] + zonotope_subspaces
    value = bracket(subspaces, tol=tol.rank) if sum(s.dim for s in subspaces) <= n else 0.0

    r1 = r_m_estimate(K, alpha, tol)
    vertices = as_vpolytope(K).vertices
    _, excess = min_offset_containment(vertices, L1)
    radius = n ** 3.5 * 2 ** ((n + 2) / 2) * r1.upper * math.sqrt(epsilon)
    radii, slacks = [radius], [excess - radius]
    diagnostics = {"lhs": report.lhs, "rhs": report.rhs, "radii": [r1.to_json()]}

    if theorem_id == PROP_4_5:
        bound = 0.0
        projected = r_m_estimate(project_body(K, L1, coordinates=True), alpha, tol)
        radius_ok = projected.upper >= r1.lower / n - tol.holds
        diagnostics["projected_radius"] = projected.to_json()
        holds = value >= bound - tol.holds and _contained(slacks, radii, tol) and radius_ok
    else:
        bound = 1.0 - n ** 13 * 2.0 ** (2 * n + 4) * epsilon ** 0.125
        directions = sphere_directions(n, STABILITY_DIRECTIONS)
        for (Z, a), L in zip(zonotopes, zonotope_subspaces):
            r = r_m_estimate(Z, a, tol)
            rz = n ** 8 * 2.0 ** (2 * n + 4) * r.upper * epsilon ** 0.125
            radii.append(rz)
            slacks.append(zonotope_containment_excess(Z, L, directions) - rz)
            diagnostics["radii"].append(r.to_json())
        holds = value >= bound - tol.holds and _contained(slacks, radii, tol)
    return StabilityCertificate(theorem_id, epsilon, subspaces, value, bound, slacks, holds,
                                trivial_bound=bound <= 0.0, containment_radii=radii,
                                diagnostics=diagnostics)


def _check_lemma46(entries, samples, seed, tol):
    n = entries[0][0].ambient_dim
    if any(isinstance(b, UnitBall) for b, _ in entries):
        raise ApplicabilityError("LEMMA_4_6 takes polytopes and zonotopes only")
    report = check_reverse_af(entries, CONJ_1_1, samples=samples, seed=seed, tol=tol)
    if report.degenerate:
        return _not_applicable(LEMMA_4_6, None, "mixed volume vanishes")
    tightness = max(report.epsilon, 0.0)
    subspaces, ratios, radii = [], [], []
    for body, alpha in entries:
        alpha = int(alpha)
        if isinstance(body, Zonotope):
            L = recover_subspaces([(body, alpha)], tol)[0]
        else:
            L, _ = best_projection_subspace(body, alpha, (), min(samples, PROJECTION_SAMPLES), seed)
        subspaces.append(L)
        r = r_m_estimate(body, alpha, tol)
        projected = r_m_estimate(project_body(body, L, coordinates=True), alpha, tol)
        if r.lower <= 0.0:
            return _not_applicable(LEMMA_4_6, tightness, "a body has r_alpha = 0", subspaces)
        if projected.lower < r.upper / n:
            return _not_applicable(LEMMA_4_6, tightness,
                                   "cannot verify r_alpha(K|L) >= r_alpha(K)/n from the radius bounds",
                                   subspaces)
        _, excess = min_offset_containment(as_vpolytope(body).vertices, L)
        ratios.append(excess / r.lower)
        radii.append(r.to_json())
    epsilon = max([tightness] + ratios)
    value = bracket(subspaces, tol=tol.rank) if sum(s.dim for s in subspaces) <= n else 0.0
    bound = 1.0 - n ** 5 * epsilon
    holds = value >= bound - tol.holds
    return StabilityCertificate(LEMMA_4_6, epsilon, subspaces, value, bound, [], holds,
                                trivial_bound=bound <= 0.0,
                                diagnostics={"tightness": tightness, "containment_ratios": ratios,
                                             "radii": radii})


def projstab_check(K, beta, samples=MC_SAMPLES, seed=MC_SEED, tol=DEFAULT_TOLERANCES):
    """
    Desc: V_beta(K) >= (1 + r_(beta+1)^2 / (2^(n+2) n^5 r_beta^2)) * max_L V_beta(K|L); the maximum
          runs over Haar samples and structured candidates, the radii use the conservative ends.
    Parameters:
        K (VPolytope | Zonotope): The body, dim K >= beta.
        beta (int): 1 <= beta <= n.
        samples (int): Kubota samples for V_beta(K).
        seed (int): Root seed.
        tol (Tolerances): Tolerances.
    returns:
    (BoundCheck): lhs = V_beta(K), rhs = factor * max projection volume.
    """
    n = K.ambient_dim
    if not 1 <= beta <= n:
        raise ContractError(f"projstab needs 1 <= beta <= {n}, got {beta}")
    if K.dim < beta:
        raise ContractError(f"projstab needs dim K >= beta, got dim {K.dim} < {beta}")
    lhs = intrinsic_volume(K, beta, MONTECARLO, samples, seed, tol)
    r_beta = r_m_estimate(K, beta, tol)
    r_next = r_m_estimate(K, beta + 1, tol) if beta < n else RadiusEstimate(beta + 1, 0.0, 0.0, DIMENSION)
    factor = 1.0
    if r_beta.upper > 0.0:
        factor += r_next.lower ** 2 / (2.0 ** (n + 2) * n ** 5 * r_beta.upper ** 2)
    maximizer, max_volume = best_projection_subspace(K, beta, (), PROJECTION_SAMPLES, root_seed(seed))
    rhs = factor * max_volume
    holds = lhs.value >= rhs - 3.0 * lhs.stderr - tol.holds * max(1.0, rhs)
    return BoundCheck("projstab", lhs.value, rhs, holds, diagnostics={
        "lhs_stderr": lhs.stderr, "factor": factor, "max_projection": max_volume,
        "maximizer": maximizer.to_json(), "r_beta": r_beta.to_json(), "r_beta_plus_1": r_next.to_json(),
        "samples": lhs.samples})


def ball_intrinsic_ratio(n, j):
    """
    Desc: V_j(B^n) / kappa_j = binom(n,j) kappa_n / (kappa_j kappa_(n-j)) against 2^(n/2), all in
          log-Gamma arithmetic.
    Parameters:
        n (int): Dimension.
        j (int): 1 <= j <= n.
    returns:
    (tuple): (ratio, bound, holds).
    """
    if not 1 <= j <= n:
        raise ContractError(f"ball_intrinsic_ratio needs 1 <= j <= n, got n={n}, j={j}")
    log_ratio = log_binom(n, j) + log_kappa(n) - log_kappa(j) - log_kappa(n - j)
    log_bound = 0.5 * n * math.log(2.0)
    return math.exp(log_ratio), math.exp(log_bound), log_ratio <= log_bound


def cm_intrinsic_check(M, A, alpha, eta=None, offset=None, samples=MC_SAMPLES, seed=MC_SEED,
                       tol=DEFAULT_TOLERANCES):
    """
    Desc: V_alpha(M) <= (1 + n 2^(n+1) eta) V_alpha(M|A) once M lies within eta r_alpha(M) of the
          flat offset + A, eta < 1/(alpha n) and r_alpha(M|A) >= r_alpha(M)/n are verified.
    Parameters:
        M (VPolytope | Zonotope): The body.
        A (Subspace): Direction space of the flat.
        alpha (int): 1 <= alpha <= n; the lemma needs dim A = alpha.
        eta (float): Closeness parameter; the smallest admissible value when None.
        offset (array-like): A point of the flat, the origin by default.
        samples (int): Kubota samples for polytopes.
        seed (int): Root seed.
        tol (Tolerances): Tolerances.
    returns:
    (BoundCheck): Not applicable when a hypothesis cannot be verified.
    """
    n = M.ambient_dim
    if not 1 <= alpha <= n:
        raise ContractError(f"cm_intrinsic_check needs 1 <= alpha <= {n}, got {alpha}")
    if A.dim != alpha:
        logger.info("lemma53 not applicable: dim A = %d differs from alpha = %d", A.dim, alpha)
        return BoundCheck("lemma53", None, None, False, False,
                          {"reason": f"A must be {alpha}-dimensional, got dim A = {A.dim}"})
    shift = np.zeros(n) if offset is None else np.asarray(offset, dtype=float)
    vertices = _polytope(M).vertices - shift
    excess = float(np.max(np.linalg.norm(vertices - A.project(vertices), axis=1)))
    r_M = r_m_estimate(M, alpha, tol)
    projected = project_body(M, A, coordinates=True)
    r_MA = r_m_estimate(projected, alpha, tol)
    diagnostics = {"excess": excess, "r_alpha": r_M.to_json(), "r_alpha_projected": r_MA.to_json()}
    if eta is None:
        if r_M.lower <= 0.0:
            return BoundCheck("lemma53", None, None, False, False,
                              dict(diagnostics, reason="r_alpha(M) is 0"))
        eta = excess / r_M.lower
    diagnostics["eta"] = eta
    reasons = []
    if excess > eta * r_M.lower + tol.slack:
        reasons.append("M is not within eta r_alpha(M) of the flat")
    if eta >= 1.0 / (alpha * n):
        reasons.append(f"eta {eta:.3e} is not below 1/(alpha n) = {1.0 / (alpha * n):.3e}")
    if r_MA.lower < r_M.upper / n:
        reasons.append("cannot verify r_alpha(M|A) >= r_alpha(M)/n from the radius bounds")
    if reasons:
        logger.info("lemma53 not applicable: %s", "; ".join(reasons))
        return BoundCheck("lemma53", None, None, False, False,
                          dict(diagnostics, reason="; ".join(reasons)))
    lhs = intrinsic_volume(M, alpha, MONTECARLO, samples, seed, tol)
    base = intrinsic_volume(projected, alpha, MONTECARLO, samples, seed, tol)
    factor = 1.0 + n * 2.0 ** (n + 1) * eta
    rhs = factor * base.value
    noise = 3.0 * math.hypot(lhs.stderr, factor * base.stderr)
    holds = lhs.value <= rhs + tol.holds * max(1.0, rhs) + noise
    diagnostics.update({"factor": factor, "lhs_stderr": lhs.stderr, "rhs_stderr": factor * base.stderr})
    return BoundCheck("lemma53", lhs.value, rhs, holds, True, diagnostics)
