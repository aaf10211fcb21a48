"""
Description: Both sides of the Alexandrov-Fenchel product bound and of the reverse inequalities
             (the general reverse bound, its proven cases with zonoid bodies, and the zonotope
             bound with ball copies), the tightness epsilon = rhs/lhs - 1 and equality diagnostics
             of the linear hulls.
Date created: October 19th, 2026
Date last modified: October 19th, 2026
"""

import logging
import math
from dataclasses import dataclass, field

from bodies import UnitBall, VPolytope, Zonotope, is_zonoid
from config import DEFAULT_TOLERANCES, MC_SAMPLES, MC_SEED
from errors import ApplicabilityError, ContractError
from linalg import bracket
from oracle import MONTECARLO, McEstimate, exact_value
from util import kappa, multinomial
from zonoid import (body_volume, intrinsic_volume, mixed_volume, mixed_volume_body_ball_zonotopes,
                    mixed_volume_zonotopes_ball)

logger = logging.getLogger(__name__)

AF_LOWER = "AF_LOWER"
CONJ_1_1 = "CONJ_1_1"
THM_1_3 = "THM_1_3"
THM_1_4 = "THM_1_4"
ZONOLATE = "ZONOLATE"
REVERSE_IDS = (CONJ_1_1, THM_1_3, THM_1_4, ZONOLATE)
INEQUALITY_IDS = (AF_LOWER,) + REVERSE_IDS


@dataclass(frozen=True)
class InequalityReport:
    inequality_id: str
    lhs: float
    rhs: float
    epsilon: object
    holds: bool
    equality_within: bool
    diagnostics: dict = field(default_factory=dict)

    @property
    def degenerate(self):
        return bool(self.diagnostics.get("degenerate", False))

    @property
    def proven(self):
        return bool(self.diagnostics.get("proven", False))

    def to_json(self):
        return {"inequality_id": self.inequality_id, "lhs": self.lhs, "rhs": self.rhs,
                "epsilon": self.epsilon, "holds": self.holds,
                "equality_within": self.equality_within, "diagnostics": self.diagnostics}


def _check_entries(entries):
    if not entries:
        raise ContractError("no bodies given")
    n = entries[0][0].ambient_dim
    for body, mult in entries:
        if body.ambient_dim != n:
            raise ContractError(f"bodies live in different dimensions ({body.ambient_dim} and {n})")
        if int(mult) < 1:
            raise ContractError(f"multiplicities must be >= 1, got {mult}")
    total = sum(int(m) for _, m in entries)
    if total != n:
        raise ContractError(f"multiplicities sum to {total}, expected n={n}")
    return n


def _product(estimates):
    """Product of estimates; stderr by first-order propagation of the factors' errors."""
    value = math.prod(e.value for e in estimates)
    variance = 0.0
    for i, e in enumerate(estimates):
        if e.stderr:
            others = math.prod(f.value for k, f in enumerate(estimates) if k != i)
            variance += (e.stderr * others) ** 2
    samples = max((e.samples for e in estimates), default=0)
    seed = next((e.seed for e in estimates if not e.exact), None)
    return McEstimate(value, math.sqrt(variance), samples, seed)


def _scaled(estimate, factor):
    return McEstimate(factor * estimate.value, abs(factor) * estimate.stderr,
                      estimate.samples, estimate.seed)


def equality_diagnostics(entries, tol=DEFAULT_TOLERANCES):
    """
    Desc: Dimensions of the bodies, brackets of their linear hulls (every pair, and the whole
          tuple when the dimensions fit into R^n) and whether dim K_i = alpha_i.
    Parameters:
        entries (list of (body, int)): Bodies with multiplicities.
        tol (Tolerances): Rank tolerance for the brackets.
    returns:
    (dict): JSON-ready diagnostics record.
    """
    bodies = [b for b, _ in entries]
    alphas = [int(a) for _, a in entries]
    n = bodies[0].ambient_dim
    hulls = [b.linear_hull() for b in bodies]
    dims = [h.dim for h in hulls]
    m = len(bodies)
    pairwise = [[None] * m for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            if dims[i] + dims[j] <= n:
                value = bracket([hulls[i], hulls[j]], tol=tol.rank)
            else:
                value = 0.0
            pairwise[i][j] = pairwise[j][i] = value
    full = bracket(hulls, tol=tol.rank) if sum(dims) <= n else None
    return {"dims": dims, "multiplicities": alphas, "pairwise_brackets": pairwise, "bracket": full,
            "dims_match_multiplicities": dims == alphas,
            "outside_equality_hypotheses": any(d < a for d, a in zip(dims, alphas))}


def _conjecture_proven(entries, n):
    general = [mult for body, mult in entries if not is_zonoid(body)]
    if n <= 2 or len(general) <= 1:
        return True
    return len(general) == 2 and min(general) == 1


def _report(inequality_id, lhs, rhs, entries, tol, proven, extra=None):
    degenerate = lhs.value <= 0.0 or lhs.value <= tol.degenerate * abs(rhs.value)
    epsilon = None if degenerate else rhs.value / lhs.value - 1.0
    noise = 3.0 * math.hypot(lhs.stderr, rhs.stderr)
    holds = lhs.value <= rhs.value + tol.holds * max(1.0, abs(rhs.value)) + noise
    equality = epsilon is not None and abs(epsilon) < tol.equality
    diagnostics = equality_diagnostics(entries, tol)
    diagnostics.update({"degenerate": degenerate, "proven": proven,
                        "lhs_stderr": lhs.stderr, "rhs_stderr": rhs.stderr})
    if not (lhs.exact and rhs.exact):
        diagnostics["seed"] = lhs.seed if not lhs.exact else rhs.seed
        diagnostics["samples"] = max(lhs.samples, rhs.samples)
    if extra:
        diagnostics.update(extra)
    if proven and not holds:
        logger.warning("%s violated on a proven instance: lhs=%.12g rhs=%.12g", inequality_id,
                       lhs.value, rhs.value)
    return InequalityReport(inequality_id, lhs.value, rhs.value, epsilon, holds, equality, diagnostics)


def check_af_lower(entries, evaluator=MONTECARLO, samples=MC_SAMPLES, seed=MC_SEED, tol=DEFAULT_TOLERANCES):
    """
    Desc: Alexandrov-Fenchel product bound V(K_1[a_1],...,K_m[a_m]) >= prod V_n(K_i)^(a_i/n).
          The report's lhs is the product, its rhs the mixed volume.
    Parameters:
        entries (list of (body, int)): Bodies with multiplicities summing to n.
        evaluator (str): Evaluator for the mixed volume's inner projections.
        samples (int): Monte Carlo samples, when needed.
        seed (int): Root seed.
        tol (Tolerances): Tolerances.
    returns:
    (InequalityReport): holds when rhs >= lhs - tol.
    """
    n = _check_entries(entries)
    lhs = math.prod(body_volume(body, tol) ** (int(a) / n) for body, a in entries)
    rhs = mixed_volume(entries, evaluator, samples, seed, tol)
    return _report(AF_LOWER, exact_value(lhs), rhs, entries, tol, proven=True)


def _split_thm13(entries, gamma, beta):
    """Designated body K with multiplicity gamma, ball copies, and the zonotopes."""
    generals = [(b, a) for b, a in entries if isinstance(b, VPolytope)]
    zonotopes = [(b, int(a)) for b, a in entries if isinstance(b, Zonotope)]
    balls = sum(int(a) for b, a in entries if isinstance(b, UnitBall))
    if len(generals) > 1:
        raise ApplicabilityError("THM_1_3 allows at most one body that is not a zonotope, "
                                 f"got {len(generals)}")
    if generals:
        K, g = generals[0][0], int(generals[0][1])
    elif gamma:
        designated = next((i for i, (_, a) in enumerate(zonotopes) if a == gamma), None)
        if designated is None:
            raise ApplicabilityError(f"no body with multiplicity gamma={gamma} to play the role of K")
        K, g = zonotopes.pop(designated)
    else:
        K, g = None, 0
    if gamma is not None and gamma != g:
        raise ApplicabilityError(f"gamma={gamma} but the designated body K has multiplicity {g}")
    if beta is not None and beta - g != balls:
        raise ApplicabilityError(f"beta={beta} needs {beta - g} ball copies, the input has {balls}")
    return K, g, balls, zonotopes


def check_reverse_af(entries, which, gamma=None, beta=None, evaluator=MONTECARLO, samples=MC_SAMPLES,
                     seed=MC_SEED, tol=DEFAULT_TOLERANCES):
    """
    Desc: Reverse Alexandrov-Fenchel bounds, lhs = multinomial * mixed volume,
          rhs = product of intrinsic volumes (times kappa_(beta-gamma) for THM_1_3 and
          kappa_beta for ZONOLATE).
    Parameters:
        entries (list of (body, int)): Bodies with multiplicities summing to n, in theorem order.
        which (str): CONJ_1_1, THM_1_3, THM_1_4 or ZONOLATE.
        gamma (int): Multiplicity of K for THM_1_3 (checked against the input when given).
        beta (int): gamma plus ball copies for THM_1_3 (checked when given).
        evaluator (str): "exact" refuses Monte Carlo intrinsic volumes.
        samples (int): Monte Carlo samples.
        seed (int): Root seed.
        tol (Tolerances): Tolerances.
    returns:
    (InequalityReport): The report.
    raises:
    ApplicabilityError: When the chosen theorem's structural hypotheses do not hold.
    """
    n = _check_entries(entries)
    if which not in REVERSE_IDS:
        raise ContractError(f"unknown reverse inequality {which!r}; expected one of {REVERSE_IDS}")

    def v(body, j):
        return intrinsic_volume(body, j, evaluator, samples, seed, tol)

    if which == THM_1_3:
        K, g, balls, zonotopes = _split_thm13(entries, gamma, beta)
        alphas = [a for _, a in zonotopes]
        mv = mixed_volume_body_ball_zonotopes(K, g, balls, zonotopes, evaluator, samples, seed, tol)
        lhs = _scaled(mv, multinomial([g, balls] + alphas))
        factors = [exact_value(kappa(balls))] + [v(Z, a) for Z, a in zonotopes]
        if K is not None:
            factors.append(v(K, g))
        extra = {"gamma": g, "beta": g + balls}
        return _report(THM_1_3, lhs, _product(factors), entries, tol, proven=True, extra=extra)

    if which == ZONOLATE:
        if any(isinstance(b, VPolytope) for b, _ in entries):
            raise ApplicabilityError("ZONOLATE takes zonotopes and unit-ball copies only")
        zonotopes = [(b, int(a)) for b, a in entries if isinstance(b, Zonotope)]
        balls = sum(int(a) for b, a in entries if isinstance(b, UnitBall))
        alphas = [a for _, a in zonotopes]
        mv = mixed_volume_zonotopes_ball(zonotopes, balls, tol)
        lhs = exact_value(multinomial([balls] + alphas) * mv)
        factors = [exact_value(kappa(balls))] + [v(Z, a) for Z, a in zonotopes]
        return _report(ZONOLATE, lhs, _product(factors), entries, tol, proven=True, extra={"beta": balls})

    if which == THM_1_4:
        if len(entries) < 2:
            raise ApplicabilityError("THM_1_4 needs at least two bodies")
        if int(entries[0][1]) != 1:
            raise ApplicabilityError(f"THM_1_4 needs alpha_1 = 1, got {entries[0][1]}")
        if not all(is_zonoid(b) for b, _ in entries[2:]):
            raise ApplicabilityError("THM_1_4 needs K_3, ..., K_m to be zonoids")
        proven = True
    else:
        proven = _conjecture_proven(entries, n)

    alphas = [int(a) for _, a in entries]
    mv = mixed_volume(entries, evaluator, samples, seed, tol)
    lhs = _scaled(mv, multinomial(alphas))
    rhs = _product([v(body, a) for body, a in entries])
    return _report(which, lhs, rhs, entries, tol, proven=proven)


def check(entries, inequality_id, gamma=None, beta=None, evaluator=MONTECARLO, samples=MC_SAMPLES,
          seed=MC_SEED, tol=DEFAULT_TOLERANCES):
    """Dispatches to check_af_lower or check_reverse_af by inequality id."""
    if inequality_id == AF_LOWER:
        return check_af_lower(entries, evaluator, samples, seed, tol)
    return check_reverse_af(entries, inequality_id, gamma, beta, evaluator, samples, seed, tol)
