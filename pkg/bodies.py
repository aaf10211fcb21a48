"""
Description: Convex bodies handled by zonovol. `Zonotope` keeps its generator list
             (Z = offset + sum [-w_i, w_i]); `VPolytope` keeps an irredundant vertex list;
             `HRep` is the facet description of a full-dimensional polytope. Hulls and
             volumes come from Qhull through scipy.spatial.
Date created: October 19th, 2026
Date last modified: October 19th, 2026
"""

import itertools
import logging
from functools import cached_property

import numpy as np
from scipy.spatial import ConvexHull, QhullError, cKDTree
from scipy.stats import norm, qmc

from config import DEFAULT_TOLERANCES, generator_guard
from errors import BudgetError, ContractError, DegenerateBodyError
from linalg import as_matrix, as_vector, full_space, numerical_rank, orthonormalize, trivial_subspace

logger = logging.getLogger(__name__)


def _hull(points):
    """Qhull on points of dimension >= 2; joggles once when the input is nearly flat."""
    try:
        return ConvexHull(points)
    except QhullError:
        logger.debug("qhull failed on %d points, retrying with joggled input", len(points))
        return ConvexHull(points, qhull_options="QJ")


def _dedup(points, tol):
    """Drops points within `tol` of an earlier point, keeping first occurrences in order."""
    if len(points) < 2:
        return points
    tree = cKDTree(points)
    keep = np.ones(len(points), dtype=bool)
    for i, j in sorted(tree.query_pairs(tol)):
        if keep[i]:
            keep[j] = False
    return points[keep]


class Zonotope:
    def __init__(self, generators, offset=None, ambient_dim=None):
        """
        Desc: Zonotope Z = offset + [-w_1, w_1] + ... + [-w_N, w_N]. Zero generators are dropped.
              Its generating measure has atoms +-w_i/|w_i| with mass |w_i|/2 each.
        Parameters:
            generators (array-like): N vectors w_i as rows (N may be 0).
            offset (array-like): Translation, defaults to the origin.
            ambient_dim (int): n, needed only when there are no generators and no offset.
        """
        if offset is not None:
            offset = as_vector(offset)
            ambient_dim = offset.shape[0] if ambient_dim is None else ambient_dim
        gens = as_matrix(generators, ambient_dim)
        n = gens.shape[1] if gens.shape[0] else ambient_dim
        if n is None or n < 1:
            raise ContractError("zonotope needs an ambient dimension n >= 1")
        gens = gens[np.linalg.norm(gens, axis=1) > 0.0] if gens.shape[0] else np.zeros((0, n))
        self.generators = gens
        self.generators.setflags(write=False)
        self.offset = as_vector(offset, n) if offset is not None else np.zeros(n)
        self.offset.setflags(write=False)

    @property
    def ambient_dim(self):
        return self.generators.shape[1]

    @property
    def count(self):
        return self.generators.shape[0]

    @cached_property
    def dim(self):
        return numerical_rank(self.generators) if self.count else 0

    def linear_hull(self):
        if self.count == 0:
            return trivial_subspace(self.ambient_dim)
        return orthonormalize(self.generators)

    def support(self, u):
        u = as_vector(u, self.ambient_dim)
        return float(self.offset @ u + np.sum(np.abs(self.generators @ u)))

    def translated(self, shift):
        return Zonotope(self.generators, self.offset + as_vector(shift, self.ambient_dim))

    def transformed(self, matrix, shift=None):
        """Image under x -> matrix @ x + shift."""
        matrix = np.asarray(matrix, dtype=float)
        offset = matrix @ self.offset
        if shift is not None:
            offset = offset + as_vector(shift)
        return Zonotope(self.generators @ matrix.T, offset, ambient_dim=matrix.shape[0])

    def scaled(self, factor):
        return Zonotope(self.generators * factor, self.offset * factor)

    def centered(self):
        return Zonotope(self.generators, ambient_dim=self.ambient_dim)

    def __repr__(self):
        return f"Zonotope(n={self.ambient_dim}, generators={self.count})"


class VPolytope:
    def __init__(self, points, ambient_dim=None, tol=DEFAULT_TOLERANCES.dedup):
        """
        Desc: Convex hull of finitely many points; only the extreme points are stored.
        Parameters:
            points (array-like): Points as rows, at least one.
            ambient_dim (int): Optional check of the row length.
            tol (float): Absolute deduplication tolerance.
        """
        pts = as_matrix(points, ambient_dim)
        if pts.shape[0] == 0:
            raise ContractError("a polytope needs at least one point")
        pts = _dedup(pts, tol)
        self.center = pts.mean(axis=0)
        self.hull_subspace = orthonormalize(pts - self.center, ambient_dim=pts.shape[1])
        coords = self.hull_subspace.coordinates(pts - self.center)
        d = self.hull_subspace.dim
        if d == 0:
            keep = np.array([0])
        elif d == 1:
            keep = np.unique([np.argmin(coords[:, 0]), np.argmax(coords[:, 0])])
        else:
            keep = np.sort(_hull(coords).vertices)
        self.vertices = pts[keep]
        self.vertices.setflags(write=False)

    @property
    def ambient_dim(self):
        return self.vertices.shape[1]

    @property
    def dim(self):
        return self.hull_subspace.dim

    @property
    def is_full_dimensional(self):
        return self.dim == self.ambient_dim

    def linear_hull(self):
        return self.hull_subspace

    def hull_coordinates(self):
        """Vertices in an orthonormal frame of the affine hull (shape (m, dim))."""
        return self.hull_subspace.coordinates(self.vertices - self.center)

    @cached_property
    def _hull(self):
        if self.dim < 2:
            return None
        return _hull(self.hull_coordinates())

    def affine_volume(self):
        """dim-dimensional Lebesgue measure inside the affine hull (1 for a point)."""
        if self.dim == 0:
            return 1.0
        coords = self.hull_coordinates()
        if self.dim == 1:
            return float(coords[:, 0].max() - coords[:, 0].min())
        return float(self._hull.volume)

    def support(self, u):
        u = as_vector(u, self.ambient_dim)
        return float(np.max(self.vertices @ u))

    def translated(self, shift):
        return VPolytope(self.vertices + as_vector(shift, self.ambient_dim))

    def transformed(self, matrix, shift=None):
        matrix = np.asarray(matrix, dtype=float)
        pts = self.vertices @ matrix.T
        if shift is not None:
            pts = pts + as_vector(shift)
        return VPolytope(pts)

    def scaled(self, factor):
        return VPolytope(self.vertices * factor)

    def __repr__(self):
        return f"VPolytope(n={self.ambient_dim}, vertices={len(self.vertices)}, dim={self.dim})"


class HRep:
    def __init__(self, normals, offsets):
        """
        Desc: Facet description {x : <a_i, x> <= b_i} with unit normals a_i.
        Parameters:
            normals (array-like): Unit normals as rows.
            offsets (array-like): Right-hand sides b_i.
        """
        self.normals = np.asarray(normals, dtype=float)
        self.offsets = np.asarray(offsets, dtype=float).reshape(-1)
        if self.normals.shape[0] != self.offsets.shape[0]:
            raise ContractError("normals and offsets differ in length")
        if not np.allclose(np.linalg.norm(self.normals, axis=1), 1.0, atol=1e-9):
            raise ContractError("facet normals must be unit vectors")

    @property
    def ambient_dim(self):
        return self.normals.shape[1]

    def __len__(self):
        return self.normals.shape[0]

    def slacks(self, points):
        """b_i - <a_i, x> for every point (rows) and facet (columns)."""
        return self.offsets[None, :] - np.atleast_2d(points) @ self.normals.T

    def contains(self, points, tol=1e-8):
        return bool(np.all(self.slacks(points) >= -tol))

    def vertex_enumeration(self, tol=1e-7):
        """
        Desc: Brute-force vertices: every n-subset of facets with an invertible system whose
              solution is feasible. Intended for small facet counts only.
        returns:
        (np.ndarray): Vertices as rows, deduplicated.
        """
        n = self.ambient_dim
        found = []
        for subset in itertools.combinations(range(len(self)), n):
            a = self.normals[list(subset)]
            if abs(np.linalg.det(a)) < 1e-12:
                continue
            x = np.linalg.solve(a, self.offsets[list(subset)])
            if self.contains(x, tol):
                found.append(x)
        return _dedup(np.array(found), tol)


def hrep(P, tol=DEFAULT_TOLERANCES.facet_merge):
    """
    Desc: Irredundant facet description of a full-dimensional polytope. Qhull's triangulated
          facets are merged when their normals and offsets agree within `tol`.
    Parameters:
        P (VPolytope): Full-dimensional polytope.
        tol (float): Merge tolerance for coplanar facets.
    returns:
    (HRep): One row per facet.
    raises:
    DegenerateBodyError: If P is not full-dimensional.
    """
    if not P.is_full_dimensional:
        raise DegenerateBodyError(f"degenerate body: dimension {P.dim} in R^{P.ambient_dim}")
    n = P.ambient_dim
    if n == 1:
        lo, hi = float(P.vertices.min()), float(P.vertices.max())
        return HRep([[1.0], [-1.0]], [hi, -lo])
    equations = _hull(P.vertices).equations
    normals, offsets = [], []
    for eq in equations:
        a = eq[:-1] / np.linalg.norm(eq[:-1])
        b = -eq[-1] / np.linalg.norm(eq[:-1])
        duplicate = any(np.linalg.norm(a - a0) < tol and abs(b - b0) < tol * max(1.0, abs(b0))
                        for a0, b0 in zip(normals, offsets))
        if not duplicate:
            normals.append(a)
            offsets.append(b)
    return HRep(np.array(normals), np.array(offsets))


def volume(P):
    """
    Desc: n-dimensional Lebesgue measure of a polytope (0 if it is lower-dimensional).
    Parameters:
        P (VPolytope | Zonotope): The body.
    returns:
    (float): Volume.
    """
    if isinstance(P, Zonotope):
        P = zonotope_to_vpolytope(P)
    if not P.is_full_dimensional:
        return 0.0
    return P.affine_volume()


def support_function(body, u):
    """
    Desc: h(K, u) = max <x, u> over K; for a zonotope <offset, u> + sum |<w_i, u>|.
    Parameters:
        body (Zonotope | VPolytope): The body.
        u (array-like): Direction.
    returns:
    (float): Support value.
    """
    return body.support(u)


def zonotope_to_vpolytope(Z):
    """
    Desc: Vertex description of a zonotope from all sign patterns sum eps_i w_i.
    Parameters:
        Z (Zonotope): Zonotope with at most 20 generators.
    returns:
    (VPolytope): The same body.
    raises:
    BudgetError: If Z has too many generators.
    """
    guard = generator_guard()
    if Z.count > guard:
        raise BudgetError(f"too many generators: {Z.count} > {guard} for vertex enumeration")
    if Z.count == 0:
        return VPolytope(Z.offset[None, :])
    signs = np.array(list(itertools.product((-1.0, 1.0), repeat=Z.count)))
    return VPolytope(signs @ Z.generators + Z.offset)


def as_vpolytope(body):
    return zonotope_to_vpolytope(body) if isinstance(body, Zonotope) else body


def minkowski_sum(P, Q):
    """
    Desc: Minkowski sum as the hull of all pairwise vertex sums.
    Parameters:
        P (VPolytope | Zonotope): First summand.
        Q (VPolytope | Zonotope): Second summand, same ambient dimension.
    returns:
    (VPolytope): P + Q.
    """
    if isinstance(P, Zonotope) and isinstance(Q, Zonotope):
        return zonotope_to_vpolytope(Zonotope(np.vstack([P.generators, Q.generators]),
                                              P.offset + Q.offset))
    P, Q = as_vpolytope(P), as_vpolytope(Q)
    if P.ambient_dim != Q.ambient_dim:
        raise ContractError("Minkowski sum of bodies in different dimensions")
    sums = (P.vertices[:, None, :] + Q.vertices[None, :, :]).reshape(-1, P.ambient_dim)
    return VPolytope(sums)


def linear_hull(body):
    """Linear subspace parallel to the affine hull of the body."""
    return body.linear_hull()


def affine_dim(body):
    return body.dim


def project_body(body, L, coordinates=False):
    """
    Desc: Orthogonal projection K|L of a body onto a linear subspace.
    Parameters:
        body (Zonotope | VPolytope): The body.
        L (Subspace): Target subspace.
        coordinates (bool): If True the result lives in R^dim(L) (basis coordinates of L),
                            otherwise in the ambient R^n.
    returns:
    (Zonotope | VPolytope): The projection, same kind as the input.
    """
    if isinstance(body, Zonotope):
        gens, offset = body.generators, body.offset
        if coordinates:
            return Zonotope(gens @ L.basis, offset @ L.basis, ambient_dim=L.dim)
        proj = L.projector()
        return Zonotope(gens @ proj, offset @ proj)
    if coordinates:
        return VPolytope(body.vertices @ L.basis, ambient_dim=L.dim)
    return VPolytope(L.project(body.vertices))


def ball_polytope(n, resolution=256, seed=0):
    """
    Desc: Inscribed polytopal approximation of the unit ball B^n (cross-polytope vertices plus
          quasi-random unit vectors). APPROXIMATE: used only by oracle cross-checks.
    Parameters:
        n (int): Dimension.
        resolution (int): Number of quasi-random directions (rounded up to a power of 2).
        seed (int): Scrambling seed.
    returns:
    (VPolytope): Polytope inscribed in B^n.
    """
    axes = np.vstack([np.eye(n), -np.eye(n)])
    if n == 1:
        return VPolytope(axes)
    return VPolytope(np.vstack([axes, sphere_directions(n, resolution, seed)]))


def sphere_directions(n, count, seed=0):
    """
    Desc: Quasi-uniform unit vectors: scrambled Sobol points pushed through the normal
          quantile function and normalized.
    Parameters:
        n (int): Dimension.
        count (int): Requested count, rounded up to a power of 2 (n = 1 gives +-1).
        seed (int): Scrambling seed.
    returns:
    (np.ndarray): Unit vectors as rows.
    """
    if n == 1:
        return np.array([[1.0], [-1.0]])
    m = int(2 ** np.ceil(np.log2(max(count, 2))))
    sobol = qmc.Sobol(d=n, scramble=True, seed=seed).random(m)
    gaussian = norm.ppf(np.clip(sobol, 1e-12, 1 - 1e-12))
    return gaussian / np.linalg.norm(gaussian, axis=1, keepdims=True)


class UnitBall:
    """Symbolic Euclidean unit ball B^n. Exact formulas treat it analytically, never as a polytope."""

    def __init__(self, ambient_dim):
        if ambient_dim < 1:
            raise ContractError("the unit ball needs n >= 1")
        self._n = int(ambient_dim)

    @property
    def ambient_dim(self):
        return self._n

    @property
    def dim(self):
        return self._n

    def linear_hull(self):
        return full_space(self._n)

    def support(self, u):
        return float(np.linalg.norm(as_vector(u, self._n)))

    def __repr__(self):
        return f"UnitBall(n={self._n})"


def is_zonoid(body):
    """Zonotopes and the unit ball are zonoids; general polytopes are not treated as such."""
    return isinstance(body, (Zonotope, UnitBall))
