"""
Description: Linear algebra used by every formula in zonovol: parallelepiped volumes D_k,
             orthonormal bases of linear subspaces, subspace brackets, orthogonal projections
             and Haar-distributed subspaces of the Grassmannian.
Date created: October 19th, 2026
Date last modified: October 19th, 2026
"""

from dataclasses import dataclass

import numpy as np

from config import DEFAULT_TOLERANCES
from errors import ContractError
from util import make_rng


def as_vector(x, n=None):
    """
    Desc: Converts coordinates to a finite float vector, optionally checking its length.
    Parameters:
        x (array-like): Coordinates.
        n (int): Expected dimension, or None.
    returns:
    (np.ndarray): 1-d float array.
    """
    v = np.array(x, dtype=float).reshape(-1)
    if n is not None and v.shape[0] != n:
        raise ContractError(f"expected a vector of dimension {n}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ContractError("vector has non-finite entries")
    return v


def as_matrix(vectors, n=None):
    """Stacks vectors as rows of a (k, n) float array."""
    rows = np.array(vectors, dtype=float)
    if rows.size == 0:
        return np.zeros((0, n if n is not None else 0))
    rows = np.atleast_2d(rows)
    if n is not None and rows.shape[1] != n:
        raise ContractError(f"expected vectors of dimension {n}, got {rows.shape[1]}")
    if not np.all(np.isfinite(rows)):
        raise ContractError("vectors have non-finite entries")
    return rows


@dataclass(frozen=True, eq=False)
class Subspace:
    """A linear subspace of R^n stored as an (n, dim) matrix with orthonormal columns."""

    basis: np.ndarray

    def __post_init__(self):
        basis = np.array(self.basis, dtype=float, copy=True)
        if basis.ndim != 2:
            raise ContractError("subspace basis must be a 2-d array")
        n, dim = basis.shape
        if dim > n:
            raise ContractError(f"subspace of dimension {dim} cannot live in R^{n}")
        if dim and not np.allclose(basis.T @ basis, np.eye(dim), atol=1e-10):
            raise ContractError("subspace basis is not orthonormal")
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    @property
    def ambient_dim(self):
        return self.basis.shape[0]

    @property
    def dim(self):
        return self.basis.shape[1]

    def projector(self):
        return self.basis @ self.basis.T

    def coordinates(self, points):
        """Coordinates of points (rows) in this subspace's basis."""
        return np.atleast_2d(np.asarray(points, dtype=float)) @ self.basis

    def project(self, points):
        """Orthogonal projection of points (rows) onto the subspace, ambient coordinates."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return (pts @ self.basis) @ self.basis.T

    def complement(self):
        n = self.ambient_dim
        if self.dim == 0:
            return full_space(n)
        if self.dim == n:
            return trivial_subspace(n)
        # Last n - dim left singular vectors span the orthogonal complement.
        u, _, _ = np.linalg.svd(self.basis, full_matrices=True)
        return Subspace(u[:, self.dim:])

    def distance(self, other):
        """
        Desc: Principal-angle distance, the spectral norm of the difference of projectors
              (sine of the largest principal angle for equal dimensions).
        Parameters:
            other (Subspace): Subspace in the same ambient space.
        returns:
        (float): Distance in [0, 1]; 1 when dimensions differ.
        """
        if other.ambient_dim != self.ambient_dim:
            raise ContractError("subspaces live in different ambient spaces")
        if other.dim != self.dim:
            return 1.0
        if self.dim == 0:
            return 0.0
        return float(np.linalg.norm(self.projector() - other.projector(), 2))

    def sort_key(self):
        """Basis-independent key (rounded projector entries) for deterministic tie-breaks."""
        return tuple(np.round(self.projector(), 12).reshape(-1).tolist())

    def to_json(self):
        return {"ambient_dim": self.ambient_dim, "dim": self.dim,
                "basis": [list(map(float, column)) for column in self.basis.T]}

    def __repr__(self):
        return f"Subspace(ambient_dim={self.ambient_dim}, dim={self.dim})"


def trivial_subspace(n):
    return Subspace(np.zeros((n, 0)))


def full_space(n):
    return Subspace(np.eye(n))


def parallelepiped_volume(vectors):
    """
    Desc: k-volume D_k of the parallelepiped [o,u_1] + ... + [o,u_k], the square root of the
          Gram determinant (|det| when k = n).
    Parameters:
        vectors (array-like): k vectors of R^n as rows, 1 <= k <= n.
    returns:
    (float): Nonnegative volume, 0 for linearly dependent vectors.
    raises:
    ContractError: If k is 0 or exceeds n, or rows have inconsistent lengths.
    """
    rows = as_matrix(vectors)
    k, n = rows.shape
    if not 1 <= k <= n:
        raise ContractError(f"parallelepiped_volume needs 1 <= k <= n, got k={k}, n={n}")
    if k == n:
        return float(abs(np.linalg.det(rows)))
    gram = rows @ rows.T
    return float(np.sqrt(max(np.linalg.det(gram), 0.0)))


def parallelepiped_volumes(stacks):
    """Vectorized D_k over an array of shape (batch, k, n)."""
    stacks = np.asarray(stacks, dtype=float)
    _, k, n = stacks.shape
    if k == n:
        return np.abs(np.linalg.det(stacks))
    gram = stacks @ np.swapaxes(stacks, 1, 2)
    return np.sqrt(np.clip(np.linalg.det(gram), 0.0, None))


def numerical_rank(matrix, tol=DEFAULT_TOLERANCES.rank):
    """Rank with singular values below tol * (largest singular value) treated as zero."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    if matrix.size == 0:
        return 0
    s = np.linalg.svd(matrix, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def orthonormalize(spanning, ambient_dim=None, tol=DEFAULT_TOLERANCES.rank):
    """
    Desc: Orthonormal basis of the linear hull of the given vectors. The rank is decided from
          the singular values, relative to the largest one.
    Parameters:
        spanning (array-like): Vectors as rows (may be empty).
        ambient_dim (int): n, required when `spanning` is empty.
        tol (float): Relative singular value cutoff.
    returns:
    (Subspace): The linear hull.
    """
    rows = as_matrix(spanning, ambient_dim)
    n = rows.shape[1] if rows.size else ambient_dim
    if n is None:
        raise ContractError("ambient dimension unknown for an empty spanning set")
    if rows.shape[0] == 0 or not np.any(rows):
        return trivial_subspace(n)
    _, s, vt = np.linalg.svd(rows, full_matrices=False)
    rank = int(np.sum(s > tol * s[0]))
    return Subspace(vt[:rank].T)


def sum_subspace(subspaces, ambient_dim=None):
    """Linear hull U_1 + ... + U_m."""
    columns = [s.basis.T for s in subspaces if s.dim]
    if not columns:
        n = ambient_dim if ambient_dim is not None else subspaces[0].ambient_dim
        return trivial_subspace(n)
    return orthonormalize(np.vstack(columns))


def bracket(subspaces, span_dim=None, tol=DEFAULT_TOLERANCES.rank):
    """
    Desc: Bracket [U_1,...,U_m]_{n-beta}: the (n-beta)-volume spanned by the concatenated
          orthonormal bases, or 0 when the concatenation is linearly dependent.
    Parameters:
        subspaces (list of Subspace): U_1, ..., U_m in a common R^n.
        span_dim (int): n - beta; must equal the sum of the dimensions (defaults to it).
        tol (float): Relative rank tolerance deciding linear dependence.
    returns:
    (float): Value in [0, 1]; 1 exactly when the subspaces are pairwise orthogonal.
    raises:
    ContractError: If the dimensions do not add up to span_dim or exceed n.
    """
    if not subspaces:
        return 1.0
    n = subspaces[0].ambient_dim
    if any(s.ambient_dim != n for s in subspaces):
        raise ContractError("bracket of subspaces from different ambient spaces")
    total = sum(s.dim for s in subspaces)
    if span_dim is None:
        span_dim = total
    if total != span_dim:
        raise ContractError(f"subspace dimensions sum to {total}, expected {span_dim}")
    if span_dim > n:
        raise ContractError(f"bracket dimension {span_dim} exceeds ambient dimension {n}")
    if span_dim == 0:
        return 1.0
    stacked = np.hstack([s.basis for s in subspaces]).T
    s = np.linalg.svd(stacked, compute_uv=False)
    if s[-1] <= tol * s[0]:
        return 0.0
    return float(min(max(parallelepiped_volume(stacked), 0.0), 1.0))


def project(point, L):
    """
    Desc: Orthogonal projection of a point onto a linear subspace, basis @ basis^T @ point.
    Parameters:
        point (array-like): Vector of R^n.
        L (Subspace): Target subspace.
    returns:
    (np.ndarray): Projected vector in ambient coordinates.
    """
    x = as_vector(point, L.ambient_dim)
    return L.basis @ (L.basis.T @ x)


def sample_grassmannian(n, i, rng_state):
    """
    Desc: Haar-distributed i-dimensional subspace of R^n, obtained by orthonormalizing i
          independent standard Gaussian vectors.
    Parameters:
        n (int): Ambient dimension.
        i (int): Subspace dimension, 0 <= i <= n.
        rng_state (int or np.random.Generator): Seed or generator; deterministic per state.
    returns:
    (Subspace): The sampled subspace.
    """
    if not 0 <= i <= n:
        raise ContractError(f"sample_grassmannian needs 0 <= i <= n, got i={i}, n={n}")
    if i == 0:
        return trivial_subspace(n)
    rng = make_rng(rng_state)
    gaussian = rng.standard_normal((n, i))
    # QR keeps exactly i columns; Gaussian columns are independent almost surely.
    q, r = np.linalg.qr(gaussian)
    q = q * np.where(np.diag(r) < 0, -1.0, 1.0)
    return Subspace(q)
