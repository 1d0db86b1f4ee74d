"""Uniform finite-difference grids on an interval or a rectangle.

Fields are plain 1-D float arrays indexed by interior nodes.  In 2D the
linear index is ``i * ny + j`` (x slowest), matching ``np.meshgrid(...,
indexing="ij").ravel()``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DimensionError, FactorizationError, InvalidMeshError


@dataclass(frozen=True)
class Mesh:
    """Interior nodes of a uniform grid with homogeneous Dirichlet boundary."""

    dim: int
    bounds: tuple[tuple[float, float], ...]
    counts: tuple[int, ...]

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple((b - a) / (n + 1) for (a, b), n in zip(self.bounds, self.counts))

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    @property
    def cell_measure(self) -> float:
        return float(np.prod(self.spacing))

    def axis_nodes(self, k: int) -> np.ndarray:
        a, _ = self.bounds[k]
        h = self.spacing[k]
        return a + h * np.arange(1, self.counts[k] + 1)

    @cached_property
    def coords(self) -> np.ndarray:
        """Node coordinates, shape ``(size, dim)``."""
        grids = np.meshgrid(*[self.axis_nodes(k) for k in range(self.dim)], indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def multi_index(self) -> np.ndarray:
        """Per-axis integer index of each node, shape ``(size, dim)``."""
        grids = np.meshgrid(*[np.arange(n) for n in self.counts], indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def zeros(self) -> np.ndarray:
        return np.zeros(self.size)


def build_mesh(dim: int, bounds, counts) -> Mesh:
    """Build a uniform mesh.

    Parameters
    ----------
    dim : int
        1 or 2.
    bounds : sequence
        ``(a, b)`` for 1D, or one ``(a, b)`` pair per axis.
    counts : int or sequence of int
        Interior node count per axis (at least 3).
    """
    if dim not in (1, 2):
        raise InvalidMeshError(f"dim must be 1 or 2, got {dim}")
    bounds = np.asarray(bounds, dtype=float)
    if bounds.ndim == 1:
        bounds = bounds.reshape(1, 2)
    counts = np.atleast_1d(np.asarray(counts))
    if counts.size == 1 and dim == 2:
        counts = np.repeat(counts, 2)
    if bounds.shape != (dim, 2) or counts.shape != (dim,):
        raise InvalidMeshError("bounds/counts do not match dimension")
    for (a, b), n in zip(bounds, counts):
        if not (np.isfinite(a) and np.isfinite(b)) or not b > a:
            raise InvalidMeshError(f"degenerate interval [{a}, {b}]")
        if int(n) != n or n < 3:
            raise InvalidMeshError(f"need at least 3 interior nodes per axis, got {n}")
    return Mesh(
        dim=dim,
        bounds=tuple((float(a), float(b)) for a, b in bounds),
        counts=tuple(int(n) for n in counts),
    )


def check_field(mesh: Mesh, u, name: str = "field") -> np.ndarray:
    """Return ``u`` as a float array after checking length and finiteness."""
    u = np.asarray(u, dtype=float)
    if u.ndim != 1 or u.shape[0] != mesh.size:
        raise DimensionError(f"{name} has shape {u.shape}, mesh has {mesh.size} nodes")
    if not np.all(np.isfinite(u)):
        raise DimensionError(f"{name} has non-finite values")
    return u


def _second_diff(n: int, h: float) -> sp.csr_matrix:
    e = np.ones(n)
    return sp.diags([-e[:-1], 2 * e, -e[:-1]], [-1, 0, 1], format="csr") / h**2


def _centered_diff(n: int, h: float) -> sp.csr_matrix:
    e = np.ones(n - 1)
    return sp.diags([-e, e], [-1, 1], format="csr") / (2 * h)


@dataclass(frozen=True, eq=False)
class DiscreteOperators:
    """Strong Laplacian ``A``, centered differences ``D`` and lumped weights ``q``.

    ``K = q * A`` is the weak stiffness, i.e. the Gram matrix of the discrete
    H0^1 inner product.
    """

    mesh: Mesh
    A: sp.csr_matrix
    D: tuple[sp.csr_matrix, ...]
    q: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def K(self) -> sp.csr_matrix:
        if "K" not in self._cache:
            self._cache["K"] = (self.A * self.mesh.cell_measure).tocsr()
        return self._cache["K"]

    def solve_K(self, r: np.ndarray) -> np.ndarray:
        """Solve ``K x = r`` with a cached factorization."""
        if "luK" not in self._cache:
            self._cache["luK"] = spla.splu(self.K.tocsc())
        return self._cache["luK"].solve(np.asarray(r, dtype=float))

    def grad_sq(self, u: np.ndarray) -> np.ndarray:
        """Nodewise ``|grad u|^2`` from centered differences."""
        return sum((Dk @ u) ** 2 for Dk in self.D)


def assemble_operators(mesh: Mesh) -> DiscreteOperators:
    hs, ns = mesh.spacing, mesh.counts
    if mesh.dim == 1:
        A = _second_diff(ns[0], hs[0])
        D = (_centered_diff(ns[0], hs[0]),)
    else:
        Ix, Iy = sp.identity(ns[0], format="csr"), sp.identity(ns[1], format="csr")
        A = sp.kron(_second_diff(ns[0], hs[0]), Iy) + sp.kron(Ix, _second_diff(ns[1], hs[1]))
        D = (
            sp.kron(_centered_diff(ns[0], hs[0]), Iy).tocsr(),
            sp.kron(Ix, _centered_diff(ns[1], hs[1])).tocsr(),
        )
    q = np.full(mesh.size, mesh.cell_measure)
    return DiscreteOperators(mesh=mesh, A=sp.csr_matrix(A), D=D, q=q)


def h1_norm(ops: DiscreteOperators, u) -> float:
    """Discrete H0^1 norm ``sqrt(q u^T A u)``."""
    u = check_field(ops.mesh, u)
    return float(np.sqrt(max(u @ (ops.K @ u), 0.0)))


def dual_norm(ops: DiscreteOperators, r) -> float:
    """Discrete H^-1 norm ``sqrt(r^T K^-1 r)`` of a weak residual."""
    r = check_field(ops.mesh, r, "residual")
    return float(np.sqrt(max(r @ ops.solve_K(r), 0.0)))


def integrate(ops: DiscreteOperators, f) -> float:
    f = check_field(ops.mesh, f)
    return float(ops.q @ f)


def linear_solve(Aop, rhs) -> np.ndarray:
    """Direct sparse solve with one round of iterative refinement.

    The solve is accepted when ``|rhs - A x| <= 1e-12 * max(|rhs|, |A|_inf |x|)``,
    the backward-error form of the residual test.

    Raises
    ------
    FactorizationError
        If the factorization fails or the residual test does not pass; the
        diagnostics carry a 1-norm condition estimate.
    """
    Aop = sp.csc_matrix(Aop, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if Aop.shape[0] != Aop.shape[1] or Aop.shape[0] != rhs.shape[0]:
        raise DimensionError(f"operator {Aop.shape} incompatible with rhs {rhs.shape}")
    try:
        lu = spla.splu(Aop)
    except RuntimeError as exc:
        raise FactorizationError(f"factorization failed: {exc}", {"condition": float("inf")}) from exc
    x = lu.solve(rhs)
    x = x + lu.solve(rhs - Aop @ x)
    anorm = spla.norm(Aop, np.inf)
    res = np.linalg.norm(rhs - Aop @ x, np.inf)
    scale = max(np.linalg.norm(rhs, np.inf), anorm * np.linalg.norm(x, np.inf))
    if np.all(np.isfinite(x)) and res <= 1e-12 * scale:
        return x
    raise FactorizationError("linear solve residual too large", {"condition": condition_estimate(Aop)})


def condition_estimate(Aop) -> float:
    """1-norm condition estimate via ``onenormest`` of the inverse."""
    Aop = sp.csc_matrix(Aop)
    try:
        lu = spla.splu(Aop)
    except RuntimeError:
        return float("inf")
    n = Aop.shape[0]
    inv = spla.LinearOperator(
        (n, n), matvec=lu.solve, rmatvec=lambda y: lu.solve(y, trans="T"), dtype=float
    )
    return float(spla.norm(Aop, 1) * spla.onenormest(inv))
