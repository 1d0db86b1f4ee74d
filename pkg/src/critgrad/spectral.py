"""Existence criterion ``m_d`` and the principal eigenvalue of the linearized operator."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.optimize import brentq

from .errors import NoConvergenceError, NoEigenvalueError
from .mesh import DiscreteOperators, check_field, condition_estimate, dual_norm, h1_norm
from .model import TOL_ZERO, ProblemSpec, check_ordering, Order

COND_MAX = 1e12
TOL_EIG = 1e-8
DENSE_LIMIT = 1500


@dataclass
class MdResult:
    value: float
    minimizer: np.ndarray | None
    subspace_dim: int


@dataclass
class EigenPair:
    gamma1: float
    phi1: np.ndarray
    residual: float
    mu1_curve: list = field(default_factory=list)


def _smallest_pencil(Kss, Bss, Nss):
    """Smallest eigenpair of ``(Kss - Nss) w = σ Bss w``, ``w^T Bss w = 1``."""
    n = Kss.shape[0]
    if n <= DENSE_LIMIT:
        vals, vecs = sla.eigh((Kss - Nss).toarray(), Bss.toarray(), subset_by_index=[0, 0])
        return float(vals[0]), vecs[:, 0]
    vals, vecs = spla.eigsh((Kss - Nss).tocsc(), k=1, M=Bss.tocsc(), sigma=-1e3, which="LM")
    w = vecs[:, 0]
    return float(vals[0]), w / np.sqrt(w @ (Bss @ w))


def compute_md(ops: DiscreteOperators, d, h, mu: float) -> MdResult:
    """``inf {∫|∇w|² - μ∫h w² : |w|_H1 = 1, d w = 0}`` on the discrete space.

    The constraint keeps only nodes with ``|d| <= TOL_ZERO``; the empty case
    gives ``+inf``.
    """
    d = check_field(ops.mesh, d, "d")
    h = check_field(ops.mesh, h, "h")
    S = np.flatnonzero(np.abs(d) <= TOL_ZERO)
    if S.size == 0:
        return MdResult(value=float("inf"), minimizer=None, subspace_dim=0)
    K = ops.K.tocsr()[S][:, S]
    N = sp.diags(mu * ops.q[S] * h[S])
    val, w = _smallest_pencil(K, K, N)
    full = np.zeros(ops.mesh.size)
    full[S] = w
    if full[np.argmax(np.abs(full))] < 0:
        full = -full
    return MdResult(value=val, minimizer=full, subspace_dim=int(S.size))


def compute_md_l2(ops: DiscreteOperators, d, h, mu: float) -> float:
    """Same quotient normalized by ``∫w² = 1`` instead of the H0^1 norm."""
    d = check_field(ops.mesh, d, "d")
    h = check_field(ops.mesh, h, "h")
    S = np.flatnonzero(np.abs(d) <= TOL_ZERO)
    if S.size == 0:
        return float("inf")
    K = ops.K.tocsr()[S][:, S]
    val, _ = _smallest_pencil(K, sp.diags(ops.q[S]), sp.diags(mu * ops.q[S] * h[S]))
    return val


def md_sign_equivalence(ops: DiscreteOperators, d, h, mu: float) -> bool:
    """True when both normalizations of ``m_d`` have the same sign (zero counts as its own sign)."""
    a = compute_md(ops, d, h, mu).value
    b = compute_md_l2(ops, d, h, mu)
    return bool(np.sign(a) == np.sign(b))


def assemble_linearized(spec: ProblemSpec, u0) -> sp.csr_matrix:
    """Strong-form ``-Δφ - 2μ∇u₀·∇φ + c₋φ`` with centered differences."""
    u0 = check_field(spec.mesh, u0, "u0")
    ops = spec.ops
    L = ops.A.copy()
    for Dk in ops.D:
        L = L - 2.0 * spec.mu * sp.diags(Dk @ u0) @ Dk
    return (L + sp.diags(spec.cminus)).tocsr()


def _power(lu, mbar, x, max_iter=20000, rtol=1e-13):
    """Principal value of ``M^{-1} diag(mbar)`` via Collatz–Wielandt bounds."""
    x = x / np.max(x)
    lo = hi = np.nan
    for it in range(max_iter):
        y = lu.solve(mbar * x)
        if not np.all(y > 0):
            raise NoConvergenceError(
                "power iterate lost positivity", {"iteration": it, "min": float(np.min(y))}, iterate=y
            )
        ratio = y / x
        lo, hi = float(np.min(ratio)), float(np.max(ratio))
        x = y / np.max(y)
        if hi - lo <= rtol * hi:
            return 0.5 * (lo + hi), x
    raise NoConvergenceError(
        "power iteration stagnated", {"iterations": max_iter, "lower": lo, "upper": hi}, iterate=x
    )


class _Mu1:
    """Evaluates ``μ₁(γ)``, the principal value of ``L - γm`` with weight ``m̄``."""

    def __init__(self, L, m):
        self.L = sp.csc_matrix(L)
        self.m = m
        self.mbar = np.maximum(m, 1.0)
        self.curve = {}
        self.vecs = {}
        self.start = np.ones(m.shape[0])

    def __call__(self, gamma: float) -> float:
        gp = max(gamma, 0.0)
        M = (self.L - sp.diags(gamma * self.m) + sp.diags(gp * self.mbar)).tocsc()
        rho, x = _power(spla.splu(M), self.mbar, self.start)
        self.start = x
        val = 1.0 / rho - gp
        self.curve[gamma] = val
        self.vecs[gamma] = x
        return val


def principal_eigenvalue(L, m, ops: DiscreteOperators | None = None) -> EigenPair:
    """Principal ``γ₁`` of ``Lφ = γ m φ`` through ``μ₁(γ) = 0``.

    For each trial ``γ`` the positive operator ``(L - γm + γ⁺m̄)^{-1} m̄`` with
    ``m̄ = max(m, 1)`` is power-iterated; its spectral radius ``ρ`` gives
    ``μ₁(γ) = 1/ρ - γ⁺``.  ``γ`` is doubled from 1 until ``μ₁`` turns
    negative, then the root is bracketed with Brent's method to
    ``|μ₁| <= 1e-10``.

    The residual is the dual norm of ``q(Lφ - γ₁mφ)`` for ``|φ|_H1 = 1`` when
    ``ops`` is given, and a relative Euclidean residual otherwise.

    Raises
    ------
    NoEigenvalueError
        If ``m`` is negative somewhere, vanishes identically, or ``μ₁(0) <= 0``.
    """
    m = np.asarray(m, dtype=float)
    if np.any(m < 0) or not np.any(m > 0):
        raise NoEigenvalueError("weight must be nonnegative and not identically zero")
    f = _Mu1(L, m)
    if not f(0.0) > 0:
        raise NoEigenvalueError("mu1(0) is not positive", {"mu1_0": f.curve[0.0]})
    lo, hi = 0.0, 1.0
    while f(hi) > 0:
        lo, hi = hi, 2.0 * hi
        if hi > 1e15:
            raise NoEigenvalueError("mu1 stays positive", {"gamma": hi})
    g1 = brentq(f, lo, hi, xtol=1e-14 * hi, rtol=4 * np.finfo(float).eps, maxiter=200)
    val = f(g1)
    if abs(val) > 1e-10:
        # one secant correction using the nearest samples
        g_near = sorted(f.curve, key=lambda g: abs(g - g1))[1]
        g1 = g1 - val * (g1 - g_near) / (val - f.curve[g_near])
        f(g1)
    phi = f.vecs[g1]
    Lop = sp.csr_matrix(L)
    if ops is not None:
        phi = phi / h1_norm(ops, phi)
        residual = dual_norm(ops, ops.q * (Lop @ phi - g1 * m * phi))
    else:
        Lphi = Lop @ phi
        residual = float(np.linalg.norm(Lphi - g1 * m * phi) / np.linalg.norm(Lphi))
    curve = sorted(f.curve.items())
    return EigenPair(gamma1=float(g1), phi1=phi, residual=float(residual), mu1_curve=curve)


def max_antimax_probe(L, m, gamma: float, rhs, mesh) -> str:
    """Sign of the solution of ``(L - γm) w = rhs``.

    Returns ``"positive"`` (``0 ≪ w``), ``"negative"`` (``w ≪ 0``), ``"mixed"``
    or ``"no_solution_like"`` when the condition estimate exceeds ``COND_MAX``.
    """
    rhs = check_field(mesh, rhs, "rhs")
    M = (sp.csr_matrix(L) - sp.diags(gamma * np.asarray(m, dtype=float))).tocsc()
    if condition_estimate(M) > COND_MAX:
        return "no_solution_like"
    try:
        w = spla.splu(M).solve(rhs)
    except RuntimeError:
        return "no_solution_like"
    zero = np.zeros_like(w)
    if check_ordering(zero, w, mesh) is Order.MUCH_LESS:
        return "positive"
    if check_ordering(w, zero, mesh) is Order.MUCH_LESS:
        return "negative"
    return "mixed"
