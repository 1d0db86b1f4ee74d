"""Problem data, the Cole–Hopf change of variable and the truncated energy.

For ``u`` solving ``-Δu = c_λ u + μ|∇u|² + h`` the variable
``v = (e^{μu} - 1)/μ`` solves ``-Δv = c_λ g(v) + (1 + μv) h`` with
``g(s) = (1/μ)(1 + μs) ln(1 + μs)``.  Below a barrier ``α`` the right-hand
side is frozen at its value at ``α`` so that the associated energy is
defined on all of R^n.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .errors import AssumptionError, TransformDomainError
from .mesh import DiscreteOperators, check_field, dual_norm

TOL_ZERO = 1e-12


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """Validated data ``(μ, c₊, c₋, h, λ)`` on a fixed mesh; ``c_λ = λc₊ − c₋``."""

    ops: DiscreteOperators
    mu: float
    cplus: np.ndarray
    cminus: np.ndarray
    h: np.ndarray
    lam: float = 0.0

    def __post_init__(self):
        mesh = self.ops.mesh
        for name in ("cplus", "cminus", "h"):
            object.__setattr__(self, name, check_field(mesh, getattr(self, name), name))
        for errs in violations(self.mu, self.cplus, self.cminus):
            raise AssumptionError(errs[0], errs[1])
        if not np.isfinite(self.lam):
            raise AssumptionError("lambda must be finite")

    @property
    def mesh(self):
        return self.ops.mesh

    @property
    def c_lambda(self) -> np.ndarray:
        return self.lam * self.cplus - self.cminus

    def with_lambda(self, lam: float) -> "ProblemSpec":
        return replace(self, lam=float(lam))


def violations(mu: float, cplus, cminus) -> list[tuple[str, list[int]]]:
    """List every violated sign/splitting assumption with offending nodes."""
    out = []
    if not (np.isfinite(mu) and mu > 0):
        out.append((f"mu must be positive, got {mu}", []))
    neg = np.flatnonzero(cplus < 0)
    if neg.size:
        out.append(("cplus must be nonnegative", neg.tolist()))
    neg = np.flatnonzero(cminus < 0)
    if neg.size:
        out.append(("cminus must be nonnegative", neg.tolist()))
    both = np.flatnonzero(np.abs(cplus * cminus) > TOL_ZERO)
    if both.size:
        out.append(("cplus * cminus must vanish nodewise", both.tolist()))
    if not np.any(cplus > TOL_ZERO):
        out.append(("cplus must not vanish identically", []))
    return out


@dataclass(frozen=True, eq=False)
class Barrier:
    """Truncation level ``α`` in v-variables; ``α > -1/μ + margin``."""

    alpha: np.ndarray
    source: str
    margin: float

    def __post_init__(self):
        if self.source not in ("from-solution", "constructed", "constant-fallback"):
            raise ValueError(f"unknown barrier source {self.source!r}")
        if not self.margin > 0:
            raise ValueError("barrier margin must be positive")


def make_barrier(mu: float, alpha, source: str) -> Barrier:
    """Wrap ``alpha`` after checking ``α > -1/μ``; the margin is the actual gap."""
    alpha = np.asarray(alpha, dtype=float)
    gap = float(np.min(alpha) + 1.0 / mu)
    if not gap > 0:
        raise TransformDomainError("barrier must stay above -1/mu", int(np.argmin(alpha)))
    return Barrier(alpha=alpha, source=source, margin=gap)


@dataclass(frozen=True, eq=False)
class EnergyReport:
    value: float
    gradient: np.ndarray
    residual_norm: float


# --- scalar nonlinearities -------------------------------------------------

def g_fun(s, mu: float):
    """``(1/μ)(1+μs)ln(1+μs)`` for ``s > -1/μ`` and 0 otherwise."""
    s = np.asarray(s, dtype=float)
    t = 1.0 + mu * s
    pos = t > 0
    tt = np.where(pos, t, 1.0)
    out = np.where(pos, tt * np.log(tt) / mu, 0.0)
    return out if out.ndim else float(out)


def g_prime(s, mu: float):
    """Derivative ``ln(1+μs) + 1``; taken as 0 for ``s <= -1/μ``."""
    s = np.asarray(s, dtype=float)
    t = 1.0 + mu * s
    pos = t > 0
    out = np.where(pos, np.log(np.where(pos, t, 1.0)) + 1.0, 0.0)
    return out if out.ndim else float(out)


def G_fun(s, mu: float):
    """Antiderivative of ``g`` with ``G(0) = 0``; constant ``1/(4μ²)`` below ``-1/μ``."""
    s = np.asarray(s, dtype=float)
    t = 1.0 + mu * s
    pos = t > 0
    tt = np.where(pos, t, 1.0)
    out = np.where(pos, (tt**2 * (2 * np.log(tt) - 1) + 1) / (4 * mu**2), 1.0 / (4 * mu**2))
    return out if out.ndim else float(out)


def cole_hopf(u, mu: float) -> np.ndarray:
    return np.expm1(mu * np.asarray(u, dtype=float)) / mu


def inverse_cole_hopf(v, mu: float) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    bad = np.flatnonzero(~(1.0 + mu * v > 0))
    if bad.size:
        k = int(bad[0])
        raise TransformDomainError(f"v[{k}] = {v[k]!r} <= -1/mu", k)
    return np.log1p(mu * v) / mu


# --- truncated problem -----------------------------------------------------

def f_lambda(spec: ProblemSpec, barrier: Barrier, v) -> np.ndarray:
    """``c_λ g(s) + (1+μs) h`` with ``s = max(v, α)``."""
    s = np.maximum(np.asarray(v, dtype=float), barrier.alpha)
    return spec.c_lambda * g_fun(s, spec.mu) + (1.0 + spec.mu * s) * spec.h


def f_lambda_prime(spec: ProblemSpec, barrier: Barrier, v) -> np.ndarray:
    """One-sided derivative in ``s``; zero on the frozen branch ``v < α``."""
    v = np.asarray(v, dtype=float)
    up = spec.c_lambda * g_prime(v, spec.mu) + spec.mu * spec.h
    return np.where(v >= barrier.alpha, up, 0.0)


def F_lambda(spec: ProblemSpec, barrier: Barrier, v) -> np.ndarray:
    """Primitive of ``f_lambda`` in ``s`` (affine below ``α``)."""
    v = np.asarray(v, dtype=float)
    mu, cl, h, a = spec.mu, spec.c_lambda, spec.h, barrier.alpha

    def upper(s):
        return cl * G_fun(s, mu) + (1.0 + mu * s) ** 2 * h / (2 * mu)

    fa = cl * g_fun(a, mu) + (1.0 + mu * a) * h
    return np.where(v >= a, upper(v), fa * (v - a) + upper(a))


def energy(spec: ProblemSpec, barrier: Barrier, v) -> EnergyReport:
    """Truncated energy, its weak gradient ``K v - q∘f`` and the dual norm of the latter."""
    v = check_field(spec.mesh, v, "v")
    ops = spec.ops
    Kv = ops.K @ v
    value = 0.5 * float(v @ Kv) - float(ops.q @ F_lambda(spec, barrier, v))
    grad = Kv - ops.q * f_lambda(spec, barrier, v)
    return EnergyReport(value=value, gradient=grad, residual_norm=dual_norm(ops, grad))


def energy_value(spec: ProblemSpec, barrier: Barrier, v) -> float:
    v = np.asarray(v, dtype=float)
    return 0.5 * float(v @ (spec.ops.K @ v)) - float(spec.ops.q @ F_lambda(spec, barrier, v))


def weak_residual(spec: ProblemSpec, barrier: Barrier, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return spec.ops.K @ v - spec.ops.q * f_lambda(spec, barrier, v)


def residual_p(spec: ProblemSpec, u) -> np.ndarray:
    """Weak residual of the untransformed equation."""
    u = check_field(spec.mesh, u, "u")
    ops = spec.ops
    return ops.K @ u - ops.q * (spec.c_lambda * u + spec.mu * ops.grad_sq(u) + spec.h)


# --- ordering --------------------------------------------------------------

class Order(str, enum.Enum):
    INCOMPARABLE = "incomparable"
    LEQ = "leq"
    STRICTLY_LESS = "strictly_less"
    MUCH_LESS = "much_less"


TOL_HOPF = 1e-9


def boundary_quotients(mesh, d: np.ndarray) -> np.ndarray:
    """One-sided normal difference quotients of ``d`` at boundary-adjacent nodes.

    ``d`` vanishes on the boundary, so the quotient into the domain at a node
    next to a face is ``d_i / h``; a corner node contributes one per face.
    """
    idx = mesh.multi_index()
    out = []
    for k, (n, hk) in enumerate(zip(mesh.counts, mesh.spacing)):
        for edge in (0, n - 1):
            out.append(d[idx[:, k] == edge] / hk)
    return np.concatenate(out)


def check_ordering(u, w, mesh) -> Order:
    """Discrete version of ``u ≪ w``.

    Returns ``INCOMPARABLE`` unless ``u <= w``; swap the arguments to test
    the reverse relation.
    """
    u = check_field(mesh, u, "u")
    w = check_field(mesh, w, "w")
    d = w - u
    scale = float(np.max(np.abs(d)))
    tol = 1e-9 * scale
    if np.any(d < -tol):
        return Order.INCOMPARABLE
    if scale == 0 or np.any(d <= tol):
        return Order.LEQ
    if np.all(boundary_quotients(mesh, d) > TOL_HOPF):
        return Order.MUCH_LESS
    return Order.STRICTLY_LESS


def much_less(u, w, mesh) -> bool:
    return check_ordering(u, w, mesh) is Order.MUCH_LESS
