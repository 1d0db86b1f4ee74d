"""Solvers for the truncated transformed problem ``A v = f(v)``.

All residuals are weak (``K v - q∘f(v)`` with ``K = q A``) and measured in
the discrete dual norm.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    BarrierError,
    BlowdownNotFoundError,
    FactorizationError,
    GeometryAbsentError,
    MonotonicityError,
    NoConvergenceError,
    SolverError,
    UnboundedIterateError,
)
from .mesh import check_field, dual_norm, h1_norm, linear_solve
from .model import (
    Barrier,
    ProblemSpec,
    cole_hopf,
    energy_value,
    f_lambda,
    f_lambda_prime,
    inverse_cole_hopf,
    make_barrier,
    weak_residual,
)

__all__ = [
    "SolveOptions",
    "SolutionRecord",
    "PSDiagnostics",
    "linear_solve",
    "newton_q",
    "monotone_iteration",
    "construct_barrier",
    "solution_barrier",
    "mountain_pass",
    "ray_blowdown",
    "uniqueness_probe",
    "random_starts",
]

# smallest 1 + μα kept: below it v = α no longer resolves u = ln(1 + μα)/μ
RESOLVABLE = 1e-12

KINDS = ("minimal", "local_min", "mountain_pass", "trivial_u0")


@dataclass(frozen=True)
class SolveOptions:
    newton_tol: float = 1e-10
    max_newton: int = 50
    damping: float = 0.5
    max_halvings: int = 30
    mp_path_points: int = 41
    mp_descent_step: float = 0.1
    mp_tol: float = 1e-6
    max_mp_iters: int = 5000
    ps_guard: float = 1e6
    max_monotone: int = 20000
    monotone_switch: float = 1e-6
    tol_lu: float = 1e-8

    def __post_init__(self):
        for name, val in self.__dict__.items():
            if not val > 0:
                raise ValueError(f"option {name} must be positive, got {val}")
        if self.mp_path_points < 3:
            raise ValueError("mp_path_points must be at least 3")
        if not self.damping < 1:
            raise ValueError("damping must lie in (0, 1)")

    def updated(self, **kw) -> "SolveOptions":
        return replace(self, **kw)


@dataclass(eq=False)
class SolutionRecord:
    lam: float
    u: np.ndarray
    v: np.ndarray
    energy: float
    residual: float
    kind: str
    notes: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "lambda": self.lam,
            "kind": self.kind,
            "energy": self.energy,
            "residual": self.residual,
            "umin": float(np.min(self.u)),
            "umax": float(np.max(self.u)),
            **self.notes,
        }


@dataclass
class PSDiagnostics:
    energies: list = field(default_factory=list)
    norms: list = field(default_factory=list)
    bounded: bool = True


def _record(spec: ProblemSpec, barrier: Barrier, v: np.ndarray, kind: str, residual: float, **notes):
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    return SolutionRecord(
        lam=spec.lam,
        u=inverse_cole_hopf(v, spec.mu),
        v=v,
        energy=energy_value(spec, barrier, v),
        residual=residual,
        kind=kind,
        notes=dict(notes),
    )


def _jacobian(spec: ProblemSpec, barrier: Barrier, v: np.ndarray) -> sp.csc_matrix:
    ops = spec.ops
    return (ops.K - sp.diags(ops.q * f_lambda_prime(spec, barrier, v))).tocsc()


def _newton_core(spec, barrier, v, opts):
    """Damped Newton; returns ``(v, residual, iterations)`` or raises.

    Converged means ``r <= newton_tol * max(1, |v|_H1)``; the relative form
    keeps large solutions above the roundoff floor of ``K v``.
    """
    ops = spec.ops
    R = weak_residual(spec, barrier, v)
    r = dual_norm(ops, R)
    for it in range(opts.max_newton + 1):
        if r <= newton_tolerance(ops, v, opts):
            return _polish(spec, barrier, v, r, it, opts)
        if it == opts.max_newton:
            break
        try:
            delta = linear_solve(_jacobian(spec, barrier, v), -R)
        except FactorizationError as exc:
            raise NoConvergenceError(
                "singular Newton Jacobian", {"iteration": it, "residual": r}, iterate=v
            ) from exc
        t = 1.0
        for _ in range(opts.max_halvings + 1):
            trial = v + t * delta
            R_t = weak_residual(spec, barrier, trial)
            r_t = dual_norm(ops, R_t)
            if r_t < (1 - 1e-4 * t) * r:
                break
            t *= opts.damping
        else:
            raise NoConvergenceError(
                "Newton line search failed", {"iteration": it, "residual": r}, iterate=v
            )
        v, R, r = trial, R_t, r_t
        if np.max(np.abs(v)) > opts.ps_guard:
            raise NoConvergenceError(
                "Newton iterate exceeded ps_guard", {"iteration": it, "residual": r}, iterate=v
            )
    raise NoConvergenceError(
        f"Newton did not converge in {opts.max_newton} steps", {"residual": r}, iterate=v
    )


def _polish(spec, barrier, v, r, it, opts):
    """Extra full Newton steps while the residual at least halves.

    Near a degenerate root the residual is quadratic in the error, so the
    tolerance alone leaves an error of order ``sqrt(newton_tol)``.
    """
    while it < opts.max_newton and r > 0:
        try:
            trial = v + linear_solve(_jacobian(spec, barrier, v), -weak_residual(spec, barrier, v))
        except FactorizationError:
            break
        r_t = dual_norm(spec.ops, weak_residual(spec, barrier, trial))
        if not r_t < 0.5 * r:
            break
        v, r, it = trial, r_t, it + 1
    return v, r, it


def newton_tolerance(ops, v, opts: SolveOptions) -> float:
    return opts.newton_tol * max(1.0, h1_norm(ops, v))


def newton_q(
    spec: ProblemSpec,
    barrier: Barrier,
    v0,
    opts: SolveOptions = SolveOptions(),
    kind: str = "local_min",
) -> SolutionRecord:
    """Damped Newton on the truncated problem from ``v0``.

    A converged iterate dipping below ``α`` triggers one restart from
    ``max(v, α)``.

    Raises
    ------
    NoConvergenceError
        Carries the last iterate in ``.iterate``.
    BarrierError
        If the converged field is not above ``-1/μ`` (invalid barrier).
    """
    v0 = check_field(spec.mesh, v0, "v0")
    v, r, its = _newton_core(spec, barrier, v0.copy(), opts)
    tol_a = 1e-9 * max(1.0, float(np.max(np.abs(barrier.alpha))))
    if np.any(v < barrier.alpha - tol_a):
        v, r, more = _newton_core(spec, barrier, np.maximum(v, barrier.alpha), opts)
        its += more
        if np.any(v < barrier.alpha - tol_a):
            raise BarrierError("solution below the barrier after restart", {"residual": r}, iterate=v)
    if np.any(1.0 + spec.mu * v <= 0):
        raise BarrierError("solution not above -1/mu", {"residual": r}, iterate=v)
    return _record(spec, barrier, v, kind, r, newton_iterations=its)


def _slope_bound(spec, barrier, fields) -> float:
    vals = [np.abs(f_lambda_prime(spec, barrier, np.maximum(w, barrier.alpha))) for w in fields]
    return float(max(np.max(x) for x in vals)) + 1.0


def monotone_iteration(
    spec: ProblemSpec,
    barrier: Barrier,
    lower,
    upper=None,
    direction: str = "from_lower",
    opts: SolveOptions = SolveOptions(),
) -> SolutionRecord:
    """Monotone lower/upper solution iteration.

    Iterates ``(K + κ diag(q)) w = q∘f(w_prev) + κ q∘w_prev``.  Once the
    increments fall below ``opts.monotone_switch`` (relative), a Newton
    polish is attempted and kept only if it lands on the correct side of
    the current iterate; otherwise the iteration simply continues.

    ``upper=None`` is allowed for ``from_lower``: the limit is then the
    minimal solution above ``lower``, and an iterate norm above
    ``opts.ps_guard`` is reported as evidence that none exists.

    When ``c_λ >= 0`` the nonlinearity is convex above ``α`` and two exact
    shortcuts are checked at iterations 16, 32, 64, ...: an indefinite
    Jacobian ``K - diag(q f'(w))`` at an iterate proves there is no
    solution above it (the minimal one would be semistable), and a Newton
    polish landing above the iterate with a positive definite Jacobian is
    the minimal solution.

    Raises
    ------
    MonotonicityError
        If ordering still fails after eight doublings of ``κ``.
    NoConvergenceError
        On divergence or when ``opts.max_monotone`` is exhausted;
        ``diagnostics["bounded"]`` tells which.
    """
    if direction not in ("from_lower", "from_upper"):
        raise ValueError(f"unknown direction {direction!r}")
    ops = spec.ops
    lower = check_field(spec.mesh, lower, "lower")
    if upper is not None:
        upper = check_field(spec.mesh, upper, "upper")
        if np.any(lower > upper):
            raise ValueError("lower must lie below upper")
        if np.any(weak_residual(spec, barrier, upper) < -opts.tol_lu):
            raise ValueError("upper is not an upper solution")
    elif direction == "from_upper":
        raise ValueError("from_upper needs an upper solution")
    if np.any(weak_residual(spec, barrier, lower) > opts.tol_lu):
        raise ValueError("lower is not a lower solution")

    sign = 1.0 if direction == "from_lower" else -1.0
    # c_λ >= 0 makes f convex and increasing in slope on [α, ∞)
    convex = sign > 0 and bool(np.all(spec.c_lambda >= 0))
    start = lower if sign > 0 else upper
    kappa = _slope_bound(spec, barrier, [lower] if upper is None else [lower, upper])
    for _attempt in range(9):
        lu = spla.splu((ops.K + sp.diags(kappa * ops.q)).tocsc())
        w = start.copy()
        energies = [energy_value(spec, barrier, w)]
        ok = True
        for it in range(1, opts.max_monotone + 1):
            w_new = lu.solve(ops.q * (f_lambda(spec, barrier, w) + kappa * w))
            scale = max(1.0, float(np.max(np.abs(w_new))))
            step = sign * (w_new - w)
            if np.any(step < -1e-10 * scale) or (
                upper is not None and np.any(w_new > upper + 1e-10 * scale)
            ):
                ok = False
                break
            w = w_new
            energies.append(energy_value(spec, barrier, w))
            if scale > opts.ps_guard:
                raise NoConvergenceError(
                    "monotone iteration unbounded",
                    {"iterations": it, "bounded": False, "kappa": kappa},
                    iterate=w,
                )
            inc = float(np.max(np.abs(step)))
            small = inc <= opts.monotone_switch * scale
            checkpoint = convex and it >= 16 and (it & (it - 1)) == 0
            if checkpoint and not _is_pd(_jacobian(spec, barrier, w)):
                raise NoConvergenceError(
                    "no solution above the current lower solution (indefinite Jacobian)",
                    {"iterations": it, "bounded": True, "certified": True, "kappa": kappa},
                    iterate=w,
                )
            if small or checkpoint:
                polished = _try_polish(spec, barrier, w, sign, upper, opts, need_pd=not small)
                if polished is not None:
                    v, r, its = polished
                    e = np.diff(energies[1:])
                    return _record(
                        spec,
                        barrier,
                        v,
                        "minimal" if sign > 0 else "local_min",
                        r,
                        monotone_iterations=it,
                        newton_iterations=its,
                        kappa=kappa,
                        energy_nonincreasing=bool(np.all(e <= 1e-10 * (1 + np.abs(energies[2:])))),
                    )
                if inc == 0.0:
                    break
        if ok:
            raise NoConvergenceError(
                "monotone iteration did not converge",
                {"iterations": opts.max_monotone, "bounded": True, "kappa": kappa},
                iterate=w,
            )
        kappa *= 2.0
    raise MonotonicityError("ordering lost after 8 doublings of kappa", {"kappa": kappa}, iterate=w)


def _is_pd(J) -> bool:
    """Positive definiteness of a symmetric matrix from unpivoted LU pivots."""
    try:
        lu = spla.splu(
            sp.csc_matrix(J), permc_spec="NATURAL", diag_pivot_thresh=0.0,
            options={"SymmetricMode": True},
        )
    except RuntimeError:
        return False
    return bool(np.all(lu.U.diagonal() > 0))


def _try_polish(spec, barrier, w, sign, upper, opts, need_pd=False):
    try:
        v, r, its = _newton_core(spec, barrier, w.copy(), opts)
    except SolverError:
        return None
    scale = max(1.0, float(np.max(np.abs(w))))
    if np.any(sign * (v - w) < -1e-8 * scale):
        return None
    if upper is not None and np.any(v > upper + 1e-8 * scale):
        return None
    if need_pd and not _is_pd(_jacobian(spec, barrier, v)):
        return None
    return v, r, its


# --- barriers --------------------------------------------------------------

def solution_barrier(spec: ProblemSpec, u0) -> Barrier:
    """``α = cole_hopf(u0)``; a lower solution whenever ``λ >= 0`` and ``c₊u₀ >= 0``."""
    return make_barrier(spec.mu, cole_hopf(u0, spec.mu), "from-solution")


def _is_lower(spec, barrier, tol) -> bool:
    return bool(np.all(weak_residual(spec, barrier, barrier.alpha) <= tol))


def construct_barrier(spec: ProblemSpec, candidates=(), opts: SolveOptions = SolveOptions()) -> Barrier:
    """Build a truncation level lying below every candidate ``u`` field.

    First tries a constant level below the candidates and below a coercive
    companion solve, lowering it up to 20 times.  A constant can only pass
    where the frozen right-hand side is nonnegative, which fails as soon as
    ``λc₊ > 0``; then a spatially varying level is built from one linear
    solve (see ``_varying_barrier``).  Both are checked nodewise.
    """
    ops, mu = spec.ops, spec.mu
    cands = [check_field(spec.mesh, c, "candidate") for c in candidates]
    m_cand = min((float(np.min(c)) for c in cands), default=0.0)
    M1 = max(1.0, 1.0 - m_cand)
    hneg = np.maximum(-spec.h, 0.0)
    lp = max(spec.lam, 0.0)
    companion = linear_solve(
        (ops.A + sp.diags(spec.cminus)).tocsc(), -hneg - lp * spec.cplus * M1 - 1.0
    )
    m = min(m_cand, float(np.min(companion)), 0.0)
    for k in range(21):
        level = m - 2.0**k
        alpha = np.full(spec.mesh.size, np.expm1(mu * level) / mu)
        if 1.0 + mu * alpha[0] <= 0:
            break
        b = make_barrier(mu, alpha, "constant-fallback")
        if _is_lower(spec, b, 0.0):
            return b
    b = _varying_barrier(spec, M1)
    if not _is_lower(spec, b, opts.tol_lu):
        raise BarrierError("constructed barrier failed the lower-solution check", {"M1": M1})
    return b


def _varying_barrier(spec: ProblemSpec, M1: float) -> Barrier:
    """Spatial lower solution ``1 + μα = e^{-μM₁} Z`` with ``(A + μκ) Z = A·1``.

    With ``κ = λ⁺c₊M₂ + h⁻ + λ⁺c₊M₁ + 1`` the level is a lower solution as
    soon as ``min Z >= e^{-μM₂}``; ``M₂`` is doubled until that holds.  The
    induced ``u`` level is below ``-M₁``.
    """
    ops, mu = spec.ops, spec.mu
    hneg = np.maximum(-spec.h, 0.0)
    lp = max(spec.lam, 0.0)
    b = ops.A @ np.ones(spec.mesh.size)
    M2 = 1.0
    for _ in range(60):
        kappa = lp * spec.cplus * (M2 + M1) + hneg + 1.0
        Z = linear_solve((ops.A + sp.diags(mu * kappa)).tocsc(), b)
        if np.min(Z) > 0 and np.log(np.min(Z)) >= -mu * M2:
            one_mu_alpha = np.exp(-mu * M1 + np.log(Z))
            if np.min(one_mu_alpha) <= RESOLVABLE:
                raise BarrierError(
                    "barrier too close to -1/mu for double precision",
                    {"M1": M1, "M2": M2, "min_1_plus_mu_alpha": float(np.min(one_mu_alpha))},
                )
            return make_barrier(mu, (one_mu_alpha - 1.0) / mu, "constructed")
        M2 *= 2.0
    raise BarrierError("could not build a spatial barrier", {"M1": M1, "M2": M2})


# --- mountain pass ---------------------------------------------------------

def _h1_dist(ops, a, b) -> float:
    d = a - b
    return float(np.sqrt(max(d @ (ops.K @ d), 0.0)))


def mountain_pass(
    spec: ProblemSpec,
    barrier: Barrier,
    e1,
    e2,
    opts: SolveOptions = SolveOptions(),
    check_morse: bool = True,
) -> tuple[SolutionRecord, PSDiagnostics]:
    """Discretized-path mountain-pass search.

    Only the highest path point moves.  It is first pushed to the energy
    maximum along the chord through its neighbours, then takes a
    backtracked descent step along the H0^1 gradient ``K^{-1}∇I`` with the
    chord component removed.  Segments next to it are refined when they
    become long.  The path is redistributed by arclength
    every 50 iterations, keeping the top point as a node.
    """
    ops = spec.ops
    e1 = check_field(spec.mesh, e1, "e1")
    e2 = check_field(spec.mesh, e2, "e2")
    E = lambda v: energy_value(spec, barrier, v)  # noqa: E731
    N = opts.mp_path_points
    ts = np.linspace(0.0, 1.0, N)
    path = [(1 - t) * e1 + t * e2 for t in ts]
    ens = [E(p) for p in path]
    top = max(ens[1:-1])
    if top <= max(ens[0], ens[-1]) + 1e-12:
        raise GeometryAbsentError(
            "no mountain-pass geometry along the initial segment",
            {"path_max": top, "e1": ens[0], "e2": ens[-1]},
        )
    seg0 = _h1_dist(ops, e1, e2) / (N - 1)
    diag = PSDiagnostics()
    step = opts.mp_descent_step
    r = np.inf
    k = 1
    for it in range(opts.max_mp_iters):
        k = 1 + int(np.argmax(ens[1:-1]))
        p, grad = _ridge_max(spec, barrier, path, ens, k, opts.mp_tol)
        riesz = ops.solve_K(grad)
        r = float(np.sqrt(max(grad @ riesz, 0.0)))
        diag.energies.append(ens[k])
        diag.norms.append(h1_norm(ops, p))
        if np.max(np.abs(p)) > opts.ps_guard:
            diag.bounded = False
            raise UnboundedIterateError("mountain-pass iterate exceeded ps_guard", {"iteration": it}, iterate=p)
        if r <= opts.mp_tol * max(1.0, diag.norms[-1]):
            break
        tau = _tangent(ops, path, k)
        if tau is not None:
            riesz = riesz - (riesz @ (ops.K @ tau)) * tau
        for _ in range(opts.max_halvings + 1):
            trial = p - step * riesz
            e_t = E(trial)
            if e_t < ens[k]:
                break
            step *= 0.5
        else:
            break
        path[k], ens[k] = trial, e_t
        step = min(step * 1.5, 1.0)
        _refine(ops, path, ens, E, seg0)
        if (it + 1) % 50 == 0:
            path, ens = _redistribute(ops, path, ens, E, N)
    record = None
    try:
        record = newton_q(spec, barrier, path[k], opts, kind="mountain_pass")
    except SolverError as exc:
        exc.diagnostics.update({"mp_residual": r, "mp_iterations": len(diag.energies)})
        raise
    record.notes["mp_iterations"] = len(diag.energies)
    record.notes["mp_residual"] = r
    record.notes["endpoint_energy_max"] = max(ens[0], ens[-1])
    if check_morse:
        record.notes["morse_index"] = morse_index(spec, barrier, record.v)
    return record, diag


def _tangent(ops, path, k):
    """H0^1-normalized chord through the neighbours of node ``k``."""
    tau = path[k + 1] - path[k - 1]
    nt = float(np.sqrt(max(tau @ (ops.K @ tau), 0.0)))
    return None if nt == 0 else tau / nt


def _ridge_max(spec, barrier, path, ens, k, tol):
    """Newton-maximize the energy of node ``k`` along the local path tangent.

    Steps are capped at a quarter of the neighbour span so the node stays
    between its neighbours.  Updates ``path[k]``/``ens[k]`` in place and
    returns the node with its weak gradient.
    """
    ops = spec.ops
    p = path[k]
    grad = weak_residual(spec, barrier, p)
    tau = _tangent(ops, path, k)
    if tau is None:
        return p, grad
    span = float(np.sqrt(max((path[k + 1] - path[k - 1]) @ (ops.K @ (path[k + 1] - path[k - 1])), 0.0)))
    Ktau = ops.K @ tau
    for _ in range(8):
        gt = float(grad @ tau)
        if abs(gt) <= 1e-3 * tol:
            break
        curv = float(tau @ Ktau - (ops.q * f_lambda_prime(spec, barrier, p)) @ tau**2)
        if curv >= 0:
            break
        s = float(np.clip(-gt / curv, -0.25 * span, 0.25 * span))
        trial = p + s * tau
        e_t = energy_value(spec, barrier, trial)
        if e_t <= ens[k]:
            break
        p, ens[k] = trial, e_t
        grad = weak_residual(spec, barrier, p)
    path[k] = p
    return p, grad


def _refine(ops, path, ens, E, seg0, cap=400):
    """Insert midpoints next to the top node when segments grow past ``2*seg0``."""
    if len(path) >= cap:
        return
    k = 1 + int(np.argmax(ens[1:-1]))
    for j in (k, k - 1):
        if 0 <= j < len(path) - 1 and _h1_dist(ops, path[j], path[j + 1]) > 2 * seg0:
            mid = 0.5 * (path[j] + path[j + 1])
            path.insert(j + 1, mid)
            ens.insert(j + 1, E(mid))


def _redistribute(ops, path, ens, E, N):
    """Resample to ``N`` nodes equally spaced in arclength, keeping the top node."""
    k = 1 + int(np.argmax(ens[1:-1]))
    seg = np.array([_h1_dist(ops, path[j], path[j + 1]) for j in range(len(path) - 1)])
    s = np.concatenate([[0.0], np.cumsum(seg)])
    if s[-1] == 0:
        return path, ens
    targets = list(np.linspace(0.0, s[-1], N))
    j_top = int(np.argmin(np.abs(np.array(targets) - s[k])))
    j_top = min(max(j_top, 1), N - 2)
    new_path, new_ens = [], []
    for j, t in enumerate(targets):
        if j == j_top:
            new_path.append(path[k])
            new_ens.append(ens[k])
            continue
        if j == 0 or j == N - 1:
            src = 0 if j == 0 else len(path) - 1
            new_path.append(path[src])
            new_ens.append(ens[src])
            continue
        i = min(int(np.searchsorted(s, t, side="right")) - 1, len(path) - 2)
        w = 0.0 if seg[i] == 0 else (t - s[i]) / seg[i]
        p = (1 - w) * path[i] + w * path[i + 1]
        new_path.append(p)
        new_ens.append(E(p))
    return new_path, new_ens


def morse_index(spec: ProblemSpec, barrier: Barrier, v) -> int | None:
    """Number of negative eigenvalues of the energy Hessian (dense, n <= 2000)."""
    if spec.mesh.size > 2000:
        return None
    H = _jacobian(spec, barrier, np.asarray(v)).toarray()
    ev = np.linalg.eigvalsh(0.5 * (H + H.T))
    return int(np.sum(ev < -1e-10 * max(1.0, np.max(np.abs(ev)))))


def ray_blowdown(spec: ProblemSpec, barrier: Barrier, v, base=None, t_max: float = 2.0**60) -> float:
    """Smallest ``t = 2^k >= 1`` with ``I(base + t v) <= I(0) - 1``.

    Raises
    ------
    ValueError
        If ``v`` is not ``⪈ 0`` with ``c₊v ≢ 0`` and ``c₋v ≡ 0``.
    BlowdownNotFoundError
        If ``t`` passes ``t_max``.
    """
    v = check_field(spec.mesh, v, "direction")
    if np.any(v < 0) or not np.any(v > 0):
        raise ValueError("direction must be nonnegative and nonzero")
    if not np.any(spec.cplus * v > 0) or np.any(spec.cminus * v != 0):
        raise ValueError("direction needs cplus*v != 0 and cminus*v == 0")
    base = np.zeros_like(v) if base is None else check_field(spec.mesh, base, "base")
    target = energy_value(spec, barrier, np.zeros_like(v)) - 1.0
    t = 1.0
    while t <= t_max:
        if energy_value(spec, barrier, base + t * v) <= target:
            return t
        t *= 2.0
    raise BlowdownNotFoundError("energy does not decrease along the ray", {"t_max": t_max})


# --- multistart ------------------------------------------------------------

def random_starts(mesh, count: int, seed: int = 0, amplitude: float = 5.0, modes: int = 6) -> list[np.ndarray]:
    """Smooth random fields: sine series with decaying random coefficients.

    Overall scales are log-uniform in ``[amplitude/100, amplitude]`` so
    both small and large starts are represented.
    """
    rng = np.random.default_rng(seed)
    xs = []
    for k in range(mesh.dim):
        a, b = mesh.bounds[k]
        xs.append((mesh.coords[:, k] - a) / (b - a))
    out = []
    for _ in range(count):
        f = np.zeros(mesh.size)
        for j in range(1, modes + 1):
            if mesh.dim == 1:
                f += rng.standard_normal() / j * np.sin(j * np.pi * xs[0])
            else:
                for l in range(1, modes + 1):
                    f += rng.standard_normal() / (j * l) * np.sin(j * np.pi * xs[0]) * np.sin(l * np.pi * xs[1])
        scale = amplitude * 10.0 ** rng.uniform(-2.0, 0.0)
        out.append(scale * f / max(np.max(np.abs(f)), 1e-300))
    return out


def uniqueness_probe(
    spec: ProblemSpec,
    barrier: Barrier,
    starts,
    filter: Callable[[SolutionRecord], bool] | None = None,
    opts: SolveOptions = SolveOptions(),
    stats: dict | None = None,
) -> list[SolutionRecord]:
    """Newton from every start (given as ``u`` fields), deduplicated in sup-norm on ``u``.

    Starts below ``-1/μ`` are lifted onto the barrier before transforming.
    Failed starts are dropped and counted in ``stats["failed"]``.
    """
    found: list[SolutionRecord] = []
    failed = 0
    for u in starts:
        u = check_field(spec.mesh, u, "start")
        v0 = np.maximum(cole_hopf(u, spec.mu), barrier.alpha)
        try:
            rec = newton_q(spec, barrier, v0, opts)
        except SolverError:
            failed += 1
            continue
        if rec.residual > 10 * opts.newton_tol:
            failed += 1
            continue
        if filter is not None and not filter(rec):
            continue
        if all(np.max(np.abs(rec.u - other.u)) > 1e-6 for other in found):
            found.append(rec)
    if stats is not None:
        stats["failed"] = failed
        stats["starts"] = len(starts)
    return found
