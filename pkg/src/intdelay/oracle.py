"""Independent ground truth for the certifier.

Nothing here uses the closed-form transform or the crossing machinery:
kernel transforms come from Gauss-Legendre quadrature over ``[0, taubar]``,
root counts from the argument principle applied to ``det(I - M(jw))`` and
to paired eigenvalue branches, and stability from direct time stepping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import Degenerate, PairingAmbiguity, StepTooCoarse
from .freq_transform import build_frequency_model, m_hat_many
from .inclusion_band import band_arrays
from .kernel_model import ConcreteSplineKernel, SplineKernelBounds, difference_coefficients, eval_basis, validate

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


# ---------------------------------------------------------------- sampling


def sample_admissible_kernel(bounds: SplineKernelBounds, seed) -> ConcreteSplineKernel:
    """Coefficients drawn uniformly between the bounds.

    The basis is nonnegative on ``[0, taubar]``, so coefficient-wise bounds
    give pointwise bounds on every entry.
    """
    rng = np.random.default_rng(seed)
    b = rng.uniform(bounds.b_lower, bounds.b_upper)
    return ConcreteSplineKernel(n=bounds.n, n0=bounds.n0, h=bounds.h, N=bounds.N, b=b)


def _tail_constraints(n0: int, N: int) -> np.ndarray:
    """Linear map from coefficients ``b_0..b_{N-1}`` to tail moments ``sum_k d_k k^m``."""
    eye = np.eye(N)
    d = difference_coefficients(eye)  # row j: jump sequence of the unit coefficient j
    k = np.arange(N + 1, dtype=float)
    return np.stack([d @ k**m for m in range(n0 + 1)])  # (n0+1, N)


def project_tail_free(b: np.ndarray, n0: int) -> np.ndarray:
    """Nearest coefficient tensor whose spline vanishes identically beyond ``taubar``."""
    b = np.asarray(b, dtype=float)
    if n0 == 0:
        return b.copy()
    C = _tail_constraints(n0, b.shape[-1])
    _, s, vt = np.linalg.svd(C)
    rank = int(np.sum(s > 1e-12 * s[0]))
    null = vt[rank:]
    return (b @ null.T) @ null


def random_bounds(
    rng: np.random.Generator,
    n: int,
    n0: int,
    N: int,
    h: float = 0.5,
    scale: float = 1.0,
    spread: float = 0.0,
) -> SplineKernelBounds:
    """Random validated bounds; ``spread`` is the relative half-width of the strip."""
    if n0 >= 1 and N <= n0:
        raise ValueError("need N > n0 for a tail-free spline")
    mid = project_tail_free(rng.normal(scale=scale, size=(n, n, N)), n0)
    half = spread * np.abs(rng.normal(scale=scale, size=(n, n, N)))
    return validate({"n": n, "n0": n0, "h": h, "N": N, "b_upper": mid + half, "b_lower": mid - half})


# ---------------------------------------------------------------- transforms


def basis_transforms(n0: int, h: float, N: int, omegas) -> np.ndarray:
    """``int_0^{N h} p_{n0,k}(tau) exp(-j w tau) dtau`` by composite Gauss-Legendre.

    Returns shape ``(len(omegas), N)``; a scalar frequency gives shape ``(N,)``.
    """
    scalar = np.ndim(omegas) == 0
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    pieces = max(1, int(math.ceil(float(np.max(np.abs(omegas))) * h / 2.0)))
    edges = np.linspace(0.0, h, pieces + 1)
    half = 0.5 * np.diff(edges)
    local = (edges[:-1, None] + half[:, None] * (_GL_NODES + 1.0)).ravel()
    wts = np.repeat(half, _GL_NODES.size) * np.tile(_GL_WEIGHTS, pieces)
    out = np.zeros((omegas.size, N), dtype=complex)
    for c in range(N):
        tau = c * h + local
        E = np.stack([eval_basis(n0, k, h, tau) for k in range(c + 1)])  # (c+1, Q)
        for lo in range(0, omegas.size, 256):
            w = omegas[lo : lo + 256]
            phase = np.exp(-1j * np.outer(w, tau)) * wts
            out[lo : lo + 256, : c + 1] += phase @ E.T
    return out[0] if scalar else out


def kernel_transform(kernel: ConcreteSplineKernel, omegas) -> np.ndarray:
    """``M(jw)`` of a concrete kernel truncated to ``[0, taubar]``; ``(W, n, n)`` or ``(n, n)``."""
    scalar = np.ndim(omegas) == 0
    w = np.atleast_1d(np.asarray(omegas, dtype=float))
    P = basis_transforms(kernel.n0, kernel.h, kernel.N, np.abs(w))
    val = np.einsum("ijk,wk->wij", kernel.b, P)
    val[w < 0] = np.conj(val[w < 0])
    return val[0] if scalar else val


def _kernel_variation(kernel: ConcreteSplineKernel) -> np.ndarray:
    """Per-entry ``|a(0)| + |a(taubar-)| + TV(a)`` from dense sampling."""
    taubar = kernel.tau_bar
    tau = np.linspace(0.0, taubar, 200 * kernel.N + 1)
    tau[-1] = taubar * (1 - 1e-12)
    vals = kernel(tau)  # (T, n, n)
    tv = np.abs(np.diff(vals, axis=0)).sum(axis=0)
    # Knot jumps for n0 = 0 are captured because samples straddle every knot.
    return np.abs(vals[0]) + np.abs(vals[-1]) + tv


def omega_bound(kernel: ConcreteSplineKernel) -> float:
    """Frequency past which ``||M(jw)||_F < 1/2``, so no branch can reach +1."""
    V = _kernel_variation(kernel)
    return max(2.2 * float(np.sqrt(np.sum(V**2))), 1.0 / kernel.tau_bar)


# ---------------------------------------------------------------- winding


@dataclass(frozen=True)
class WindingReport:
    grid: np.ndarray
    loci: np.ndarray  # (W, n) eigenvalue branches over the grid
    winding: int  # clockwise encirclements of +1 over the whole real frequency axis
    det_winding: int
    min_distance_to_one: float


def _pair(prev: np.ndarray, cur: np.ndarray) -> tuple[np.ndarray, float]:
    cost = np.abs(prev[:, None] - cur[None, :])
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty_like(cols)
    perm[rows] = cols
    worst = float(cost[rows, cols].max())
    return cur[perm], worst


def _separation(vals: np.ndarray) -> float:
    if vals.size < 2:
        return math.inf
    d = np.abs(vals[:, None] - vals[None, :])
    return float(d[~np.eye(vals.size, dtype=bool)].min())


def nyquist_winding(
    kernel: ConcreteSplineKernel,
    omega_max: float | None = None,
    grid_points: int = 4000,
    max_depth: int = 12,
    tol_degenerate: float = 1e-9,
) -> WindingReport:
    """Count right-half-plane characteristic roots from the frequency response.

    Eigenvalue branches are paired between neighbouring frequencies with an
    optimal assignment; intervals where a branch moves more than half the
    eigenvalue separation, or its angle about +1 turns by more than 0.5 rad,
    are bisected.  Past ``omega_max`` every branch stays inside the disk of
    radius 1/2, so only the residual angle back to the real axis is added.
    """
    w_hi = max(omega_bound(kernel), omega_max or 0.0)

    def eig_at(w: float) -> np.ndarray:
        return np.linalg.eigvals(kernel_transform(kernel, w))

    grid = np.linspace(0.0, w_hi, grid_points)
    grid_eigs = np.linalg.eigvals(kernel_transform(kernel, grid))
    ws = [0.0]
    loci = [grid_eigs[0]]
    for w_next, e_next in zip(grid[1:], grid_eigs[1:]):
        pending = [(float(w_next), e_next, 0)]
        while pending:
            w, e, depth = pending[-1]
            prev = loci[-1]
            paired, worst = _pair(prev, e)
            turn = np.abs(np.angle((paired - 1.0) / (prev - 1.0)))
            sep = min(_separation(prev), _separation(paired))
            ambiguous = sep > 1e-6 and worst > 0.5 * sep
            if ambiguous or np.any(turn > 0.5):
                if depth >= max_depth:
                    raise PairingAmbiguity(f"cannot track eigenvalue branches near w = {w:.6g}")
                mid = 0.5 * (ws[-1] + w)
                pending.append((mid, eig_at(mid), depth + 1))
                continue
            pending.pop()
            ws.append(w)
            loci.append(paired)
    L = np.array(loci)
    dist = float(np.min(np.abs(L - 1.0)))
    if dist < tol_degenerate:
        raise Degenerate(f"an eigenvalue locus passes within {dist:.3g} of +1")
    ang = np.unwrap(np.angle(L - 1.0), axis=0)
    # Tail: from w_hi each branch returns to the origin, i.e. angle pi about +1.
    resid = np.angle(-(L[-1] - 1.0))
    sweep = float(np.sum(ang[-1] - ang[0] - resid))
    # det(I - M) over the same grid as an independent cross-check.
    det = np.prod(1.0 - L, axis=1)
    dang = np.unwrap(np.angle(det))
    dsweep = float(dang[-1] - dang[0] - np.angle(det[-1]))
    # Conjugate symmetry doubles the half-axis sweep; clockwise is negative angle.
    winding = int(round(-2.0 * sweep / (2.0 * math.pi)))
    det_winding = int(round(-2.0 * dsweep / (2.0 * math.pi)))
    return WindingReport(
        grid=np.array(ws), loci=L, winding=winding, det_winding=det_winding,
        min_distance_to_one=dist,
    )


# ---------------------------------------------------------------- simulation


@dataclass(frozen=True)
class Trajectory:
    dt: float
    t: np.ndarray
    samples: np.ndarray  # stored state, true state is samples * exp(log_scale)
    log_scale: float
    growth_rate: float


def _kernel_weights(kernel: ConcreteSplineKernel, dt: float, L: int) -> np.ndarray:
    """Trapezoid weights ``w_l dt A(l dt)`` with one-sided limits at jumps."""
    tau = np.arange(L + 1) * dt
    eps = 1e-9 * dt
    right = kernel(tau)
    left = kernel(np.maximum(tau - eps, 0.0))
    A = 0.5 * (left + right)
    A[0] = right[0]
    A[-1] = left[-1]
    w = np.full(L + 1, dt)
    w[0] = w[-1] = 0.5 * dt
    return w[:, None, None] * A


def simulate(
    kernel: ConcreteSplineKernel,
    phi=None,
    dt: float | None = None,
    T_end: float | None = None,
) -> Trajectory:
    """Time-step ``x(t) = int_0^taubar A(tau) x(t - tau) dtau``.

    ``phi`` gives the state on ``[0, taubar]`` (a callable of t, a constant
    vector or ``None`` for ones).  The ``l = 0`` trapezoid term is solved
    implicitly.  The state is renormalised to avoid overflow and the growth
    rate is the least-squares slope of ``log ||x||`` on ``[T_end/2, T_end]``.
    """
    h, n, taubar = kernel.h, kernel.n, kernel.tau_bar
    if dt is None:
        dt = h / 16
    m = h / dt
    if abs(m - round(m)) > 1e-12 * max(1.0, m) or round(m) < 1:
        raise StepTooCoarse(f"dt={dt} does not divide h={h}")
    m = int(round(m))
    dt = h / m
    if T_end is None:
        T_end = 40.0 * taubar
    L = m * kernel.N
    steps = int(math.ceil(T_end / dt))
    t = np.arange(steps + 1) * dt
    x = np.zeros((steps + 1, n))
    if phi is None:
        x[: L + 1] = 1.0
    elif callable(phi):
        x[: L + 1] = np.array([np.broadcast_to(phi(ti), (n,)) for ti in t[: L + 1]])
    else:
        x[: L + 1] = np.broadcast_to(np.asarray(phi, dtype=float), (n,))
    W = _kernel_weights(kernel, dt, L)
    lhs = np.eye(n) - W[0]
    Wrest = W[1:][::-1]  # aligned with x[i-L : i]
    log_scale = 0.0
    lognorm = np.full(steps + 1, -np.inf)
    for i in range(L + 1, steps + 1):
        rhs = np.einsum("lij,lj->i", Wrest, x[i - L : i])
        x[i] = np.linalg.solve(lhs, rhs)
        big = float(np.max(np.abs(x[i])))
        if big > 1e100:
            x[: i + 1] /= big
            log_scale += math.log(big)
        nrm = float(np.linalg.norm(x[i]))
        lognorm[i] = (math.log(nrm) + log_scale) if nrm > 0 else -np.inf
    tail = t >= T_end / 2
    ln = lognorm[tail]
    if np.all(np.isneginf(ln)):
        rate = -math.inf
    else:
        ln = np.maximum(ln, np.max(ln[np.isfinite(ln)]) - 700.0) if np.any(np.isneginf(ln)) else ln
        rate = float(np.polyfit(t[tail], ln, 1)[0])
    return Trajectory(dt=dt, t=t, samples=x, log_scale=log_scale, growth_rate=rate)


# ---------------------------------------------------------------- inclusions


@dataclass(frozen=True)
class InclusionReport:
    square_violations: int
    rectangle_violations: int
    checks: int
    worst_square_excess: float
    worst_rectangle_excess: float


def verify_inclusions(
    bounds: SplineKernelBounds,
    n_samples: int = 1000,
    n_freqs: int = 50,
    seed: int = 0,
    omega_max: float | None = None,
    tol: float = 1e-9,
) -> InclusionReport:
    """Monte Carlo check that sampled transforms sit in their squares and eigenvalues in the band."""
    fm = build_frequency_model(bounds)
    ss = np.random.SeedSequence(seed)
    freq_seed, kern_seed = ss.spawn(2)
    if omega_max is None:
        omega_max = 60.0 / bounds.tau_bar
    omegas = np.sort(np.random.default_rng(freq_seed).uniform(0.0, omega_max, n_freqs))
    kernels = [
        sample_admissible_kernel(bounds, s) for s in kern_seed.spawn(n_samples)
    ]
    B = np.stack([k.b for k in kernels])  # (S, n, n, N)
    mh = m_hat_many(fm, omegas)
    centers, hr, hi = band_arrays(fm, omegas)
    P_all = basis_transforms(bounds.n0, bounds.h, bounds.N, omegas)
    sq_bad = rect_bad = 0
    sq_worst = rect_worst = -math.inf
    for w_idx, w in enumerate(omegas):
        M = B @ P_all[w_idx]  # (S, n, n)
        dev = M - mh[w_idx]
        scale = tol * (1.0 + np.abs(mh[w_idx]))
        ex = np.maximum(np.abs(dev.real), np.abs(dev.imag)) - fm.m_tilde - scale
        sq_bad += int(np.count_nonzero(np.any(ex > 0, axis=(1, 2))))
        sq_worst = max(sq_worst, float(ex.max()))
        lam = np.linalg.eigvals(M)
        rtol = tol * (1.0 + abs(centers[w_idx]))
        er = np.abs(lam.real - centers[w_idx].real) - hr[w_idx] - rtol
        ei = np.abs(lam.imag - centers[w_idx].imag) - hi[w_idx] - rtol
        e = np.maximum(er, ei)
        rect_bad += int(np.count_nonzero(np.any(e > 0, axis=1)))
        rect_worst = max(rect_worst, float(e.max()))
    return InclusionReport(
        square_violations=sq_bad,
        rectangle_violations=rect_bad,
        checks=n_samples * n_freqs,
        worst_square_excess=sq_worst,
        worst_rectangle_excess=rect_worst,
    )
