"""Counting encirclements of +1 by the band centre, and the full verdict pipeline.

The centre ``Q_C`` crosses the real axis (for ``x = h w > 0``) only at the
odd-multiplicity roots of the crossover polynomial.  Those crossings form a
sequence built from the base roots in ``[0, pi]`` by reflection and
``2 pi`` shifts; the real values there decay like ``x^-(n0+1)``.  Half
encirclements of +1 are the consecutive pairs of crossing values that
straddle 1, and their orientation alternates with the crossing index.

Two counters are provided.  :func:`theorem3_zeta` builds the whole
extended sequence up to a horizon ``J``.  :func:`section4_algorithm` walks
it block by block, only updating values that can still exceed 1.

Both counters merge the coincident abscissae produced when a base root sits
at 0 or pi (its reflected and shifted images are the same point).  Keeping
those duplicates flips the alternating sign for every later crossing; the
``literal=True`` switches reproduce the unmerged behaviour for comparison.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .cutoff_check import (
    PROCEED,
    CutoffReport,
    InconclusiveReason,
    Verdict,
    check_plus_one_excluded,
    omega_bar,
    theorem2_trace_test,
)
from .errors import (
    CounterDisagreement,
    DegenerateZeroPolynomial,
    NonTermination,
    RhoTooLarge,
    TangentCrossing,
)
from .freq_transform import FrequencyModel, build_frequency_model, m_hat_many
from .kernel_model import SplineKernelBounds
from .trig_roots import (
    TOL_CIRCLE,
    TOL_CIRCLE_RAW,
    TOL_CLUSTER,
    TOL_COEFF,
    RootSet,
    f_coefficients,
    roots_in_0_pi,
)


@dataclass(frozen=True)
class CrossoverData:
    x: np.ndarray
    X: np.ndarray
    g: np.ndarray  # base index (1-based) of each entry; 0 for the sentinel and terminal
    v: np.ndarray
    mu: np.ndarray
    J: int
    alpha: int
    merged: int  # coincident abscissae removed
    contributions: np.ndarray  # signed half-encirclement at each pair index

    @property
    def sentinel_pair_counts(self) -> bool:
        """True when the pair (sentinel, first crossing) contributes, so
        summing from index 1 instead of 0 would change the count."""
        return bool(self.contributions.size and self.contributions[0] != 0)


@dataclass
class AlgorithmRound:
    z: list[float]
    jumps: list[int]
    beta: int
    j_prime: int
    updates: int
    gamma: dict[int, int]


@dataclass
class AlgorithmTrace:
    rounds: list[AlgorithmRound] = field(default_factory=list)
    total_jumps: int = 0
    updates: int = 0
    decided_at_step: int = 0


def _center_real(fm: FrequencyModel, xs: np.ndarray) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    mh = m_hat_many(fm, xs / fm.h)
    return np.trace(mh, axis1=1, axis2=2).real / fm.n


def base_values(fm: FrequencyModel, roots: RootSet) -> np.ndarray:
    """Real part of the band centre at each base root (``x = 0`` uses the trace limit)."""
    return _center_real(fm, roots.xs)


def sentinel_value(fm: FrequencyModel) -> float:
    """Starting value at ``x = 0``.

    0 whenever ``tr(M_hat(0))/n < 1`` (only the side of +1 matters), the
    true limit otherwise so the first descent through 1 is counted.
    """
    q0 = float(np.trace(fm.m_hat_zero)) / fm.n
    return 0.0 if q0 < 1.0 else q0


def horizon(alpha: int, X: np.ndarray, n0: int) -> int:
    if alpha == 0:
        return 0
    top = float(np.max(np.abs(X)))
    kbar = (top ** (1.0 / (n0 + 1)) + 1.0) / 2.0
    return 2 * alpha * math.ceil(kbar) + alpha


TOL_V = 1e-9


def _tol_v(X: np.ndarray, rel: float = TOL_V) -> float:
    return rel * (1.0 + float(np.max(X**2, initial=0.0)))


def extended_sequence(
    xs: np.ndarray, Xs: np.ndarray, n0: int, blocks: int, merge: bool = True
) -> tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    """Crossing abscissae and values for ``blocks`` reflected/shifted copies of the base.

    Block ``q`` holds ``x_g + pi q`` (q even, ascending g) or
    ``pi (q + 1) - x_g`` (q odd, descending g).
    """
    alpha = len(xs)
    out_x: list[float] = []
    out_X: list[float] = []
    out_g: list[int] = []
    merged = 0
    for q in range(blocks):
        order = range(alpha) if q % 2 == 0 else range(alpha - 1, -1, -1)
        for g in order:
            xg, Xg = float(xs[g]), float(Xs[g])
            if q % 2 == 0:
                x = xg + math.pi * q
                sign = 1.0
            else:
                x = math.pi * (q + 1) - xg
                sign = -1.0
            if q == 0:
                X = Xg
            elif xg == 0.0:
                X = 0.0
            else:
                X = (sign * xg / x) ** (n0 + 1) * Xg
            # A base root at 0 (pi) has coincident shifted (reflected) and
            # reflected (shifted) images; the earlier copy already stands for it.
            if merge and q >= 1 and ((q % 2 == 1 and xg == math.pi) or (q % 2 == 0 and xg == 0.0)):
                merged += 1
                continue
            out_x.append(x)
            out_X.append(X)
            out_g.append(g + 1)
    return np.array(out_x), np.array(out_X), np.array(out_g, dtype=int), merged


def theorem3_zeta(
    fm: FrequencyModel, roots: RootSet, literal: bool = False, tol_v: float = TOL_V
) -> tuple[int, CrossoverData]:
    """Count unstable roots from the full extended crossing sequence.

    With ``literal=False`` (default) coincident abscissae are merged, the
    sentinel follows :func:`sentinel_value` and a terminal 0 closes the
    sequence.  ``literal=True`` keeps the duplicates and a 0 sentinel.
    Raises :class:`TangentCrossing` when a crossing value is 1 within tolerance.
    """
    xs = roots.xs
    alpha = len(xs)
    Xb = base_values(fm, roots)
    J = horizon(alpha, Xb, fm.n0)
    blocks = J // alpha if alpha else 0
    x, X, g, merged = extended_sequence(xs, Xb, fm.n0, blocks, merge=not literal)
    if not literal:
        # The horizon bound is sufficient; extend anyway if the tail is not yet silent.
        while alpha and np.any(np.abs(X[-alpha:]) >= 1.0):
            blocks += 2
            x, X, g, merged = extended_sequence(xs, Xb, fm.n0, blocks, merge=True)
    x0 = 0.0 if literal else sentinel_value(fm)
    x_all = np.concatenate([[0.0], x])
    X_all = np.concatenate([[x0], X])
    g_all = np.concatenate([[0], g])
    if not literal:
        x_all = np.append(x_all, np.inf)
        X_all = np.append(X_all, 0.0)
        g_all = np.append(g_all, 0)
    tol_v = _tol_v(X_all, tol_v)
    if np.any(np.abs(X_all - 1.0) <= tol_v):
        raise TangentCrossing("a crossover value of the band centre equals 1 within tolerance")
    v = (X_all[:-1] - 1.0) * (X_all[1:] - 1.0)
    mu = np.diff(X_all)
    idx = np.arange(v.size)
    contrib = np.where(v < -tol_v, (-1.0) ** idx * np.sign(mu), 0.0).astype(int)
    zeta = fm.n * abs(int(contrib.sum()))
    data = CrossoverData(
        x=x_all, X=X_all, g=g_all, v=v, mu=mu, J=J, alpha=alpha, merged=merged,
        contributions=contrib,
    )
    return zeta, data


def _jump(a: float, b: float, parity: int) -> int:
    if (a - 1.0) * (b - 1.0) >= 0.0:
        return 0
    ascent = b > a
    even = parity % 2 == 0
    return 1 if ascent == even else -1


def section4_algorithm(
    fm: FrequencyModel,
    roots: RootSet,
    order: list[int] | None = None,
    literal: bool = False,
) -> tuple[int, AlgorithmTrace]:
    """Block-by-block jump counting.

    ``order`` permutes the base roots (default ascending, which the
    reflection bookkeeping requires).  ``literal=True`` runs the loop
    exactly as written: 0 sentinel, no merging of a block boundary that
    repeats the same point.  The default skips that zero-length pair and
    shifts the parity of everything after it.
    """
    xs = roots.xs
    Xb = base_values(fm, roots)
    if order is not None:
        xs = xs[list(order)]
        Xb = Xb[list(order)]
    alpha = len(xs)
    n0 = fm.n0
    trace = AlgorithmTrace()
    x0 = 0.0 if literal else sentinel_value(fm)
    if alpha == 0 or float(np.max(np.abs(Xb))) < 1.0:
        trace.decided_at_step = 5
        if x0 > 1.0:
            # Only possible above the trace threshold: the single descent toward 0.
            trace.total_jumps = -1
            return fm.n, trace
        return 0, trace

    z = [x0] + [float(v) for v in Xb]
    beta, jp = 1, 1
    gamma = {-1: 0, 1: 0}
    shift = 0
    dup_start = 0
    n_zero = int(np.count_nonzero(xs == 0.0))
    n_pi = int(np.count_nonzero(xs == math.pi))
    limit = 10 * max(horizon(alpha, Xb, n0), 1) + 10
    total = 0
    for _ in range(limit):
        # Step 7.
        jumps = []
        for i in range(alpha):
            if i < dup_start:
                continue
            parity = i + (1 - beta) * alpha // 2 - shift
            j = _jump(z[i], z[i + 1], parity)
            if j:
                jumps.append(j)
        total += sum(jumps)
        snapshot = list(z)
        # Step 8: the last value of this block starts the next one.
        z[0] = z[alpha]
        # Step 9.
        if beta == -1:
            z[1:] = z[:0:-1]
        # Step 10.
        updates = 0
        for i in range(1, alpha + 1):
            if abs(z[i]) > 1.0:
                xi = float(xs[i - 1])
                z[i] = float(Xb[i - 1] * (xi / (xi - 2 * math.pi * beta * jp)) ** (n0 + 1))
                updates += 1
        trace.updates += updates
        # Step 11.
        if beta == 1:
            z[1:] = z[:0:-1]
        # The next block opens with images of base roots at pi (reflection)
        # or at 0 (shift) that coincide with the end of this block.
        dup_start = 0 if literal else (n_pi if beta == 1 else n_zero)
        shift += dup_start
        # Steps 12-13.
        beta = -beta
        jp += (1 + beta) // 2
        # Step 14.
        if not any(abs(v) > 1.0 for v in z):
            gamma[beta] = 1
        trace.rounds.append(
            AlgorithmRound(z=snapshot, jumps=jumps, beta=-beta, j_prime=jp, updates=updates,
                           gamma=dict(gamma))
        )
        # Step 15.
        if gamma[-1] and gamma[1]:
            trace.total_jumps = total
            trace.decided_at_step = 15
            return fm.n * abs(total), trace
    raise NonTermination(f"jump counting did not settle within {limit} rounds")


@dataclass(frozen=True)
class PipelineOptions:
    grid_points: int = 4096
    tol_circle: float = TOL_CIRCLE
    tol_circle_raw: float = TOL_CIRCLE_RAW
    tol_cluster: float = TOL_CLUSTER
    tol_coeff: float = TOL_COEFF
    tol_v: float = TOL_V
    cluster: bool = True
    omega_switch: float | None = None


@dataclass
class PipelineResult:
    verdict: Verdict
    decided_at_step: int
    rho: float | None = None
    omega_bar: float | None = None
    min_margin: float | None = None
    trace_m0: float | None = None
    alpha: int | None = None
    zeta_theorem: int | None = None
    zeta_iterative: int | None = None
    updates: int | None = None
    roots: RootSet | None = None
    base_X: np.ndarray | None = None
    cutoff: CutoffReport | None = None
    elapsed: float = 0.0

    def summary(self) -> dict:
        return {
            "verdict": self.verdict.kind.value,
            "zeta": self.verdict.zeta,
            "reason": self.verdict.reason.value if self.verdict.reason else None,
            "decided_at_step": self.decided_at_step,
            "rho_T": self.rho,
            "omega_bar": self.omega_bar,
            "min_margin": self.min_margin,
            "trace_M_hat_0": self.trace_m0,
            "alpha": self.alpha,
            "zeta_theorem": self.zeta_theorem,
            "zeta_iterative": self.zeta_iterative,
            "step10_updates": self.updates,
            "note": self.verdict.note,
        }


def full_pipeline(
    model: SplineKernelBounds, options: PipelineOptions | None = None
) -> PipelineResult:
    """Validated model in, verdict plus diagnostics out.

    Above the trace threshold the quick test already proves instability;
    the counters still run to report the exact count.
    """
    opts = options or PipelineOptions()
    start = time.perf_counter()
    fm = build_frequency_model(model, omega_switch=opts.omega_switch)
    res = PipelineResult(verdict=Verdict.inconclusive(InconclusiveReason.RHO_TOO_LARGE), decided_at_step=1)

    def done(r: PipelineResult) -> PipelineResult:
        r.elapsed = time.perf_counter() - start
        return r

    res.rho = fm.rho_T
    res.trace_m0 = float(np.trace(fm.m_hat_zero))
    try:
        cut = omega_bar(fm)
    except RhoTooLarge as exc:
        res.verdict = Verdict.inconclusive(InconclusiveReason.RHO_TOO_LARGE, str(exc))
        return done(res)
    cut = check_plus_one_excluded(fm, cut, opts.grid_points)
    res.cutoff = cut
    res.omega_bar, res.min_margin = cut.omega_bar, cut.min_margin
    if not cut.passed:
        res.decided_at_step = 2
        res.verdict = Verdict.inconclusive(
            InconclusiveReason.PLUS_ONE_IN_BAND,
            f"+1 inside the band near w = {cut.argmin_omega:.6g}",
        )
        return done(res)
    quick = theorem2_trace_test(fm)
    try:
        roots = roots_in_0_pi(
            f_coefficients(fm),
            tol_circle=opts.tol_circle,
            tol_cluster=opts.tol_cluster,
            cluster=opts.cluster,
            tol_coeff=opts.tol_coeff,
            tol_circle_raw=opts.tol_circle_raw,
        )
    except DegenerateZeroPolynomial as exc:
        res.decided_at_step = 4
        if quick is not PROCEED:
            res.verdict = quick
            res.decided_at_step = 3
        else:
            res.verdict = Verdict.inconclusive(InconclusiveReason.DEGENERATE_POLYNOMIAL, str(exc))
        return done(res)
    res.roots = roots
    res.alpha = roots.alpha
    res.base_X = base_values(fm, roots)
    try:
        z3, _ = theorem3_zeta(fm, roots, tol_v=opts.tol_v)
        z4, trace = section4_algorithm(fm, roots)
    except TangentCrossing as exc:
        res.decided_at_step = 7
        res.verdict = Verdict.inconclusive(InconclusiveReason.TANGENT_CROSSING, str(exc))
        return done(res)
    res.zeta_theorem, res.zeta_iterative, res.updates = z3, z4, trace.updates
    if z3 != z4:
        raise CounterDisagreement(f"full-sequence count {z3} differs from iterative count {z4}")
    if quick is not PROCEED:
        res.decided_at_step = 3
        res.verdict = Verdict.unstable(z3, note=quick.note)
        return done(res)
    res.decided_at_step = trace.decided_at_step
    res.verdict = Verdict.robust_stable() if z3 == 0 else Verdict.unstable(z3)
    return done(res)
