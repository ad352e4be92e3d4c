"""Finite frequency cutoff, exclusion of +1 from the band, and quick tests.

Beyond the cutoff ``omega_bar`` the band provably stays clear of the
critical point +1 on the real-part side, so the exclusion conditions

    |Re Q_C(w) - 1| > delta_R(w)/2    or    |Im Q_C(w)| > delta_I(w)/2

only need checking on ``[0, omega_bar]``.  They are checked on a uniform
grid; this is a sampling check, not an interval certificate, and the
smallest slack is reported so callers can judge it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import Defective, InconsistentState, RhoTooLarge
from .freq_transform import FrequencyModel
from .inclusion_band import band_arrays


class VerdictKind(str, enum.Enum):
    ROBUST_STABLE = "RobustStable"
    UNSTABLE = "Unstable"
    INCONCLUSIVE = "Inconclusive"


class InconclusiveReason(str, enum.Enum):
    RHO_TOO_LARGE = "RhoTooLarge"
    PLUS_ONE_IN_BAND = "PlusOneInBand"
    DEGENERATE_POLYNOMIAL = "DegenerateZeroPolynomial"
    TANGENT_CROSSING = "TangentCrossing"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    zeta: int | None = None
    reason: InconclusiveReason | None = None
    note: str = ""

    @classmethod
    def robust_stable(cls, note: str = "") -> "Verdict":
        return cls(VerdictKind.ROBUST_STABLE, zeta=0, note=note)

    @classmethod
    def unstable(cls, zeta: int | None, note: str = "") -> "Verdict":
        return cls(VerdictKind.UNSTABLE, zeta=zeta, note=note)

    @classmethod
    def inconclusive(cls, reason: InconclusiveReason, note: str = "") -> "Verdict":
        return cls(VerdictKind.INCONCLUSIVE, reason=reason, note=note)


class _Proceed:
    def __repr__(self) -> str:
        return "PROCEED"


PROCEED = _Proceed()


@dataclass(frozen=True)
class CutoffReport:
    omega_bar: float
    d_bar: np.ndarray
    d_under: np.ndarray
    d_tilde: np.ndarray
    d_scalar: float
    passed: bool | None = None
    min_margin: float | None = None
    argmin_omega: float | None = None
    grid_points: int = 0


def omega_bar(fm: FrequencyModel) -> CutoffReport:
    rho = fm.rho_T
    if rho >= 2.0:
        raise RhoTooLarge(f"rho(T) = {rho:.6g} >= 2: uncertainty too large for the band test")
    n, n0, N = fm.n, fm.n0, fm.N
    d_bar = fm.d_seq.max(axis=2)
    d_under = fm.d_seq.min(axis=2)
    d_tilde = d_bar - d_under
    tr = fm.trace_d
    d_scalar = float((tr.max() - tr.min()) / (2 * n))
    quad = float(np.trace(d_tilde @ d_tilde + d_tilde.T @ d_tilde))
    inner = 2 * d_scalar + math.sqrt((2 * n - 1) / n * max(quad, 0.0))
    value = (math.factorial(n0) * (1 + N) / (4 - 2 * rho) * inner) ** (1.0 / (n0 + 1))
    return CutoffReport(
        omega_bar=value, d_bar=d_bar, d_under=d_under, d_tilde=d_tilde, d_scalar=d_scalar
    )


def exclusion_margin(fm: FrequencyModel, omegas) -> np.ndarray:
    """Slack of the better of the two exclusion conditions at each frequency."""
    c, hr, hi = band_arrays(fm, omegas)
    return np.maximum(np.abs(c.real - 1.0) - hr, np.abs(c.imag) - hi)


def real_condition_margin(fm: FrequencyModel, omegas) -> np.ndarray:
    """Slack of the real-part condition alone (the one guaranteed past the cutoff)."""
    c, hr, _ = band_arrays(fm, omegas)
    return np.abs(c.real - 1.0) - hr


def check_plus_one_excluded(
    fm: FrequencyModel, report: CutoffReport, grid_points: int = 4096
) -> CutoffReport:
    grid = np.linspace(0.0, report.omega_bar, grid_points)
    margin = exclusion_margin(fm, grid)
    idx = int(np.argmin(margin))
    worst = float(margin[idx])
    return replace(
        report,
        passed=worst > 0.0,
        min_margin=worst,
        argmin_omega=float(grid[idx]),
        grid_points=grid_points,
    )


def theorem2_trace_test(fm: FrequencyModel, tol: float = 1e-9):
    """Odd-count instability from the trace of ``M_hat(0)``.

    Returns an ``Unstable`` verdict (count unknown, an odd multiple of n) or
    :data:`PROCEED`.
    """
    tr = float(np.trace(fm.m_hat_zero))
    if abs(tr - fm.n) <= tol * max(1.0, fm.n):
        raise InconsistentState(
            f"tr(M_hat(0)) = {tr!r} equals n although +1 was excluded from the band"
        )
    if tr > fm.n:
        return Verdict.unstable(None, note="odd multiple of n unstable roots")
    return PROCEED


@dataclass(frozen=True)
class GershgorinReport:
    eigenvalues: np.ndarray
    radii: np.ndarray
    unstable: bool
    odd_count: int


def gershgorin_odd_test(
    m_hat0: np.ndarray,
    m_tilde: np.ndarray,
    variant: str = "row",
    cond_max: float = 1e8,
) -> GershgorinReport:
    """Modified Gershgorin circles for the interval matrix ``M(0)``.

    The system is declared unstable when an odd number of eigenvalues of
    ``m_hat0`` are real and exceed 1, and no connected group of circles
    touches both the real ray ``x > 1`` and the real ray ``x < 1``.
    """
    lam, V = np.linalg.eig(np.asarray(m_hat0, dtype=float))
    if np.linalg.cond(V) > cond_max:
        raise Defective("M_hat(0) is numerically defective; eigenvector basis too ill-conditioned")
    Vinv = np.linalg.inv(V)
    jordan_residual = Vinv @ m_hat0 @ V - np.diag(lam)
    R = np.abs(jordan_residual) + np.abs(Vinv) @ np.asarray(m_tilde) @ np.abs(V)
    radii = R.sum(axis=1) if variant == "row" else R.sum(axis=0)
    imag_tol = 1e-12 * max(1.0, float(np.max(np.abs(lam))))
    right = (np.abs(lam.imag) <= imag_tol) & (lam.real > 1.0)
    odd = int(np.count_nonzero(right))

    def meets_ray(c: complex, r: float, right: bool) -> bool:
        if abs(c.imag) > r:
            return False
        half = math.sqrt(max(r * r - c.imag**2, 0.0))
        return c.real + half > 1.0 if right else c.real - half < 1.0

    # Circles overlapping each other form components; every component that
    # reaches the right ray x > 1 must stay clear of the left ray x < 1.
    k = lam.size
    overlap = np.abs(lam[:, None] - lam[None, :]) <= radii[:, None] + radii[None, :]
    _, labels = connected_components(overlap, directed=False)
    clear = True
    for comp in np.unique(labels):
        members = [i for i in range(k) if labels[i] == comp]
        touches_right = any(meets_ray(complex(lam[i]), float(radii[i]), True) for i in members)
        touches_left = any(meets_ray(complex(lam[i]), float(radii[i]), False) for i in members)
        if touches_right and touches_left:
            clear = False
    return GershgorinReport(
        eigenvalues=lam, radii=radii, unstable=bool(odd % 2 == 1 and clear), odd_count=odd
    )


def theorem1_odd_instability(fm: FrequencyModel, variant: str = "row", cond_max: float = 1e8):
    """Side test, never used by the main pipeline.  ``Unstable`` or ``None``."""
    rep = gershgorin_odd_test(fm.m_hat_zero, fm.m_tilde, variant=variant, cond_max=cond_max)
    if rep.unstable:
        return Verdict.unstable(None, note="odd number of unstable roots (Gershgorin test)")
    return None
