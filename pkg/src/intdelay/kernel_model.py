"""Uncertain integral delay systems with spline-form kernel bounds.

The kernel ``A(tau)`` of ``x(t) = int_0^taubar A(tau) x(t - tau) dtau`` is only
known to lie elementwise between two splines built on the truncated-power
basis

    p_{n0,k}(tau) = (tau - k h)^n0 H(tau - k h) - (tau - (k+1) h)^n0 H(tau - (k+1) h)

with ``k = 0..N-1`` and ``taubar = N h``.  Coefficient tensors are indexed
``[row, col, knot]`` and all indices in this package are zero-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Literal, Mapping

import numpy as np

from .errors import (
    BoundOrderViolation,
    HorizonMismatch,
    IndexOutOfRange,
    NonPositiveStep,
    NonVanishingTail,
    ShapeMismatch,
    ValidationError,
    ZeroKnots,
)

TAIL_RTOL = 1e-9
HORIZON_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class SplineKernelBounds:
    """Validated description of the uncertain system.

    Build instances through :func:`validate`; the constructor does not check
    invariants.
    """

    n: int
    n0: int
    h: float
    N: int
    b_upper: np.ndarray
    b_lower: np.ndarray

    @property
    def tau_bar(self) -> float:
        return self.N * self.h

    @property
    def b_mid(self) -> np.ndarray:
        return 0.5 * (self.b_upper + self.b_lower)

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "n0": self.n0,
            "h": self.h,
            "N": self.N,
            "b_upper": self.b_upper.tolist(),
            "b_lower": self.b_lower.tolist(),
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SplineKernelBounds):
            return NotImplemented
        return (
            (self.n, self.n0, self.h, self.N) == (other.n, other.n0, other.h, other.N)
            and np.array_equal(self.b_upper, other.b_upper)
            and np.array_equal(self.b_lower, other.b_lower)
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True, eq=False)
class ConcreteSplineKernel:
    """One admissible kernel: a single coefficient tensor ``b``."""

    n: int
    n0: int
    h: float
    N: int
    b: np.ndarray

    @property
    def tau_bar(self) -> float:
        return self.N * self.h

    def as_bounds(self) -> SplineKernelBounds:
        """Zero-uncertainty bounds pinned to this kernel (validated)."""
        return validate(
            {"n": self.n, "n0": self.n0, "h": self.h, "N": self.N,
             "b_upper": self.b, "b_lower": self.b}
        )

    def __call__(self, tau) -> np.ndarray:
        """Kernel matrix at ``tau``; shape ``(..., n, n)``."""
        tau = np.asarray(tau, dtype=float)
        basis = np.stack([eval_basis(self.n0, k, self.h, tau) for k in range(self.N)], axis=-1)
        return np.einsum("...k,ijk->...ij", basis, self.b)


def _as_int(raw: Mapping[str, Any], key: str) -> int:
    value = raw[key]
    if isinstance(value, bool) or not float(value).is_integer():
        raise ValidationError(f"{key} must be an integer, got {value!r}")
    return int(value)


def _coeff_tensor(value: Any, name: str, n: int, N: int) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ShapeMismatch(f"{name} is not a rectangular numeric array: {exc}") from None
    if arr.shape != (n, n, N):
        raise ShapeMismatch(f"{name} has shape {arr.shape}, expected {(n, n, N)}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite values")
    arr.setflags(write=False)
    return arr


def difference_coefficients(b: np.ndarray) -> np.ndarray:
    """Jump coefficients ``d_k`` (k = 0..N) of a coefficient tensor ``b``.

    ``d_0 = b_0``, ``d_k = b_k - b_{k-1}`` and ``d_N = -b_{N-1}``; the
    spline equals ``sum_k d_k (tau - k h)^n0 H(tau - k h)`` on ``[0, N h)``.
    """
    b = np.asarray(b, dtype=float)
    zero = np.zeros(b.shape[:-1] + (1,))
    return np.diff(np.concatenate([zero, b, zero], axis=-1), axis=-1)


def tail_moments(b: np.ndarray, n0: int) -> np.ndarray:
    """Moments ``sum_k d_k k**m`` for ``m = 0..n0``; all vanish iff the tail does."""
    d = difference_coefficients(b)
    k = np.arange(d.shape[-1], dtype=float)
    return np.stack([d @ k**m for m in range(n0 + 1)], axis=-1)


def validate(raw: Mapping[str, Any] | SplineKernelBounds) -> SplineKernelBounds:
    """Check an untrusted description and return a :class:`SplineKernelBounds`.

    ``raw`` needs the keys ``n, n0, h, N, b_upper, b_lower``; an optional
    ``tau_bar`` must equal ``N*h``.
    """
    if isinstance(raw, SplineKernelBounds):
        raw = raw.to_dict()
    missing = [k for k in ("n", "n0", "h", "N", "b_upper", "b_lower") if k not in raw]
    if missing:
        raise ValidationError(f"missing field(s): {', '.join(missing)}")
    n = _as_int(raw, "n")
    n0 = _as_int(raw, "n0")
    N = _as_int(raw, "N")
    h = float(raw["h"])
    if n < 1:
        raise ShapeMismatch(f"state dimension n must be >= 1, got {n}")
    if n0 < 0:
        raise ValidationError(f"spline degree n0 must be >= 0, got {n0}")
    if not math.isfinite(h) or h <= 0:
        raise NonPositiveStep(f"knot spacing h must be positive, got {h}")
    if N < 1:
        raise ZeroKnots(f"number of knots N must be >= 1, got {N}")
    if raw.get("tau_bar") is not None:
        tau_bar = float(raw["tau_bar"])
        if abs(tau_bar - N * h) > HORIZON_RTOL * max(abs(tau_bar), N * h):
            raise HorizonMismatch(f"tau_bar={tau_bar} differs from N*h={N * h}")

    upper = _coeff_tensor(raw["b_upper"], "b_upper", n, N)
    lower = _coeff_tensor(raw["b_lower"], "b_lower", n, N)
    bad = np.argwhere(lower > upper)
    if bad.size:
        i, j, k = bad[0]
        raise BoundOrderViolation(
            f"b_lower[{i}][{j}][{k}]={lower[i, j, k]} exceeds b_upper={upper[i, j, k]}"
        )

    if n0 >= 1:
        mid = 0.5 * (upper + lower)
        moments = tail_moments(mid, n0)
        k = np.arange(N + 1, dtype=float)
        scale = np.abs(difference_coefficients(mid)) @ np.stack(
            [k**m for m in range(n0 + 1)], axis=-1
        )
        off = np.abs(moments) > TAIL_RTOL * scale + 1e-300
        if np.any(off):
            i, j, m = np.argwhere(off)[0]
            raise NonVanishingTail(
                f"midpoint spline entry ({i},{j}) does not vanish beyond tau_bar "
                f"(moment {m} = {moments[i, j, m]:.3g}); for n0=1 the midpoint "
                "coefficients of each entry must sum to zero"
            )
    return SplineKernelBounds(n=n, n0=n0, h=h, N=N, b_upper=upper, b_lower=lower)


def eval_basis(n0: int, k: int, h: float, tau):
    """Truncated-power basis function ``p_{n0,k}(tau)``.

    Right-continuous at the knots (``H(0) = 1``, ``0**0 = 1``), so for
    ``n0 = 0`` this is the indicator of ``[k h, (k+1) h)``.
    """
    tau = np.asarray(tau, dtype=float)
    a = tau - k * h
    b = tau - (k + 1) * h
    out = np.where(a >= 0, np.maximum(a, 0.0) ** n0, 0.0) - np.where(
        b >= 0, np.maximum(b, 0.0) ** n0, 0.0
    )
    return out if out.ndim else float(out)


def integrate_basis(n0: int, k: int, h: float, N: int) -> float:
    """Exact ``int_0^{N h} p_{n0,k}(tau) dtau``."""
    return h ** (n0 + 1) * ((N - k) ** (n0 + 1) - (N - k - 1) ** (n0 + 1)) / (n0 + 1)


def basis_integrals(n0: int, h: float, N: int) -> np.ndarray:
    return np.array([integrate_basis(n0, k, h, N) for k in range(N)])


def eval_bound(
    model: SplineKernelBounds, side: Literal["upper", "lower"], i: int, j: int, tau
):
    """Value of the upper or lower bound function of entry ``(i, j)`` at ``tau``."""
    if side not in ("upper", "lower"):
        raise ValueError(f"side must be 'upper' or 'lower', got {side!r}")
    if not (0 <= i < model.n and 0 <= j < model.n):
        raise IndexOutOfRange(f"entry ({i}, {j}) outside a {model.n}x{model.n} kernel")
    coeffs = model.b_upper if side == "upper" else model.b_lower
    total = sum(coeffs[i, j, k] * eval_basis(model.n0, k, model.h, tau) for k in range(model.N))
    return total
