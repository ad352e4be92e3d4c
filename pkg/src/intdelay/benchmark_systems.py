"""Reference systems used by the scripts, tests and acceptance suite."""

from __future__ import annotations

import math

import numpy as np

from .kernel_model import SplineKernelBounds, validate


def exponential_kernel_2x2() -> SplineKernelBounds:
    """2x2 perturbed ``exp(-A' tau)`` kernel on ``[0, 0.5]`` with piecewise-constant bounds.

    The off-diagonal entry ``-tau`` is bracketed cell by cell by ``-(k+1)h``
    and ``-kh``.
    """
    N, h = 5, 0.1
    k = np.arange(N, dtype=float)
    upper = np.zeros((2, 2, N))
    lower = np.zeros((2, 2, N))
    upper[0, 0], lower[0, 0] = 1.2, 0.8
    upper[1, 1], lower[1, 1] = 1.2, 0.8
    upper[1, 0], lower[1, 0] = 0.2, -0.2
    upper[0, 1], lower[0, 1] = -k * h, -(k + 1) * h
    return validate({"n": 2, "n0": 0, "h": h, "N": N, "b_upper": upper, "b_lower": lower})


def linear_gain_kernel(
    tau_bar: float = 2.0,
    h: float = 2.0 / 3.0,
    r_c: float = 0.1439,
    c1: float = -0.0005,
    c2: float = -0.0267,
) -> SplineKernelBounds:
    """Scalar kernel ``-c1 tau + c2`` with gains in a disk of radius ``r_c``.

    The envelope ``-c1 tau + c2 +/- r_c sqrt(tau^2 + 1)`` is sampled at the
    right end of each cell.
    """
    N = int(round(tau_bar / h))
    if not math.isclose(N * h, tau_bar, rel_tol=1e-9):
        raise ValueError(f"tau_bar={tau_bar} is not a multiple of h={h}")
    tau = (np.arange(N) + 1.0) * h
    centre = -c1 * tau + c2
    spread = r_c * np.sqrt(tau**2 + 1.0)
    return validate(
        {"n": 1, "n0": 0, "h": h, "N": N,
         "b_upper": (centre + spread)[None, None, :],
         "b_lower": (centre - spread)[None, None, :]}
    )


def scalar_hat_kernel() -> SplineKernelBounds:
    """Exact scalar hat-shaped kernel on ``[0, 1]``: ``b = (-30, 30)``, ``n0 = 1``."""
    b = [[[-30.0, 30.0]]]
    return validate({"n": 1, "n0": 1, "h": 0.5, "N": 2, "b_upper": b, "b_lower": b})


def band_demo_2x2() -> SplineKernelBounds:
    """2x2 first-degree spline system with a 0.2-wide uncertainty strip."""
    upper = np.array(
        [[[7.6, -7.4], [1.1, -0.9]],
         [[1.6, -1.4], [7.1, -6.9]]]
    )
    return validate(
        {"n": 2, "n0": 1, "h": 0.5, "N": 2, "b_upper": upper, "b_lower": upper - 0.2}
    )


def constant_kernel(value: float = 3.0, tau_bar: float = 1.0) -> SplineKernelBounds:
    """Scalar constant kernel ``a(tau) = value`` on ``[0, tau_bar]``."""
    b = [[[value]]]
    return validate({"n": 1, "n0": 0, "h": tau_bar, "N": 1, "b_upper": b, "b_lower": b})


TABLE_SWEEP = ((2.0, 0.16), (5.0, 0.035), (10.0, 0.0095))
