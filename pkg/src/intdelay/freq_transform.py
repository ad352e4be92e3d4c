"""Frequency-domain image of the kernel uncertainty.

For every frequency the transformed kernel entry ``m_ij(jw)`` of any
admissible kernel lies in a square centred at the midpoint transform
``m_hat_ij(jw)`` with half side ``m_tilde_ij``.  For spline bounds the midpoint
transform has the closed form

    M_hat(jw) = n0! / (2 (jw)^(n0+1)) * sum_{k=0}^{N} D_k exp(-j k h w)

whose numerator cancels to ``O(w^(n0+1))`` near ``w = 0``; below a switch
frequency the transform is evaluated by exact per-cell integration instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .kernel_model import SplineKernelBounds, basis_integrals, difference_coefficients


def default_omega_switch(n0: int, h: float, N: int) -> float:
    # The closed form cancels to O((w h)^(n0+1)) relative to its terms, while the
    # per-cell series stays exact for w h of order one; switch at w h = 1/2.
    tau_bar = N * h
    return max(1e-3 * (n0 + 1) / tau_bar, 0.5 / h)


@dataclass(frozen=True, eq=False)
class FrequencyModel:
    source: SplineKernelBounds
    m_tilde: np.ndarray
    d_seq: np.ndarray  # (n, n, N+1): D_k stacked on the last axis
    m_hat_zero: np.ndarray
    omega_switch: float

    @property
    def n(self) -> int:
        return self.source.n

    @property
    def n0(self) -> int:
        return self.source.n0

    @property
    def h(self) -> float:
        return self.source.h

    @property
    def N(self) -> int:
        return self.source.N

    @cached_property
    def rho_T(self) -> float:
        from .inclusion_band import rho_T

        return rho_T(self)

    @cached_property
    def trace_d(self) -> np.ndarray:
        return np.trace(self.d_seq, axis1=0, axis2=1)


@dataclass(frozen=True)
class ComplexMatrixSample:
    omega: float
    value: np.ndarray = field(repr=False)


def build_frequency_model(
    model: SplineKernelBounds, omega_switch: float | None = None
) -> FrequencyModel:
    integrals = basis_integrals(model.n0, model.h, model.N)
    m_tilde = 0.5 * (model.b_upper - model.b_lower) @ integrals
    m_hat_zero = 0.5 * (model.b_upper + model.b_lower) @ integrals
    d_seq = difference_coefficients(model.b_upper + model.b_lower)
    if omega_switch is None:
        omega_switch = default_omega_switch(model.n0, model.h, model.N)
    for arr in (m_tilde, m_hat_zero, d_seq):
        arr.setflags(write=False)
    return FrequencyModel(
        source=model,
        m_tilde=m_tilde,
        d_seq=d_seq,
        m_hat_zero=m_hat_zero,
        omega_switch=float(omega_switch),
    )


def _closed_form(fm: FrequencyModel, omegas: np.ndarray) -> np.ndarray:
    k = np.arange(fm.N + 1)
    phase = np.exp(-1j * np.outer(omegas, k) * fm.h)  # (W, N+1)
    numer = np.einsum("wk,ijk->wij", phase, fm.d_seq)
    scale = math.factorial(fm.n0) / (2.0 * (1j * omegas) ** (fm.n0 + 1))
    return scale[:, None, None] * numer


def _monomial_integrals(m_max: int, h: float, omegas: np.ndarray) -> np.ndarray:
    """``int_0^h u^m exp(-j w u) du`` for ``m = 0..m_max`` by power series.

    Cancellation-free for ``w h`` of order one or less.
    """
    z = -1j * omegas * h
    terms = 30 + int(np.ceil(4 * np.max(np.abs(z), initial=0.0)))
    out = np.zeros((omegas.size, m_max + 1), dtype=complex)
    for m in range(m_max + 1):
        acc = np.zeros(omegas.size, dtype=complex)
        zl = np.ones(omegas.size, dtype=complex)
        for l in range(terms):
            acc += zl / (math.factorial(l) * (m + l + 1))
            zl = zl * z
        out[:, m] = acc * h ** (m + 1)
    return out


def spline_transform_exact(b: np.ndarray, n0: int, h: float, omegas) -> np.ndarray:
    """``int_0^{N h} sum_k b_k p_{n0,k}(tau) exp(-j w tau) dtau`` cell by cell.

    Each cell carries a degree-``n0`` polynomial in the local variable; the
    monomial moments come from :func:`_monomial_integrals`.
    """
    b = np.asarray(b, dtype=float)
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    N = b.shape[-1]
    moments = _monomial_integrals(n0, h, omegas)  # (W, n0+1)
    binom = np.array([math.comb(n0, m) for m in range(n0 + 1)], dtype=float)
    out = np.zeros((omegas.size,) + b.shape[:-1], dtype=complex)
    for c in range(N):
        # On cell c: p_k(ch+u) = (u+(c-k)h)^n0 - (u+(c-k-1)h)^n0 for k < c, u^n0 for k = c.
        coeff = np.zeros(b.shape[:-1] + (n0 + 1,))
        for k in range(c + 1):
            a1 = (c - k) * h
            poly = binom * a1 ** (n0 - np.arange(n0 + 1))
            if k < c:
                a2 = (c - k - 1) * h
                poly = poly - binom * a2 ** (n0 - np.arange(n0 + 1))
            coeff += b[..., k, None] * poly
        cell = np.einsum("wm,...m->w...", moments, coeff)
        out += np.exp(-1j * omegas * c * h).reshape((-1,) + (1,) * (b.ndim - 1)) * cell
    return out


def m_hat_many(fm: FrequencyModel, omegas) -> np.ndarray:
    """Midpoint transform at each ``w >= 0``; shape ``(len(omegas), n, n)``."""
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    if np.any(omegas < 0) or not np.all(np.isfinite(omegas)):
        raise ValueError("frequencies must be finite and nonnegative (use conjugate symmetry)")
    out = np.empty((omegas.size, fm.n, fm.n), dtype=complex)
    high = omegas >= fm.omega_switch
    if np.any(high):
        out[high] = _closed_form(fm, omegas[high])
    low = ~high
    if np.any(low):
        out[low] = spline_transform_exact(fm.source.b_mid, fm.n0, fm.h, omegas[low])
        out[omegas == 0] = fm.m_hat_zero
    return out


def m_hat_at(fm: FrequencyModel, omega: float) -> ComplexMatrixSample:
    value = m_hat_many(fm, [omega])[0]
    return ComplexMatrixSample(omega=float(omega), value=value)


def m_hat_signed(fm: FrequencyModel, omegas) -> np.ndarray:
    """Midpoint transform for any real ``w`` via ``M_hat(-jw) = conj(M_hat(jw))``."""
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    vals = m_hat_many(fm, np.abs(omegas))
    neg = omegas < 0
    vals[neg] = np.conj(vals[neg])
    return vals


def sample_conjugate_symmetry(fm: FrequencyModel, omega: float, tol: float = 1e-12) -> bool:
    """Check ``M_hat(-jw) == conj(M_hat(jw))`` against direct exact integration."""
    direct_neg = spline_transform_exact(fm.source.b_mid, fm.n0, fm.h, [-omega])[0] \
        if omega * fm.h <= 1.0 else _closed_form(fm, np.array([-omega]))[0]
    pos = m_hat_at(fm, omega).value
    scale = max(1.0, float(np.max(np.abs(pos))))
    return bool(np.max(np.abs(direct_neg - np.conj(pos))) <= tol * scale)
