"""Rectangular inclusion band for the eigenvalues of the uncertain ``M(jw)``.

At each frequency every eigenvalue of every admissible ``M(jw)`` lies in a
rectangle centred at ``tr(M_hat(jw))/n``.  Its half-widths combine the
spectral radius of the uncertainty matrix ``T = [[1,1],[1,1]] (x) (Mt + Mt^T)``
with a disk bound on the eigenvalues of the symmetric partition matrices
``S_R`` and ``S_I`` built from ``M_hat``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .freq_transform import FrequencyModel, m_hat_many


@dataclass(frozen=True)
class BandRectangle:
    omega: float
    center: complex
    half_width_re: float
    half_width_im: float

    def contains(self, z: complex, tol: float = 0.0) -> bool:
        return (
            abs(z.real - self.center.real) <= self.half_width_re + tol
            and abs(z.imag - self.center.imag) <= self.half_width_im + tol
        )


@dataclass(frozen=True)
class PartitionMatrices:
    s_r: np.ndarray
    s_i: np.ndarray


def uncertainty_matrix(fm: FrequencyModel) -> np.ndarray:
    return np.kron(np.ones((2, 2)), fm.m_tilde + fm.m_tilde.T)


def rho_T(fm: FrequencyModel) -> float:
    """Spectral radius of ``T`` from a symmetric eigensolve of the full matrix."""
    eig = np.linalg.eigvalsh(uncertainty_matrix(fm))
    rho = float(np.max(np.abs(eig)))
    # Kronecker identity: eig(T) = {0, 2} x eig(Mt + Mt^T).
    small = np.linalg.eigvalsh(fm.m_tilde + fm.m_tilde.T)
    assert abs(rho - 2.0 * np.max(np.abs(small))) <= 1e-10 * max(1.0, rho)
    return rho


def _trace_terms(mr: np.ndarray, mi: np.ndarray):
    sym_r = mr + np.swapaxes(mr, -1, -2)
    sym_i = mi + np.swapaxes(mi, -1, -2)
    skew_r = mr - np.swapaxes(mr, -1, -2)
    skew_i = mi - np.swapaxes(mi, -1, -2)

    def tr_sq(a):
        return np.einsum("...ij,...ji->...", a, a)

    rad_re = tr_sq(sym_r) - tr_sq(skew_i)
    rad_im = tr_sq(sym_i) - tr_sq(skew_r)
    return rad_re, rad_im


def band_arrays(fm: FrequencyModel, omegas):
    """Vectorised band: ``(centers, half_width_re, half_width_im)`` per frequency."""
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    mh = m_hat_many(fm, omegas)
    n = fm.n
    mr, mi = mh.real, mh.imag
    tr_r = np.trace(mr, axis1=1, axis2=2)
    tr_i = np.trace(mi, axis1=1, axis2=2)
    rad_re, rad_im = _trace_terms(mr, mi)
    factor = (2 * n - 1) / n
    # Radicands are >= 0 in exact arithmetic; clamp rounding negatives.
    root_re = np.sqrt(factor * np.maximum(rad_re - 4 * tr_r**2 / n, 0.0))
    root_im = np.sqrt(factor * np.maximum(rad_im - 4 * tr_i**2 / n, 0.0))
    rho = fm.rho_T
    centers = (tr_r + 1j * tr_i) / n
    return centers, 0.5 * (rho + root_re), 0.5 * (rho + root_im)


def band_rectangle(fm: FrequencyModel, omega: float) -> BandRectangle:
    c, hr, hi = band_arrays(fm, [omega])
    return BandRectangle(float(omega), complex(c[0]), float(hr[0]), float(hi[0]))


def center_trig(fm: FrequencyModel, omegas) -> np.ndarray:
    """Band centre from the real trigonometric forms (``w > 0`` only)."""
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    n0, n = fm.n0, fm.n
    k = np.arange(fm.N + 1)
    arg = np.outer(omegas, k) * fm.h
    s = np.sin(arg) @ fm.trace_d
    c = np.cos(arg) @ fm.trace_d
    base = math.factorial(n0) / (2 * n * omegas ** (n0 + 1))
    if n0 % 2 == 0:
        sign = (-1) ** (1 + n0 // 2)
        return base * sign * (s + 1j * c)
    return base * ((-1) ** ((n0 + 1) // 2) * c + 1j * (-1) ** ((n0 - 1) // 2) * s)


def partition_matrices(fm: FrequencyModel, omega: float) -> PartitionMatrices:
    mh = m_hat_many(fm, [omega])[0]
    r, i = mh.real, mh.imag
    s_r = np.block([[r + r.T, i.T - i], [i - i.T, r + r.T]])
    s_i = np.block([[i + i.T, r - r.T], [r.T - r, i + i.T]])
    return PartitionMatrices(s_r=s_r, s_i=s_i)


def disk_radius(fm: FrequencyModel, omega: float) -> tuple[float, float]:
    """Frobenius-norm disk radii for the eigenvalues of ``S_R`` and ``S_I``."""
    pm = partition_matrices(fm, omega)
    n = fm.n
    mh = m_hat_many(fm, [omega])[0]
    f = (2 * n - 1) / (2 * n)
    r_re = math.sqrt(max(f * (np.sum(pm.s_r**2) - 8 * np.trace(mh.real) ** 2 / n), 0.0))
    r_im = math.sqrt(max(f * (np.sum(pm.s_i**2) - 8 * np.trace(mh.imag) ** 2 / n), 0.0))
    return r_re, r_im


def hladik_box(fm: FrequencyModel, omega: float) -> tuple[float, float, float, float]:
    """``(re_lo, re_hi, im_lo, im_hi)`` from exact eigenvalues of the partition matrices."""
    pm = partition_matrices(fm, omega)
    rho = fm.rho_T
    er = np.linalg.eigvalsh(pm.s_r)
    ei = np.linalg.eigvalsh(pm.s_i)
    return (
        (er[0] - rho) / 2,
        (er[-1] + rho) / 2,
        (ei[0] - rho) / 2,
        (ei[-1] + rho) / 2,
    )
