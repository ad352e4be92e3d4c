"""Real-axis crossings of the band centre via a Fourier companion matrix.

With ``x = h w`` the imaginary part of the band centre is ``y(x) / x^(n0+1)``
where ``y`` is a sine series (odd ``n0``) or cosine series (even ``n0``) with
coefficients proportional to ``tr(D_k)``.  Substituting ``z = exp(jx)`` turns
``z^N y`` into a degree-``2N`` polynomial; its companion matrix (CCM form)
has the roots of ``y`` as unit-circle eigenvalues.  Only roots of odd
multiplicity are real-axis crossings, and by periodicity and reflection the
roots in ``[0, pi]`` determine all of them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage

from .errors import DegenerateZeroPolynomial
from .freq_transform import FrequencyModel

TOL_CIRCLE = 1e-6
TOL_CIRCLE_RAW = 1e-4
TOL_CLUSTER = 1e-4
TOL_COEFF = 1e-12
_SNAP = 1e-9


@dataclass(frozen=True)
class TrigPolynomial:
    f: np.ndarray  # f_0 .. f_N
    parity: str  # "odd" (sine series) or "even" (cosine series)
    h: float
    ref_scale: float = 1.0  # magnitude of the underlying kernel data, for degeneracy tests

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        k = np.arange(self.f.size)
        basis = np.sin if self.parity == "odd" else np.cos
        return basis(np.multiply.outer(x, k)) @ self.f


@dataclass(frozen=True)
class Root:
    x: float
    multiplicity: int
    appended: bool = False  # the x = 0 entry added by convention, not found by the eigensolve


@dataclass(frozen=True)
class RootSet:
    roots: tuple[Root, ...]
    alpha: int
    includes_zero: bool
    clustered: bool

    @property
    def base(self) -> tuple[Root, ...]:
        """Roots found by the eigensolve (excludes the conventional x = 0)."""
        return tuple(r for r in self.roots if not r.appended)

    @property
    def xs(self) -> np.ndarray:
        return np.array([r.x for r in self.base])


def f_coefficients(fm: FrequencyModel) -> TrigPolynomial:
    n0, n, h = fm.n0, fm.n, fm.h
    if n0 % 2 == 0:
        sign = (-1) ** (1 + n0 // 2)
    else:
        sign = (-1) ** ((n0 - 1) // 2)
    factor = math.factorial(n0) * h ** (n0 + 1) * sign / (2 * n)
    f = fm.trace_d * factor
    ref = abs(factor) * n * float(np.max(np.abs(fm.d_seq), initial=0.0))
    return TrigPolynomial(
        f=f, parity="even" if n0 % 2 == 0 else "odd", h=h, ref_scale=ref
    )


def effective_degree(p: TrigPolynomial, tol_coeff: float = TOL_COEFF) -> int:
    """Degree after trimming negligible trailing coefficients."""
    lo = 1 if p.parity == "odd" else 0
    f = np.abs(p.f[lo:])
    top = float(f.max(initial=0.0))
    if top <= tol_coeff * p.ref_scale or top == 0.0:
        raise DegenerateZeroPolynomial("crossover polynomial vanishes identically")
    keep = np.nonzero(f > tol_coeff * top)[0]
    return int(keep[-1]) + lo


def companion_matrix(p: TrigPolynomial, tol_coeff: float = TOL_COEFF) -> np.ndarray:
    N = effective_degree(p, tol_coeff)
    if N == 0:
        # y = f_0 constant and nonzero: no roots.
        return np.zeros((0, 0))
    f = p.f
    size = 2 * N
    F = np.zeros((size, size))
    F[:-1, 1:] = np.eye(size - 1)
    lead = f[N]
    low = f[N:0:-1] / lead  # f_N/f_N, ..., f_1/f_N
    high = f[1:N] / lead  # f_1/f_N, ..., f_{N-1}/f_N
    if p.parity == "even":
        F[-1] = np.concatenate([-low, [-2.0 * f[0] / lead], -high])
    else:
        F[-1] = np.concatenate([low, [0.0], -high])
    return F


def _snap(angle: float) -> float:
    if abs(angle) <= _SNAP:
        return 0.0
    if abs(abs(angle) - math.pi) <= _SNAP:
        return math.pi
    return angle


def _cluster(eigs: np.ndarray, tol_cluster: float) -> list[np.ndarray]:
    if eigs.size == 0:
        return []
    if eigs.size == 1:
        return [eigs]
    pts = np.column_stack([eigs.real, eigs.imag])
    labels = fcluster(linkage(pts, method="single"), t=tol_cluster, criterion="distance")
    return [eigs[labels == lab] for lab in np.unique(labels)]


def roots_in_0_pi(
    p: TrigPolynomial,
    tol_circle: float = TOL_CIRCLE,
    tol_cluster: float = TOL_CLUSTER,
    cluster: bool = True,
    tol_coeff: float = TOL_COEFF,
    tol_circle_raw: float = TOL_CIRCLE_RAW,
) -> RootSet:
    """Odd-multiplicity roots of ``y`` on ``[0, pi]``, sorted ascending.

    Clustered mode groups eigenvalues closer than ``tol_cluster`` (single
    linkage), tests the cluster centroid against the unit circle and takes
    the cluster size as the algebraic multiplicity.  Raw mode keeps every
    eigenvalue within ``tol_circle_raw`` of the circle as a simple root, which
    leaves numerically split multiple roots split.
    """
    F = companion_matrix(p, tol_coeff)
    eigs = np.linalg.eigvals(F) if F.size else np.zeros(0, dtype=complex)
    found: list[Root] = []
    if cluster:
        for group in _cluster(eigs, tol_cluster):
            c = group.mean()
            if abs(abs(c) - 1.0) >= tol_circle or group.size % 2 == 0:
                continue
            ang = _snap(float(np.angle(c)))
            if 0.0 <= ang <= math.pi:
                found.append(Root(ang, int(group.size)))
    else:
        for lam in eigs:
            if abs(abs(lam) - 1.0) >= tol_circle_raw:
                continue
            ang = _snap(float(np.angle(lam)))
            if 0.0 <= ang <= math.pi:
                found.append(Root(ang, 1))
    found.sort(key=lambda r: r.x)
    alpha = len(found)
    has_zero = any(r.x == 0.0 for r in found)
    roots = list(found)
    if not has_zero:
        roots.insert(0, Root(0.0, 0, appended=True))
    return RootSet(roots=tuple(roots), alpha=alpha, includes_zero=True, clustered=cluster)
