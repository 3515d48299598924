"""The automorphism ``g_gamma`` of the row ball for a central point gamma.

With ``gamma = (gamma_1, ..., gamma_d)`` in the open unit ball of C^d and
``z`` a d-tuple of n x n matrices,

    g_gamma(z) = s (I - sum_j gamma_j Z_j)^{-1} [conj(gamma_i) I - Z_i]_i (X^{-1} (x) I_n)

where ``s = (1 - |gamma|^2)^{1/2}`` and ``X = (I_d - gamma gamma^*)^{1/2}``.
``X`` is a rank-one perturbation of the identity, ``X = I + (s - 1) P`` with
``P`` the projection onto gamma, so all its powers are closed form.

Expanding the resolvent gives

    g_gamma(z) = gamma^* - sum_{k>=1} s (z gamma)^{k-1} z (X (x) I_n),

so the first Taylor coefficient is ``-s X`` and the k-th is multilinear,
``-s (u_1 gamma) ... (u_{k-1} gamma) u_k X``.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import InputError, Point, random_point, row_norm, spectral_norm
from .report import CheckReport
from .taylor import MatricialMap, delta_at_zero, taylor_coeffs


@dataclass(frozen=True, eq=False)
class CentralVector:
    gamma: np.ndarray

    def __post_init__(self):
        g = np.atleast_1d(np.asarray(self.gamma, dtype=complex))
        if g.ndim != 1 or g.size < 1:
            raise InputError("gamma must be a non-empty vector")
        if not np.all(np.isfinite(g)):
            raise InputError("gamma has non-finite entries")
        if np.linalg.norm(g) >= 1.0:
            raise InputError(f"|gamma| = {np.linalg.norm(g):.6g} is not < 1")
        g.setflags(write=False)
        object.__setattr__(self, "gamma", g)

    @property
    def d(self) -> int:
        return self.gamma.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.gamma))

    @property
    def s(self) -> float:
        """``(1 - |gamma|^2)^{1/2}``."""
        return math.sqrt(1.0 - self.norm**2)

    def projection(self) -> np.ndarray:
        g = self.gamma
        if self.norm == 0:
            return np.zeros((self.d, self.d), dtype=complex)
        return np.outer(g, g.conj()) / self.norm**2

    def defect(self, power: float = 1.0) -> np.ndarray:
        """``(I - gamma gamma^*)^{power/2}`` via the rank-one closed form."""
        return np.eye(self.d) + (self.s**power - 1.0) * self.projection()

    def adjoint_point(self, n: int) -> Point:
        """gamma^* as a point: components ``conj(gamma_i) I_n``."""
        return Point.scalars(self.gamma.conj(), n)

    @classmethod
    def random(cls, rng: np.random.Generator, d: int, max_norm: float = 0.9) -> "CentralVector":
        g = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        return cls(g / np.linalg.norm(g) * rng.uniform(0.0, max_norm))


def _right_kron(mats: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Components of the row block ``[M_1 ... M_d] (X (x) I_n)``: ``sum_i M_i X_ij``."""
    return np.einsum("inm,ij->jnm", mats, X)


def _z_gamma(gamma: CentralVector, mats: np.ndarray) -> np.ndarray:
    return np.einsum("i,inm->nm", gamma.gamma, mats)


def g_gamma(gamma: CentralVector, z: Point) -> Point:
    if z.d != gamma.d:
        raise InputError(f"gamma has d={gamma.d}, point has d={z.d}")
    if not z.is_square:
        raise InputError("point must be square")
    n = z.n
    M = np.eye(n) - _z_gamma(gamma, z.mats)
    try:
        A = gamma.s * np.linalg.inv(M)
    except np.linalg.LinAlgError as exc:
        raise InputError("I - z gamma is singular") from exc
    if not np.all(np.isfinite(A)):
        raise InputError("I - z gamma is singular")
    B = gamma.adjoint_point(n).mats - z.mats
    out = Point(_right_kron(np.einsum("nk,ikm->inm", A, B), gamma.defect(-1.0)))
    if row_norm(z) < 1.0 and row_norm(out) >= 1.0:
        warnings.warn(f"g_gamma left the unit ball: row norm {row_norm(out):.6g}", stacklevel=2)
    return out


def g_gamma_map(gamma: CentralVector) -> MatricialMap:
    return MatricialMap(gamma.d, lambda z: g_gamma(gamma, z), 1.0, "g_gamma")


def g_series_term(gamma: CentralVector, us: Sequence[Point]) -> Point:
    """k-th Taylor term at 0 as a multilinear form of directions ``u_1..u_k`` (k >= 1)."""
    us = list(us)
    if not us:
        raise InputError("need at least one direction")
    n = us[0].n
    P = np.eye(n, dtype=complex)
    for u in us[:-1]:
        P = P @ _z_gamma(gamma, u.mats)
    last = np.einsum("nk,ikm->inm", P, us[-1].mats)
    return Point(-gamma.s * _right_kron(last, gamma.defect(1.0)))


@dataclass(frozen=True, eq=False)
class SeriesPartial:
    value: Point
    tail_bound: float


def g_series_partial(gamma: CentralVector, z: Point, k_max: int) -> SeriesPartial:
    """Partial sum through degree ``k_max`` and a bound on the row norm of the rest.

    Degree k contributes ``s (z gamma)^{k-1} z (X (x) I)`` of norm at most
    ``s ||X|| r (r |gamma|)^{k-1}``, so the tail after ``k_max`` is bounded
    by ``s ||X|| r (r |gamma|)^{k_max} / (1 - r |gamma|)``.
    """
    if z.d != gamma.d:
        raise InputError(f"gamma has d={gamma.d}, point has d={z.d}")
    n = z.n
    r = row_norm(z)
    rho = r * gamma.norm
    if rho >= 1.0:
        raise InputError(f"row_norm(z) * |gamma| = {rho:.6g} is not < 1")
    zeroth = gamma.s * _right_kron(gamma.adjoint_point(n).mats, gamma.defect(-1.0))
    total = zeroth.copy()
    zg = _z_gamma(gamma, z.mats)
    tail_mats = _right_kron(z.mats, gamma.defect(1.0)) * gamma.s
    P = np.eye(n, dtype=complex)
    for _ in range(k_max):
        total -= np.einsum("nk,ikm->inm", P, tail_mats)
        P = P @ zg
    X_norm = spectral_norm(gamma.defect(1.0))
    bound = gamma.s * X_norm * r * rho**k_max / (1.0 - rho)
    return SeriesPartial(Point(total), bound)


def dg_gamma_matrix(gamma: CentralVector) -> np.ndarray:
    """First Taylor coefficient as a d x d matrix: ``Delta g(0)(u) = u (D (x) I_n)``.

    ``D = -s (I - gamma gamma^*)^{1/2}``; the sign comes from the ``-z``
    in the numerator of g_gamma.
    """
    return -gamma.s * gamma.defect(1.0)


def dg_gamma_check(gamma: CentralVector, trials: int, seed: int = 0, tol: float = 1e-8, D=None) -> CheckReport:
    """Block-extracted ``Delta g(0)(u)`` against ``u (D (x) I)`` on random directions."""
    rng = np.random.default_rng(seed)
    D = dg_gamma_matrix(gamma) if D is None else D
    g = g_gamma_map(gamma)
    report = CheckReport("dg_gamma", tol)
    for t in range(trials):
        n = int(rng.integers(1, 4))
        u = random_point(rng, gamma.d, n, norm=0.25)
        block = np.array([delta_at_zero(g.component(i), [u]) for i in range(gamma.d)])
        report.add(f"trial_{t:04d}", max(spectral_norm(b) for b in block - _right_kron(u.mats, D)))
    return report


def second_order_check(gamma: CentralVector, trials: int, seed: int = 0, tol: float = 1e-8) -> CheckReport:
    """Degree-2 term of the series against the block second difference of g at 0.

    Even trials use a repeated direction ``(u, u)`` (the diagonal term of the
    series), odd trials two independent directions.
    """
    rng = np.random.default_rng(seed)
    g = g_gamma_map(gamma)
    report = CheckReport("second_order", tol)
    for t in range(trials):
        n = int(rng.integers(1, 4))
        u1 = random_point(rng, gamma.d, n, norm=0.25)
        u2 = u1 if t % 2 == 0 else random_point(rng, gamma.d, n, norm=0.25)
        series = g_series_term(gamma, [u1, u2])
        block = [delta_at_zero(g.component(i), [u1, u2]) for i in range(gamma.d)]
        report.add(f"trial_{t:04d}", max(spectral_norm(b - s) for b, s in zip(block, series.mats)))
    return report


def series_coefficients(gamma: CentralVector, k: int, component: int) -> dict:
    """Degree-k word coefficients of ``g_gamma(z)_component`` from the series formula."""
    out = {}
    for w in itertools.product(range(1, gamma.d + 1), repeat=k):
        us = [Point.basis(gamma.d, i) for i in w]
        if k == 0:
            out[w] = complex(gamma.gamma[component].conj())
        else:
            out[w] = complex(g_series_term(gamma, us).mats[component][0, 0])
    return out


def taylor_roundtrip_check(gamma: CentralVector, k_max: int = 3, tol: float = 1e-8) -> CheckReport:
    """Coefficients read off g_gamma by block differences against the series formula."""
    g = g_gamma_map(gamma)
    report = CheckReport("mobius_taylor_roundtrip", tol)
    for i in range(gamma.d):
        f = g.component(i)
        for k in range(k_max + 1):
            got = taylor_coeffs(f, k)
            want = series_coefficients(gamma, k, i)
            report.add(f"component_{i}_degree_{k}", max(abs(got[w] - want[w]) for w in want))
    return report


def ball_preservation(gamma: CentralVector, points: Sequence[Point]) -> CheckReport:
    """Case value is ``row_norm(g(z))``; passes when every value is below 1.

    The margin ``1 - max`` is recorded in ``info``.
    """
    report = CheckReport("ball_preservation", 1.0 - 1e-15)
    peak = 0.0
    for i, z in enumerate(points):
        val = row_norm(g_gamma(gamma, z))
        peak = max(peak, val)
        report.add(f"sample_{i:05d}", val)
    report.info["margin"] = 1.0 - peak
    return report


def involution_defect(gamma: CentralVector, z: Point) -> float:
    """``row_norm(g(g(z)) - z)``; informational only."""
    return row_norm(g_gamma(gamma, g_gamma(gamma, z)) - z)
