"""Block-matrix Taylor difference calculus for matricial functions.

A matricial function is probed only through evaluation.  Evaluating at the
block bidiagonal point

    [[z_0, u_1,            ],
     [     z_1, u_2,       ],
     [          ...,  u_n  ],
     [                z_n  ]]

yields a block upper triangular matrix whose ``(i, j)`` block is the
difference ``Delta^{j-i} f(z_i, ..., z_j)(u_{i+1}, ..., u_j)``; the corner
``(0, n)`` is the n-th order Taylor difference.  Nothing here assumes the
function is matricial: deviations from the predicted block structure are
measured and reported.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .core import (
    DEFAULT_TOL,
    InputError,
    Point,
    bidiagonal_block,
    block_offsets,
    random_point,
    row_norm,
    spectral_norm,
)
from .report import CheckReport
from .series import FreeSeries, Word, closed_form, directional_derivative, evaluate

MAX_ORDER = 6
MAX_LEVEL = 8


class MatricialityWarning(UserWarning):
    """A block evaluation deviated from the structure a matricial function must have."""


@dataclass(frozen=True, eq=False)
class MatricialFunction:
    """Evaluable family ``z -> f(z)`` defined for ``row_norm(z) < domain_radius`` at every level.

    Evaluators must be reentrant; they receive a square :class:`Point` and
    return an ``n x n`` array.
    """

    d: int
    evaluator: Callable[[Point], np.ndarray]
    domain_radius: float = math.inf
    name: str = "f"

    def __call__(self, z: Point) -> np.ndarray:
        self.check_domain(z)
        out = np.asarray(self.evaluator(z), dtype=complex)
        if out.shape != (z.n, z.n):
            raise InputError(f"{self.name} returned shape {out.shape} at level {z.n}")
        return out

    def check_domain(self, z: Point) -> None:
        if z.d != self.d:
            raise InputError(f"{self.name} takes d={self.d}, point has d={z.d}")
        if not z.is_square:
            raise InputError("evaluation point must be square")
        if self.domain_radius <= 0 or row_norm(z) >= self.domain_radius:
            raise InputError(
                f"point of row norm {row_norm(z):.6g} outside domain of radius {self.domain_radius:.6g}"
            )

    def contains(self, z: Point) -> bool:
        return z.d == self.d and z.is_square and row_norm(z) < self.domain_radius

    def scaled(self, c: complex) -> "MatricialFunction":
        return MatricialFunction(self.d, lambda z: c * self.evaluator(z), self.domain_radius, f"{c}*{self.name}")

    @classmethod
    def from_series(cls, theta: FreeSeries, k_max: int | None = None, name: str = "series") -> "MatricialFunction":
        """Berezin transform of ``theta``: exact for polynomials, closed form for geometric/full."""
        if theta.is_finite:
            return cls(theta.d, lambda z: evaluate(theta, z, k_max).value, math.inf, name)
        from .series import radius

        return cls(theta.d, lambda z: closed_form(theta, z), radius(theta).value, name)


@dataclass(frozen=True, eq=False)
class MatricialMap:
    """Evaluable family of maps ``z -> g(z)`` between d-tuples at the same level."""

    d: int
    evaluator: Callable[[Point], Point]
    domain_radius: float = math.inf
    name: str = "g"

    def __call__(self, z: Point) -> Point:
        self.component(0).check_domain(z)
        out = self.evaluator(z)
        if out.mats.shape != (self.d, z.n, z.n):
            raise InputError(f"{self.name} returned shape {out.mats.shape} at level {z.n}")
        return out

    def contains(self, z: Point) -> bool:
        return z.d == self.d and z.is_square and row_norm(z) < self.domain_radius

    def component(self, i: int) -> MatricialFunction:
        """The scalar-valued family ``z -> g(z)_i`` (0-based ``i``)."""
        return MatricialFunction(self.d, lambda z: self.evaluator(z).mats[i], self.domain_radius, f"{self.name}[{i}]")


@dataclass(frozen=True, eq=False)
class DifferenceResult:
    value: np.ndarray
    structure_residual: float
    full_grid: list | None = None
    tol: float = DEFAULT_TOL
    parts: dict | None = None

    @property
    def violation(self) -> bool:
        return self.structure_residual > self.tol


def _blocks(F: np.ndarray, sizes: Sequence[int]) -> list[list[np.ndarray]]:
    offs = block_offsets(sizes)
    m = len(sizes)
    return [[F[offs[i] : offs[i + 1], offs[j] : offs[j + 1]] for j in range(m)] for i in range(m)]


def evaluate_chain(f: MatricialFunction, zs: Sequence[Point], us: Sequence[Point]) -> list[list[np.ndarray]]:
    """Evaluate f at the bidiagonal point and split the image into blocks."""
    B = bidiagonal_block(zs, us)
    if not f.contains(B):
        raise InputError(
            f"assembled block point (row norm {row_norm(B):.6g}) lies outside the domain of {f.name}"
        )
    return _blocks(f(B), [z.n for z in zs])


def _report_violation(f: MatricialFunction, residual: float, tol: float):
    if residual > tol:
        warnings.warn(
            f"{f.name}: block structure residual {residual:.3e} exceeds {tol:.1e}; not matricial here",
            MatricialityWarning,
            stacklevel=3,
        )


def delta1(f: MatricialFunction, z: Point, w: Point, u: Point, tol: float = DEFAULT_TOL) -> DifferenceResult:
    """First-order difference ``Delta f(z, w)(u)``: the (1,2) block of ``f([[z, u], [0, w]])``."""
    grid = evaluate_chain(f, [z, w], [u])
    lower = spectral_norm(grid[1][0])
    diag = max(spectral_norm(grid[0][0] - f(z)), spectral_norm(grid[1][1] - f(w)))
    residual = max(lower, diag)
    _report_violation(f, residual, tol)
    return DifferenceResult(grid[0][1], residual, grid, tol, {"lower": lower, "diagonal": diag})


def delta_n(
    f: MatricialFunction,
    zs: Sequence[Point],
    us: Sequence[Point],
    tol: float = DEFAULT_TOL,
    check_grid: bool = True,
) -> DifferenceResult:
    """n-th order difference ``Delta^n f(z_0..z_n)(u_1..u_n)``, the top-right block.

    With ``check_grid`` every block of the image is compared with what it
    must be: zero below the diagonal, ``f(z_i)`` on it, and above it the
    corner of an independent evaluation on the sub-chain ``z_i..z_j``.
    """
    zs, us = list(zs), list(us)
    n = len(us)
    grid = evaluate_chain(f, zs, us)
    parts = {"lower": 0.0, "diagonal": 0.0, "grid": 0.0}
    if check_grid:
        for i in range(n + 1):
            for j in range(i):
                parts["lower"] = max(parts["lower"], spectral_norm(grid[i][j]))
            parts["diagonal"] = max(parts["diagonal"], spectral_norm(grid[i][i] - f(zs[i])))
        for i in range(n + 1):
            for j in range(i + 1, n + 1):
                if (i, j) == (0, n):
                    continue
                sub = evaluate_chain(f, zs[i : j + 1], us[i:j])
                parts["grid"] = max(parts["grid"], spectral_norm(grid[i][j] - sub[0][-1]))
    residual = max(parts.values())
    _report_violation(f, residual, tol)
    return DifferenceResult(grid[0][n], residual, grid, tol, parts)


def corner(f: MatricialFunction, zs: Sequence[Point], us: Sequence[Point]) -> np.ndarray:
    """Top-right block only, with no structure checks."""
    return evaluate_chain(f, zs, us)[0][-1]


def delta_at_zero(f: MatricialFunction, us: Sequence[Point]) -> np.ndarray:
    """``Delta^k f(0)(u_1..u_k)`` for square directions at a common level."""
    us = list(us)
    if not us:
        raise InputError("need at least one direction")
    n = us[0].n
    zero = Point.zeros(f.d, n)
    return corner(f, [zero] * (len(us) + 1), us)


def _probe_scale(f: MatricialFunction) -> float:
    if f.domain_radius <= 0:
        raise InputError(f"{f.name} has an empty domain")
    return 1.0 if math.isinf(f.domain_radius) else f.domain_radius / 4.0


def taylor_coeffs(f: MatricialFunction, k: int) -> dict[Word, complex]:
    """Degree-k coefficients ``a_w`` read off level-one bidiagonal evaluations at 0.

    Directions are ``s e_{i_p}`` with ``s = domain_radius / 4`` (1 for entire
    functions); the corner is rescaled by ``s^{-k}``.
    """
    if k < 0:
        raise InputError("degree must be non-negative")
    s = _probe_scale(f)
    zero = Point.zeros(f.d, 1)
    if k == 0:
        return {(): complex(f(zero)[0, 0])}
    out = {}
    for w in itertools.product(range(1, f.d + 1), repeat=k):
        us = [Point.basis(f.d, i) * s for i in w]
        out[w] = complex(corner(f, [zero] * (k + 1), us)[0, 0]) / s**k
    return out


def taylor_expand(f: MatricialFunction, k_max: int, atol: float = 0.0) -> FreeSeries:
    """Series ``sum_{k <= k_max} sum_w a_w X_w`` recovered from f; |a_w| <= atol is dropped."""
    coeffs = {}
    for k in range(k_max + 1):
        coeffs.update({w: c for w, c in taylor_coeffs(f, k).items() if abs(c) > atol})
    return FreeSeries(f.d, coeffs)


def _as_function(f) -> MatricialFunction:
    return MatricialFunction.from_series(f) if isinstance(f, FreeSeries) else f


def remainder_terms(f: MatricialFunction, z: Point, w: Point, n: int) -> tuple[np.ndarray, list[np.ndarray], np.ndarray]:
    """``f(z + w)``, the terms ``Delta^k f(z..z)(w..w)`` for k < n, and the remainder term."""
    lhs = f(z + w)
    terms = [f(z)]
    for k in range(1, n):
        terms.append(corner(f, [z] * (k + 1), [w] * k))
    rem = corner(f, [z] * n + [z + w], [w] * n)
    return lhs, terms, rem


def remainder_check(theta, z: Point, w: Point, n: int, tol: float = DEFAULT_TOL) -> CheckReport:
    """Taylor expansion with remainder:
    ``f(z+w) = sum_{k<n} Delta^k f(z..z)(w..w) + Delta^n f(z..z, z+w)(w..w)``.
    """
    if n < 1:
        raise InputError("order must be at least 1")
    f = _as_function(theta)
    lhs, terms, rem = remainder_terms(f, z, w, n)
    rhs = sum(terms) + rem
    report = CheckReport("taylor_remainder", tol)
    report.add("identity", spectral_norm(lhs - rhs))
    report.info.update(lhs_norm=spectral_norm(lhs), remainder_norm=spectral_norm(rem), order=n)
    return report


def commutant_element(z: Point, rng: np.random.Generator) -> np.ndarray:
    """Random matrix commuting with every component of z (null space of the commutator map)."""
    n = z.n
    eye = np.eye(n)
    # vec(B Z - Z B) = (Z^T (x) I - I (x) Z) vec(B), column-major vec
    rows = [np.kron(Z.T, eye) - np.kron(eye, Z) for Z in z.mats]
    basis = scipy.linalg.null_space(np.vstack(rows), rcond=1e-10)
    c = rng.standard_normal(basis.shape[1]) + 1j * rng.standard_normal(basis.shape[1])
    b = (basis @ c).reshape(n, n, order="F")
    return b / max(spectral_norm(b), 1e-300)


def additivity_check(
    f: MatricialFunction,
    z: Point,
    w: Point,
    u1: Point,
    u2: Point,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> CheckReport:
    """Additivity, complex homogeneity and the balanced law of ``Delta f(z, w)``."""
    rng = np.random.default_rng(seed)
    report = CheckReport("additivity", tol)

    def D(u: Point) -> np.ndarray:
        return corner(f, [z, w], [u])

    d1, d2 = D(u1), D(u2)
    report.add("additive", spectral_norm(D(u1 + u2) - d1 - d2))
    t = complex(rng.uniform(0.2, 1.0) * np.exp(2j * np.pi * rng.uniform()))
    report.add("homogeneous", spectral_norm(D(u1 * t) - t * d1))
    b = commutant_element(z, rng)
    report.add("balanced_left", spectral_norm(D(Point(b @ u1.mats)) - b @ d1))
    c = commutant_element(w, rng)
    report.add("balanced_right", spectral_norm(D(Point(u1.mats @ c)) - d1 @ c))
    return report


def _elementary(d: int, n: int, r: int, s: int, u: np.ndarray) -> Point:
    mats = np.zeros((d, n, n), dtype=complex)
    mats[:, r, s] = u
    return Point(mats)


def amplification_check(
    f: MatricialFunction,
    k: int,
    n: int,
    trials: int,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
) -> CheckReport:
    """Compare ``Delta^k f(0)`` at level n on elementary tensors ``eps_{r,s} (x) u``
    against the level-one value placed at ``(r_1, s_k)`` (zero unless the
    indices chain, ``s_j = r_{j+1}``).
    """
    if not 1 <= k <= MAX_ORDER or not 1 <= n <= MAX_LEVEL:
        raise InputError(f"order {k} / level {n} outside caps {MAX_ORDER}/{MAX_LEVEL}")
    rng = np.random.default_rng(seed)
    scale = min(1.0, f.domain_radius / 4.0)
    report = CheckReport("amplification", tol)
    for t in range(trials):
        chained = t % 2 == 0
        if chained:
            path = rng.integers(0, n, k + 1)
            rs, ss = path[:-1], path[1:]
        else:
            rs, ss = rng.integers(0, n, k), rng.integers(0, n, k)
        vecs = []
        for _ in range(k):
            v = rng.standard_normal(f.d) + 1j * rng.standard_normal(f.d)
            vecs.append(scale * v / np.linalg.norm(v))
        big = [_elementary(f.d, n, r, s, v) for r, s, v in zip(rs, ss, vecs)]
        small = [Point(v.reshape(f.d, 1, 1)) for v in vecs]
        lhs = delta_at_zero(f, big)
        expected = np.zeros((n, n), dtype=complex)
        if all(ss[j] == rs[j + 1] for j in range(k - 1)):
            expected[rs[0], ss[-1]] = delta_at_zero(f, small)[0, 0]
        tag = "chain" if chained else "random"
        report.add(f"{tag}_{t:04d}", spectral_norm(lhs - expected))
    return report


def cb_bound_sample(
    f: MatricialFunction,
    M: float,
    r: float,
    k: int,
    trials: int,
    seed: int = 0,
    max_level: int = 3,
) -> CheckReport:
    """Sample ``||Delta^k f(0)(u_1..u_k)||`` over unit directions at levels <= max_level.

    Each case records the ratio to the bound ``M / r^k``; the report passes
    when every ratio is at most ``1 + 1e-8``.
    """
    rng = np.random.default_rng(seed)
    bound = M / r**k
    t = 1.0 if f.domain_radius > 2.0 else f.domain_radius / 2.0
    report = CheckReport("cb_bound", 1.0 + 1e-8)
    peak = 0.0
    for trial in range(trials):
        n = int(rng.integers(1, max_level + 1))
        us = [random_point(rng, f.d, n, norm=1.0) for _ in range(k)]
        val = spectral_norm(delta_at_zero(f, [u * t for u in us])) / t**k
        peak = max(peak, val)
        report.add(f"trial_{trial:04d}", val / bound)
    report.info.update(bound=bound, sampled_max=peak)
    return report


def frechet_check(
    theta: FreeSeries,
    z: Point,
    u: Point,
    tol: float = DEFAULT_TOL,
    fd_tol: float = 1e-6,
    h: float = 1e-5,
    k_max: int | None = None,
) -> CheckReport:
    """Three-way agreement: block difference, algebraic derivative, central difference.

    Infinite series are truncated at ``k_max`` first so all three routes see
    the same polynomial.
    """
    if not theta.is_finite:
        if k_max is None:
            raise InputError("k_max is required for infinite series")
        theta = theta.truncate(k_max)
    f = MatricialFunction.from_series(theta)
    block = corner(f, [z, z], [u])
    alg = directional_derivative(theta, z, u)
    fd = (f(z + u * h) - f(z - u * h)) / (2 * h)
    scale = max(1.0, spectral_norm(alg))
    report = CheckReport("frechet", tol)
    report.add("block_vs_algebraic", spectral_norm(block - alg))
    report.add("finite_difference", spectral_norm(fd - alg) / scale, fd_tol)
    return report

