"""Matrix tuples and the dense linear algebra everything else is built on.

A :class:`Point` is a d-tuple of complex matrices, stored as one array of
shape ``(d, rows, cols)``.  Square tuples are points of the matricial ball at
level ``n``; rectangular ones only appear as off-diagonal directions inside
block assembly.  Plain complex matrices are ``numpy`` arrays throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

DEFAULT_TOL = 1e-10
SVD_MAX_DIM = 512
POWER_MAX_ITER = 10_000
POWER_TOL = 1e-13


class InputError(ValueError):
    """Malformed or incompatible input (shapes, ranges, non-finite data)."""


class ResourceError(RuntimeError):
    """A requested computation would exceed a configured size cap."""


def as_cmatrix(a, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise InputError(f"{name} must be 2-dimensional, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InputError(f"{name} has non-finite entries")
    return a


def spectral_norm(a) -> float:
    """Largest singular value of ``a``.

    Full SVD up to 512 rows/cols; above that, power iteration on ``a^H a``.
    """
    a = as_cmatrix(a)
    if a.size == 0:
        return 0.0
    if max(a.shape) <= SVD_MAX_DIM:
        return float(np.linalg.svd(a, compute_uv=False)[0])
    return _power_norm(a)


def _power_norm(a: np.ndarray) -> float:
    rng = np.random.default_rng(0)
    x = rng.standard_normal(a.shape[1]) + 1j * rng.standard_normal(a.shape[1])
    x /= np.linalg.norm(x)
    est = 0.0
    for _ in range(POWER_MAX_ITER):
        y = a.conj().T @ (a @ x)
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return 0.0
        new = float(np.sqrt(ny))
        x = y / ny
        if abs(new - est) <= POWER_TOL * new:
            est = new
            break
        est = new
    # Rayleigh quotient is a lower bound; it converges faster than the ratio
    return max(est, float(np.linalg.norm(a @ x)))


@dataclass(frozen=True, eq=False)
class Point:
    """A d-tuple of complex matrices of common shape ``(rows, cols)``."""

    mats: np.ndarray

    def __post_init__(self):
        m = np.array(self.mats, dtype=complex)
        if m.ndim != 3:
            raise InputError(f"point must have shape (d, rows, cols), got {m.shape}")
        if m.shape[0] < 1:
            raise InputError("point needs at least one component")
        if not np.all(np.isfinite(m)):
            raise InputError("point has non-finite entries")
        m.setflags(write=False)
        object.__setattr__(self, "mats", m)

    @classmethod
    def zeros(cls, d: int, n: int, m: int | None = None) -> "Point":
        return cls(np.zeros((d, n, n if m is None else m), dtype=complex))

    @classmethod
    def scalars(cls, values: Sequence[complex], n: int = 1) -> "Point":
        """Central point with components ``values[i] * I_n``."""
        eye = np.eye(n, dtype=complex)
        return cls(np.array([v * eye for v in values]))

    @classmethod
    def basis(cls, d: int, i: int) -> "Point":
        """Level-one point e_i (letter ``i`` is 1-based)."""
        if not 1 <= i <= d:
            raise InputError(f"letter {i} outside [1, {d}]")
        mats = np.zeros((d, 1, 1), dtype=complex)
        mats[i - 1, 0, 0] = 1.0
        return cls(mats)

    @property
    def d(self) -> int:
        return self.mats.shape[0]

    @property
    def n(self) -> int:
        return self.mats.shape[1]

    @property
    def cols(self) -> int:
        return self.mats.shape[2]

    @property
    def is_square(self) -> bool:
        return self.mats.shape[1] == self.mats.shape[2]

    def __getitem__(self, i: int) -> np.ndarray:
        return self.mats[i]

    def __len__(self) -> int:
        return self.d

    def __iter__(self):
        return iter(self.mats)

    def row(self) -> np.ndarray:
        """The row block ``[Z_1 ... Z_d]``."""
        return np.hstack(list(self.mats))

    def _check_same(self, other: "Point"):
        if self.mats.shape != other.mats.shape:
            raise InputError(f"shape mismatch {self.mats.shape} vs {other.mats.shape}")

    def __add__(self, other: "Point") -> "Point":
        self._check_same(other)
        return Point(self.mats + other.mats)

    def __sub__(self, other: "Point") -> "Point":
        self._check_same(other)
        return Point(self.mats - other.mats)

    def __neg__(self) -> "Point":
        return Point(-self.mats)

    def __mul__(self, c: complex) -> "Point":
        return Point(complex(c) * self.mats)

    __rmul__ = __mul__

    def __repr__(self):
        return f"Point(d={self.d}, shape={self.n}x{self.cols})"


def row_norm(z: Point) -> float:
    """Norm of z as an operator C^d (x) C^m -> C^n, i.e. ``||sum Z_i Z_i^*||^(1/2)``."""
    return spectral_norm(z.row())


def _require_same_d(*points: Point):
    ds = {p.d for p in points}
    if len(ds) != 1:
        raise InputError(f"alphabet sizes differ: {sorted(ds)}")


def direct_sum(z: Point, w: Point) -> Point:
    _require_same_d(z, w)
    out = np.zeros((z.d, z.n + w.n, z.cols + w.cols), dtype=complex)
    out[:, : z.n, : z.cols] = z.mats
    out[:, z.n :, z.cols :] = w.mats
    return Point(out)


def direct_sum_matrices(*mats) -> np.ndarray:
    import scipy.linalg

    return scipy.linalg.block_diag(*[np.asarray(a, dtype=complex) for a in mats])


def upper_block(z: Point, w: Point, u: Point) -> Point:
    """Componentwise ``[[Z_i, U_i], [0, W_i]]``."""
    return bidiagonal_block([z, w], [u])


def bidiagonal_block(zs: Sequence[Point], us: Sequence[Point]) -> Point:
    """Block bidiagonal tuple: ``zs`` on the diagonal, ``us`` just above it."""
    zs, us = list(zs), list(us)
    if not zs:
        raise InputError("need at least one diagonal point")
    if len(us) != len(zs) - 1:
        raise InputError(f"expected {len(zs) - 1} directions, got {len(us)}")
    _require_same_d(*zs, *us)
    for z in zs:
        if not z.is_square:
            raise InputError("diagonal points must be square")
    sizes = [z.n for z in zs]
    for j, u in enumerate(us):
        if (u.n, u.cols) != (sizes[j], sizes[j + 1]):
            raise InputError(
                f"direction {j + 1} has shape {u.n}x{u.cols}, "
                f"expected {sizes[j]}x{sizes[j + 1]}"
            )
    offs = np.concatenate([[0], np.cumsum(sizes)])
    out = np.zeros((zs[0].d, offs[-1], offs[-1]), dtype=complex)
    for j, z in enumerate(zs):
        out[:, offs[j] : offs[j + 1], offs[j] : offs[j + 1]] = z.mats
    for j, u in enumerate(us):
        out[:, offs[j] : offs[j + 1], offs[j + 1] : offs[j + 2]] = u.mats
    return Point(out)


def block_offsets(sizes: Sequence[int]) -> np.ndarray:
    return np.concatenate([[0], np.cumsum(sizes)]).astype(int)


@dataclass(frozen=True, eq=False)
class IntertwinerCertificate:
    C: np.ndarray
    source: Point
    target: Point
    residual: float
    tol: float = DEFAULT_TOL

    @property
    def valid(self) -> bool:
        return self.residual <= self.tol


def intertwining_residual(C, z: Point, w: Point) -> float:
    C = as_cmatrix(C, "C")
    _require_same_d(z, w)
    if C.shape != (w.n, z.n):
        raise InputError(f"C has shape {C.shape}, expected {(w.n, z.n)}")
    return max(spectral_norm(C @ Z - W @ C) for Z, W in zip(z.mats, w.mats))


def certify_intertwiner(C, z: Point, w: Point, tol: float = DEFAULT_TOL) -> IntertwinerCertificate:
    """Check ``C Z_i = W_i C`` for every component."""
    C = as_cmatrix(C, "C")
    res = intertwining_residual(C, z, w)
    return IntertwinerCertificate(C=C, source=z, target=w, residual=res, tol=tol)


def compress(v, z: Point) -> Point:
    """The tuple ``(v Z_i v^*)``."""
    v = as_cmatrix(v, "v")
    if v.shape[1] != z.n or not z.is_square:
        raise InputError(f"cannot compress level-{z.n} point with {v.shape} matrix")
    return Point(np.array([v @ Z @ v.conj().T for Z in z.mats]))


# ---------------------------------------------------------------- random data


def random_matrix(rng: np.random.Generator, n: int, m: int | None = None) -> np.ndarray:
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


def random_point(
    rng: np.random.Generator, d: int, n: int, norm: float | None = None, m: int | None = None
) -> Point:
    """Gaussian tuple, rescaled to the given row norm when ``norm`` is set."""
    m = n if m is None else m
    z = Point(rng.standard_normal((d, n, m)) + 1j * rng.standard_normal((d, n, m)))
    if norm is not None:
        r = row_norm(z)
        z = z * (norm / r) if r > 0 else z
    return z


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(random_matrix(rng, n))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_conditioned(rng: np.random.Generator, n: int, cond: float = 10.0) -> np.ndarray:
    """Random invertible matrix with condition number in ``[1, cond]``."""
    s = np.exp(rng.uniform(0.0, np.log(cond), n))
    return random_unitary(rng, n) @ np.diag(s) @ random_unitary(rng, n)


# ---------------------------------------------------------------------- JSON


def matrix_to_json(a) -> dict:
    a = np.asarray(a, dtype=complex)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "entries": [[float(x.real), float(x.imag)] for x in a.ravel()],
    }


def _pairs_to_complex(data, where: str) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{where}: entries must be [re, im] pairs") from exc
    if arr.shape[-1:] != (2,):
        raise InputError(f"{where}: entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        rows, cols, entries = int(obj["rows"]), int(obj["cols"]), obj["entries"]
    except (KeyError, TypeError) as exc:
        raise InputError(f"matrix JSON missing field: {exc}") from exc
    vals = _pairs_to_complex(entries, "matrix")
    if vals.shape != (rows * cols,):
        raise InputError(f"matrix JSON: expected {rows * cols} entries, got {vals.size}")
    return as_cmatrix(vals.reshape(rows, cols))


def point_to_json(z: Point) -> dict:
    mats = [[[[float(x.real), float(x.imag)] for x in row] for row in Z] for Z in z.mats]
    return {"d": z.d, "n": z.n, "mats": mats}


def point_from_json(obj: dict) -> Point:
    try:
        d, n, mats = int(obj["d"]), int(obj["n"]), obj["mats"]
    except (KeyError, TypeError) as exc:
        raise InputError(f"point JSON missing field: {exc}") from exc
    arr = _pairs_to_complex(mats, "point")
    if arr.ndim != 3 or arr.shape[0] != d or arr.shape[1] != n:
        raise InputError(f"point JSON: expected {d} matrices with {n} rows, got shape {arr.shape}")
    return Point(arr)
