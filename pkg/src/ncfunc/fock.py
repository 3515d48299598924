"""Truncated full Fock space over C^d.

Basis vectors are the point masses at words of length <= N, ordered by
length and then lexicographically (this ordering is part of the JSON
format and does not change).  Creation operators send top-degree words to
zero, so every graded identity below degree N holds exactly.
"""

from __future__ import annotations

import itertools
import os
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .core import InputError, Point, ResourceError, matrix_to_json
from .series import FreeSeries, Word

DEFAULT_MAX_DIM = 4096


def max_dim() -> int:
    raw = os.environ.get("NCFUNC_MAX_DIM")
    if raw is None:
        return DEFAULT_MAX_DIM
    try:
        return int(raw)
    except ValueError as exc:
        raise InputError(f"NCFUNC_MAX_DIM must be an integer, got {raw!r}") from exc


def fock_dim(d: int, N: int) -> int:
    return sum(d**k for k in range(N + 1))


@dataclass(frozen=True)
class FockBasis:
    d: int
    N: int
    cap: int = field(default_factory=max_dim, compare=False)

    def __post_init__(self):
        if self.d < 1 or self.N < 0:
            raise InputError(f"invalid Fock basis d={self.d}, N={self.N}")
        if fock_dim(self.d, self.N) > self.cap:
            raise ResourceError(f"Fock dimension {fock_dim(self.d, self.N)} exceeds cap {self.cap}")

    @property
    def dim(self) -> int:
        return fock_dim(self.d, self.N)

    @cached_property
    def words(self) -> list[Word]:
        letters = range(1, self.d + 1)
        return [w for k in range(self.N + 1) for w in itertools.product(letters, repeat=k)]

    @cached_property
    def _index(self) -> dict[Word, int]:
        return {w: i for i, w in enumerate(self.words)}

    def index(self, word) -> int:
        try:
            return self._index[tuple(word)]
        except KeyError:
            raise InputError(f"word {tuple(word)} not in basis (d={self.d}, N={self.N})") from None

    @cached_property
    def lengths(self) -> np.ndarray:
        return np.array([len(w) for w in self.words])

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v

    def projection(self, lo: int, hi: int) -> np.ndarray:
        """Orthogonal projection onto words with length in ``[lo, hi]``."""
        keep = (self.lengths >= lo) & (self.lengths <= hi)
        return np.diag(keep.astype(complex))


@dataclass(frozen=True, eq=False)
class FockOperator:
    basis: FockBasis
    mat: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mat, dtype=complex)
        if m.shape != (self.basis.dim, self.basis.dim):
            raise InputError(f"operator shape {m.shape} does not match basis dimension {self.basis.dim}")
        object.__setattr__(self, "mat", m)

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.basis, self.mat @ other.mat)

    def __add__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.basis, self.mat + other.mat)

    def __sub__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.basis, self.mat - other.mat)

    def __mul__(self, c: complex) -> "FockOperator":
        return FockOperator(self.basis, c * self.mat)

    __rmul__ = __mul__

    @property
    def adjoint(self) -> "FockOperator":
        return FockOperator(self.basis, self.mat.conj().T)

    def to_json(self) -> dict:
        return {"basis": {"d": self.basis.d, "N": self.basis.N}, "mat": matrix_to_json(self.mat)}


def identity(basis: FockBasis) -> FockOperator:
    return FockOperator(basis, np.eye(basis.dim, dtype=complex))


def creation(basis: FockBasis, i: int) -> FockOperator:
    """``S_i delta_w = delta_{iw}``; words of length N go to zero."""
    if not 1 <= i <= basis.d:
        raise InputError(f"letter {i} outside [1, {basis.d}]")
    mat = np.zeros((basis.dim, basis.dim), dtype=complex)
    for col, w in enumerate(basis.words):
        if len(w) < basis.N:
            mat[basis.index((i,) + w), col] = 1.0
    return FockOperator(basis, mat)


def toeplitz(basis: FockBasis, theta: FreeSeries) -> FockOperator:
    """``T_theta = sum_w a_w S_w`` on the truncated space."""
    if theta.d != basis.d:
        raise InputError(f"series has d={theta.d}, basis has d={basis.d}")
    if not theta.is_finite or theta.degree > basis.N:
        raise InputError(f"series degree exceeds truncation N={basis.N}")
    mat = np.zeros((basis.dim, basis.dim), dtype=complex)
    for w, c in theta.coeffs.items():
        for col, v in enumerate(basis.words):
            if len(w) + len(v) <= basis.N:
                mat[basis.index(w + v), col] += c
    return FockOperator(basis, mat)


def gauge(basis: FockBasis, t: float) -> FockOperator:
    """The gauge unitary ``W_t = sum_k e^{ikt} P_k``."""
    return FockOperator(basis, np.diag(np.exp(1j * t * basis.lengths)))


def _degree_gap(basis: FockBasis) -> np.ndarray:
    L = basis.lengths
    return L[:, None] - L[None, :]


def fourier(F: FockOperator, j: int, mode: str = "mask") -> FockOperator:
    """Fourier coefficient ``Phi_j(F) = (1/2pi) int e^{-ijt} W_t F W_t^* dt``.

    ``mask`` keeps entries ``(w, v)`` with ``|w| - |v| = j``.  ``quadrature``
    averages over ``2N + 1`` equispaced nodes, which is exact because the
    integrand is a trigonometric polynomial of degree at most N.
    """
    basis = F.basis
    if abs(j) > basis.N:
        warnings.warn(f"|j|={abs(j)} exceeds N={basis.N}; Fourier coefficient is zero", stacklevel=2)
        return FockOperator(basis, np.zeros_like(F.mat))
    if mode == "mask":
        return FockOperator(basis, np.where(_degree_gap(basis) == j, F.mat, 0))
    if mode == "quadrature":
        Q = 2 * basis.N + 1
        acc = np.zeros_like(F.mat)
        for q in range(Q):
            t = 2 * np.pi * q / Q
            phase = np.exp(1j * t * basis.lengths)
            acc += np.exp(-1j * j * t) * (phase[:, None] * F.mat * phase.conj()[None, :])
        return FockOperator(basis, acc / Q)
    raise InputError(f"unknown Fourier mode {mode!r}")


def cesaro(F: FockOperator, k: int) -> FockOperator:
    """Fejer sum ``sum_{|j|<k} (1 - |j|/k) Phi_j(F)``."""
    if k < 1:
        raise InputError("Cesaro index must be at least 1")
    gap = _degree_gap(F.basis)
    weights = np.clip(1.0 - np.abs(gap) / k, 0.0, None)
    return FockOperator(F.basis, weights * F.mat)


def shift_point(basis: FockBasis, r: float) -> Point:
    """The tuple ``(r S_1, ..., r S_d)`` at level ``dim(basis)``."""
    if r < 0:
        raise InputError("r must be non-negative")
    return Point(np.array([r * creation(basis, i).mat for i in range(1, basis.d + 1)]))
