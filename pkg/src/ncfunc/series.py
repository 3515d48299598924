"""Free (noncommutative) formal power series and their evaluation at matrix tuples.

A series is a sparse map from words over ``{1..d}`` to complex coefficients,
``theta ~ sum_w a_w X_w``.  Evaluating at a point ``z = (Z_1, ..., Z_d)``
substitutes ``X_w -> Z_w = Z_{i_1} ... Z_{i_k}``.

Three infinite pattern series carry a generator tag and are handled in
closed form where possible:

* ``geometric``: ``a_w = c^k`` for ``w = (i, ..., i)`` of length k, else 0.
* ``full``: ``a_w = c^{|w|}`` for every word.
* ``luminet``: ``sum_{k>=2} S_k(X_1, X_1 X_2, ..., X_1 X_2^{k-1})`` with
  ``S_k`` the standard polynomial; stored as its truncation at outer index
  ``k_max`` (its coefficients are integers and grow factorially in number).
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from .core import InputError, Point, ResourceError, row_norm

Word = tuple[int, ...]

GEN_POWER_CAP = 10**6
LUMINET_MAX = 8


class DivergenceWarning(UserWarning):
    """Evaluation requested outside the (estimated) disc of convergence."""


@dataclass(frozen=True)
class Generator:
    kind: str
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("geometric", "full", "luminet"):
            raise InputError(f"unknown generator kind {self.kind!r}")
        object.__setattr__(self, "params", MappingProxyType(dict(self.params)))


def _check_word(word, d: int) -> Word:
    w = tuple(int(i) for i in word)
    for i in w:
        if not 1 <= i <= d:
            raise InputError(f"letter {i} in word {w} outside [1, {d}]")
    return w


class FreeSeries:
    """Sparse word-indexed series over the alphabet ``{1..d}``.

    Coefficients of tagged ``geometric``/``full`` series are produced on
    demand; all other series are finitely supported.  Instances are
    immutable.
    """

    __slots__ = ("_d", "_coeffs", "_generator")

    def __init__(self, d: int, coeffs: Mapping | None = None, generator: Generator | None = None):
        if int(d) < 1:
            raise InputError("alphabet size must be positive")
        self._d = int(d)
        clean = {}
        for word, c in (coeffs or {}).items():
            c = complex(c)
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise InputError(f"non-finite coefficient on word {word}")
            if c != 0:
                w = _check_word(word, self._d)
                clean[w] = clean.get(w, 0) + c
        self._coeffs = MappingProxyType(clean)
        self._generator = generator
        if generator is not None and generator.kind in ("geometric", "full") and clean:
            raise InputError(f"{generator.kind} series cannot carry explicit terms")
        if generator is not None and generator.kind == "geometric":
            letter = int(generator.params.get("letter", 1))
            _check_word((letter,), self._d)

    # -- construction ------------------------------------------------------

    @classmethod
    def monomial(cls, d: int, word: Iterable[int], c: complex = 1.0) -> "FreeSeries":
        return cls(d, {tuple(word): c})

    @classmethod
    def constant(cls, d: int, c: complex = 1.0) -> "FreeSeries":
        return cls(d, {(): c})

    @classmethod
    def geometric(cls, d: int = 1, letter: int = 1, scale: complex = 1.0) -> "FreeSeries":
        """``sum_k (c X_letter)^k``."""
        return cls(d, generator=Generator("geometric", {"letter": int(letter), "scale": complex(scale)}))

    @classmethod
    def full(cls, d: int, scale: complex = 1.0) -> "FreeSeries":
        """``sum_w c^{|w|} X_w`` over all words."""
        return cls(d, generator=Generator("full", {"scale": complex(scale)}))

    # -- accessors ---------------------------------------------------------

    @property
    def d(self) -> int:
        return self._d

    @property
    def generator(self) -> Generator | None:
        return self._generator

    @property
    def coeffs(self) -> Mapping[Word, complex]:
        """Explicitly stored coefficients (empty for geometric/full)."""
        return self._coeffs

    @property
    def is_polynomial(self) -> bool:
        return self._generator is None

    @property
    def is_finite(self) -> bool:
        """True when all nonzero coefficients are stored explicitly."""
        return self._generator is None or self._generator.kind == "luminet"

    @property
    def degree(self) -> int | None:
        """Largest word length with a nonzero coefficient; -1 for zero, None if unbounded."""
        if not self.is_finite:
            return None
        return max((len(w) for w in self._coeffs), default=-1)

    def _scale(self) -> complex:
        return complex(self._generator.params.get("scale", 1.0))

    def terms(self, k: int) -> dict[Word, complex]:
        """Coefficients of the degree-k part."""
        if k < 0:
            return {}
        gen = self._generator
        if gen is not None and gen.kind == "geometric":
            return {(int(gen.params.get("letter", 1)),) * k: self._scale() ** k}
        if gen is not None and gen.kind == "full":
            c = self._scale() ** k
            if c == 0:
                return {}
            if self._d**k > GEN_POWER_CAP:
                raise ResourceError(f"{self._d}^{k} words exceed cap {GEN_POWER_CAP}")
            return {w: c for w in itertools.product(range(1, self._d + 1), repeat=k)}
        return {w: c for w, c in self._coeffs.items() if len(w) == k}

    def truncate(self, k_max: int) -> "FreeSeries":
        """Untagged polynomial made of the terms of degree <= k_max."""
        out = {}
        for k in range(k_max + 1):
            out.update(self.terms(k))
        return FreeSeries(self._d, out)

    # -- arithmetic --------------------------------------------------------

    def _finite_coeffs(self, what: str) -> Mapping[Word, complex]:
        if not self.is_finite:
            raise InputError(f"{what} needs a finitely supported series (truncate first)")
        return self._coeffs

    def __add__(self, other: "FreeSeries") -> "FreeSeries":
        if not isinstance(other, FreeSeries):
            return NotImplemented
        _same_d(self, other)
        out = dict(self._finite_coeffs("addition"))
        for w, c in other._finite_coeffs("addition").items():
            out[w] = out.get(w, 0) + c
        return FreeSeries(self._d, out)

    def __neg__(self) -> "FreeSeries":
        return self.scaled(-1.0)

    def __sub__(self, other: "FreeSeries") -> "FreeSeries":
        return self + (-other)

    def scaled(self, c: complex) -> "FreeSeries":
        return FreeSeries(self._d, {w: c * a for w, a in self._finite_coeffs("scaling").items()})

    def __mul__(self, other):
        if isinstance(other, FreeSeries):
            return multiply(self, other)
        return self.scaled(other)

    def __rmul__(self, c):
        return self.scaled(c)

    def max_coeff_diff(self, other: "FreeSeries") -> float:
        """Largest coefficient difference between two finitely supported series."""
        _same_d(self, other)
        a, b = self._finite_coeffs("comparison"), other._finite_coeffs("comparison")
        return max((abs(a.get(w, 0) - b.get(w, 0)) for w in set(a) | set(b)), default=0.0)

    def __repr__(self):
        if self._generator is not None:
            return f"FreeSeries(d={self._d}, generator={self._generator.kind}, {dict(self._generator.params)})"
        return f"FreeSeries(d={self._d}, terms={len(self._coeffs)}, degree={self.degree})"

    # -- JSON --------------------------------------------------------------

    def to_json(self) -> dict:
        terms = [
            {"word": list(w), "re": float(c.real), "im": float(c.imag)}
            for w, c in sorted(self._coeffs.items(), key=lambda t: (len(t[0]), t[0]))
        ]
        gen = None
        if self._generator is not None:
            params = {}
            for key, val in self._generator.params.items():
                if isinstance(val, complex):
                    params[key] = [val.real, val.imag]
                else:
                    params[key] = val
            gen = {"kind": self._generator.kind, "params": params}
        return {"d": self._d, "terms": terms, "generator": gen}

    @classmethod
    def from_json(cls, obj: dict) -> "FreeSeries":
        try:
            d = int(obj["d"])
            gen = obj.get("generator")
            if gen is not None:
                kind, params = gen["kind"], dict(gen.get("params") or {})
                if "scale" in params:
                    s = params["scale"]
                    params["scale"] = complex(s[0], s[1]) if isinstance(s, list) else complex(s)
                if kind == "geometric":
                    return cls.geometric(d, int(params.get("letter", 1)), params.get("scale", 1.0))
                if kind == "full":
                    return cls.full(d, params.get("scale", 1.0))
                if kind == "luminet":
                    if d != 2:
                        raise InputError("luminet series live over d=2")
                    return luminet(int(params.get("k_max", LUMINET_MAX)))
                raise InputError(f"unknown generator kind {kind!r}")
            coeffs: dict[Word, complex] = {}
            for t in obj.get("terms", []):
                w = tuple(t["word"])
                coeffs[w] = coeffs.get(w, 0) + complex(float(t.get("re", 0.0)), float(t.get("im", 0.0)))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InputError):
                raise
            raise InputError(f"malformed series JSON: {exc}") from exc
        return cls(d, coeffs)


def _same_d(*series: FreeSeries):
    if len({s.d for s in series}) != 1:
        raise InputError("series live over different alphabets")


# ---------------------------------------------------------------- norms


def degree_norm(theta: FreeSeries, k: int) -> float:
    """l2 norm of the degree-k coefficients (the Fock/Hilbert tensor norm)."""
    if k < 0:
        return 0.0
    gen = theta.generator
    if gen is not None and gen.kind == "geometric":
        return abs(theta._scale()) ** k
    if gen is not None and gen.kind == "full":
        return abs(theta._scale()) ** k * theta.d ** (k / 2)
    return float(math.sqrt(sum(abs(c) ** 2 for c in theta.terms(k).values())))


@dataclass(frozen=True)
class RadiusEstimate:
    value: float
    degrees_used: int
    exact: bool


def radius(theta: FreeSeries, k_max: int = 32) -> RadiusEstimate:
    """Radius of convergence ``(limsup ||theta_k||^(1/k))^(-1)``.

    Exact for polynomials and for geometric/full series; otherwise the
    limsup is replaced by the maximum over degrees ``1..k_max``, which can
    only under-estimate the radius of the finite data seen.
    """
    if k_max < 1:
        raise InputError("k_max must be at least 1")
    gen = theta.generator
    if gen is None:
        return RadiusEstimate(math.inf, 0, True)
    if gen.kind in ("geometric", "full"):
        c = abs(theta._scale())
        if c == 0:
            return RadiusEstimate(math.inf, 0, True)
        root = c if gen.kind == "geometric" else c * math.sqrt(theta.d)
        return RadiusEstimate(1.0 / root, 0, True)
    peak = max((degree_norm(theta, k) ** (1.0 / k) for k in range(1, k_max + 1)), default=0.0)
    return RadiusEstimate(math.inf if peak == 0 else 1.0 / peak, k_max, False)


# ---------------------------------------------------------------- products


def multiply(theta: FreeSeries, eta: FreeSeries, max_degree: int | None = None) -> FreeSeries:
    """Cauchy product: ``c_w = sum_{w = uv} a_u b_v``."""
    _same_d(theta, eta)
    if max_degree is None:
        if not (theta.is_finite and eta.is_finite):
            raise InputError("product of infinite series needs max_degree")
        a, b = theta.coeffs, eta.coeffs
    else:
        a, b = theta.truncate(max_degree).coeffs, eta.truncate(max_degree).coeffs
    out: dict[Word, complex] = {}
    for u, cu in a.items():
        for v, cv in b.items():
            if max_degree is not None and len(u) + len(v) > max_degree:
                continue
            w = u + v
            out[w] = out.get(w, 0) + cu * cv
    return FreeSeries(theta.d, out)


# ---------------------------------------------------------------- evaluation


@dataclass(frozen=True, eq=False)
class EvalResult:
    value: np.ndarray
    tail_bound: float
    k_max: int


def _check_point(theta: FreeSeries, z: Point):
    if z.d != theta.d:
        raise InputError(f"series has d={theta.d} but point has d={z.d}")
    if not z.is_square:
        raise InputError("evaluation point must be square")


def _build_trie(terms: Mapping[Word, complex]) -> dict:
    root: dict = {}
    for w, c in terms.items():
        node = root
        for i in w:
            node = node.setdefault(i, {})
        node[None] = node.get(None, 0) + c
    return root


def _finite_terms(theta: FreeSeries, k_max: int) -> dict[Word, complex]:
    return {w: c for w, c in theta.coeffs.items() if len(w) <= k_max}


def _closed_generator_matrix(theta: FreeSeries, mats: np.ndarray) -> np.ndarray:
    """``c Z_letter`` (geometric) or ``c sum Z_i`` (full) so that the series is sum A^k."""
    gen, c = theta.generator, theta._scale()
    if gen.kind == "geometric":
        return c * mats[int(gen.params.get("letter", 1)) - 1]
    return c * mats.sum(axis=0)


def tail_bound(theta: FreeSeries, r: float, k_max: int) -> float:
    """``sum_{k > k_max} ||theta_k|| r^k`` (infinite when the series may diverge)."""
    if theta.is_finite:
        deg = theta.degree
        return float(sum(degree_norm(theta, k) * r**k for k in range(k_max + 1, deg + 1)))
    q = degree_norm(theta, 1) * r
    if q >= 1.0:
        return math.inf
    return q ** (k_max + 1) / (1.0 - q)


def evaluate(theta: FreeSeries, z: Point, k_max: int | None = None) -> EvalResult:
    """Partial sum ``sum_{|w| <= k_max} a_w Z_w`` and a bound on the neglected tail.

    For polynomials ``k_max`` defaults to the degree, giving the exact value.
    Words are walked depth-first through a prefix trie so each prefix product
    is formed once.
    """
    _check_point(theta, z)
    if k_max is None:
        if not theta.is_finite:
            raise InputError("k_max is required for infinite series")
        k_max = max(theta.degree, 0)
    r = row_norm(z)
    rad = radius(theta)
    if not theta.is_polynomial and r >= rad.value:
        warnings.warn(
            f"row norm {r:.6g} is not inside the radius estimate {rad.value:.6g}; "
            "returning the partial sum",
            DivergenceWarning,
            stacklevel=2,
        )
    n = z.n
    if not theta.is_finite:
        A = _closed_generator_matrix(theta, z.mats)
        total = np.eye(n, dtype=complex)
        power = np.eye(n, dtype=complex)
        for _ in range(k_max):
            power = power @ A
            total = total + power
        return EvalResult(total, tail_bound(theta, r, k_max), k_max)

    total = np.zeros((n, n), dtype=complex)
    stack = [(_build_trie(_finite_terms(theta, k_max)), np.eye(n, dtype=complex))]
    while stack:
        node, prod = stack.pop()
        for key, child in node.items():
            if key is None:
                total += child * prod
            else:
                stack.append((child, prod @ z.mats[key - 1]))
    return EvalResult(total, tail_bound(theta, r, k_max), k_max)


def closed_form(theta: FreeSeries, z: Point) -> np.ndarray | None:
    """Exact value ``(I - A)^{-1}`` for geometric/full series, else None."""
    if theta.is_finite:
        return None
    _check_point(theta, z)
    A = _closed_generator_matrix(theta, z.mats)
    return np.linalg.solve(np.eye(z.n) - A, np.eye(z.n, dtype=complex))


def gen_power(z: Point, k: int, cap: int = GEN_POWER_CAP) -> list[np.ndarray]:
    """The word products ``Z_w`` for ``|w| = k`` in lexicographic order."""
    if k < 0:
        raise InputError("k must be non-negative")
    if z.d**k * z.n * z.n > cap:
        raise ResourceError(f"{z.d}^{k} products of size {z.n}x{z.n} exceed cap {cap}")
    out = [np.eye(z.n, dtype=complex)]
    for _ in range(k):
        out = [P @ Z for P in out for Z in z.mats]
    return out


def directional_derivative(theta: FreeSeries, z: Point, zeta: Point, k_max: int | None = None) -> np.ndarray:
    """``sum_w a_w sum_p Z_{i_1} ... zeta_{i_p} ... Z_{i_k}`` (derivative of the partial sum).

    Forward-mode recurrence over the word trie: for a prefix ``v`` carrying
    ``(Z_v, D_v)``, appending letter ``i`` gives ``(Z_v Z_i, D_v Z_i + Z_v zeta_i)``.
    """
    _check_point(theta, z)
    if zeta.d != z.d or zeta.mats.shape != z.mats.shape:
        raise InputError("direction must have the same shape as the base point")
    if k_max is None:
        if not theta.is_finite:
            raise InputError("k_max is required for infinite series")
        k_max = max(theta.degree, 0)
    n = z.n
    if not theta.is_finite:
        A = _closed_generator_matrix(theta, z.mats)
        B = _closed_generator_matrix(theta, zeta.mats)
        P = np.eye(n, dtype=complex)
        D = np.zeros((n, n), dtype=complex)
        total = np.zeros((n, n), dtype=complex)
        for _ in range(k_max):
            P, D = P @ A, D @ A + P @ B
            total = total + D
        return total

    total = np.zeros((n, n), dtype=complex)
    zero = np.zeros((n, n), dtype=complex)
    stack = [(_build_trie(_finite_terms(theta, k_max)), np.eye(n, dtype=complex), zero)]
    while stack:
        node, P, D = stack.pop()
        for key, child in node.items():
            if key is None:
                total += child * D
            else:
                Z, Zeta = z.mats[key - 1], zeta.mats[key - 1]
                stack.append((child, P @ Z, D @ Z + P @ Zeta))
    return total


# ---------------------------------------------------------------- Luminet


def permutation_sign(perm) -> int:
    perm = list(perm)
    sign, seen = 1, [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def luminet_term(k: int) -> FreeSeries:
    """``S_k(X_1, X_1 X_2, ..., X_1 X_2^{k-1})`` expanded into words over d=2."""
    if not 1 <= k <= LUMINET_MAX:
        raise InputError(f"outer index {k} outside [1, {LUMINET_MAX}]")
    blocks = [(1,) + (2,) * j for j in range(k)]
    coeffs: dict[Word, complex] = {}
    for perm in itertools.permutations(range(k)):
        w = tuple(itertools.chain.from_iterable(blocks[p] for p in perm))
        coeffs[w] = coeffs.get(w, 0) + permutation_sign(perm)
    return FreeSeries(2, coeffs)


def luminet(k_max: int) -> FreeSeries:
    """``sum_{2 <= k <= k_max} S_k(X_1, X_1 X_2, ..., X_1 X_2^{k-1})``, tagged ``luminet``."""
    if not 2 <= k_max <= LUMINET_MAX:
        raise InputError(f"k_max must lie in [2, {LUMINET_MAX}], got {k_max}")
    coeffs: dict[Word, complex] = {}
    for k in range(2, k_max + 1):
        coeffs.update(luminet_term(k).coeffs)
    return FreeSeries(2, coeffs, Generator("luminet", {"k_max": k_max}))
