"""Intertwiner catalogs and property checks for matricial families.

A family of functions is matricial when ``C Z_i = W_i C`` for all i forces
``C f(z) = f(w) C``; for families of maps the conclusion is componentwise,
``C g(z)_i = g(w)_i C``.  The catalog generates certified intertwiners of
several kinds between points built from a seed pair ``z, w``; the checks
then measure the defining identities on every entry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    DEFAULT_TOL,
    IntertwinerCertificate,
    InputError,
    Point,
    certify_intertwiner,
    direct_sum,
    direct_sum_matrices,
    random_conditioned,
    random_point,
    random_unitary,
    row_norm,
    spectral_norm,
    upper_block,
)
from .report import CheckReport
from .taylor import MatricialFunction, MatricialMap

TAGS = ("identity", "scalar", "embedding", "projection", "permutation", "similarity", "column")


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    tag: str
    cert: IntertwinerCertificate

    @property
    def C(self) -> np.ndarray:
        return self.cert.C

    @property
    def source(self) -> Point:
        return self.cert.source

    @property
    def target(self) -> Point:
        return self.cert.target


@dataclass
class IntertwinerCatalog:
    entries: list[CatalogEntry] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def tags(self) -> set[str]:
        return {e.tag for e in self.entries}

    def add(self, tag: str, C, source: Point, target: Point, tol: float = DEFAULT_TOL) -> None:
        cert = certify_intertwiner(C, source, target, tol)
        if cert.valid:
            self.entries.append(CatalogEntry(tag, cert))
        else:
            self.notes.append(f"dropped {tag} entry: residual {cert.residual:.3e}")


def _fit(points: list[Point], radius: float, margin: float = 0.9) -> list[Point]:
    """Rescale a group of points by one factor so each lies well inside the domain."""
    if math.isinf(radius):
        return points
    peak = max(row_norm(p) for p in points)
    if peak < margin * radius:
        return points
    t = margin * radius / peak
    return [p * t for p in points]


def build_catalog(z: Point, w: Point, seed: int = 0, radius: float = math.inf) -> IntertwinerCatalog:
    """Certified intertwiners relating z, w and points assembled from them.

    Points are assumed to lie in the domain; derived pairs (similarity
    images, upper-triangular blocks) are rescaled jointly to stay inside.
    """
    if z.d != w.d:
        raise InputError(f"alphabet sizes differ: {z.d} vs {w.d}")
    if not (z.is_square and w.is_square):
        raise InputError("catalog points must be square")
    rng = np.random.default_rng(seed)
    cat = IntertwinerCatalog()
    nz, nw = z.n, w.n
    Iz, Iw = np.eye(nz), np.eye(nw)

    cat.add("identity", Iz, z, z)
    cat.add("identity", Iw, w, w)
    if nz == nw and np.array_equal(z.mats, w.mats):
        cat.add("identity", Iz, z, w)

    c = complex(rng.standard_normal(), rng.standard_normal())
    cat.add("scalar", c * Iz, z, z)
    cat.add("scalar", c * Iw, w, w)

    zw = direct_sum(z, w)
    cat.add("embedding", np.vstack([Iz, np.zeros((nw, nz))]), z, zw)
    cat.add("embedding", np.vstack([np.zeros((nz, nw)), Iw]), w, zw)
    cat.add("projection", np.hstack([Iz, np.zeros((nz, nw))]), zw, z)
    cat.add("projection", np.hstack([np.zeros((nw, nz)), Iw]), zw, w)

    swap = np.block([[np.zeros((nw, nz)), Iw], [Iz, np.zeros((nz, nw))]])
    cat.add("permutation", swap, zw, direct_sum(w, z))
    zz = direct_sum(z, z)
    swap_zz = np.block([[np.zeros((nz, nz)), Iz], [Iz, np.zeros((nz, nz))]])
    cat.add("permutation", swap_zz, zz, zz)
    perm = np.eye(nz)[rng.permutation(nz)]
    cat.add("permutation", perm, z, Point(np.array([perm @ Z @ perm.T for Z in z.mats])))

    for base in (z, w):
        S = random_conditioned(rng, base.n, 10.0)
        Sinv = np.linalg.inv(S)
        image = Point(np.array([S @ Z @ Sinv for Z in base.mats]))
        src, tgt = _fit([base, image], radius)
        cat.add("similarity", S, src, tgt)

    u = random_point(rng, z.d, nz, norm=1.0, m=nw)
    for scale in (1.0, 0.25):
        src, w_s, u_s = z, w, u * scale
        block = upper_block(src, w_s, u_s)
        if not math.isinf(radius) and row_norm(block) >= 0.9 * radius:
            t = 0.9 * radius / row_norm(block)
            src, w_s, u_s = src * t, w_s * t, u_s * t
            block = upper_block(src, w_s, u_s)
        cat.add("column", np.vstack([Iz, np.zeros((nw, nz))]), src, block)
    return cat


def check_function_matricial(f: MatricialFunction, catalog: IntertwinerCatalog, tol: float = 1e-9) -> CheckReport:
    """Residuals ``||C f(z) - f(w) C||`` over the catalog."""
    report = CheckReport("function_matricial", tol, notes=list(catalog.notes))
    for i, e in enumerate(catalog):
        if not (f.contains(e.source) and f.contains(e.target)):
            report.notes.append(f"skipped {i:03d}_{e.tag}: outside domain of {f.name}")
            continue
        report.add(f"{i:03d}_{e.tag}", spectral_norm(e.C @ f(e.source) - f(e.target) @ e.C))
    return report


def check_direct_sum(f: MatricialFunction, z: Point, w: Point, tol: float = 1e-9) -> CheckReport:
    """Residual ``||f(z + w) - f(z) + f(w)||`` with + the direct sum."""
    report = CheckReport("direct_sum", tol)
    lhs = f(direct_sum(z, w))
    report.add("direct_sum", spectral_norm(lhs - direct_sum_matrices(f(z), f(w))))
    return report


def check_map_matricial(g: MatricialMap, catalog: IntertwinerCatalog, tol: float = 1e-9) -> CheckReport:
    """Componentwise residuals ``max_i ||C g(z)_i - g(w)_i C||``."""
    report = CheckReport("map_matricial", tol, notes=list(catalog.notes))
    for i, e in enumerate(catalog):
        if not (g.contains(e.source) and g.contains(e.target)):
            report.notes.append(f"skipped {i:03d}_{e.tag}: outside domain of {g.name}")
            continue
        gz, gw = g(e.source), g(e.target)
        res = max(spectral_norm(e.C @ A - B @ e.C) for A, B in zip(gz.mats, gw.mats))
        report.add(f"{i:03d}_{e.tag}", res)
    return report


# ------------------------------------------------------------ negative controls


def entrywise_conjugate(d: int) -> MatricialFunction:
    """``z -> conj(Z_1)``: breaks complex similarities."""
    return MatricialFunction(d, lambda z: z.mats[0].conj(), math.inf, "entrywise_conjugate")


def trace_scalar(d: int) -> MatricialFunction:
    """``z -> tr(Z_1) I``: breaks direct sums."""
    return MatricialFunction(d, lambda z: np.trace(z.mats[0]) * np.eye(z.n), math.inf, "trace_scalar")


def entrywise_abs(d: int) -> MatricialFunction:
    """``z -> |Z_1|`` entrywise: breaks additivity of the difference."""
    return MatricialFunction(d, lambda z: np.abs(z.mats[0]).astype(complex), math.inf, "entrywise_abs")


def transpose_map(d: int) -> MatricialMap:
    """``z -> (Z_1^T, ..., Z_d^T)``: breaks similarities."""
    return MatricialMap(d, lambda z: Point(np.transpose(z.mats, (0, 2, 1))), math.inf, "transpose")


def identity_map(d: int) -> MatricialMap:
    return MatricialMap(d, lambda z: z, math.inf, "identity")


# ------------------------------------------------------------ resolvent example


def resolvent() -> MatricialFunction:
    """``z -> (I - Z_1)^{-1}`` on the open unit ball, d = 1."""

    def ev(z: Point) -> np.ndarray:
        return np.linalg.solve(np.eye(z.n) - z.mats[0], np.eye(z.n, dtype=complex))

    return MatricialFunction(1, ev, 1.0, "resolvent")


def resolvent_counterexample(n: int, samples: int = 6, seed: int = 0, tol: float = 1e-9) -> CheckReport:
    """The resolvent is matricial on the ball yet unbounded there.

    Matriciality is checked on a catalog inside the ball.  Unboundedness is
    exhibited with normal points ``(1 - 10^-m) U diag(1, ...) U^*`` whose
    resolvent norm is ``10^m``; each case records the shortfall relative to
    ``10^m / 2`` (zero when the growth is met).
    """
    rng = np.random.default_rng(seed)
    f = resolvent()
    z = random_point(rng, 1, n, norm=0.5)
    w = random_point(rng, 1, max(1, n - 1), norm=0.4)
    report = check_function_matricial(f, build_catalog(z, w, seed, radius=1.0), tol)
    report.name = "resolvent_counterexample"
    growth = {}
    for m in range(1, min(samples, 12) + 1):
        phases = np.exp(2j * np.pi * rng.uniform(size=n))
        phases[0] = 1.0
        U = random_unitary(rng, n)
        pt = Point(((1 - 10.0**-m) * (U @ np.diag(phases) @ U.conj().T))[None])
        try:
            val = spectral_norm(f(pt))
        except np.linalg.LinAlgError:
            report.notes.append(f"m={m}: I - z singular (expected near-boundary blowup)")
            report.add(f"growth_{m:02d}", 0.0)
            continue
        growth[m] = val
        report.add(f"growth_{m:02d}", max(0.0, 1.0 - val / (10.0**m / 2)))
    report.info["resolvent_norms"] = {str(k): v for k, v in growth.items()}
    return report
