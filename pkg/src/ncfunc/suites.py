"""Seeded property suites; each returns a :class:`CheckReport`.

Every suite is deterministic given its seed.  The acceptance test module and
the ``suite`` CLI verb both run these.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from . import fock, harness, mobius
from .core import DEFAULT_TOL, Point, random_point, row_norm, spectral_norm
from .report import CheckReport
from .series import (
    FreeSeries,
    degree_norm,
    evaluate,
    luminet,
    luminet_term,
    multiply,
    radius,
)
from .taylor import (
    MatricialFunction,
    additivity_check,
    amplification_check,
    cb_bound_sample,
    delta_n,
    frechet_check,
    remainder_check,
    remainder_terms,
    taylor_expand,
)


def random_polynomial(
    rng: np.random.Generator, d: int, max_degree: int, max_terms: int = 6, min_degree: int = 0
) -> FreeSeries:
    coeffs = {}
    for _ in range(int(rng.integers(1, max_terms + 1))):
        k = int(rng.integers(min_degree, max_degree + 1))
        w = tuple(int(i) for i in rng.integers(1, d + 1, k))
        coeffs[w] = complex(rng.standard_normal(), rng.standard_normal()) / math.sqrt(2)
    return FreeSeries(d, coeffs)


def _rng(seed: int, salt: int) -> np.random.Generator:
    return np.random.default_rng([seed, salt])


# ----------------------------------------------------------------- criteria


def homomorphism(seed: int = 0, cases: int = 200) -> CheckReport:
    """eval(theta eta, z) = eval(theta, z) eval(eta, z)."""
    rng = _rng(seed, 1)
    report = CheckReport("homomorphism", DEFAULT_TOL)
    for c in range(cases):
        d, n = int(rng.integers(1, 4)), int(rng.integers(1, 5))
        th, et = random_polynomial(rng, d, 4), random_polynomial(rng, d, 4)
        z = random_point(rng, d, n, norm=rng.uniform(0.1, 1.0))
        lhs = evaluate(multiply(th, et), z).value
        rhs = evaluate(th, z).value @ evaluate(et, z).value
        report.add(f"case_{c:04d}", spectral_norm(lhs - rhs))
    return report


def _random_chain(rng, d: int, k: int, scale: float):
    levels = [int(rng.integers(1, 4)) for _ in range(k + 1)]
    zs = [random_point(rng, d, m, norm=rng.uniform(0.0, scale)) for m in levels]
    us = [
        random_point(rng, d, levels[j], norm=rng.uniform(0.0, scale), m=levels[j + 1])
        for j in range(k)
    ]
    return zs, us


def _chain_function(rng, c: int):
    """Mostly random polynomials; every fourth case a closed-form resolvent series."""
    d = int(rng.integers(1, 4))
    if c % 4 == 3:
        th = FreeSeries.geometric(1) if d == 1 else FreeSeries.full(d, 0.5)
        f = MatricialFunction.from_series(th)
        return f, 0.2 * f.domain_radius
    return MatricialFunction.from_series(random_polynomial(rng, d, 5)), 1.0


def block_structure(seed: int = 0, cases: int = 100) -> CheckReport:
    """Image of a bidiagonal point: zero below the diagonal, f(z_i) on it."""
    rng = _rng(seed, 2)
    report = CheckReport("block_structure", DEFAULT_TOL)
    for c in range(cases):
        f, scale = _chain_function(rng, c)
        k = int(rng.integers(1, 5))
        zs, us = _random_chain(rng, f.d, k, scale)
        res = delta_n(f, zs, us, check_grid=False)
        grid = res.full_grid
        lower = max((spectral_norm(grid[i][j]) for i in range(k + 1) for j in range(i)), default=0.0)
        diag = max(spectral_norm(grid[i][i] - f(zs[i])) for i in range(k + 1))
        report.add(f"case_{c:04d}_lower", lower)
        report.add(f"case_{c:04d}_diagonal", diag)
    return report


def grid_law(seed: int = 0, cases: int = 50) -> CheckReport:
    """Each above-diagonal block equals the difference of its sub-chain."""
    rng = _rng(seed, 3)
    report = CheckReport("grid_law", DEFAULT_TOL)
    for c in range(cases):
        f, scale = _chain_function(rng, c)
        k = int(rng.integers(2, 5))
        zs, us = _random_chain(rng, f.d, k, scale)
        report.add(f"case_{c:04d}", delta_n(f, zs, us).parts["grid"])
    return report


def taylor_remainder(seed: int = 0, cases: int = 100) -> CheckReport:
    """Remainder identity for polynomials; remainder size for the geometric series."""
    rng = _rng(seed, 4)
    report = CheckReport("taylor_remainder", DEFAULT_TOL)
    for c in range(cases):
        d, m = int(rng.integers(1, 4)), int(rng.integers(1, 5))
        th = random_polynomial(rng, d, 5)
        z = random_point(rng, d, m, norm=rng.uniform(0.0, 0.7))
        w = random_point(rng, d, m, norm=rng.uniform(0.0, 0.7))
        n = int(rng.integers(1, 7))
        report.add(f"poly_{c:04d}", remainder_check(th, z, w, n).cases[0][1])
    geo = MatricialFunction.from_series(FreeSeries.geometric(1))
    for c in range(max(1, cases // 10)):
        m = int(rng.integers(1, 5))
        total = rng.uniform(0.05, 0.5)
        split = rng.uniform(0.0, 1.0)
        z = random_point(rng, 1, m, norm=total * split)
        w = random_point(rng, 1, m, norm=total * (1 - split))
        M = 1.0 / (1.0 - (row_norm(z) + row_norm(w)))
        for n in range(1, 9):
            lhs, terms, rem = remainder_terms(geo, z, w, n)
            report.add(f"geo_{c:03d}_n{n}_identity", spectral_norm(lhs - sum(terms) - rem))
            # ratio to the bound q^-n M with q = 2
            report.add(f"geo_{c:03d}_n{n}_bound", spectral_norm(rem) / (2.0**-n * M), 1.0)
    return report


def coefficient_roundtrip(seed: int = 0, cases: int = 30, degree: int = 5) -> CheckReport:
    """series -> black box -> taylor_expand recovers every coefficient; distinct series differ."""
    rng = _rng(seed, 5)
    report = CheckReport("coefficient_roundtrip", 1e-9)
    for c in range(cases):
        d = int(rng.integers(1, 4))
        th = random_polynomial(rng, d, degree, max_terms=8)
        got = taylor_expand(MatricialFunction.from_series(th), degree)
        report.add(f"case_{c:04d}", got.max_coeff_diff(th))
        word = tuple(int(i) for i in rng.integers(1, d + 1, int(rng.integers(0, degree + 1))))
        other = th + FreeSeries.monomial(d, word, 0.5)
        got_other = taylor_expand(MatricialFunction.from_series(other), degree)
        distinct = abs(got_other.coeffs.get(word, 0) - got.coeffs.get(word, 0)) > 0.25
        report.add(f"unique_{c:04d}", 0.0 if distinct else 1.0)
    return report


def derivative_triangle(seed: int = 0, cases: int = 100) -> CheckReport:
    """delta1 vs algebraic derivative (1e-10) vs central difference (1e-6)."""
    rng = _rng(seed, 6)
    report = CheckReport("derivative_triangle", DEFAULT_TOL)
    for c in range(cases):
        d, m = int(rng.integers(1, 4)), int(rng.integers(1, 5))
        th = random_polynomial(rng, d, 5)
        z = random_point(rng, d, m, norm=rng.uniform(0.0, 1.0))
        u = random_point(rng, d, m, norm=1.0)
        report.merge(frechet_check(th, z, u), prefix=f"case_{c:04d}_")
    return report


def fourier_masks(seed: int = 0, cases: int = 50) -> CheckReport:
    """Mask and quadrature Fourier coefficients agree."""
    rng = _rng(seed, 7)
    report = CheckReport("fourier_mask_vs_quadrature", 1e-12)
    for c in range(cases):
        d = int(rng.integers(1, 3))
        N = int(rng.integers(1, 7))
        basis = fock.FockBasis(d, N)
        F = fock.FockOperator(basis, rng.standard_normal((basis.dim,) * 2) + 1j * rng.standard_normal((basis.dim,) * 2))
        res = max(
            spectral_norm(fock.fourier(F, j, "mask").mat - fock.fourier(F, j, "quadrature").mat)
            for j in range(-N, N + 1)
        )
        report.add(f"case_{c:04d}", res)
    return report


def _cesaro_cases(seed: int, cases: int):
    rng = _rng(seed, 8)
    for c in range(cases):
        d = int(rng.integers(1, 3))
        N = int(rng.integers(2, 7))
        th = random_polynomial(rng, d, N, min_degree=1)
        basis = fock.FockBasis(d, N)
        yield c, th, fock.toeplitz(basis, th)


def cesaro_stated_bound(seed: int = 0, cases: int = 20, k_max: int = 64) -> CheckReport:
    """``||Sigma_k(T) - T|| <= deg * max_j ||theta_j|| / k`` for k = 1..k_max.

    Case value is the ratio of the two sides.
    """
    report = CheckReport("cesaro_stated_bound", 1.0 + 1e-12)
    for c, th, T in _cesaro_cases(seed, cases):
        deg = th.degree
        top = max(degree_norm(th, j) for j in range(deg + 1))
        for k in range(1, k_max + 1):
            gap = spectral_norm((fock.cesaro(T, k) - T).mat)
            report.add(f"case_{c:04d}_k{k:02d}", gap / (deg * top / k))
    return report


def cesaro_triangle_bound(seed: int = 0, cases: int = 20, k_max: int = 64) -> CheckReport:
    """``||Sigma_k(T) - T|| <= sum_j min(1, j/k) ||theta_j||`` (triangle inequality)."""
    report = CheckReport("cesaro_triangle_bound", 1.0 + 1e-12)
    for c, th, T in _cesaro_cases(seed, cases):
        for k in range(1, k_max + 1):
            gap = spectral_norm((fock.cesaro(T, k) - T).mat)
            bound = sum(min(1.0, j / k) * degree_norm(th, j) for j in range(th.degree + 1))
            report.add(f"case_{c:04d}_k{k:02d}", gap / bound if bound > 0 else gap)
    return report


def divergence_growth(N: int = 8, d: int = 2) -> CheckReport:
    """Degree-k increments of the geometric series at ``r S`` have vacuum norm r^k."""
    basis = fock.FockBasis(d, N)
    theta = FreeSeries.geometric(d)
    vac = basis.vacuum()
    report = CheckReport("divergence_growth", 1e-12)
    for r in (1.1, 1.5):
        z = fock.shift_point(basis, r)
        for k in range(1, N + 1):
            inc = evaluate(theta.truncate(k) - theta.truncate(k - 1), z).value @ vac
            report.add(f"r{r}_k{k}", abs(np.linalg.norm(inc) - r**k) / r**k)
    return report


def divergence_tail(r: float = 0.9, k: int = 120, target: float = 1e-6, N: int = 8, d: int = 2) -> CheckReport:
    """Tail bound reported by evaluate at ``r S`` after k terms, against ``target``."""
    basis = fock.FockBasis(d, N)
    res = evaluate(FreeSeries.geometric(d), fock.shift_point(basis, r), k)
    report = CheckReport("divergence_tail", target)
    report.add(f"r{r}_k{k}", res.tail_bound)
    return report


def matriciality(seed: int = 0, trials: int = 100) -> CheckReport:
    """Series-backed functions pass all catalog and direct-sum checks."""
    rng = _rng(seed, 9)
    report = CheckReport("matriciality", 1e-9)
    for t in range(trials):
        d = int(rng.integers(1, 4))
        f = MatricialFunction.from_series(random_polynomial(rng, d, 5))
        z = random_point(rng, d, int(rng.integers(1, 5)), norm=rng.uniform(0.1, 1.0))
        w = random_point(rng, d, int(rng.integers(1, 5)), norm=rng.uniform(0.1, 1.0))
        cat = harness.build_catalog(z, w, seed=int(rng.integers(2**31)))
        report.merge(harness.check_function_matricial(f, cat), prefix=f"trial_{t:04d}_")
        report.merge(harness.check_direct_sum(f, z, w), prefix=f"trial_{t:04d}_")
    return report


def negative_controls(seed: int = 0) -> CheckReport:
    """Each shipped non-matricial control fails its designated check (case value 0 = failed as designed)."""
    rng = _rng(seed, 10)
    d = 2
    z = random_point(rng, d, 3, norm=0.6)
    w = random_point(rng, d, 2, norm=0.6)
    cat = harness.build_catalog(z, w, seed=seed)
    report = CheckReport("negative_controls", 0.0)

    conj = harness.check_function_matricial(harness.entrywise_conjugate(d), cat)
    sim_failed = any(c.endswith("similarity") for c, _ in conj.failures())
    report.add("entrywise_conjugate_similarity", 0.0 if sim_failed else 1.0)

    tr = harness.check_direct_sum(harness.trace_scalar(d), z, w)
    report.add("trace_scalar_direct_sum", 0.0 if not tr.passed else 1.0)

    u1, u2 = random_point(rng, d, 3, norm=0.5, m=2), random_point(rng, d, 3, norm=0.5, m=2)
    add = additivity_check(harness.entrywise_abs(d), z, w, u1, u2, seed=seed)
    report.add("entrywise_abs_additivity", 0.0 if any(c == "additive" for c, _ in add.failures()) else 1.0)

    tp = harness.check_map_matricial(harness.transpose_map(d), cat)
    tp_failed = any(c.endswith("similarity") for c, _ in tp.failures())
    report.add("transpose_map_similarity", 0.0 if tp_failed else 1.0)
    return report


def luminet_vanishing(seed: int = 0, cases: int = 50) -> CheckReport:
    """k=4 term vanishes on 2x2 tuples; the truncated series has finite radius estimate."""
    rng = _rng(seed, 11)
    term = luminet_term(4)
    report = CheckReport("luminet", DEFAULT_TOL)
    report.add("term4_has_nonzero_coefficients", 0.0 if any(abs(c) > 0 for c in term.coeffs.values()) else 1.0)
    for c in range(cases):
        z = random_point(rng, 2, 2, norm=rng.uniform(0.1, 1.0))
        report.add(f"case_{c:04d}", spectral_norm(evaluate(term, z).value))
    rad = radius(luminet(6))
    report.add("radius_finite", 0.0 if math.isfinite(rad.value) else 1.0)
    report.info["radius_luminet6"] = rad.value
    return report


def mobius_suite(seed: int = 0, samples: int = 100, ball_samples: int = 1000, tamper: str | None = None) -> CheckReport:
    """g(0) = gamma^*, closed form vs series, first/second order, ball preservation, matriciality."""
    rng = _rng(seed, 12)
    report = CheckReport("mobius", 1e-8)
    for c in range(10):
        gamma = mobius.CentralVector.random(rng, int(rng.integers(1, 4)))
        n = int(rng.integers(1, 5))
        g0 = mobius.g_gamma(gamma, Point.zeros(gamma.d, n))
        report.add(f"g0_{c:02d}", row_norm(g0 - gamma.adjoint_point(n)), 1e-14)
    for c in range(samples):
        gamma = mobius.CentralVector.random(rng, int(rng.integers(1, 4)), 0.95)
        n = int(rng.integers(1, 5))
        r = rng.uniform(0.0, min(0.95, 0.5 / max(gamma.norm, 1e-12)))
        z = random_point(rng, gamma.d, n, norm=r)
        k = int(rng.integers(0, 13))
        part = mobius.g_series_partial(gamma, z, k)
        gap = row_norm(part.value - mobius.g_gamma(gamma, z))
        report.add(f"series_{c:04d}", max(0.0, gap - part.tail_bound), 1e-13)
    for c in range(5):
        gamma = mobius.CentralVector.random(rng, int(rng.integers(1, 4)))
        D = mobius.dg_gamma_matrix(gamma)
        if tamper == "dg_gamma":
            D = -D
        report.merge(mobius.dg_gamma_check(gamma, 10, seed=seed + c, D=D), prefix=f"dg_{c}_")
        report.merge(mobius.second_order_check(gamma, 10, seed=seed + c), prefix=f"second_{c}_")
        report.merge(mobius.taylor_roundtrip_check(gamma, 3), prefix=f"roundtrip_{c}_")
        z = random_point(rng, gamma.d, int(rng.integers(1, 4)), norm=0.5)
        w = random_point(rng, gamma.d, int(rng.integers(1, 4)), norm=0.5)
        cat = harness.build_catalog(z, w, seed=seed + c, radius=1.0)
        report.merge(harness.check_map_matricial(mobius.g_gamma_map(gamma), cat, 1e-8), prefix=f"map_{c}_")
    margin = 1.0
    for c in range(ball_samples):
        gamma = mobius.CentralVector.random(rng, int(rng.integers(1, 4)), 0.95)
        z = random_point(rng, gamma.d, int(rng.integers(1, 5)), norm=rng.uniform(0.0, 0.95))
        val = row_norm(mobius.g_gamma(gamma, z))
        margin = min(margin, 1.0 - val)
        report.add(f"ball_{c:05d}", val, 1.0 - 1e-15)
    report.info["ball_margin"] = margin
    return report


def cb_bound(seed: int = 0, cases: int = 10, trials: int = 20) -> CheckReport:
    """Sampled ``||Delta^k f(0)|| <= M / r^k`` with ``M = sum_k ||theta_k|| r^k``."""
    rng = _rng(seed, 13)
    report = CheckReport("cb_bound", 1.0 + 1e-8)
    for c in range(cases):
        d = int(rng.integers(1, 4))
        th = random_polynomial(rng, d, 5)
        r = rng.uniform(0.3, 1.0)
        M = sum(degree_norm(th, k) * r**k for k in range(th.degree + 1))
        f = MatricialFunction.from_series(th)
        for k in range(1, 5):
            report.merge(cb_bound_sample(f, M, r, k, trials, seed=seed + c), prefix=f"case_{c:03d}_k{k}_")
    return report


def extras(seed: int = 0) -> CheckReport:
    """Amplification, additivity and the resolvent example."""
    rng = _rng(seed, 14)
    report = CheckReport("extras", DEFAULT_TOL)
    for c in range(3):
        d = int(rng.integers(1, 4))
        f = MatricialFunction.from_series(random_polynomial(rng, d, 4))
        report.merge(amplification_check(f, int(rng.integers(1, 4)), int(rng.integers(1, 4)), 10, seed + c), f"amp_{c}_")
        n, m = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        z, w = random_point(rng, d, n, norm=0.5), random_point(rng, d, m, norm=0.5)
        u1, u2 = random_point(rng, d, n, norm=0.3, m=m), random_point(rng, d, n, norm=0.3, m=m)
        report.merge(additivity_check(f, z, w, u1, u2, seed=seed + c), f"add_{c}_")
    report.merge(harness.resolvent_counterexample(3, seed=seed), "resolvent_")
    return report


# ----------------------------------------------------------------- registry

SUITES: dict[str, list[tuple[str, Callable[..., CheckReport]]]] = {
    "series": [
        ("homomorphism", homomorphism),
        ("luminet", luminet_vanishing),
    ],
    "taylor": [
        ("block_structure", block_structure),
        ("grid_law", grid_law),
        ("taylor_remainder", taylor_remainder),
        ("coefficient_roundtrip", coefficient_roundtrip),
        ("derivative_triangle", derivative_triangle),
        ("cb_bound", cb_bound),
        ("extras", extras),
    ],
    "fock": [
        ("fourier_masks", fourier_masks),
        ("cesaro_stated_bound", cesaro_stated_bound),
        ("cesaro_triangle_bound", cesaro_triangle_bound),
        ("divergence_growth", lambda seed=0: divergence_growth()),
        ("divergence_tail", lambda seed=0: divergence_tail()),
    ],
    "matricial": [
        ("matriciality", matriciality),
        ("negative_controls", negative_controls),
    ],
    "mobius": [
        ("mobius", mobius_suite),
    ],
}


def run_suite(name: str, seed: int = 0, tamper: str | None = None) -> dict:
    """Run one suite group (or ``all``) and return a JSON-ready summary."""
    names = list(SUITES) if name == "all" else [name]
    out = {"seed": seed, "suites": {}}
    for group in names:
        reports = []
        for _, fn in SUITES[group]:
            if fn is mobius_suite:
                reports.append(fn(seed=seed, tamper=tamper))
            else:
                reports.append(fn(seed=seed))
        out["suites"][group] = {
            "pass": all(r.passed for r in reports),
            "reports": [r.to_json() for r in sorted(reports, key=lambda r: r.name)],
        }
    out["pass"] = all(s["pass"] for s in out["suites"].values())
    return out
