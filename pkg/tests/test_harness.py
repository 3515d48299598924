import math
import warnings

import numpy as np
import pytest

from ncfunc import harness
from ncfunc.core import InputError, random_point
from ncfunc.series import FreeSeries
from ncfunc.suites import negative_controls, random_polynomial
from ncfunc.taylor import MatricialFunction


def test_catalog_covers_every_tag(rng):
    cat = harness.build_catalog(random_point(rng, 2, 3), random_point(rng, 2, 2), seed=1)
    assert cat.tags() == set(harness.TAGS)
    assert all(e.cert.valid for e in cat)


def test_catalog_respects_radius(rng):
    z, w = random_point(rng, 1, 2, norm=0.8), random_point(rng, 1, 2, norm=0.8)
    cat = harness.build_catalog(z, w, seed=0, radius=1.0)
    f = harness.resolvent()
    assert all(f.contains(e.source) and f.contains(e.target) for e in cat)


def test_catalog_rejects_mismatch(rng):
    with pytest.raises(InputError):
        harness.build_catalog(random_point(rng, 1, 2), random_point(rng, 2, 2))


def test_invalid_entries_are_dropped(rng):
    cat = harness.IntertwinerCatalog()
    z = random_point(rng, 1, 2)
    cat.add("identity", 2 * np.ones((2, 2)), z, random_point(rng, 1, 2))
    assert len(cat) == 0 and cat.notes


@pytest.mark.parametrize("seed", range(5))
def test_series_functions_are_matricial(seed):
    rng = np.random.default_rng(seed)
    f = MatricialFunction.from_series(random_polynomial(rng, 3, 4))
    z, w = random_point(rng, 3, 2, norm=0.7), random_point(rng, 3, 3, norm=0.7)
    assert harness.check_function_matricial(f, harness.build_catalog(z, w, seed)).passed
    assert harness.check_direct_sum(f, z, w).passed


def test_closed_form_series_is_matricial_on_its_ball(rng):
    f = MatricialFunction.from_series(FreeSeries.full(2, 0.5))
    z, w = random_point(rng, 2, 2, norm=0.9), random_point(rng, 2, 2, norm=0.9)
    rep = harness.check_function_matricial(f, harness.build_catalog(z, w, 4, radius=f.domain_radius))
    assert rep.passed and len(rep.cases) >= 10


def test_negative_controls_fail_as_designed():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert negative_controls(seed=2).passed


def test_identity_map_is_matricial(rng):
    cat = harness.build_catalog(random_point(rng, 2, 2), random_point(rng, 2, 3), seed=3)
    assert harness.check_map_matricial(harness.identity_map(2), cat).passed
    assert not harness.check_map_matricial(harness.transpose_map(2), cat).passed


def test_resolvent_is_matricial_but_unbounded():
    rep = harness.resolvent_counterexample(3, samples=6, seed=1)
    assert rep.passed
    norms = rep.info["resolvent_norms"]
    assert norms["6"] >= 0.5e6


def test_out_of_domain_entries_are_skipped(rng):
    f = harness.resolvent()
    z, w = random_point(rng, 1, 2, norm=0.5), random_point(rng, 1, 2, norm=0.5)
    cat = harness.build_catalog(z, w, 0)  # no radius: some derived points leave the ball
    rep = harness.check_function_matricial(f, cat)
    assert rep.passed
