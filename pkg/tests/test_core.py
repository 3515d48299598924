import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncfunc.core import (
    InputError,
    Point,
    bidiagonal_block,
    certify_intertwiner,
    compress,
    direct_sum,
    matrix_from_json,
    matrix_to_json,
    point_from_json,
    point_to_json,
    random_conditioned,
    random_point,
    random_unitary,
    row_norm,
    spectral_norm,
    upper_block,
)


def test_spectral_norm_matches_numpy(rng):
    A = rng.standard_normal((7, 5)) + 1j * rng.standard_normal((7, 5))
    assert spectral_norm(A) == pytest.approx(np.linalg.norm(A, 2), rel=1e-14)


def test_spectral_norm_large_uses_iteration_and_agrees(rng):
    A = rng.standard_normal((600, 600))
    assert spectral_norm(A) == pytest.approx(np.linalg.norm(A, 2), rel=1e-9)


def test_row_norm_is_norm_of_row_block(rng):
    z = random_point(rng, 3, 4)
    assert row_norm(z) == pytest.approx(np.linalg.norm(np.hstack(list(z.mats)), 2), rel=1e-13)


def test_row_norm_of_unitary_row():
    # [U/sqrt2, V/sqrt2] with unitaries is a co-isometry: norm exactly 1
    rng = np.random.default_rng(0)
    z = Point(np.array([random_unitary(rng, 3), random_unitary(rng, 3)]) / np.sqrt(2))
    assert row_norm(z) == pytest.approx(1.0, abs=1e-14)


def test_random_point_scaled_to_norm(rng):
    assert row_norm(random_point(rng, 2, 3, norm=0.37)) == pytest.approx(0.37, rel=1e-12)


def test_point_is_read_only(rng):
    z = random_point(rng, 2, 2)
    with pytest.raises(ValueError):
        z.mats[0, 0, 0] = 1.0


def test_point_rejects_bad_shapes():
    with pytest.raises(InputError):
        Point(np.zeros((2, 2)))
    with pytest.raises(InputError):
        Point(np.array([[[np.nan]]]))


def test_scalars_and_basis():
    z = Point.scalars([2, 3j], 2)
    np.testing.assert_array_equal(z.mats[1], 3j * np.eye(2))
    e = Point.basis(3, 2)
    assert e.mats.ravel().tolist() == [0, 1, 0]


def test_direct_sum_is_block_diagonal(rng):
    z, w = random_point(rng, 2, 2), random_point(rng, 2, 3)
    s = direct_sum(z, w)
    assert s.n == 5
    np.testing.assert_array_equal(s.mats[:, :2, :2], z.mats)
    np.testing.assert_array_equal(s.mats[:, 2:, 2:], w.mats)
    assert not s.mats[:, :2, 2:].any() and not s.mats[:, 2:, :2].any()


def test_bidiagonal_layout(rng):
    zs = [random_point(rng, 1, m) for m in (1, 2, 3)]
    us = [random_point(rng, 1, 1, m=2), random_point(rng, 1, 2, m=3)]
    B = bidiagonal_block(zs, us).mats[0]
    np.testing.assert_array_equal(B[0:1, 1:3], us[0].mats[0])
    np.testing.assert_array_equal(B[1:3, 3:6], us[1].mats[0])
    np.testing.assert_array_equal(B[0:1, 3:6], 0)
    np.testing.assert_array_equal(B[3:6, 0:3], 0)


def test_upper_block_shape_mismatch(rng):
    with pytest.raises(InputError):
        upper_block(random_point(rng, 1, 2), random_point(rng, 1, 3), random_point(rng, 1, 2))


def test_certify_intertwiner_valid_and_invalid(rng):
    z = random_point(rng, 2, 3)
    S = random_conditioned(rng, 3, 10.0)
    w = Point(np.array([S @ Z @ np.linalg.inv(S) for Z in z.mats]))
    assert certify_intertwiner(S, z, w).valid
    assert not certify_intertwiner(np.eye(3), z, w).valid


def test_random_conditioned_bound(rng):
    S = random_conditioned(rng, 5, 10.0)
    assert np.linalg.cond(S) <= 10.0 + 1e-9


def test_compress_with_isometry(rng):
    z = random_point(rng, 2, 4)
    V = np.eye(4)[:2]
    np.testing.assert_allclose(compress(V, z).mats, z.mats[:, :2, :2])


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(1, 4), st.integers(0, 2**31))
def test_point_json_roundtrip_exact(d, n, seed):
    z = random_point(np.random.default_rng(seed), d, n)
    back = point_from_json(json.loads(json.dumps(point_to_json(z))))
    np.testing.assert_array_equal(back.mats, z.mats)


def test_matrix_json_roundtrip_and_errors(rng):
    A = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    np.testing.assert_array_equal(matrix_from_json(matrix_to_json(A)), A)
    with pytest.raises(InputError):
        matrix_from_json({"rows": 2})
    with pytest.raises(InputError):
        point_from_json({"d": 2, "n": 1, "mats": [[[[0, 0]]]]})
