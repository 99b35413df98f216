import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from plumedt.errors import PlumeInputError
from plumedt.harness.utility import (
    SOBEL5_X,
    SOBEL5_Y,
    gradient_field,
    intensity_field,
    sobel5,
    utility_fields,
)

from conftest import make_scene


def test_kernel_is_smoothed_sobel():
    # full 2-D convolution of the 3x3 Sobel x-kernel with the 3x3 binomial
    sobel3 = np.outer([1, 2, 1], [-1, 0, 1]).astype(float)
    binom = np.outer([1, 2, 1], [1, 2, 1]).astype(float)
    full = np.zeros((5, 5))
    for i in range(3):
        for j in range(3):
            full[i : i + 3, j : j + 3] += sobel3[i, j] * binom
    assert np.array_equal(SOBEL5_X, full)
    assert np.array_equal(SOBEL5_Y, full.T)
    assert SOBEL5_X.sum() == 0


def test_constant_field_has_zero_gradient():
    assert not gradient_field(np.full((12, 9), 0.37)).any()
    assert not gradient_field(np.zeros((6, 6))).any()


def test_ramp_response_hand_value():
    # sum_k w_k * k over the derivative taps is 8, the smoother sums to 16,
    # so a ramp of slope 1/20 gives 128 / 20 = 6.4 in the interior
    field = np.tile(np.arange(20) / 20.0, (15, 1))
    gx, gy = sobel5(field)
    assert np.allclose(gx[:, 2:-2], 6.4, atol=1e-12)
    assert np.allclose(gy, 0.0, atol=1e-12)
    g = gradient_field(field)
    assert np.allclose(g[:, 2:-2], 1.0, atol=1e-12)
    assert g.max() == 1.0


def test_reflect_101_border():
    # mirror about the edge pixel: a ramp's derivative at column 0 vanishes
    field = np.tile(np.arange(10, dtype=float), (7, 1))
    gx, _ = sobel5(field)
    assert np.allclose(gx[:, 0], 0.0)
    # column 1 sees taps at x = 1 (mirror of -1), 0, 1, 2, 3
    assert np.allclose(gx[:, 1], 16 * (-1 * 1 - 2 * 0 + 2 * 2 + 1 * 3))


def test_edge_gradient_peaks_near_edge():
    label = np.zeros((30, 30), bool)
    label[12:, :] = True
    field = label.astype(float)
    g = gradient_field(field)
    rows = np.argmax(g, axis=0)
    assert np.all(np.abs(rows - 11.5) <= 2)


def test_intensity_field_rules():
    bands = np.zeros((4, 4, 5), np.uint16)
    bands[2] = 30000
    label = np.zeros((4, 5), bool)
    label[1:3, 1:4] = True
    f = intensity_field(make_scene(bands, label))
    assert np.array_equal(f, label.astype(float))
    assert not intensity_field(make_scene(bands, np.zeros((4, 5), bool))).any()
    with pytest.raises(PlumeInputError):
        intensity_field(make_scene(bands))


@given(st.integers(0, 1000))
def test_fields_in_unit_range(seed):
    rng = np.random.default_rng(seed)
    bands = rng.integers(0, 65536, (4, 16, 16)).astype(np.uint16)
    label = rng.random((16, 16)) < 0.4
    u = utility_fields(make_scene(bands, label))
    for f in (u.intensity, u.gradient):
        assert f.shape == (16, 16) and f.min() >= 0.0 and f.max() <= 1.0
    assert not u.intensity[~label].any()
    if label.any() and bands[2][label].any():
        assert u.intensity.max() == 1.0
