import math

import numpy as np
import pytest

from spgen.errors import InvalidParameterError
from spgen.grid import (
    FbfCov,
    FgnCov1D,
    FgnCov2D,
    Field,
    Grid2D,
    MaskedField,
    SteinPsi,
    TorusExp,
    Wavy,
    WienerBridge,
    WienerPillow,
    eval_cov,
    read_grid_binary,
    read_masked_grid_binary,
    stein_table_constants,
    torus_distance,
    write_grid_binary,
    write_masked_grid_binary,
)


def test_grid_geometry():
    g = Grid2D(nx=4, ny=3, dx=0.5, dy=2.0, origin=(1.0, -1.0))
    assert g.shape == (3, 4)
    assert g.xs().tolist() == [1.0, 1.5, 2.0, 2.5]
    assert g.ys().tolist() == [-1.0, 1.0, 3.0]
    assert g.point(2, 1) == (2.0, 1.0)


@pytest.mark.parametrize("kwargs", [
    {"nx": 0, "ny": 3}, {"nx": 3, "ny": -1},
    {"nx": 2, "ny": 2, "dx": 0.0}, {"nx": 2, "ny": 2, "dy": -1.0},
])
def test_grid_validation(kwargs):
    with pytest.raises(InvalidParameterError):
        Grid2D(**kwargs)


def test_field_validation():
    g = Grid2D(nx=2, ny=3)
    Field(g, np.zeros((3, 2)))
    with pytest.raises(InvalidParameterError):
        Field(g, np.zeros((2, 3)))
    with pytest.raises(InvalidParameterError):
        Field(g, np.full((3, 2), np.nan))


def test_masked_field_validation():
    g = Grid2D(nx=2, ny=2)
    f = Field(g, np.zeros((2, 2)))
    MaskedField(f, np.ones((2, 2)))
    with pytest.raises(InvalidParameterError):
        MaskedField(f, np.ones((2, 3)))


def test_torus_distance_values():
    assert torus_distance((0.3, 0.7), (0.3, 0.7)) == 0.0
    assert torus_distance((0.9, 0.0), (0.0, 0.0)) == pytest.approx(0.1)
    assert torus_distance((0.5, 0.5), (0.0, 0.0)) == pytest.approx(math.sqrt(0.5))


def test_torus_distance_properties():
    rng = np.random.default_rng(0)
    for _ in range(200):
        s, t = rng.random(2), rng.random(2)
        d = torus_distance(s, t)
        assert d == pytest.approx(torus_distance(t, s))
        assert 0.0 <= d <= math.sqrt(0.5) + 1e-15


def test_torus_distance_domain():
    with pytest.raises(InvalidParameterError):
        torus_distance((1.0, 0.0), (0.0, 0.0))
    with pytest.raises(InvalidParameterError):
        torus_distance((0.5, -0.1), (0.0, 0.0))


def test_wavy_at_zero_lag():
    assert Wavy().cov_lag((0.0, 0.0)) == 1.0


def test_torus_exp_at_zero_lag():
    assert TorusExp(c=8.0, alpha=1.0).cov_lag((0.0, 0.0)) == 1.0


def test_fgn_cov_1d_values():
    assert FgnCov1D(alpha=1.0).cov_lag(1) == pytest.approx(0.0, abs=1e-15)
    assert FgnCov1D(alpha=1.8).cov_lag(1) == pytest.approx((2**1.8 - 2) / 2)
    assert FgnCov1D(alpha=1.8).cov_lag(0) == 1.0
    # even in the lag
    assert FgnCov1D(alpha=0.6).cov_lag(-3) == FgnCov1D(alpha=0.6).cov_lag(3)


def test_fgn_cov_2d_is_product():
    m = FgnCov2D(alpha=1.4)
    one = FgnCov1D(alpha=1.4)
    assert m.cov_lag((2, 3)) == pytest.approx(one.cov_lag(2) * one.cov_lag(3))


def test_fbf_cov_pair():
    m = FbfCov(alpha=1.6)
    s = np.array([0.3, 0.4])
    assert m.cov_pair(s, s) == pytest.approx(2 * 0.5**1.6)
    assert m.cov_pair((0.0, 0.0), (0.0, 0.0)) == 0.0


def test_stein_constants_alpha_16():
    R, beta, c2, c0 = stein_table_constants(1.6)
    assert R == 2.0
    assert beta == pytest.approx(1.6 * 0.4 / (3 * 2 * 3))
    # continuity of the two pieces at h = 1 is an algebraic identity
    assert c0 + c2 - 1.0 == pytest.approx(beta * (R - 1.0) ** 3, abs=1e-12)


@pytest.mark.parametrize("alpha", [0.2, 0.7, 1.0, 1.5, 1.6, 1.9, 1.99])
def test_stein_psi_continuity_and_support(alpha):
    psi = SteinPsi.from_alpha(alpha)
    R = psi.R
    eps = 1e-9
    # continuous across the piece boundary at 1 and at the support edge R
    assert abs(psi.psi(1 - eps) - psi.psi(1 + eps)) < 1e-7
    assert abs(float(psi.psi(R))) < 1e-12
    assert float(psi.psi(R + 0.5)) == 0.0
    assert float(psi.psi(0.0)) == pytest.approx(psi.c0)


def test_stein_psi_rejects_inconsistent_constants():
    with pytest.raises(InvalidParameterError):
        SteinPsi(alpha=1.6, R=2.0, beta=0.9, c2=0.1, c0=0.1)


def test_wiener_pillow_and_bridge():
    d = 3
    assert WienerPillow(d).cov_pair((0.5,) * d, (0.5,) * d) == pytest.approx(0.25**d)
    # zero on the boundary of the cube
    assert WienerPillow(2).cov_pair((0.0, 0.5), (0.3, 0.7)) == 0.0
    assert WienerPillow(2).cov_pair((1.0, 0.5), (0.3, 0.7)) == 0.0
    s, t = 0.3, 0.8
    assert WienerBridge(1).cov_pair((s,), (t,)) == pytest.approx(min(s, t) - s * t)
    with pytest.raises(InvalidParameterError):
        WienerPillow(2).cov_pair((1.2, 0.5), (0.3, 0.7))


def test_eval_cov_dispatch():
    assert eval_cov(Wavy(), (0.0, 0.0)) == 1.0
    assert eval_cov(FgnCov1D(alpha=1.8), 1) == pytest.approx((2**1.8 - 2) / 2)
    pillow = WienerPillow(2)
    pair = ((0.5, 0.5), (0.5, 0.5))
    assert eval_cov(pillow, pair) == pytest.approx(0.25**2)
    with pytest.raises(InvalidParameterError):
        eval_cov(pillow, (0.5, 0.5))  # nonstationary model needs a pair


def test_grid_binary_round_trip(tmp_path):
    g = Grid2D(nx=5, ny=3, dx=0.25, dy=1.5, origin=(-2.0, 7.0))
    values = np.arange(15, dtype=float).reshape(3, 5) * math.pi
    path = tmp_path / "field.grid"
    write_grid_binary(Field(g, values), path)
    back = read_grid_binary(path)
    assert back.grid == g
    np.testing.assert_array_equal(back.values, values)  # f64 exact


def test_grid_binary_header(tmp_path):
    path = tmp_path / "field.grid"
    write_grid_binary(Field(Grid2D(nx=2, ny=2), np.zeros((2, 2))), path)
    raw = path.read_bytes()
    assert raw[:4] == b"SPGF"
    assert len(raw) == 4 + 2 + 4 + 4 + 8 * 4 + 8 * 4


def test_grid_binary_rejects_bad_input(tmp_path):
    path = tmp_path / "field.grid"
    write_grid_binary(Field(Grid2D(nx=2, ny=2), np.zeros((2, 2))), path)
    raw = path.read_bytes()
    bad_magic = tmp_path / "a.grid"
    bad_magic.write_bytes(b"XXXX" + raw[4:])
    with pytest.raises(InvalidParameterError):
        read_grid_binary(bad_magic)
    bad_version = tmp_path / "b.grid"
    bad_version.write_bytes(raw[:4] + b"\x09\x00" + raw[6:])
    with pytest.raises(InvalidParameterError):
        read_grid_binary(bad_version)
    truncated = tmp_path / "c.grid"
    truncated.write_bytes(raw[:-5])
    with pytest.raises(InvalidParameterError):
        read_grid_binary(truncated)


def test_masked_grid_binary_round_trip(tmp_path):
    g = Grid2D(nx=3, ny=2)
    f = Field(g, np.arange(6, dtype=float).reshape(2, 3))
    mask = np.array([[1, 0, 1], [0, 1, 0]], dtype=np.uint8)
    path = tmp_path / "masked.grid"
    write_masked_grid_binary(MaskedField(f, mask), path)
    back = read_masked_grid_binary(path)
    np.testing.assert_array_equal(back.field.values, f.values)
    np.testing.assert_array_equal(back.mask, mask)
