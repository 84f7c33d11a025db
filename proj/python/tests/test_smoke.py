import numpy as np
import pytest

import vfil


def test_family_data_is_unit():
    s, v = vfil.family_data("planar_odd", n=256)
    assert v.shape == (256, 3)
    assert s[0] == 0.0
    assert np.max(np.abs(np.linalg.norm(v, axis=1) - 1.0)) < 1e-15


def test_check_separates_compatible_from_incompatible():
    s, good = vfil.family_data("planar_odd", length=10.0, n=1001)
    _, bad = vfil.family_data("planar_bad", length=10.0, n=1001)
    assert vfil.check(good, 10.0, order=2)["passed"]
    report = vfil.check(bad, 10.0, order=1)
    assert not report["passed"]


def test_extension_is_reflection_fixed():
    s, v = vfil.family_data("planar_odd", length=20.0, n=128)
    sw, w = vfil.extend(v, 20.0)
    assert w.shape == (255, 3)
    assert np.array_equal(sw[127:], s)
    mirrored = -w[::-1] * np.array([1.0, 1.0, -1.0])
    assert np.array_equal(mirrored, w)


def test_second_derivative_jump_tracks_compatibility():
    coarse = vfil.jump_residual(vfil.family_data("planar_odd", length=20.0, n=256)[1], 20.0, 2)
    fine = vfil.jump_residual(vfil.family_data("planar_odd", length=20.0, n=512)[1], 20.0, 2)
    assert fine < coarse / 16.0
    bad = vfil.jump_residual(vfil.family_data("planar_bad", length=20.0, n=512)[1], 20.0, 2)
    assert bad > 1.0


def test_simulate_straight_is_stationary():
    out = vfil.simulate("data.family = straight\ngrid.n = 64\ntime.t_final = 0.2\n", reconstruct=True)
    assert out["summary"]["norm_drift"]["value"] == 0.0
    assert out["snapshots"][-1].shape == (64, 3)
    assert len(out["curves"]) == len(out["times"])


def test_simulate_is_deterministic():
    cfg = {"data.family": "planar_odd", "grid.n": 128, "time.t_final": 0.05}
    a, b = vfil.simulate(cfg), vfil.simulate(cfg)
    assert a["summary"] == b["summary"]
    assert np.array_equal(a["snapshots"][-1], b["snapshots"][-1])


def test_oracles_and_convergence():
    assert vfil.oracle("stationary_line")["error"] == 0.0
    assert vfil.oracle("helix_dispersion", n=64, t_final=0.1)["error"] < vfil.ORACLE_TOLERANCE
    study = vfil.convergence("helix", [32, 64, 128], t_final=0.1)
    lo, hi = vfil.ORDER_BAND
    assert lo <= study["order"] <= hi


def test_errors_carry_codes():
    with pytest.raises(vfil.VfilError) as info:
        vfil.family_data("spiral")
    assert info.value.code == "UnknownFamily"
    with pytest.raises(vfil.VfilError):
        vfil.simulate({"data.family": "straight", "grid.nn": "64"})
