"""Integrator tests: exactness, convergence order, conservation, trace IO."""

import numpy as np
import pytest

import mixlab as mx
from mixlab import EvolutionError
from mixlab.evolution import default_dt


def test_pure_heat_decay_is_exact():
    # single mode m = 1 decays at exactly nu * (k^2 + m^2) = 2 nu
    heat = mx.build_model("heat", k=1, M=32)
    f0 = mx.initial_datum(heat, "single-mode-m1")
    tr = mx.evolve(heat, f0, 0.05, 10.0, dt=1e-3)
    pred = tr.h[0] * np.exp(-0.05 * 2.0 * tr.times)
    assert np.max(np.abs(tr.h - pred)) / tr.h[0] < 1e-11
    assert mx.tau_threshold(tr) == pytest.approx(1.0 / (0.05 * 2.0), rel=1e-9)


def test_inviscid_step_matches_closed_form():
    for name, kw in (("shear", dict(profile="sin", k=1, M=64)),
                     ("spiral", dict(alpha=1.0, k=1, N=64))):
        prob = mx.build_model(name, **kw)
        f0 = mx.initial_datum(prob, "single-mode-m1")
        tr = mx.evolve(prob, f0, 0.0, 3.0, dt=0.01)
        ref = mx.exact_inviscid(prob, f0, tr.times[-1])
        assert prob.sobolev(tr.final_state - ref, 0.0) < 1e-12


def test_strang_splitting_is_second_order():
    cases = [("shear", dict(profile="sin", gamma=2.0, k=1, M=32)),
             ("kolmogorov", dict(L=2.0, k=1, M=16)),
             ("spiral", dict(alpha=1.0, k=1, N=32)),
             ("kinetic", dict(k=1, N=12))]
    for name, kw in cases:
        prob = mx.build_model(name, **kw)
        f0 = mx.initial_datum(prob, "random-h1", seed=9)
        ref = mx.evolve(prob, f0, 1e-2, 1.0, dt=1.0 / 2048).final_state
        errs = [
            prob.sobolev(mx.evolve(prob, f0, 1e-2, 1.0, dt=dt).final_state
                         - ref, 0.0)
            for dt in (1.0 / 16, 1.0 / 32)
        ]
        ratio = errs[0] / errs[1]
        assert 3.5 < ratio < 4.5, f"{name}: expected O(dt^2), got {ratio}"


def test_energy_residual_scales():
    heat = mx.build_model("heat", k=1, M=32)
    f0 = mx.initial_datum(heat, "single-mode-m1")
    tr = mx.evolve(heat, f0, 0.05, 10.0, dt=1e-3)
    assert mx.energy_residual(tr) < 1e-8
    # inviscid flow conserves h: identity is trivially exact
    shear = mx.build_model("shear", profile="sin", k=1, M=16)
    f0 = mx.initial_datum(shear, "random-h1", seed=1)
    tr = mx.evolve(shear, f0, 0.0, 5.0, dt=1e-2)
    assert mx.energy_residual(tr) < 1e-12
    # second order in the sampling spacing
    kol = mx.build_model("kolmogorov", L=2.0, k=1, M=16)
    f0 = mx.initial_datum(kol, "single-mode-m1")
    r_coarse = mx.energy_residual(mx.evolve(kol, f0, 1e-2, 5.0, dt=4e-3))
    r_fine = mx.energy_residual(mx.evolve(kol, f0, 1e-2, 5.0, dt=2e-3))
    assert 3.0 < r_coarse / r_fine < 5.0


def test_inviscid_norm_drift():
    cases = [("shear", dict(profile="sin", k=1, M=32), 1e-12),
             ("spiral", dict(alpha=1.0, k=1, N=32), 1e-12),
             ("kolmogorov", dict(L=2.0, k=1, M=16), 1e-10),
             ("kinetic", dict(k=1, N=12), 1e-10)]
    for name, kw, tol in cases:
        prob = mx.build_model(name, **kw)
        f0 = mx.initial_datum(prob, "random-h1", seed=21)
        tr = mx.evolve(prob, f0, 0.0, 1.0, dt=1e-3)  # 1000 steps
        drift = np.max(np.abs(tr.h - tr.h[0])) / tr.h[0]
        assert drift < tol, f"{name}: drift {drift:.2e}"


def test_zero_horizon_returns_single_sample():
    prob = mx.build_model("spiral", alpha=1.0, k=1, N=16)
    f0 = mx.initial_datum(prob, "uniform")
    tr = mx.evolve(prob, f0, 1e-3, 0.0)
    assert len(tr) == 1 and tr.times[0] == 0.0
    assert tr.h[0] == pytest.approx(prob.sobolev(f0, 0.0), rel=1e-14)
    assert np.array_equal(tr.final_state, np.asarray(f0))


def test_sample_cap_decimates_but_keeps_endpoints():
    heat = mx.build_model("heat", k=1, M=8)
    f0 = mx.initial_datum(heat, "single-mode-m1")
    tr = mx.evolve(heat, f0, 1e-3, 1.0, dt=1e-3, max_samples=50)
    assert len(tr) <= 51
    assert tr.times[0] == 0.0
    assert tr.times[-1] == pytest.approx(1.0, rel=1e-12)
    assert np.all(np.diff(tr.times) > 0)


def test_stop_ratio_ends_run_early():
    heat = mx.build_model("heat", k=1, M=8)
    f0 = mx.initial_datum(heat, "single-mode-m1")
    tr = mx.evolve(heat, f0, 0.1, 1e4, dt=0.05, stop_ratio=0.5)
    assert tr.meta["stop_reason"] == "stop_ratio"
    assert tr.h[-1] <= 0.5 * tr.h[0]
    assert tr.times[-1] < 1e4
    # crossing time of a rate-0.2 exponential through 1/2
    assert tr.times[-1] == pytest.approx(np.log(2.0) / 0.2, abs=2 * 0.05 * 5)


def test_non_finite_state_raises():
    heat = mx.build_model("heat", k=1, M=8)
    f0 = np.full(heat.size, np.nan, dtype=complex)
    with pytest.raises(EvolutionError):
        mx.evolve(heat, f0, 1e-3, 1.0, dt=0.1)


def test_truncation_occupancy_warning():
    prob = mx.build_model("shear", profile="sin", gamma=2.0, k=1, M=8)
    f0 = np.zeros(prob.size, dtype=complex)
    f0[8] = 1.0  # everything on the highest mode
    tr = mx.evolve(prob, f0, 0.0, 0.1, dt=0.01)
    assert tr.meta["occupancy_max"] > 0.5
    assert any("occupancy" in w for w in tr.meta["warnings"])
    # a smooth datum stays quiet
    f0 = mx.initial_datum(prob, "single-mode-m1")
    tr = mx.evolve(prob, f0, 0.0, 0.1, dt=0.01)
    assert tr.meta["warnings"] == []


def test_extras_h2_sampling():
    prob = mx.build_model("spiral", alpha=1.0, k=1, N=32)
    f0 = mx.initial_datum(prob, "gaussian-bump")
    tr = mx.evolve(prob, f0, 1e-3, 0.5, dt=0.01, extras=("h2",))
    h2 = tr.extras["h2"]
    assert h2.shape == tr.times.shape
    assert h2[0] == pytest.approx(prob.sobolev(f0, 2.0), rel=1e-12)


def test_viscous_flow_approaches_inviscid_limit():
    prob = mx.build_model("spiral", alpha=1.0, k=1, N=64)
    f0 = mx.initial_datum(prob, "single-mode-m1")
    ref = mx.exact_inviscid(prob, f0, 10.0)
    errs = []
    for nu in (1e-2, 1e-3, 1e-4):
        tr = mx.evolve(prob, f0, nu, 10.0, dt=0.01)
        errs.append(prob.sobolev(tr.final_state - ref, 0.0))
    assert errs[0] > errs[1] > errs[2]
    # deviation shrinks linearly with nu at fixed time
    assert 5.0 < errs[1] / errs[2] < 20.0
    assert errs[2] < 0.05


def test_default_dt_policy():
    heat = mx.build_model("heat", k=1, M=8)
    assert default_dt(heat, 50.0) == pytest.approx(50.0 / 1e4)
    shear = mx.build_model("shear", profile="sin", k=1, M=8)
    assert default_dt(shear, 50.0) == pytest.approx(0.01)  # 0.1/1 capped
    fast = mx.build_model("shear", profile="sin", k=20, M=64)
    assert default_dt(fast, 50.0) == pytest.approx(0.1 / 20.0)


def test_step_viscous_single_step():
    prob = mx.build_model("shear", profile="sin", gamma=2.0, k=1, M=16)
    f0 = mx.initial_datum(prob, "single-mode-m1")
    out = mx.step_viscous(prob, f0, 1e-2, 0.01)
    tr = mx.evolve(prob, f0, 1e-2, 0.01, dt=0.01)
    assert prob.sobolev(out - tr.final_state, 0.0) < 1e-14
    with pytest.raises(ValueError):
        mx.step_viscous(prob, f0, 1e-2, 0.0)


def test_trace_io_roundtrip(tmp_path):
    prob = mx.build_model("shear", profile="sin", gamma=2.0, k=1, M=16)
    f0 = mx.initial_datum(prob, "random-h1", seed=4)
    tr = mx.evolve(prob, f0, 1e-3, 2.0, dt=0.01, sample_every=5)
    path = tmp_path / "trace.csv"
    mx.write_trace(tr, path)
    back = mx.read_trace(path)
    assert np.array_equal(back.times, tr.times)
    assert np.array_equal(back.h, tr.h)
    assert np.array_equal(back.h1, tr.h1)
    assert np.array_equal(back.hm1, tr.hm1)
    assert back.model == "shear"
    assert back.nu == tr.nu
    assert back.dt == tr.dt
    assert back.meta["n_steps"] == tr.meta["n_steps"]
    # csv alone is enough when the sidecar is gone
    (tmp_path / "trace.json").unlink()
    bare = mx.read_trace(path)
    assert np.array_equal(bare.h, tr.h)
