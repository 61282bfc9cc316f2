"""End-to-end smoke tests of the python bindings."""

import math

import pytest

import curepinn as cp


def test_presets_and_hash_stability():
    names = cp.preset_names()
    assert "case1" in names and "case2" in names
    c1 = cp.Config.preset("case1")
    c2 = cp.Config.preset("case1")
    assert c1.hash == c2.hash
    assert c1.hash != cp.Config.preset("case2").hash
    # dump -> parse round trip preserves identity
    assert cp.Config.parse(c1.dump()).hash == c1.hash


def test_config_fields():
    cfg = cp.Config.preset("case1")
    assert cfg.T_init == 293.0
    assert cfg.alpha0 == pytest.approx(0.01)
    assert cfg.length == pytest.approx(0.05)
    assert cfg.x_interface == pytest.approx(0.02)
    assert cfg.t_end == 13320.0
    assert not cfg.convective
    assert cp.Config.preset("case2").convective


def test_cure_rate_reference_value():
    cfg = cp.Config.preset("case1")
    assert cp.cure_rate(0.3, 400.0, cfg) == pytest.approx(
        4.4758990481476853e-05, rel=1e-12
    )
    with pytest.raises(ValueError):
        cp.cure_rate(0.3, -1.0, cfg)


def test_air_temperature_cycle_anchors():
    cfg = cp.Config.preset("case1")
    assert cp.air_temperature(0.0, cfg) == 293.0
    assert cp.air_temperature(3120.0, cfg) == 453.0
    assert cp.air_temperature(10320.0, cfg) == 453.0
    assert cp.air_temperature(13320.0, cfg) == 293.0


def test_solve_fd_shapes_and_initial_condition():
    cfg = cp.Config.preset("case1")
    fields = cp.solve_fd(cfg, cells_tool=8, cells_comp=8, time_steps=50)
    assert len(fields.x) == 17
    assert len(fields.t) == 51
    assert fields.interface_node == 8
    assert fields.T.shape == (17, 51)
    for i in range(17):
        assert fields.T[i, 0] == 293.0
    # tool nodes carry no cure value; composite starts at alpha0
    assert math.isnan(fields.alpha[0, 0])
    assert fields.alpha[8, 0] == pytest.approx(0.01)


def test_isothermal_cure_monotone():
    cfg = cp.Config.preset("case1")
    t, alpha = cp.isothermal_cure(453.0, 7200.0, cfg, samples=101)
    assert len(t) == len(alpha) == 101
    assert alpha[0] == pytest.approx(0.01)
    assert all(b >= a for a, b in zip(alpha, alpha[1:]))
    assert 0.80 < alpha[-1] < 0.87


def test_model_eval_bounds_and_residuals():
    cfg = cp.Config.preset("case1")
    model = cp.init_model(cfg, seed=7)
    T, alpha = model.eval(0.03, 500.0)
    assert T > 0.0
    assert cfg.alpha0 < alpha < 1.0
    T_tool, alpha_tool = model.eval(0.01, 500.0)
    assert T_tool > 0.0
    assert alpha_tool is None
    assert math.isfinite(model.residual_T(0.03, 500.0))
    assert math.isfinite(model.residual_alpha(0.03, 500.0))
    with pytest.raises(Exception):
        model.residual_alpha(0.01, 500.0)  # tool region has no cure residual


def test_save_load_round_trip(tmp_path):
    cfg = cp.Config.preset("case1")
    model = cp.init_model(cfg, seed=9)
    model.save(str(tmp_path), "model")
    again = cp.load_model(str(tmp_path), "model", cfg)
    x, t = 0.035, 700.0
    assert again.eval(x, t) == model.eval(x, t)


def test_train_short_run_history():
    cfg = cp.Config.preset("case1")
    model, info = cp.train(
        cfg, seed=4, iterations=1, epochs=2, batch=64, nx=20, nt=10
    )
    assert len(info["history"]) == 4  # two phases x two epochs
    phases = [row["phase"] for row in info["history"]]
    assert phases == ["a", "a", "T", "T"]
    assert all(math.isfinite(row["total"]) for row in info["history"])
    T, alpha = model.eval(0.03, 500.0)
    assert T > 0.0 and 0.0 < alpha < 1.0


def test_surrogate_eval_and_extrapolation_flag():
    cfg = cp.Config.preset("case2")
    model = cp.init_model(cfg, seed=11, zeta=(40.0, 80.0))
    assert model.has_zeta
    T, alpha, extrapolated = cp.eval_surrogate(model, 0.03, 500.0, 60.0)
    assert T > 0.0 and not extrapolated
    _, _, flagged = cp.eval_surrogate(model, 0.03, 500.0, 90.0)
    assert flagged


def test_thermal_lag_and_exotherm_metrics():
    case2 = cp.Config.preset("case2")
    fields = cp.solve_fd(case2, cells_tool=16, cells_comp=16, time_steps=800)
    lag, t_at = cp.thermal_lag(fields, case2)
    assert lag > 0.0 and 0.0 < t_at <= 3120.0

    case1 = cp.Config.preset("case1")
    fields1 = cp.solve_fd(case1, cells_tool=16, cells_comp=16, time_steps=800)
    assert cp.thermal_lag(fields1, case1) == (0.0, 0.0)
    T_max, x_at, t_at = cp.exotherm(fields1)
    assert T_max > 453.0
    assert case1.x_interface < x_at < case1.length
    assert 3120.0 < t_at < 10320.0
