#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <chrono>
#include <cmath>
#include <set>

#include "curepinn/config.hpp"
#include "curepinn/errors.hpp"
#include "curepinn/surrogate.hpp"
#include "doctest.h"

using namespace curepinn;

namespace {

GridSpec tiny_grid() {
  GridSpec g;
  g.cells_tool = 16;
  g.cells_comp = 16;
  g.time_steps = 400;
  return g;
}

}  // namespace

TEST_CASE("labeled data: three anchors yield per-anchor counts with valid targets") {
  const ProblemConfig cfg = preset_config("case2");
  SurrogateRange range;
  const LabeledDataset d = generate_labeled_data(cfg, range, tiny_grid(), 200, 11);
  CHECK(d.points.size() == 600);
  CHECK(d.source == "oracle");

  std::set<double> zetas;
  int t0_rows = 0, tool_rows = 0, comp_rows = 0;
  for (const LabeledPoint& p : d.points) {
    zetas.insert(p.zeta);
    CHECK(std::isfinite(p.T_target));
    CHECK(p.x >= 0.0);
    CHECK(p.x <= cfg.length());
    CHECK(p.t >= 0.0);
    CHECK(p.t <= cfg.cycle.t_e);
    if (p.x < cfg.x_interface()) {
      ++tool_rows;
      CHECK(std::isnan(p.alpha_target));
    } else {
      ++comp_rows;
      CHECK(p.alpha_target >= 0.0);
      CHECK(p.alpha_target <= 1.0);
    }
    if (p.t == 0.0) {
      ++t0_rows;
      CHECK(p.T_target == cfg.T_init);
    }
  }
  CHECK(zetas == std::set<double>{50.0, 60.0, 70.0});
  CHECK(tool_rows > 0);
  CHECK(comp_rows > 0);
  // 200 draws over 401 time levels make t = 0 all but certain per anchor.
  CHECK(t0_rows > 0);
}

TEST_CASE("labeled data: determinism and seed sensitivity") {
  const ProblemConfig cfg = preset_config("case2");
  SurrogateRange range;
  GridSpec g = tiny_grid();
  g.time_steps = 100;
  const LabeledDataset a = generate_labeled_data(cfg, range, g, 50, 3);
  const LabeledDataset b = generate_labeled_data(cfg, range, g, 50, 3);
  REQUIRE(a.points.size() == b.points.size());
  bool identical = true;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    identical = identical && a.points[i].x == b.points[i].x &&
                a.points[i].t == b.points[i].t &&
                a.points[i].T_target == b.points[i].T_target;
  }
  CHECK(identical);
  const LabeledDataset c = generate_labeled_data(cfg, range, g, 50, 4);
  bool differs = false;
  for (std::size_t i = 0; i < a.points.size(); ++i)
    differs = differs || a.points[i].x != c.points[i].x ||
              a.points[i].t != c.points[i].t;
  CHECK(differs);
}

TEST_CASE("labeled data: precondition failures") {
  SurrogateRange range;
  SUBCASE("prescribed-boundary config is rejected") {
    CHECK_THROWS_AS(generate_labeled_data(preset_config("case1"), range,
                                          tiny_grid(), 10, 0),
                    ConfigError);
  }
  SUBCASE("anchor outside the range is rejected") {
    range.anchors = {50.0, 90.0};
    CHECK_THROWS_AS(generate_labeled_data(preset_config("case2"), range,
                                          tiny_grid(), 10, 0),
                    ConfigError);
  }
  SUBCASE("inverted range is rejected") {
    range.min = 80.0;
    range.max = 40.0;
    range.anchors = {};
    CHECK_THROWS_AS(validate_surrogate_range(range), ConfigError);
  }
  SUBCASE("non-positive sample count is rejected") {
    CHECK_THROWS_AS(generate_labeled_data(preset_config("case2"), range,
                                          tiny_grid(), 0, 0),
                    ConfigError);
  }
}

TEST_CASE("train_surrogate validates config, range, and dataset") {
  SurrogateRange range;
  TrainSchedule s;
  s.iterations = 0;  // validation-only run
  SUBCASE("prescribed config rejected") {
    CHECK_THROWS_AS(
        train_surrogate(preset_config("case1"), range, {}, s, 1), ConfigError);
  }
  SUBCASE("bad labeled point rejected") {
    const ProblemConfig cfg = preset_config("case2");
    LabeledDataset d;
    LabeledPoint p;
    p.x = 0.01;
    p.t = 100.0;
    p.zeta = 90.0;  // outside [40, 80]
    p.T_target = 300.0;
    p.alpha_target = std::nan("");
    d.points.push_back(p);
    CHECK_THROWS_AS(train_surrogate(cfg, range, d, s, 1), ConfigError);
    d.points[0].zeta = 60.0;
    d.points[0].T_target = std::nan("");
    CHECK_THROWS_AS(train_surrogate(cfg, range, d, s, 1), ConfigError);
    d.points[0].T_target = 300.0;
    d.points[0].alpha_target = 1.5;
    CHECK_THROWS_AS(train_surrogate(cfg, range, d, s, 1), ConfigError);
    d.points[0].alpha_target = 0.5;
    d.points[0].x = cfg.length() + 1.0;
    CHECK_THROWS_AS(train_surrogate(cfg, range, d, s, 1), ConfigError);
  }
  SUBCASE("empty dataset trains on physics terms alone") {
    TrainSchedule run = s;
    run.iterations = 1;
    run.epochs_per_net = 1;
    run.batch = 64;
    run.colloc = {20, 10, 50, 20, 8};
    TrainResult r;
    const PinnModel m =
        train_surrogate(preset_config("case2"), range, {}, run, 5, &r);
    CHECK(m.norm.has_zeta);
    CHECK(r.history.size() == 2);
    CHECK_FALSE(r.has_data_terms);
  }
}

TEST_CASE("eval_surrogate is pure and flags extrapolation") {
  const ProblemConfig cfg = preset_config("case2");
  const PinnModel m = init_pinn(cfg, 21, ZetaRange{40.0, 80.0});
  const double x = 0.03, t = 500.0;

  const SurrogateEval a = eval_surrogate(m, x, t, 60.0);
  const SurrogateEval b = eval_surrogate(m, x, t, 60.0);
  CHECK(a.T == b.T);
  CHECK(a.alpha == b.alpha);
  CHECK_FALSE(a.extrapolated);
  CHECK(a.alpha > cfg.alpha0);
  CHECK(a.alpha < 1.0);

  CHECK(eval_surrogate(m, x, t, 39.9).extrapolated);
  CHECK(eval_surrogate(m, x, t, 80.1).extrapolated);
  CHECK_FALSE(eval_surrogate(m, x, t, 40.0).extrapolated);
  CHECK_FALSE(eval_surrogate(m, x, t, 80.0).extrapolated);

  // Tool-region evaluation reports no cure value.
  CHECK(std::isnan(eval_surrogate(m, 0.005, t, 60.0).alpha));
}

TEST_CASE("eval_surrogate full-grid sweep stays under the time budget") {
  const ProblemConfig cfg = preset_config("case2");
  const PinnModel m = init_pinn(cfg, 22, ZetaRange{40.0, 80.0});
  const auto start = std::chrono::steady_clock::now();
  double acc = 0.0;
  for (int i = 0; i < 34; ++i)
    for (int j = 0; j < 926; ++j) {
      const double x = cfg.length() * i / 33.0;
      const double t = cfg.cycle.t_e * j / 925.0;
      acc += eval_surrogate(m, x, t, 55.0).T;
    }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  CHECK(std::isfinite(acc));
  CHECK(seconds < 5.0);
}

TEST_CASE("sample_model_grid matches pointwise composition") {
  const ProblemConfig cfg = preset_config("case1");
  const PinnModel m = init_pinn(cfg, 9);
  const std::vector<double> xs = {0.0, 0.01, 0.02, 0.03, 0.05};
  const std::vector<double> ts = {0.0, 500.0, 13320.0};
  const FieldGrid f = sample_model_grid(m, xs, ts);
  CHECK(f.nx() == 5);
  CHECK(f.nt() == 3);
  CHECK(f.interface_node == 2);
  for (int i = 0; i < f.nx(); ++i)
    for (int j = 0; j < f.nt(); ++j) {
      const ComposedPoint c = compose_fields(
          m, xs[static_cast<std::size_t>(i)], ts[static_cast<std::size_t>(j)]);
      CHECK(f.T(i, j) == c.T.value);
      if (i < f.interface_node)
        CHECK(std::isnan(f.alpha(i, j)));
      else
        CHECK(f.alpha(i, j) == c.alpha.value);
    }
}

TEST_CASE("thermal lag is exactly zero for prescribed boundaries") {
  const ProblemConfig cfg = preset_config("case1");
  GridSpec g = tiny_grid();
  g.time_steps = 200;
  const FieldGrid f = solve_fd(cfg, g);
  const ThermalLag lag = thermal_lag(f, cfg);
  CHECK(lag.lag_K == 0.0);
  CHECK(lag.t_at_max == 0.0);

  const PinnModel m = init_pinn(cfg, 2);
  const ThermalLag mlag = thermal_lag(m);
  CHECK(mlag.lag_K == 0.0);
}

TEST_CASE("thermal lag: convective case positive, peaking during heat-up, shrinking with h_t") {
  ProblemConfig cfg = preset_config("case2");
  GridSpec g = tiny_grid();
  g.time_steps = 800;
  const FieldGrid f = solve_fd(cfg, g);
  const ThermalLag lag = thermal_lag(f, cfg);
  CHECK(lag.lag_K > 0.0);
  CHECK(lag.t_at_max > 0.0);
  CHECK(lag.t_at_max <= cfg.cycle.t_hs);  // max lag while the air still ramps

  ProblemConfig weak = cfg;
  weak.bc.h_t = 50.0;
  ProblemConfig strong = cfg;
  strong.bc.h_t = 70.0;
  const double lag_weak = thermal_lag(solve_fd(weak, g), weak).lag_K;
  const double lag_strong = thermal_lag(solve_fd(strong, g), strong).lag_K;
  CHECK(lag_weak > lag_strong);
  CHECK(lag_strong > 0.0);
}

TEST_CASE("exotherm: no-source prescribed solve never exceeds the hold temperature") {
  ProblemConfig cfg = preset_config("case1");
  cfg.Hr = 0.0;  // b = 0: pure conduction, maximum principle applies
  GridSpec g = tiny_grid();
  g.time_steps = 800;
  const FieldGrid f = solve_fd(cfg, g);
  const Exotherm e = exotherm(f);
  CHECK(e.T_max <= cfg.cycle.Th + 1e-9);
  CHECK(e.T_max > cfg.cycle.Th - 1.0);  // hold long enough to reach it
  CHECK(e.x_at >= cfg.x_interface());
}

TEST_CASE("exotherm: thin part overshoots mid-composite; extreme slab is sink-limited") {
  GridSpec g = tiny_grid();
  g.time_steps = 2000;
  const ProblemConfig c1 = preset_config("case1");
  const Exotherm e1 = exotherm(solve_fd(c1, g));
  CHECK(e1.T_max > c1.cycle.Th + 40.0);  // strong overshoot (reaches ~503 K)
  CHECK(e1.x_at > c1.x_interface());
  CHECK(e1.x_at < c1.length());
  CHECK(e1.t_at > c1.cycle.t_hs);
  CHECK(e1.t_at < c1.cycle.t_he);

  // The half-metre slab's cold bulk absorbs the reaction heat: no node beats
  // the held boundary value and the mid-part never cures (checked against
  // refined solves up to 256 cells/region, interior max 452.2 K < Th).
  const ProblemConfig c3 = preset_config("case3");
  const FieldGrid f3 = solve_fd(c3, g);
  const Exotherm e3 = exotherm(f3);
  CHECK(e3.T_max == doctest::Approx(c3.cycle.Th).epsilon(1e-9));
  double interior_max = 0.0;
  for (int i = f3.interface_node; i < f3.nx() - 1; ++i)
    for (int j = 0; j < f3.nt(); ++j) interior_max = std::max(interior_max, f3.T(i, j));
  CHECK(interior_max < c3.cycle.Th);
  const int mid = f3.interface_node + (f3.nx() - 1 - f3.interface_node) / 2;
  CHECK(f3.alpha(mid, f3.nt() - 1) < 0.05);
}

TEST_CASE("data loss vanishes when labels come from the model itself") {
  const ProblemConfig cfg = preset_config("case2");
  const PinnModel m = init_pinn(cfg, 31, ZetaRange{40.0, 80.0});

  EvalBatches b;
  for (int i = 0; i < 25; ++i) {
    LabeledPoint p;
    p.x = cfg.length() * (i + 0.5) / 25.0;
    p.t = cfg.cycle.t_e * (i + 0.5) / 25.0;
    p.zeta = 40.0 + 40.0 * i / 24.0;
    const SurrogateEval e = eval_surrogate(m, p.x, p.t, p.zeta);
    p.T_target = e.T;
    p.alpha_target = e.alpha;  // NaN in the tool region, as generated data has
    b.data.push_back(p);
  }
  // The pointwise probe and the batched loss share one forward semantics but
  // not one summation order (matrix-vector vs matrix-matrix kernels), so the
  // match is to rounding of the dot products, not bit-exact.
  const LossBreakdown l = loss_terms(m, b);
  CHECK(l.L_data_T < 1e-24);
  CHECK(l.L_data_alpha < 1e-24);
}
