#include "curepinn/oracle.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "curepinn/errors.hpp"

namespace curepinn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate_grid(const GridSpec& g) {
  if (g.cells_tool < 8 || g.cells_comp < 8)
    throw ConfigError("grid needs at least 8 cells per region");
  if (g.time_steps < 1) throw ConfigError("grid needs at least one time step");
  if (g.cure_substeps < 0) throw ConfigError("cure substep count must be non-negative");
}

// One RK4 advance of alpha over dt at frozen temperature T, substepped.
double advance_cure(double alpha, double T, double dt, int substeps,
                    const KineticsParams& kin) {
  const double h = dt / substeps;
  for (int s = 0; s < substeps; ++s) {
    const double k1 = cure_rate_clamped(alpha, T, kin);
    const double k2 = cure_rate_clamped(alpha + 0.5 * h * k1, T, kin);
    const double k3 = cure_rate_clamped(alpha + 0.5 * h * k2, T, kin);
    const double k4 = cure_rate_clamped(alpha + h * k3, T, kin);
    alpha += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return std::min(alpha, 1.0);
}

struct Discretization {
  int M = 0;          // node count
  int I = 0;          // interface node
  double dx_t = 0.0, dx_c = 0.0;
  EffectiveMaterial tool, comp;
  Eigen::SparseMatrix<double> A;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;

  // Assembles the constant system matrix for a CN step of size dt.
  void build(const ProblemConfig& cfg, const GridSpec& grid, double dt) {
    M = grid.cells_tool + grid.cells_comp + 1;
    I = grid.cells_tool;
    dx_t = cfg.Lt / grid.cells_tool;
    dx_c = cfg.Lc / grid.cells_comp;
    tool = effective_tool_props(cfg.tool);
    comp = effective_composite_props(cfg.fibre, cfg.resin, cfg.Hr,
                                     cfg.k_composite_override);

    const double rt = tool.a * dt / (dx_t * dx_t);
    const double rc = comp.a * dt / (dx_c * dx_c);

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(3 * M + 8);

    // Bottom boundary row (x = 0).
    if (cfg.bc.kind == BcKind::Prescribed) {
      trip.emplace_back(0, 0, 1.0);
    } else {
      const double c = cfg.tool.k / (2.0 * dx_t);
      trip.emplace_back(0, 0, cfg.bc.h_t + 3.0 * c);
      trip.emplace_back(0, 1, -4.0 * c);
      trip.emplace_back(0, 2, c);
    }

    // Tool interior.
    for (int i = 1; i < I; ++i) {
      trip.emplace_back(i, i - 1, -0.5 * rt);
      trip.emplace_back(i, i, 1.0 + rt);
      trip.emplace_back(i, i + 1, -0.5 * rt);
    }

    // Interface: k_t dT/dx|- = k_c dT/dx|+ with one-sided 2nd-order stencils.
    {
      const double ct = cfg.tool.k / (2.0 * dx_t);
      const double cc = comp.k / (2.0 * dx_c);
      trip.emplace_back(I, I - 2, ct);
      trip.emplace_back(I, I - 1, -4.0 * ct);
      trip.emplace_back(I, I, 3.0 * ct + 3.0 * cc);
      trip.emplace_back(I, I + 1, -4.0 * cc);
      trip.emplace_back(I, I + 2, cc);
    }

    // Composite interior.
    for (int i = I + 1; i < M - 1; ++i) {
      trip.emplace_back(i, i - 1, -0.5 * rc);
      trip.emplace_back(i, i, 1.0 + rc);
      trip.emplace_back(i, i + 1, -0.5 * rc);
    }

    // Top boundary row (x = Lt + Lc).
    if (cfg.bc.kind == BcKind::Prescribed) {
      trip.emplace_back(M - 1, M - 1, 1.0);
    } else {
      const double c = comp.k / (2.0 * dx_c);
      trip.emplace_back(M - 1, M - 1, cfg.bc.h_c + 3.0 * c);
      trip.emplace_back(M - 1, M - 2, -4.0 * c);
      trip.emplace_back(M - 1, M - 3, c);
    }

    A.resize(M, M);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    lu.compute(A);
    if (lu.info() != Eigen::Success)
      throw NumericsError("finite-difference system factorization failed (" +
                          std::to_string(M) + " nodes, dt=" + std::to_string(dt) + ")");
  }

  // Right-hand side for a diffusion step from state T at new time t_new.
  // source holds the per-node temperature increment b * d(alpha) to inject
  // into composite interior rows (empty = none).
  Eigen::VectorXd rhs(const ProblemConfig& cfg, const Eigen::VectorXd& T,
                      double t_new, double dt, const Eigen::VectorXd& source) const {
    const double rt = tool.a * dt / (dx_t * dx_t);
    const double rc = comp.a * dt / (dx_c * dx_c);
    Eigen::VectorXd r(M);
    const double Ta = air_temperature(t_new, cfg.cycle);

    if (cfg.bc.kind == BcKind::Prescribed) {
      r(0) = Ta;
      r(M - 1) = Ta;
    } else {
      r(0) = cfg.bc.h_t * Ta;
      r(M - 1) = cfg.bc.h_c * Ta;
    }
    r(I) = 0.0;

    for (int i = 1; i < I; ++i)
      r(i) = T(i) + 0.5 * rt * (T(i - 1) - 2.0 * T(i) + T(i + 1));
    for (int i = I + 1; i < M - 1; ++i) {
      r(i) = T(i) + 0.5 * rc * (T(i - 1) - 2.0 * T(i) + T(i + 1));
      if (source.size()) r(i) += source(i);
    }
    return r;
  }
};

}  // namespace

FieldGrid solve_fd(const ProblemConfig& cfg, const GridSpec& grid,
                   const SolveOverrides* overrides) {
  validate_config(cfg);
  validate_grid(grid);

  const int steps = grid.time_steps;
  const double dt = cfg.cycle.t_e / steps;
  const int substeps =
      grid.cure_substeps > 0
          ? grid.cure_substeps
          : std::max(1, static_cast<int>(std::ceil(dt / 0.5)));

  Discretization d;
  d.build(cfg, grid, grid.strang_split ? 0.5 * dt : dt);

  FieldGrid out;
  out.interface_node = d.I;
  out.x.resize(d.M);
  for (int i = 0; i <= d.I; ++i) out.x[i] = i * d.dx_t;
  for (int i = d.I + 1; i < d.M; ++i) out.x[i] = cfg.Lt + (i - d.I) * d.dx_c;
  out.t.resize(steps + 1);
  for (int nstep = 0; nstep <= steps; ++nstep) out.t[nstep] = nstep * dt;

  out.T.resize(d.M, steps + 1);
  out.alpha.setConstant(d.M, steps + 1, kNaN);

  // Initial state.
  Eigen::VectorXd T(d.M);
  for (int i = 0; i < d.M; ++i)
    T(i) = (overrides && overrides->T0_profile) ? overrides->T0_profile(out.x[i])
                                                : cfg.T_init;
  Eigen::VectorXd alpha = Eigen::VectorXd::Constant(d.M, cfg.alpha0);
  out.T.col(0) = T;
  for (int i = d.I; i < d.M; ++i) out.alpha(i, 0) = alpha(i);

  const bool freeze = overrides && overrides->freeze_cure;
  Eigen::VectorXd source = Eigen::VectorXd::Zero(d.M);
  Eigen::VectorXd alpha_new = alpha;

  auto cure_step = [&](const Eigen::VectorXd& Tfield) {
    if (freeze) {
      source.setZero();
      return;
    }
    for (int i = d.I; i < d.M; ++i) {
      const double a1 = advance_cure(alpha(i), Tfield(i), dt, substeps, cfg.kinetics);
      alpha_new(i) = std::max(a1, alpha(i));  // monotone by construction
      source(i) = d.comp.b * (alpha_new(i) - alpha(i));
    }
  };

  const Eigen::VectorXd no_source;
  for (int nstep = 1; nstep <= steps; ++nstep) {
    const double t_new = nstep * dt;
    if (!grid.strang_split) {
      cure_step(T);
      T = d.lu.solve(d.rhs(cfg, T, t_new, dt, source));
    } else {
      // Half diffusion, cure at the midpoint state, half diffusion.
      Eigen::VectorXd Tmid =
          d.lu.solve(d.rhs(cfg, T, t_new - 0.5 * dt, 0.5 * dt, no_source));
      cure_step(Tmid);
      for (int i = d.I + 1; i < d.M - 1; ++i) Tmid(i) += source(i);
      T = d.lu.solve(d.rhs(cfg, Tmid, t_new, 0.5 * dt, no_source));
    }
    alpha = alpha_new;

    if (cfg.bc.kind == BcKind::Prescribed) {
      // Pin the boundary rows exactly to the air temperature.
      const double Ta = air_temperature(t_new, cfg.cycle);
      T(0) = Ta;
      T(d.M - 1) = Ta;
    }

    if (!T.allFinite())
      throw NumericsError("temperature field became non-finite at step " +
                          std::to_string(nstep) + " (dt=" + std::to_string(dt) +
                          ", nodes=" + std::to_string(d.M) + ")");
    if (T.minCoeff() <= 0.0)
      throw NumericsError("non-physical temperature <= 0 K at step " +
                          std::to_string(nstep));

    out.T.col(nstep) = T;
    for (int i = d.I; i < d.M; ++i) out.alpha(i, nstep) = alpha(i);
  }
  return out;
}

CureTable isothermal_cure(double T_const, double alpha0, double t_end,
                          const KineticsParams& kinetics, int samples) {
  if (!(T_const > 0.0)) throw std::domain_error("isothermal_cure: T must be positive");
  if (samples < 2) throw std::invalid_argument("isothermal_cure: need >= 2 samples");

  namespace odeint = boost::numeric::odeint;
  using state = double;
  auto rate = [&kinetics, T_const](const state& a, state& dadt, double) {
    dadt = cure_rate_clamped(a, T_const, kinetics);
  };

  CureTable table;
  table.t.resize(samples);
  for (int i = 0; i < samples; ++i)
    table.t[i] = t_end * static_cast<double>(i) / (samples - 1);
  table.alpha.reserve(samples);

  state a = alpha0;
  auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<state>>(
      1e-12, 1e-10);
  odeint::integrate_times(
      stepper, rate, a, table.t.begin(), table.t.end(), 1e-3,
      [&table](const state& s, double) { table.alpha.push_back(std::min(s, 1.0)); });
  return table;
}

ConvergenceResult convergence_study(const ProblemConfig& cfg, const GridSpec& base,
                                    int levels, Refine what,
                                    const SolveOverrides* overrides) {
  if (levels < 3)
    throw std::invalid_argument("convergence_study: need at least 3 refinement levels");

  std::vector<FieldGrid> solves;
  solves.reserve(levels);
  for (int lvl = 0; lvl < levels; ++lvl) {
    const int f = 1 << lvl;
    GridSpec g = base;
    if (what == Refine::Space || what == Refine::Both) {
      g.cells_tool = base.cells_tool * f;
      g.cells_comp = base.cells_comp * f;
    }
    if (what == Refine::Time || what == Refine::Both)
      g.time_steps = base.time_steps * f;
    if (base.cure_substeps > 0) g.cure_substeps = base.cure_substeps;
    solves.push_back(solve_fd(cfg, g, overrides));
  }

  ConvergenceResult res;
  for (int lvl = 0; lvl + 1 < levels; ++lvl) {
    const FieldGrid& coarse = solves[lvl];
    const FieldGrid& fine = solves[lvl + 1];
    const int fx = (what == Refine::Time) ? 1 : (fine.nx() - 1) / (coarse.nx() - 1);
    const int ft = (what == Refine::Space) ? 1 : (fine.nt() - 1) / (coarse.nt() - 1);
    double dmax = 0.0;
    for (int i = 0; i < coarse.nx(); ++i)
      for (int j = 0; j < coarse.nt(); ++j)
        dmax = std::max(dmax, std::abs(coarse.T(i, j) - fine.T(i * fx, j * ft)));
    res.diffs.push_back(dmax);
  }
  for (std::size_t i = 0; i + 1 < res.diffs.size(); ++i)
    if (res.diffs[i + 1] > res.diffs[i]) res.monotone = false;
  const double d0 = res.diffs[res.diffs.size() - 2];
  const double d1 = res.diffs.back();
  res.observed_order = (d1 > 0.0 && d0 > 0.0) ? std::log2(d0 / d1) : 0.0;
  return res;
}

void write_field_csv(const std::string& path, const FieldGrid& fields) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw ArtifactError("cannot open for writing: " + path);
  std::fputs("x_m,t_s,T_K,alpha\n", f);
  char buf[160];
  for (int j = 0; j < fields.nt(); ++j) {
    for (int i = 0; i < fields.nx(); ++i) {
      const double a = fields.alpha(i, j);
      int n;
      if (std::isnan(a)) {
        n = std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,nan\n", fields.x[i],
                          fields.t[j], fields.T(i, j));
      } else {
        n = std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", fields.x[i],
                          fields.t[j], fields.T(i, j), a);
      }
      std::fwrite(buf, 1, static_cast<std::size_t>(n), f);
    }
  }
  if (std::fclose(f) != 0) throw ArtifactError("failed writing: " + path);
}

FieldGrid read_field_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArtifactError("cannot open field CSV: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("x_m,t_s,T_K,alpha", 0) != 0)
    throw ArtifactError("field CSV has an unexpected header: " + path);

  std::vector<double> xs, ts, Ts, as;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double x, t, T, a;
    char alpha_txt[64];
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%63s", &x, &t, &T, alpha_txt) != 4)
      throw ArtifactError("malformed field CSV row: " + line);
    a = (std::string(alpha_txt) == "nan") ? kNaN : std::strtod(alpha_txt, nullptr);
    xs.push_back(x);
    ts.push_back(t);
    Ts.push_back(T);
    as.push_back(a);
  }
  if (xs.empty()) throw ArtifactError("field CSV has no data rows: " + path);

  // t-major layout: x cycles fastest.
  FieldGrid g;
  std::size_t nx = 1;
  while (nx < xs.size() && !(xs[nx] == xs[0] && nx > 0)) ++nx;
  if (nx == 0 || xs.size() % nx != 0)
    throw ArtifactError("field CSV rows do not form a full grid: " + path);
  const std::size_t nt = xs.size() / nx;
  g.x.assign(xs.begin(), xs.begin() + static_cast<long>(nx));
  g.t.resize(nt);
  for (std::size_t j = 0; j < nt; ++j) g.t[j] = ts[j * nx];
  g.T.resize(static_cast<long>(nx), static_cast<long>(nt));
  g.alpha.resize(static_cast<long>(nx), static_cast<long>(nt));
  for (std::size_t j = 0; j < nt; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      g.T(static_cast<long>(i), static_cast<long>(j)) = Ts[j * nx + i];
      g.alpha(static_cast<long>(i), static_cast<long>(j)) = as[j * nx + i];
    }
  g.interface_node = 0;
  while (g.interface_node < static_cast<int>(nx) &&
         std::isnan(g.alpha(g.interface_node, 0)))
    ++g.interface_node;
  if (g.interface_node == static_cast<int>(nx))
    throw ArtifactError("field CSV carries no composite nodes: " + path);
  return g;
}

}  // namespace curepinn
