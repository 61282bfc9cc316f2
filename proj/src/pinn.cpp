#include "curepinn/pinn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "curepinn/errors.hpp"

namespace curepinn {

namespace {

// ---------- deterministic seed streams ----------

std::uint64_t mix_seed(std::uint64_t base, std::string_view tag,
                       std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t h = 1469598103934665603ull;
  auto eat_byte = [&h](unsigned char c) {
    h ^= c;
    h *= 1099511628211ull;
  };
  auto eat64 = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) eat_byte(static_cast<unsigned char>(v >> (8 * i)));
  };
  eat64(base);
  for (char c : tag) eat_byte(static_cast<unsigned char>(c));
  eat64(a);
  eat64(b);
  return h;
}

double canonical(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// In-place Fisher-Yates with an explicit draw sequence so shuffles are
// bit-identical across standard libraries.
void shuffle_ints(std::vector<std::int32_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

// ---------- architecture ----------

std::vector<int> alpha_widths(bool zeta) {
  return {zeta ? 3 : 2, 30, 30, 30, 30, 30, 30, 30, 1};
}
std::vector<int> temp_widths(bool zeta) {
  return {zeta ? 3 : 2, 20, 20, 20, 20, 20, 20, 20, 1};
}

struct MaterialCtx {
  EffectiveMaterial tool, comp;
  double k_t = 0.0, k_c = 0.0;
};

MaterialCtx material_ctx(const ProblemConfig& cfg) {
  MaterialCtx mc;
  mc.tool = effective_tool_props(cfg.tool);
  mc.comp = effective_composite_props(cfg.fibre, cfg.resin, cfg.Hr,
                                      cfg.k_composite_override);
  mc.k_t = mc.tool.k;
  mc.k_c = mc.comp.k;
  return mc;
}

double zeta_hat(const Normalization& n, double zeta) {
  return (zeta - n.zeta_min) / n.zeta_span();
}

void require_zeta_match(const Normalization& n,
                        const std::optional<double>& zeta) {
  if (n.has_zeta && !zeta)
    throw std::invalid_argument(
        "model takes a parametric input; zeta is required");
  if (!n.has_zeta && zeta)
    throw std::invalid_argument(
        "model has no parametric input; zeta must be omitted");
}

EvalJet to_physical(const EvalJet& j, const Normalization& n) {
  EvalJet p = j;
  p.d_dx = j.d_dx / n.x_scale;
  p.d2_dx2 = j.d2_dx2 / (n.x_scale * n.x_scale);
  p.d_dt = j.d_dt / n.t_scale;
  p.d_dzeta = n.has_zeta ? j.d_dzeta / n.zeta_span() : 0.0;
  return p;
}

EvalJet eval_net(const MlpParams& net, const Normalization& n, double x,
                 double t, const std::optional<double>& zeta) {
  JetChannels ch;
  ch.d_dx = true;
  ch.d_dt = true;
  ch.d2_dx2 = true;
  ch.d_dzeta = n.has_zeta;
  const double xh = x / n.x_scale, th = t / n.t_scale;
  EvalJet j = n.has_zeta ? eval_jet3(net, xh, th, zeta_hat(n, *zeta), ch)
                         : eval_jet(net, xh, th, ch);
  return to_physical(j, n);
}

// ---------- batched forward helpers ----------

// Builds the input matrix for a list of (x, t[, zeta_hat]) columns.
struct InputBuilder {
  const Normalization* norm = nullptr;
  Eigen::MatrixXd X;
  int col = 0;

  void reset(int n) {
    X.resize(norm->has_zeta ? 3 : 2, n);
    col = 0;
  }
  void push(double x, double t, double zh) {
    X(0, col) = x / norm->x_scale;
    X(1, col) = t / norm->t_scale;
    if (norm->has_zeta) X(2, col) = zh;
    ++col;
  }
};

double mean_sq(const Eigen::RowVectorXd& r) {
  return r.size() == 0 ? 0.0 : r.squaredNorm() / static_cast<double>(r.size());
}

}  // namespace

// ---------- construction / evaluation ----------

PinnModel init_pinn(const ProblemConfig& cfg, std::uint64_t seed,
                    const std::optional<ZetaRange>& zeta) {
  validate_config(cfg);
  if (zeta && !(zeta->min < zeta->max))
    throw std::invalid_argument("zeta range must satisfy min < max");

  PinnModel m;
  m.config = cfg;
  m.x_I = cfg.x_interface();
  m.norm.x_scale = cfg.length();
  m.norm.t_scale = cfg.cycle.t_e;
  if (zeta) {
    m.norm.has_zeta = true;
    m.norm.zeta_min = zeta->min;
    m.norm.zeta_max = zeta->max;
  }

  const bool z = m.norm.has_zeta;
  const ActivationSpec tanh_act{Act::Tanh, 0.0};
  const ActivationSpec softplus{Act::Softplus, 0.0};
  const ActivationSpec modsig{Act::ModifiedSigmoid, cfg.alpha0};
  m.net_alpha = init_mlp(alpha_widths(z), tanh_act, modsig,
                         mix_seed(seed, "net-alpha"));
  m.net_T_minus = init_mlp(temp_widths(z), tanh_act, softplus,
                           mix_seed(seed, "net-T-minus"));
  m.net_T_plus = init_mlp(temp_widths(z), tanh_act, softplus,
                          mix_seed(seed, "net-T-plus"));
  // Start both temperature outputs at the initial temperature: softplus is
  // identity-like on the kelvin scale, so a fresh model reads ~T_init
  // everywhere instead of ~1 K and training skips the long climb.
  m.net_T_minus.b.back()(0) = cfg.T_init;
  m.net_T_plus.b.back()(0) = cfg.T_init;
  return m;
}

ComposedPoint compose_fields(const PinnModel& m, double x, double t,
                             std::optional<double> zeta) {
  if (!(x >= 0.0 && x <= m.config.length()))
    throw std::domain_error("x outside the domain");
  if (!(t >= 0.0 && t <= m.config.cycle.t_e))
    throw std::domain_error("t outside the cure cycle");
  require_zeta_match(m.norm, zeta);

  ComposedPoint out;
  const bool composite = x >= m.x_I;  // interface belongs to the composite
  out.T = eval_net(composite ? m.net_T_plus : m.net_T_minus, m.norm, x, t, zeta);
  if (composite) {
    out.alpha = eval_net(m.net_alpha, m.norm, x, t, zeta);
    out.has_alpha = true;
  }
  return out;
}

double residual_alpha(const PinnModel& m, double x, double t,
                      std::optional<double> zeta) {
  if (x < m.x_I)
    throw std::domain_error("cure residual requested in the tool region");
  const ComposedPoint c = compose_fields(m, x, t, zeta);
  return c.alpha.d_dt -
         cure_rate(c.alpha.value, c.T.value, m.config.kinetics);
}

double residual_temperature(const PinnModel& m, double x, double t,
                            std::optional<double> zeta) {
  const ComposedPoint c = compose_fields(m, x, t, zeta);
  const MaterialCtx mc = material_ctx(m.config);
  if (c.has_alpha)
    return c.T.d_dt - mc.comp.a * c.T.d2_dx2 - mc.comp.b * c.alpha.d_dt;
  return c.T.d_dt - mc.tool.a * c.T.d2_dx2;
}

// ---------- collocation ----------

CollocationSet sample_collocation(const ProblemConfig& cfg,
                                  const CollocationCounts& counts,
                                  std::uint64_t seed) {
  (void)seed;  // current sets are deterministic grids
  if (counts.nx <= 0 || counts.nt <= 0 || counts.n_initial <= 0 ||
      counts.n_boundary <= 0 || counts.n_interface <= 0)
    throw std::invalid_argument("collocation counts must be positive");
  validate_config(cfg);

  const double L = cfg.length(), te = cfg.cycle.t_e, xI = cfg.x_interface();
  CollocationSet cs;
  cs.interior_x.reserve(static_cast<std::size_t>(counts.nx) * counts.nt);
  cs.interior_t.reserve(cs.interior_x.capacity());
  for (int ix = 0; ix < counts.nx; ++ix) {
    const double x = (ix + 0.5) * L / counts.nx;
    for (int it = 0; it < counts.nt; ++it) {
      const double t = (it + 0.5) * te / counts.nt;
      const auto idx = static_cast<std::int32_t>(cs.interior_x.size());
      cs.interior_x.push_back(x);
      cs.interior_t.push_back(t);
      (x >= xI ? cs.comp_idx : cs.tool_idx).push_back(idx);
    }
  }
  cs.initial_x.resize(counts.n_initial);
  for (int i = 0; i < counts.n_initial; ++i)
    cs.initial_x[i] = (i + 0.5) * L / counts.n_initial;
  cs.boundary_t.resize(counts.n_boundary);
  for (int i = 0; i < counts.n_boundary; ++i)
    cs.boundary_t[i] = (i + 0.5) * te / counts.n_boundary;
  cs.interface_t.resize(counts.n_interface);
  for (int i = 0; i < counts.n_interface; ++i)
    cs.interface_t[i] = (i + 0.5) * te / counts.n_interface;
  return cs;
}

// ---------- loss bookkeeping ----------

double weighted_total(const LossBreakdown& l, const LossWeights& w) {
  return l.L_alpha + l.L_T + w.w_alpha0 * l.L_alpha0 + w.w_T0 * l.L_T0 +
         w.w_bc1 * l.L_bc1 + w.w_bc2 * l.L_bc2 + w.w_tau * l.L_tau +
         w.w_q * l.L_q + w.w_data_T * l.L_data_T +
         w.w_data_alpha * l.L_data_alpha;
}

double update_one_weight(double w_old, double max_grad_main,
                         double mean_grad_term, double beta) {
  if (!(mean_grad_term > 0.0) || !std::isfinite(mean_grad_term))
    return w_old;  // guard: degenerate term gradient leaves the weight alone
  const double w_hat = (1.0 / w_old) * (max_grad_main / mean_grad_term);
  return beta * w_old + (1.0 - beta) * w_hat;
}

LossWeights scale_rational_weights(const ProblemConfig& cfg) {
  validate_config(cfg);
  LossWeights w;
  const double k_t = cfg.tool.k;
  const double k_c = effective_composite_props(cfg.fibre, cfg.resin, cfg.Hr,
                                               cfg.k_composite_override)
                         .k;
  const double k_hot = std::max(k_t, k_c);
  const double L = cfg.length();
  w.w_q = (L / k_hot) * (L / k_hot);
  if (cfg.bc.kind == BcKind::Convective) {
    w.w_bc1 = 1.0 / (cfg.bc.h_t * cfg.bc.h_t);
    w.w_bc2 = 1.0 / (cfg.bc.h_c * cfg.bc.h_c);
  }
  return w;
}

// ---------- reference (probe/test) loss evaluation ----------

LossBreakdown loss_terms(const PinnModel& m, const EvalBatches& b,
                         const std::function<double(double)>* T0_profile) {
  const Normalization& nm = m.norm;
  auto check_zeta = [&](std::size_t npts, const std::vector<double>& z,
                        const char* what) {
    if (!nm.has_zeta) {
      if (!z.empty())
        throw std::invalid_argument(std::string("zeta values supplied for a "
                                                 "non-parametric model in ") +
                                    what);
    } else if (z.size() != npts) {
      throw std::invalid_argument(std::string("zeta count mismatch in ") +
                                  what);
    }
  };
  check_zeta(b.interior_x.size(), b.interior_zeta, "interior");
  check_zeta(b.initial_x.size(), b.initial_zeta, "initial");
  check_zeta(b.bc_lo_t.size(), b.bc_lo_zeta, "bc_lo");
  check_zeta(b.bc_hi_t.size(), b.bc_hi_zeta, "bc_hi");
  check_zeta(b.interface_t.size(), b.interface_zeta, "interface");
  if (b.interior_x.size() != b.interior_t.size())
    throw std::invalid_argument("interior x/t size mismatch");

  const MaterialCtx mc = material_ctx(m.config);
  const ProblemConfig& cfg = m.config;
  const double xs = nm.x_scale, ts = nm.t_scale, xI = m.x_I;
  LossBreakdown out;
  MlpWorkspace ws;

  JetChannels full;
  full.d_dx = true;
  full.d_dt = true;
  full.d2_dx2 = true;
  JetChannels vdt;
  vdt.d_dt = true;

  InputBuilder ib;
  ib.norm = &nm;
  auto zh_of = [&](const std::vector<double>& z, std::size_t i) {
    return nm.has_zeta ? zeta_hat(nm, z[i]) : 0.0;
  };

  // Interior: heat residual over every point, cure residual over composite
  // points.
  {
    std::vector<std::size_t> tool_rows, comp_rows;
    for (std::size_t i = 0; i < b.interior_x.size(); ++i)
      (b.interior_x[i] >= xI ? comp_rows : tool_rows).push_back(i);

    double sumsq_T = 0.0;
    if (!tool_rows.empty()) {
      ib.reset(static_cast<int>(tool_rows.size()));
      for (std::size_t i : tool_rows)
        ib.push(b.interior_x[i], b.interior_t[i], zh_of(b.interior_zeta, i));
      const JetBatch j = forward_jet_batch(m.net_T_minus, ib.X, full, ws);
      const Eigen::RowVectorXd r =
          j.d_dt / ts - (mc.tool.a / (xs * xs)) * j.d2_dx2;
      sumsq_T += r.squaredNorm();
    }
    if (!comp_rows.empty()) {
      ib.reset(static_cast<int>(comp_rows.size()));
      for (std::size_t i : comp_rows)
        ib.push(b.interior_x[i], b.interior_t[i], zh_of(b.interior_zeta, i));
      const JetBatch jT = forward_jet_batch(m.net_T_plus, ib.X, full, ws);
      const JetBatch ja = forward_jet_batch(m.net_alpha, ib.X, vdt, ws);
      const Eigen::RowVectorXd rT = jT.d_dt / ts -
                                    (mc.comp.a / (xs * xs)) * jT.d2_dx2 -
                                    (mc.comp.b / ts) * ja.d_dt;
      sumsq_T += rT.squaredNorm();

      Eigen::RowVectorXd ra(comp_rows.size());
      for (int c = 0; c < ra.size(); ++c)
        ra(c) = ja.d_dt(c) / ts -
                cure_rate(ja.value(c), jT.value(c), cfg.kinetics);
      out.L_alpha = mean_sq(ra);
    }
    if (!b.interior_x.empty())
      out.L_T = sumsq_T / static_cast<double>(b.interior_x.size());
  }

  // Initial conditions at t = 0.
  if (!b.initial_x.empty()) {
    std::vector<std::size_t> tool_rows, comp_rows;
    for (std::size_t i = 0; i < b.initial_x.size(); ++i)
      (b.initial_x[i] >= xI ? comp_rows : tool_rows).push_back(i);
    auto target = [&](double x) {
      return T0_profile && *T0_profile ? (*T0_profile)(x) : cfg.T_init;
    };
    double sumsq = 0.0;
    for (int side = 0; side < 2; ++side) {
      const auto& rows = side == 0 ? tool_rows : comp_rows;
      if (rows.empty()) continue;
      ib.reset(static_cast<int>(rows.size()));
      for (std::size_t i : rows)
        ib.push(b.initial_x[i], 0.0, zh_of(b.initial_zeta, i));
      const JetBatch j = forward_jet_batch(
          side == 0 ? m.net_T_minus : m.net_T_plus, ib.X, JetChannels{}, ws);
      for (int c = 0; c < j.size(); ++c) {
        const double r = j.value(c) - target(b.initial_x[rows[c]]);
        sumsq += r * r;
      }
    }
    out.L_T0 = sumsq / static_cast<double>(b.initial_x.size());

    if (!comp_rows.empty()) {
      ib.reset(static_cast<int>(comp_rows.size()));
      for (std::size_t i : comp_rows)
        ib.push(b.initial_x[i], 0.0, zh_of(b.initial_zeta, i));
      const JetBatch j = forward_jet_batch(m.net_alpha, ib.X, JetChannels{}, ws);
      out.L_alpha0 = mean_sq(j.value.array() - cfg.alpha0);
    }
  }

  // Boundaries.
  const bool convective = cfg.bc.kind == BcKind::Convective;
  if (!b.bc_lo_t.empty()) {
    ib.reset(static_cast<int>(b.bc_lo_t.size()));
    for (std::size_t i = 0; i < b.bc_lo_t.size(); ++i)
      ib.push(0.0, b.bc_lo_t[i], zh_of(b.bc_lo_zeta, i));
    JetChannels ch;
    ch.d_dx = convective;
    const JetBatch j = forward_jet_batch(m.net_T_minus, ib.X, ch, ws);
    Eigen::RowVectorXd r(j.size());
    for (int c = 0; c < j.size(); ++c) {
      const double Ta = air_temperature(b.bc_lo_t[c], cfg.cycle);
      if (convective) {
        const double h = nm.has_zeta ? b.bc_lo_zeta[c] : cfg.bc.h_t;
        r(c) = mc.k_t * j.d_dx(c) / xs - h * (j.value(c) - Ta);
      } else {
        r(c) = j.value(c) - Ta;
      }
    }
    out.L_bc1 = mean_sq(r);
  }
  if (!b.bc_hi_t.empty()) {
    ib.reset(static_cast<int>(b.bc_hi_t.size()));
    for (std::size_t i = 0; i < b.bc_hi_t.size(); ++i)
      ib.push(cfg.length(), b.bc_hi_t[i], zh_of(b.bc_hi_zeta, i));
    JetChannels ch;
    ch.d_dx = convective;
    const JetBatch j = forward_jet_batch(m.net_T_plus, ib.X, ch, ws);
    Eigen::RowVectorXd r(j.size());
    for (int c = 0; c < j.size(); ++c) {
      const double Ta = air_temperature(b.bc_hi_t[c], cfg.cycle);
      if (convective)
        r(c) = mc.k_c * j.d_dx(c) / xs - cfg.bc.h_c * (Ta - j.value(c));
      else
        r(c) = j.value(c) - Ta;
    }
    out.L_bc2 = mean_sq(r);
  }

  // Interface continuity pair.
  if (!b.interface_t.empty()) {
    ib.reset(static_cast<int>(b.interface_t.size()));
    for (std::size_t i = 0; i < b.interface_t.size(); ++i)
      ib.push(xI, b.interface_t[i], zh_of(b.interface_zeta, i));
    JetChannels ch;
    ch.d_dx = true;
    const JetBatch jm = forward_jet_batch(m.net_T_minus, ib.X, ch, ws);
    const JetBatch jp = forward_jet_batch(m.net_T_plus, ib.X, ch, ws);
    out.L_tau = mean_sq(jp.value - jm.value);
    out.L_q = mean_sq((mc.k_t / xs) * jm.d_dx - (mc.k_c / xs) * jp.d_dx);
  }

  // Labeled data (surrogate training).
  if (!b.data.empty()) {
    if (!nm.has_zeta)
      throw std::invalid_argument(
          "labeled data requires a parametric model");
    std::vector<std::size_t> tool_rows, comp_rows, alpha_rows;
    for (std::size_t i = 0; i < b.data.size(); ++i) {
      (b.data[i].x >= xI ? comp_rows : tool_rows).push_back(i);
      if (std::isfinite(b.data[i].alpha_target)) alpha_rows.push_back(i);
    }
    double sumsq = 0.0;
    for (int side = 0; side < 2; ++side) {
      const auto& rows = side == 0 ? tool_rows : comp_rows;
      if (rows.empty()) continue;
      ib.reset(static_cast<int>(rows.size()));
      for (std::size_t i : rows)
        ib.push(b.data[i].x, b.data[i].t, zeta_hat(nm, b.data[i].zeta));
      const JetBatch j = forward_jet_batch(
          side == 0 ? m.net_T_minus : m.net_T_plus, ib.X, JetChannels{}, ws);
      for (int c = 0; c < j.size(); ++c) {
        const double r = j.value(c) - b.data[rows[c]].T_target;
        sumsq += r * r;
      }
    }
    out.L_data_T = sumsq / static_cast<double>(b.data.size());

    if (!alpha_rows.empty()) {
      ib.reset(static_cast<int>(alpha_rows.size()));
      for (std::size_t i : alpha_rows)
        ib.push(b.data[i].x, b.data[i].t, zeta_hat(nm, b.data[i].zeta));
      const JetBatch j = forward_jet_batch(m.net_alpha, ib.X, JetChannels{}, ws);
      double s = 0.0;
      for (int c = 0; c < j.size(); ++c) {
        const double r = j.value(c) - b.data[alpha_rows[c]].alpha_target;
        s += r * r;
      }
      out.L_data_alpha = s / static_cast<double>(alpha_rows.size());
    }
  }
  return out;
}

// ---------- trainer ----------

namespace {

struct Slice {
  int lo = 0, hi = 0;
  int size() const { return hi - lo; }
};

Slice proportional_slice(int total, int steps, int step) {
  Slice s;
  s.lo = static_cast<int>((static_cast<long long>(total) * step) / steps);
  s.hi = static_cast<int>((static_cast<long long>(total) * (step + 1)) / steps);
  return s;
}

struct Trainer {
  PinnModel& m;
  const TrainSchedule& sch;
  const std::uint64_t seed;
  const std::vector<LabeledPoint>* data;

  CollocationSet cs;
  MaterialCtx mc;
  LossWeights weights;
  std::vector<std::int32_t> init_tool_idx, init_comp_idx;
  std::vector<std::int32_t> data_tool_idx, data_comp_idx, data_alpha_idx;
  std::vector<std::int32_t> all_interior_idx;

  AdamState ad_alpha, ad_minus, ad_plus;
  PlateauState pl_alpha, pl_T;
  double lr_alpha, lr_T;

  EvalBatches probe;
  std::vector<HistoryRow> history;
  int global_epoch = 0;
  bool stop = false;

  MlpWorkspace ws_alpha, ws_minus, ws_plus, ws_frozen;

  Trainer(PinnModel& model, const TrainSchedule& schedule, std::uint64_t sd,
          const std::vector<LabeledPoint>* labeled)
      : m(model), sch(schedule), seed(sd), data(labeled),
        lr_alpha(schedule.lr0), lr_T(schedule.lr0) {
    if (sch.iterations < 0) throw std::invalid_argument("iterations < 0");
    if (sch.epochs_per_net <= 0)
      throw std::invalid_argument("epochs_per_net must be positive");
    if (sch.batch <= 0) throw std::invalid_argument("batch must be positive");
    if (!(sch.lr0 > 0.0)) throw std::invalid_argument("lr0 must be positive");
    if (data && !data->empty() && !m.norm.has_zeta)
      throw std::invalid_argument(
          "labeled data requires a parametric model");
    weights = sch.start_weights;
    for (double w : {weights.w_alpha0, weights.w_T0, weights.w_bc1,
                     weights.w_bc2, weights.w_tau, weights.w_q,
                     weights.w_data_T, weights.w_data_alpha})
      if (!(w > 0.0) || !std::isfinite(w))
        throw std::invalid_argument("start weights must be positive");

    cs = sample_collocation(m.config, sch.colloc, seed);
    mc = material_ctx(m.config);

    const int n_interior = static_cast<int>(cs.interior_x.size());
    const int n_comp = static_cast<int>(cs.comp_idx.size());
    if (sch.batch > n_interior)
      throw std::invalid_argument("batch size exceeds interior point count");
    if (sch.phases != PhaseSelect::TOnly && n_comp == 0)
      throw std::invalid_argument("no composite interior points to train on");

    for (std::size_t i = 0; i < cs.initial_x.size(); ++i)
      (cs.initial_x[i] >= m.x_I ? init_comp_idx : init_tool_idx)
          .push_back(static_cast<std::int32_t>(i));
    if (data) {
      for (std::size_t i = 0; i < data->size(); ++i) {
        const LabeledPoint& p = (*data)[i];
        if (!std::isfinite(p.T_target))
          throw std::invalid_argument("labeled T target is not finite");
        (p.x >= m.x_I ? data_comp_idx : data_tool_idx)
            .push_back(static_cast<std::int32_t>(i));
        if (std::isfinite(p.alpha_target))
          data_alpha_idx.push_back(static_cast<std::int32_t>(i));
      }
    }
    all_interior_idx.resize(n_interior);
    for (int i = 0; i < n_interior; ++i) all_interior_idx[i] = i;

    ad_alpha.lr = ad_minus.lr = ad_plus.lr = sch.lr0;
    pl_alpha.factor = pl_T.factor = sch.plateau_factor;
    pl_alpha.min_lr = pl_T.min_lr = sch.min_lr;
    pl_alpha.patience = sch.patience_alpha;
    pl_T.patience = sch.patience_T;

    build_probe();
  }

  // Fixed, deterministic evaluation batch used for history rows, plateau
  // metrics, divergence checks, and adaptive-weight statistics.
  void build_probe() {
    auto strided = [](int total, int want) {
      std::vector<int> idx;
      const int k = std::min(total, want);
      idx.reserve(k);
      for (int i = 0; i < k; ++i)
        idx.push_back(static_cast<int>((static_cast<long long>(total) * i) / k));
      return idx;
    };
    std::mt19937_64 zrng(mix_seed(seed, "probe-zeta"));
    auto draw_zeta = [&]() {
      return m.norm.zeta_min + canonical(zrng) * m.norm.zeta_span();
    };

    for (int i : strided(static_cast<int>(cs.interior_x.size()), 512)) {
      probe.interior_x.push_back(cs.interior_x[i]);
      probe.interior_t.push_back(cs.interior_t[i]);
      if (m.norm.has_zeta) probe.interior_zeta.push_back(draw_zeta());
    }
    for (int i : strided(static_cast<int>(cs.initial_x.size()), 128)) {
      probe.initial_x.push_back(cs.initial_x[i]);
      if (m.norm.has_zeta) probe.initial_zeta.push_back(draw_zeta());
    }
    for (int i : strided(static_cast<int>(cs.boundary_t.size()), 64)) {
      probe.bc_lo_t.push_back(cs.boundary_t[i]);
      probe.bc_hi_t.push_back(cs.boundary_t[i]);
      if (m.norm.has_zeta) {
        probe.bc_lo_zeta.push_back(draw_zeta());
        probe.bc_hi_zeta.push_back(draw_zeta());
      }
    }
    for (int i : strided(static_cast<int>(cs.interface_t.size()), 64)) {
      probe.interface_t.push_back(cs.interface_t[i]);
      if (m.norm.has_zeta) probe.interface_zeta.push_back(draw_zeta());
    }
    if (data)
      for (int i : strided(static_cast<int>(data->size()), 128))
        probe.data.push_back((*data)[i]);
  }

  LossBreakdown probe_losses() {
    return loss_terms(m, probe, &sch.T0_profile);
  }

  double phase_objective(const LossBreakdown& l, char phase) const {
    if (phase == 'a')
      return l.L_alpha + weights.w_alpha0 * l.L_alpha0 +
             weights.w_data_alpha * l.L_data_alpha;
    return l.L_T + weights.w_T0 * l.L_T0 + weights.w_bc1 * l.L_bc1 +
           weights.w_bc2 * l.L_bc2 + weights.w_tau * l.L_tau +
           weights.w_q * l.L_q + weights.w_data_T * l.L_data_T;
  }

  // ----- adaptive weight refresh -----

  // Gradient of one probe loss term with respect to the cure network.
  Eigen::VectorXd alpha_term_grad(int term) {
    // term: 0 = L_alpha, 1 = L_alpha0, 2 = L_data_alpha
    InputBuilder ib;
    ib.norm = &m.norm;
    const double ts = m.norm.t_scale;
    JetChannels vdt;
    vdt.d_dt = true;

    if (term == 0) {
      std::vector<std::size_t> rows;
      for (std::size_t i = 0; i < probe.interior_x.size(); ++i)
        if (probe.interior_x[i] >= m.x_I) rows.push_back(i);
      if (rows.empty()) return Eigen::VectorXd();
      ib.reset(static_cast<int>(rows.size()));
      for (std::size_t i : rows)
        ib.push(probe.interior_x[i], probe.interior_t[i],
                m.norm.has_zeta ? zeta_hat(m.norm, probe.interior_zeta[i])
                                : 0.0);
      const JetBatch ja =
          forward_jet_batch(m.net_alpha, ib.X, vdt, ws_alpha, true);
      const JetBatch jT = forward_jet_batch(m.net_T_plus, ib.X, {}, ws_frozen);
      const int n = static_cast<int>(rows.size());
      JetBatch seeds;
      seeds.value.setZero(n);
      seeds.d_dt.setZero(n);
      for (int c = 0; c < n; ++c) {
        const double a = ja.value(c), T = jT.value(c);
        if (!(T > 0.0))
          throw NumericsError(
              "training diverged: frozen temperature network produced a "
              "nonpositive value in the cure phase");
        const double r = ja.d_dt(c) / ts - cure_rate(a, T, m.config.kinetics);
        const double coef = 2.0 * r / n;
        seeds.value(c) = -coef * cure_rate_dalpha(a, T, m.config.kinetics);
        seeds.d_dt(c) = coef / ts;
      }
      return backward_jet_batch(m.net_alpha, ws_alpha, seeds);
    }
    if (term == 1) {
      std::vector<std::size_t> rows;
      for (std::size_t i = 0; i < probe.initial_x.size(); ++i)
        if (probe.initial_x[i] >= m.x_I) rows.push_back(i);
      if (rows.empty()) return Eigen::VectorXd();
      ib.reset(static_cast<int>(rows.size()));
      for (std::size_t i : rows)
        ib.push(probe.initial_x[i], 0.0,
                m.norm.has_zeta ? zeta_hat(m.norm, probe.initial_zeta[i])
                                : 0.0);
      const JetBatch j =
          forward_jet_batch(m.net_alpha, ib.X, {}, ws_alpha, true);
      const int n = static_cast<int>(rows.size());
      JetBatch seeds;
      seeds.value = (2.0 / n) * (j.value.array() - m.config.alpha0).matrix();
      return backward_jet_batch(m.net_alpha, ws_alpha, seeds);
    }
    // L_data_alpha
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < probe.data.size(); ++i)
      if (std::isfinite(probe.data[i].alpha_target)) rows.push_back(i);
    if (rows.empty()) return Eigen::VectorXd();
    ib.reset(static_cast<int>(rows.size()));
    for (std::size_t i : rows)
      ib.push(probe.data[i].x, probe.data[i].t,
              zeta_hat(m.norm, probe.data[i].zeta));
    const JetBatch j = forward_jet_batch(m.net_alpha, ib.X, {}, ws_alpha, true);
    const int n = static_cast<int>(rows.size());
    JetBatch seeds;
    seeds.value.setZero(n);
    for (int c = 0; c < n; ++c)
      seeds.value(c) = (2.0 / n) * (j.value(c) - probe.data[rows[c]].alpha_target);
    return backward_jet_batch(m.net_alpha, ws_alpha, seeds);
  }

  // Gradient of one probe loss term with respect to both temperature
  // networks, concatenated (minus then plus).
  Eigen::VectorXd temp_term_grad(int term) {
    // term: 0=L_T, 1=L_T0, 2=L_bc1, 3=L_bc2, 4=L_tau, 5=L_q, 6=L_data_T
    const long nmn = m.net_T_minus.param_count();
    const long npl = m.net_T_plus.param_count();
    Eigen::VectorXd g = Eigen::VectorXd::Zero(nmn + npl);
    InputBuilder ib;
    ib.norm = &m.norm;
    const double xs = m.norm.x_scale, ts = m.norm.t_scale;
    JetChannels full;
    full.d_dx = true;
    full.d_dt = true;
    full.d2_dx2 = true;
    JetChannels vdx;
    vdx.d_dx = true;
    const bool convective = m.config.bc.kind == BcKind::Convective;

    auto zh_of = [&](const std::vector<double>& z, std::size_t i) {
      return m.norm.has_zeta ? zeta_hat(m.norm, z[i]) : 0.0;
    };

    switch (term) {
      case 0: {  // interior heat residual, mean over all probe interior rows
        std::vector<std::size_t> tool_rows, comp_rows;
        for (std::size_t i = 0; i < probe.interior_x.size(); ++i)
          (probe.interior_x[i] >= m.x_I ? comp_rows : tool_rows).push_back(i);
        const int n = static_cast<int>(probe.interior_x.size());
        if (n == 0) return g;
        if (!tool_rows.empty()) {
          ib.reset(static_cast<int>(tool_rows.size()));
          for (std::size_t i : tool_rows)
            ib.push(probe.interior_x[i], probe.interior_t[i],
                    zh_of(probe.interior_zeta, i));
          const JetBatch j =
              forward_jet_batch(m.net_T_minus, ib.X, full, ws_minus, true);
          const int k = static_cast<int>(tool_rows.size());
          JetBatch seeds;
          seeds.d_dt.setZero(k);
          seeds.d2_dx2.setZero(k);
          for (int c = 0; c < k; ++c) {
            const double r = j.d_dt(c) / ts - mc.tool.a * j.d2_dx2(c) / (xs * xs);
            seeds.d_dt(c) = 2.0 * r / n / ts;
            seeds.d2_dx2(c) = -2.0 * r / n * mc.tool.a / (xs * xs);
          }
          g.head(nmn) = backward_jet_batch(m.net_T_minus, ws_minus, seeds);
        }
        if (!comp_rows.empty()) {
          ib.reset(static_cast<int>(comp_rows.size()));
          for (std::size_t i : comp_rows)
            ib.push(probe.interior_x[i], probe.interior_t[i],
                    zh_of(probe.interior_zeta, i));
          const JetBatch j =
              forward_jet_batch(m.net_T_plus, ib.X, full, ws_plus, true);
          JetChannels vdt;
          vdt.d_dt = true;
          const JetBatch ja =
              forward_jet_batch(m.net_alpha, ib.X, vdt, ws_frozen);
          const int k = static_cast<int>(comp_rows.size());
          JetBatch seeds;
          seeds.d_dt.setZero(k);
          seeds.d2_dx2.setZero(k);
          for (int c = 0; c < k; ++c) {
            const double r = j.d_dt(c) / ts - mc.comp.a * j.d2_dx2(c) / (xs * xs) -
                             mc.comp.b * ja.d_dt(c) / ts;
            seeds.d_dt(c) = 2.0 * r / n / ts;
            seeds.d2_dx2(c) = -2.0 * r / n * mc.comp.a / (xs * xs);
          }
          g.tail(npl) = backward_jet_batch(m.net_T_plus, ws_plus, seeds);
        }
        return g;
      }
      case 1: {  // initial condition
        std::vector<std::size_t> tool_rows, comp_rows;
        for (std::size_t i = 0; i < probe.initial_x.size(); ++i)
          (probe.initial_x[i] >= m.x_I ? comp_rows : tool_rows).push_back(i);
        const int n = static_cast<int>(probe.initial_x.size());
        if (n == 0) return g;
        auto target = [&](double x) {
          return sch.T0_profile ? sch.T0_profile(x) : m.config.T_init;
        };
        for (int side = 0; side < 2; ++side) {
          const auto& rows = side == 0 ? tool_rows : comp_rows;
          if (rows.empty()) continue;
          MlpParams& net = side == 0 ? m.net_T_minus : m.net_T_plus;
          MlpWorkspace& ws = side == 0 ? ws_minus : ws_plus;
          ib.reset(static_cast<int>(rows.size()));
          for (std::size_t i : rows)
            ib.push(probe.initial_x[i], 0.0, zh_of(probe.initial_zeta, i));
          const JetBatch j = forward_jet_batch(net, ib.X, {}, ws, true);
          JetBatch seeds;
          seeds.value.setZero(j.size());
          for (int c = 0; c < j.size(); ++c)
            seeds.value(c) =
                2.0 / n * (j.value(c) - target(probe.initial_x[rows[c]]));
          const Eigen::VectorXd gi = backward_jet_batch(net, ws, seeds);
          if (side == 0)
            g.head(nmn) = gi;
          else
            g.tail(npl) = gi;
        }
        return g;
      }
      case 2: {  // bottom boundary (minus net)
        const int n = static_cast<int>(probe.bc_lo_t.size());
        if (n == 0) return g;
        ib.reset(n);
        for (std::size_t i = 0; i < probe.bc_lo_t.size(); ++i)
          ib.push(0.0, probe.bc_lo_t[i], zh_of(probe.bc_lo_zeta, i));
        const JetBatch j = forward_jet_batch(m.net_T_minus, ib.X,
                                             convective ? vdx : JetChannels{},
                                             ws_minus, true);
        JetBatch seeds;
        seeds.value.setZero(n);
        if (convective) seeds.d_dx.setZero(n);
        for (int c = 0; c < n; ++c) {
          const double Ta = air_temperature(probe.bc_lo_t[c], m.config.cycle);
          if (convective) {
            const double h =
                m.norm.has_zeta ? probe.bc_lo_zeta[c] : m.config.bc.h_t;
            const double r = mc.k_t * j.d_dx(c) / xs - h * (j.value(c) - Ta);
            seeds.d_dx(c) = 2.0 * r / n * mc.k_t / xs;
            seeds.value(c) = -2.0 * r / n * h;
          } else {
            seeds.value(c) = 2.0 / n * (j.value(c) - Ta);
          }
        }
        g.head(nmn) = backward_jet_batch(m.net_T_minus, ws_minus, seeds);
        return g;
      }
      case 3: {  // top boundary (plus net)
        const int n = static_cast<int>(probe.bc_hi_t.size());
        if (n == 0) return g;
        ib.reset(n);
        for (std::size_t i = 0; i < probe.bc_hi_t.size(); ++i)
          ib.push(m.config.length(), probe.bc_hi_t[i],
                  zh_of(probe.bc_hi_zeta, i));
        const JetBatch j = forward_jet_batch(m.net_T_plus, ib.X,
                                             convective ? vdx : JetChannels{},
                                             ws_plus, true);
        JetBatch seeds;
        seeds.value.setZero(n);
        if (convective) seeds.d_dx.setZero(n);
        for (int c = 0; c < n; ++c) {
          const double Ta = air_temperature(probe.bc_hi_t[c], m.config.cycle);
          if (convective) {
            const double r =
                mc.k_c * j.d_dx(c) / xs - m.config.bc.h_c * (Ta - j.value(c));
            seeds.d_dx(c) = 2.0 * r / n * mc.k_c / xs;
            seeds.value(c) = 2.0 * r / n * m.config.bc.h_c;
          } else {
            seeds.value(c) = 2.0 / n * (j.value(c) - Ta);
          }
        }
        g.tail(npl) = backward_jet_batch(m.net_T_plus, ws_plus, seeds);
        return g;
      }
      case 4:
      case 5: {  // interface continuity / flux continuity
        const int n = static_cast<int>(probe.interface_t.size());
        if (n == 0) return g;
        ib.reset(n);
        for (std::size_t i = 0; i < probe.interface_t.size(); ++i)
          ib.push(m.x_I, probe.interface_t[i], zh_of(probe.interface_zeta, i));
        const JetBatch jm =
            forward_jet_batch(m.net_T_minus, ib.X, vdx, ws_minus, true);
        const JetBatch jp =
            forward_jet_batch(m.net_T_plus, ib.X, vdx, ws_plus, true);
        JetBatch sm, sp;
        if (term == 4) {
          sm.value.setZero(n);
          sp.value.setZero(n);
          for (int c = 0; c < n; ++c) {
            const double r = jp.value(c) - jm.value(c);
            sp.value(c) = 2.0 * r / n;
            sm.value(c) = -2.0 * r / n;
          }
        } else {
          sm.d_dx.setZero(n);
          sp.d_dx.setZero(n);
          for (int c = 0; c < n; ++c) {
            const double r = mc.k_t * jm.d_dx(c) / xs - mc.k_c * jp.d_dx(c) / xs;
            sm.d_dx(c) = 2.0 * r / n * mc.k_t / xs;
            sp.d_dx(c) = -2.0 * r / n * mc.k_c / xs;
          }
        }
        g.head(nmn) = backward_jet_batch(m.net_T_minus, ws_minus, sm);
        g.tail(npl) = backward_jet_batch(m.net_T_plus, ws_plus, sp);
        return g;
      }
      default: {  // labeled temperature data
        const int n = static_cast<int>(probe.data.size());
        if (n == 0) return g;
        std::vector<std::size_t> tool_rows, comp_rows;
        for (std::size_t i = 0; i < probe.data.size(); ++i)
          (probe.data[i].x >= m.x_I ? comp_rows : tool_rows).push_back(i);
        for (int side = 0; side < 2; ++side) {
          const auto& rows = side == 0 ? tool_rows : comp_rows;
          if (rows.empty()) continue;
          MlpParams& net = side == 0 ? m.net_T_minus : m.net_T_plus;
          MlpWorkspace& ws = side == 0 ? ws_minus : ws_plus;
          ib.reset(static_cast<int>(rows.size()));
          for (std::size_t i : rows)
            ib.push(probe.data[i].x, probe.data[i].t,
                    zeta_hat(m.norm, probe.data[i].zeta));
          const JetBatch j = forward_jet_batch(net, ib.X, {}, ws, true);
          JetBatch seeds;
          seeds.value.setZero(j.size());
          for (int c = 0; c < j.size(); ++c)
            seeds.value(c) =
                2.0 / n * (j.value(c) - probe.data[rows[c]].T_target);
          const Eigen::VectorXd gi = backward_jet_batch(net, ws, seeds);
          if (side == 0)
            g.head(nmn) = gi;
          else
            g.tail(npl) = gi;
        }
        return g;
      }
    }
  }

  void refresh_alpha_weights() {
    const Eigen::VectorXd g_main = alpha_term_grad(0);
    if (g_main.size() == 0) return;
    const double mx = g_main.cwiseAbs().maxCoeff();
    const Eigen::VectorXd g0 = alpha_term_grad(1);
    if (g0.size() > 0)
      weights.w_alpha0 = update_one_weight(weights.w_alpha0, mx,
                                           g0.cwiseAbs().mean(), weights.beta);
    if (!probe.data.empty()) {
      const Eigen::VectorXd gd = alpha_term_grad(2);
      if (gd.size() > 0)
        weights.w_data_alpha = update_one_weight(
            weights.w_data_alpha, mx, gd.cwiseAbs().mean(), weights.beta);
    }
  }

  void refresh_T_weights() {
    const Eigen::VectorXd g_main = temp_term_grad(0);
    const double mx = g_main.cwiseAbs().maxCoeff();
    auto apply = [&](double& w, int term) {
      const Eigen::VectorXd gi = temp_term_grad(term);
      if (gi.size() > 0)
        w = update_one_weight(w, mx, gi.cwiseAbs().mean(), weights.beta);
    };
    apply(weights.w_T0, 1);
    apply(weights.w_bc1, 2);
    apply(weights.w_bc2, 3);
    apply(weights.w_tau, 4);
    apply(weights.w_q, 5);
    if (!probe.data.empty()) apply(weights.w_data_T, 6);
  }

  // ----- epoch bookkeeping shared by both phases -----

  // Returns true when training should stop (early-stop threshold reached).
  bool end_epoch(char phase, double lr_used) {
    LossBreakdown l;
    try {
      l = probe_losses();
    } catch (const std::domain_error& e) {
      // A physically invalid network state (e.g. the positive-output layer
      // underflowing to 0 K after a parameter blow-up) is a divergence, not
      // a caller error.
      std::ostringstream os;
      os << "training diverged: " << e.what() << " at epoch "
         << global_epoch + 1 << " (" << (phase == 'a' ? "alpha" : "T")
         << " phase)";
      throw NumericsError(os.str());
    }
    ++global_epoch;
    HistoryRow row;
    row.epoch = global_epoch;
    row.phase = phase;
    row.losses = l;
    row.lr = lr_used;
    row.weights = weights;
    history.push_back(row);

    const double total = weighted_total(l, weights);
    if (!std::isfinite(total) || total > sch.divergence_threshold) {
      std::ostringstream os;
      os << "training diverged: weighted total " << total << " at epoch "
         << global_epoch << " (" << (phase == 'a' ? "alpha" : "T")
         << " phase)";
      throw NumericsError(os.str());
    }
    double& lr = phase == 'a' ? lr_alpha : lr_T;
    plateau_step(phase == 'a' ? pl_alpha : pl_T, phase_objective(l, phase), lr);
    if (sch.early_stop_total > 0.0 && total < sch.early_stop_total) return true;
    return false;
  }

  // ----- alpha phase -----

  void alpha_epoch(int iter, int epoch) {
    std::vector<std::int32_t> order = cs.comp_idx;
    std::mt19937_64 srng(mix_seed(seed, "shuffle-alpha", iter, epoch));
    shuffle_ints(order, srng);
    std::vector<std::int32_t> init_order = init_comp_idx;
    shuffle_ints(init_order, srng);
    std::vector<std::int32_t> data_order = data_alpha_idx;
    shuffle_ints(data_order, srng);
    std::mt19937_64 zrng(mix_seed(seed, "zeta-alpha", iter, epoch));

    const int n_total = static_cast<int>(order.size());
    const int steps = (n_total + sch.batch - 1) / sch.batch;
    const double ts = m.norm.t_scale;
    JetChannels vdt;
    vdt.d_dt = true;
    InputBuilder ib;
    ib.norm = &m.norm;
    ad_alpha.lr = lr_alpha;

    for (int s = 0; s < steps; ++s) {
      const int lo = s * sch.batch;
      const int hi = std::min(n_total, lo + sch.batch);
      const int n_i = hi - lo;
      const Slice sl_init =
          proportional_slice(static_cast<int>(init_order.size()), steps, s);
      const Slice sl_data =
          proportional_slice(static_cast<int>(data_order.size()), steps, s);
      const int n_ic = sl_init.size(), n_da = sl_data.size();

      ib.reset(n_i + n_ic + n_da);
      for (int c = lo; c < hi; ++c) {
        const std::int32_t p = order[c];
        ib.push(cs.interior_x[p], cs.interior_t[p],
                m.norm.has_zeta ? canonical(zrng) : 0.0);
      }
      for (int c = sl_init.lo; c < sl_init.hi; ++c)
        ib.push(cs.initial_x[init_order[c]], 0.0,
                m.norm.has_zeta ? canonical(zrng) : 0.0);
      for (int c = sl_data.lo; c < sl_data.hi; ++c) {
        const LabeledPoint& p = (*data)[data_order[c]];
        ib.push(p.x, p.t, zeta_hat(m.norm, p.zeta));
      }

      const JetBatch ja = forward_jet_batch(m.net_alpha, ib.X, vdt, ws_alpha,
                                            /*for_backward=*/true);
      // Frozen temperature values at the interior points (composite side).
      const JetBatch jT = forward_jet_batch(
          m.net_T_plus, ib.X.leftCols(n_i), JetChannels{}, ws_frozen);

      JetBatch seeds;
      seeds.value.setZero(ja.size());
      seeds.d_dt.setZero(ja.size());
      for (int c = 0; c < n_i; ++c) {
        const double a = ja.value(c), T = jT.value(c);
        if (!(T > 0.0))
          throw NumericsError(
              "training diverged: frozen temperature network produced a "
              "nonpositive value in the cure phase");
        const double r = ja.d_dt(c) / ts - cure_rate(a, T, m.config.kinetics);
        const double coef = 2.0 * r / n_i;
        seeds.value(c) = -coef * cure_rate_dalpha(a, T, m.config.kinetics);
        seeds.d_dt(c) = coef / ts;
      }
      for (int c = 0; c < n_ic; ++c) {
        const int col = n_i + c;
        seeds.value(col) = weights.w_alpha0 * 2.0 / n_ic *
                           (ja.value(col) - m.config.alpha0);
      }
      for (int c = 0; c < n_da; ++c) {
        const int col = n_i + n_ic + c;
        const LabeledPoint& p = (*data)[data_order[sl_data.lo + c]];
        seeds.value(col) =
            weights.w_data_alpha * 2.0 / n_da * (ja.value(col) - p.alpha_target);
      }

      const Eigen::VectorXd grad =
          backward_jet_batch(m.net_alpha, ws_alpha, seeds);
      ad_alpha.lr = lr_alpha;
      adam_step(m.net_alpha, grad, ad_alpha);
    }
  }

  // ----- temperature phase -----

  void temp_epoch(int iter, int epoch) {
    std::vector<std::int32_t> order = all_interior_idx;
    std::mt19937_64 srng(mix_seed(seed, "shuffle-T", iter, epoch));
    shuffle_ints(order, srng);
    std::vector<std::int32_t> init_t_order = init_tool_idx;
    shuffle_ints(init_t_order, srng);
    std::vector<std::int32_t> init_c_order = init_comp_idx;
    shuffle_ints(init_c_order, srng);
    std::vector<std::int32_t> bc_lo_order(cs.boundary_t.size()),
        bc_hi_order(cs.boundary_t.size());
    for (std::size_t i = 0; i < cs.boundary_t.size(); ++i)
      bc_lo_order[i] = bc_hi_order[i] = static_cast<std::int32_t>(i);
    shuffle_ints(bc_lo_order, srng);
    shuffle_ints(bc_hi_order, srng);
    std::vector<std::int32_t> iface_order(cs.interface_t.size());
    for (std::size_t i = 0; i < cs.interface_t.size(); ++i)
      iface_order[i] = static_cast<std::int32_t>(i);
    shuffle_ints(iface_order, srng);
    std::vector<std::int32_t> data_t_order = data_tool_idx;
    shuffle_ints(data_t_order, srng);
    std::vector<std::int32_t> data_c_order = data_comp_idx;
    shuffle_ints(data_c_order, srng);
    std::mt19937_64 zrng(mix_seed(seed, "zeta-T", iter, epoch));

    const int n_total = static_cast<int>(order.size());
    const int steps = (n_total + sch.batch - 1) / sch.batch;
    const double xs = m.norm.x_scale, ts = m.norm.t_scale;
    const bool convective = m.config.bc.kind == BcKind::Convective;
    const bool hz = m.norm.has_zeta;
    JetChannels full;
    full.d_dx = true;
    full.d_dt = true;
    full.d2_dx2 = true;
    JetChannels vdt;
    vdt.d_dt = true;
    InputBuilder ib_minus, ib_plus;
    ib_minus.norm = ib_plus.norm = &m.norm;

    std::vector<std::int32_t> slice_tool, slice_comp;
    std::vector<double> zt_tool, zt_comp, z_bc_lo;

    auto target_T0 = [&](double x) {
      return sch.T0_profile ? sch.T0_profile(x) : m.config.T_init;
    };

    for (int s = 0; s < steps; ++s) {
      const int lo = s * sch.batch;
      const int hi = std::min(n_total, lo + sch.batch);
      slice_tool.clear();
      slice_comp.clear();
      zt_tool.clear();
      zt_comp.clear();
      for (int c = lo; c < hi; ++c) {
        const std::int32_t p = order[c];
        const double z = hz ? canonical(zrng) : 0.0;
        if (cs.interior_x[p] >= m.x_I) {
          slice_comp.push_back(p);
          zt_comp.push_back(z);
        } else {
          slice_tool.push_back(p);
          zt_tool.push_back(z);
        }
      }
      const int n_int = hi - lo;
      const Slice sl_bc =
          proportional_slice(static_cast<int>(cs.boundary_t.size()), steps, s);
      const Slice sl_if = proportional_slice(
          static_cast<int>(cs.interface_t.size()), steps, s);
      const Slice sl_init_t =
          proportional_slice(static_cast<int>(init_t_order.size()), steps, s);
      const Slice sl_init_c =
          proportional_slice(static_cast<int>(init_c_order.size()), steps, s);
      const Slice sl_data_t =
          proportional_slice(static_cast<int>(data_t_order.size()), steps, s);
      const Slice sl_data_c =
          proportional_slice(static_cast<int>(data_c_order.size()), steps, s);
      const int n_bc = sl_bc.size(), n_if = sl_if.size();
      const int n_T0 = sl_init_t.size() + sl_init_c.size();
      const int n_data = sl_data_t.size() + sl_data_c.size();

      // minus columns: [interior tool | bc_lo | interface | initial tool |
      //                 data tool]
      const int m_int = static_cast<int>(slice_tool.size());
      ib_minus.reset(m_int + n_bc + n_if + sl_init_t.size() + sl_data_t.size());
      for (int c = 0; c < m_int; ++c)
        ib_minus.push(cs.interior_x[slice_tool[c]], cs.interior_t[slice_tool[c]],
                      zt_tool[c]);
      z_bc_lo.clear();
      for (int c = sl_bc.lo; c < sl_bc.hi; ++c) {
        const double z = hz ? canonical(zrng) : 0.0;
        z_bc_lo.push_back(hz ? m.norm.zeta_min + z * m.norm.zeta_span() : 0.0);
        ib_minus.push(0.0, cs.boundary_t[bc_lo_order[c]], z);
      }
      std::vector<double> z_if;
      for (int c = sl_if.lo; c < sl_if.hi; ++c) {
        const double z = hz ? canonical(zrng) : 0.0;
        z_if.push_back(z);
        ib_minus.push(m.x_I, cs.interface_t[iface_order[c]], z);
      }
      for (int c = sl_init_t.lo; c < sl_init_t.hi; ++c)
        ib_minus.push(cs.initial_x[init_t_order[c]], 0.0,
                      hz ? canonical(zrng) : 0.0);
      for (int c = sl_data_t.lo; c < sl_data_t.hi; ++c) {
        const LabeledPoint& p = (*data)[data_t_order[c]];
        ib_minus.push(p.x, p.t, zeta_hat(m.norm, p.zeta));
      }

      // plus columns: [interior comp | bc_hi | interface | initial comp |
      //                data comp]
      const int p_int = static_cast<int>(slice_comp.size());
      ib_plus.reset(p_int + n_bc + n_if + sl_init_c.size() + sl_data_c.size());
      for (int c = 0; c < p_int; ++c)
        ib_plus.push(cs.interior_x[slice_comp[c]], cs.interior_t[slice_comp[c]],
                     zt_comp[c]);
      for (int c = sl_bc.lo; c < sl_bc.hi; ++c)
        ib_plus.push(m.config.length(), cs.boundary_t[bc_hi_order[c]],
                     hz ? canonical(zrng) : 0.0);
      for (std::size_t c = 0; c < z_if.size(); ++c)
        ib_plus.push(m.x_I, cs.interface_t[iface_order[sl_if.lo + c]], z_if[c]);
      for (int c = sl_init_c.lo; c < sl_init_c.hi; ++c)
        ib_plus.push(cs.initial_x[init_c_order[c]], 0.0,
                     hz ? canonical(zrng) : 0.0);
      for (int c = sl_data_c.lo; c < sl_data_c.hi; ++c) {
        const LabeledPoint& p = (*data)[data_c_order[c]];
        ib_plus.push(p.x, p.t, zeta_hat(m.norm, p.zeta));
      }

      const JetBatch jm = forward_jet_batch(m.net_T_minus, ib_minus.X, full,
                                            ws_minus, /*for_backward=*/true);
      const JetBatch jp = forward_jet_batch(m.net_T_plus, ib_plus.X, full,
                                            ws_plus, /*for_backward=*/true);
      // Frozen cure-rate source at composite interior columns.
      const JetBatch ja = forward_jet_batch(
          m.net_alpha, ib_plus.X.leftCols(p_int), vdt, ws_frozen);

      JetBatch sm, sp;
      sm.value.setZero(jm.size());
      sm.d_dx.setZero(jm.size());
      sm.d_dt.setZero(jm.size());
      sm.d2_dx2.setZero(jm.size());
      sp.value.setZero(jp.size());
      sp.d_dx.setZero(jp.size());
      sp.d_dt.setZero(jp.size());
      sp.d2_dx2.setZero(jp.size());

      // interior residuals (mean over the whole interior slice)
      for (int c = 0; c < m_int; ++c) {
        const double r =
            jm.d_dt(c) / ts - mc.tool.a * jm.d2_dx2(c) / (xs * xs);
        sm.d_dt(c) = 2.0 * r / n_int / ts;
        sm.d2_dx2(c) = -2.0 * r / n_int * mc.tool.a / (xs * xs);
      }
      for (int c = 0; c < p_int; ++c) {
        const double r = jp.d_dt(c) / ts - mc.comp.a * jp.d2_dx2(c) / (xs * xs) -
                         mc.comp.b * ja.d_dt(c) / ts;
        sp.d_dt(c) = 2.0 * r / n_int / ts;
        sp.d2_dx2(c) = -2.0 * r / n_int * mc.comp.a / (xs * xs);
      }
      // boundary rows
      for (int c = 0; c < n_bc; ++c) {
        const int col_m = m_int + c;
        const double t_lo = cs.boundary_t[bc_lo_order[sl_bc.lo + c]];
        const double Ta_lo = air_temperature(t_lo, m.config.cycle);
        if (convective) {
          const double h = hz ? z_bc_lo[c] : m.config.bc.h_t;
          const double r =
              mc.k_t * jm.d_dx(col_m) / xs - h * (jm.value(col_m) - Ta_lo);
          sm.d_dx(col_m) += weights.w_bc1 * 2.0 * r / n_bc * mc.k_t / xs;
          sm.value(col_m) += -weights.w_bc1 * 2.0 * r / n_bc * h;
        } else {
          sm.value(col_m) +=
              weights.w_bc1 * 2.0 / n_bc * (jm.value(col_m) - Ta_lo);
        }
        const int col_p = p_int + c;
        const double t_hi = cs.boundary_t[bc_hi_order[sl_bc.lo + c]];
        const double Ta_hi = air_temperature(t_hi, m.config.cycle);
        if (convective) {
          const double r = mc.k_c * jp.d_dx(col_p) / xs -
                           m.config.bc.h_c * (Ta_hi - jp.value(col_p));
          sp.d_dx(col_p) += weights.w_bc2 * 2.0 * r / n_bc * mc.k_c / xs;
          sp.value(col_p) += weights.w_bc2 * 2.0 * r / n_bc * m.config.bc.h_c;
        } else {
          sp.value(col_p) +=
              weights.w_bc2 * 2.0 / n_bc * (jp.value(col_p) - Ta_hi);
        }
      }
      // interface rows
      for (int c = 0; c < n_if; ++c) {
        const int col_m = m_int + n_bc + c;
        const int col_p = p_int + n_bc + c;
        const double r_tau = jp.value(col_p) - jm.value(col_m);
        sp.value(col_p) += weights.w_tau * 2.0 * r_tau / n_if;
        sm.value(col_m) += -weights.w_tau * 2.0 * r_tau / n_if;
        const double r_q =
            mc.k_t * jm.d_dx(col_m) / xs - mc.k_c * jp.d_dx(col_p) / xs;
        sm.d_dx(col_m) += weights.w_q * 2.0 * r_q / n_if * mc.k_t / xs;
        sp.d_dx(col_p) += -weights.w_q * 2.0 * r_q / n_if * mc.k_c / xs;
      }
      // initial rows
      for (int c = 0; c < sl_init_t.size(); ++c) {
        const int col = m_int + n_bc + n_if + c;
        const double x = cs.initial_x[init_t_order[sl_init_t.lo + c]];
        sm.value(col) +=
            weights.w_T0 * 2.0 / n_T0 * (jm.value(col) - target_T0(x));
      }
      for (int c = 0; c < sl_init_c.size(); ++c) {
        const int col = p_int + n_bc + n_if + c;
        const double x = cs.initial_x[init_c_order[sl_init_c.lo + c]];
        sp.value(col) +=
            weights.w_T0 * 2.0 / n_T0 * (jp.value(col) - target_T0(x));
      }
      // labeled data rows
      for (int c = 0; c < sl_data_t.size(); ++c) {
        const int col = m_int + n_bc + n_if + sl_init_t.size() + c;
        const LabeledPoint& p = (*data)[data_t_order[sl_data_t.lo + c]];
        sm.value(col) +=
            weights.w_data_T * 2.0 / n_data * (jm.value(col) - p.T_target);
      }
      for (int c = 0; c < sl_data_c.size(); ++c) {
        const int col = p_int + n_bc + n_if + sl_init_c.size() + c;
        const LabeledPoint& p = (*data)[data_c_order[sl_data_c.lo + c]];
        sp.value(col) +=
            weights.w_data_T * 2.0 / n_data * (jp.value(col) - p.T_target);
      }

      const Eigen::VectorXd gm = backward_jet_batch(m.net_T_minus, ws_minus, sm);
      const Eigen::VectorXd gp = backward_jet_batch(m.net_T_plus, ws_plus, sp);
      ad_minus.lr = ad_plus.lr = lr_T;
      adam_step(m.net_T_minus, gm, ad_minus);
      adam_step(m.net_T_plus, gp, ad_plus);
    }
  }

  TrainResult run() {
    for (int iter = 0; iter < sch.iterations && !stop; ++iter) {
      if (sch.phases != PhaseSelect::TOnly) {
        if (sch.adaptive_weights) refresh_alpha_weights();
        for (int e = 0; e < sch.epochs_per_net && !stop; ++e) {
          const double lr_used = lr_alpha;
          alpha_epoch(iter, e);
          stop = end_epoch('a', lr_used);
        }
      }
      if (sch.phases != PhaseSelect::AlphaOnly && !stop) {
        if (sch.adaptive_weights) refresh_T_weights();
        for (int e = 0; e < sch.epochs_per_net && !stop; ++e) {
          const double lr_used = lr_T;
          temp_epoch(iter, e);
          stop = end_epoch('T', lr_used);
        }
      }
    }
    TrainResult res;
    res.history = std::move(history);
    res.final_weights = weights;
    res.stopped_early = stop;
    res.has_data_terms = data && !data->empty();
    return res;
  }
};

}  // namespace

TrainResult train_model(PinnModel& m, const TrainSchedule& schedule,
                        std::uint64_t seed,
                        const std::vector<LabeledPoint>* data) {
  Trainer tr(m, schedule, seed, data);
  return tr.run();
}

PinnModel train_sequential(const ProblemConfig& cfg,
                           const TrainSchedule& schedule, std::uint64_t seed,
                           TrainResult* result) {
  PinnModel m = init_pinn(cfg, seed);
  TrainResult r = train_model(m, schedule, seed);
  if (result) *result = std::move(r);
  return m;
}

// ---------- checkpoints / warm start ----------

namespace {

void describe_arch_mismatch(std::ostringstream& os, const char* net_name,
                            const MlpParams& expected, const MlpParams& got) {
  if (expected.widths == got.widths &&
      expected.hidden.kind == got.hidden.kind &&
      expected.output.kind == got.output.kind &&
      expected.output.param == got.output.param)
    return;
  os << " " << net_name << ":";
  const std::size_t n = std::max(expected.widths.size(), got.widths.size());
  for (std::size_t i = 0; i < n; ++i) {
    const int e = i < expected.widths.size() ? expected.widths[i] : -1;
    const int g = i < got.widths.size() ? got.widths[i] : -1;
    if (e != g) os << " layer " << i << " expects width " << e << " got " << g;
  }
  if (expected.output.kind != got.output.kind ||
      expected.output.param != got.output.param)
    os << " output activation differs";
  if (expected.hidden.kind != got.hidden.kind)
    os << " hidden activation differs";
}

}  // namespace

PinnModel warm_start(const std::string& alpha_ckpt,
                     const std::string& t_minus_ckpt,
                     const std::string& t_plus_ckpt,
                     const ProblemConfig& cfg) {
  std::optional<SurrogateMeta> meta_a, meta_m, meta_p;
  MlpParams a = load_checkpoint(alpha_ckpt, &meta_a);
  MlpParams tm = load_checkpoint(t_minus_ckpt, &meta_m);
  MlpParams tp = load_checkpoint(t_plus_ckpt, &meta_p);

  if (meta_a.has_value() != meta_m.has_value() ||
      meta_a.has_value() != meta_p.has_value())
    throw ArtifactError(
        "inconsistent surrogate metadata across checkpoint files");
  std::optional<ZetaRange> zeta;
  if (meta_a) {
    if (meta_a->zeta_min != meta_m->zeta_min ||
        meta_a->zeta_max != meta_m->zeta_max ||
        meta_a->zeta_min != meta_p->zeta_min ||
        meta_a->zeta_max != meta_p->zeta_max)
      throw ArtifactError("surrogate zeta ranges differ across checkpoints");
    zeta = ZetaRange{meta_a->zeta_min, meta_a->zeta_max};
  }

  PinnModel m = init_pinn(cfg, /*seed=*/0, zeta);
  std::ostringstream os;
  describe_arch_mismatch(os, "net_alpha", m.net_alpha, a);
  describe_arch_mismatch(os, "net_T_minus", m.net_T_minus, tm);
  describe_arch_mismatch(os, "net_T_plus", m.net_T_plus, tp);
  if (!os.str().empty())
    throw ArtifactError("checkpoint architecture mismatch:" + os.str());

  m.net_alpha = std::move(a);
  m.net_T_minus = std::move(tm);
  m.net_T_plus = std::move(tp);
  return m;
}

void save_pinn(const PinnModel& m, const std::string& dir,
               const std::string& stem) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::optional<SurrogateMeta> meta;
  if (m.norm.has_zeta) {
    SurrogateMeta sm;
    sm.param_id = "h_t";
    sm.zeta_min = m.norm.zeta_min;
    sm.zeta_max = m.norm.zeta_max;
    sm.x_scale = m.norm.x_scale;
    sm.t_scale = m.norm.t_scale;
    meta = sm;
  }
  auto write_atomic = [&](const MlpParams& p, const std::string& name) {
    const fs::path final_path = fs::path(dir) / name;
    const fs::path tmp_path = fs::path(dir) / (name + ".tmp");
    save_checkpoint(tmp_path.string(), p, meta);
    fs::rename(tmp_path, final_path);
  };
  write_atomic(m.net_alpha, stem + "_alpha.ckpt");
  write_atomic(m.net_T_minus, stem + "_tminus.ckpt");
  write_atomic(m.net_T_plus, stem + "_tplus.ckpt");
}

PinnModel load_pinn(const std::string& dir, const std::string& stem,
                    const ProblemConfig& cfg) {
  namespace fs = std::filesystem;
  const fs::path base(dir);
  return warm_start((base / (stem + "_alpha.ckpt")).string(),
                    (base / (stem + "_tminus.ckpt")).string(),
                    (base / (stem + "_tplus.ckpt")).string(), cfg);
}

void write_history_csv(const std::string& path,
                       const std::vector<HistoryRow>& rows,
                       bool data_columns) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw ArtifactError("cannot open history file for writing: " + path);
  std::fputs(
      "epoch,phase,L_alpha,L_T,L_alpha0,L_T0,L_bc1,L_bc2,L_tau,L_q,lr,"
      "w_alpha0,w_T0,w_bc1,w_bc2,w_tau,w_q",
      f);
  if (data_columns) std::fputs(",L_data_T,L_data_alpha,w_data_T,w_data_alpha", f);
  std::fputc('\n', f);
  for (const HistoryRow& r : rows) {
    std::fprintf(f, "%d,%s", r.epoch, r.phase == 'a' ? "alpha" : "T");
    const LossBreakdown& l = r.losses;
    const LossWeights& w = r.weights;
    const double base_vals[] = {l.L_alpha, l.L_T,   l.L_alpha0, l.L_T0,
                                l.L_bc1,   l.L_bc2, l.L_tau,    l.L_q,
                                r.lr,      w.w_alpha0, w.w_T0,  w.w_bc1,
                                w.w_bc2,   w.w_tau, w.w_q};
    for (double v : base_vals) std::fprintf(f, ",%.17g", v);
    if (data_columns)
      std::fprintf(f, ",%.17g,%.17g,%.17g,%.17g", l.L_data_T, l.L_data_alpha,
                   w.w_data_T, w.w_data_alpha);
    std::fputc('\n', f);
  }
  if (std::fclose(f) != 0)
    throw ArtifactError("failed to finalize history file: " + path);
}

}  // namespace curepinn
