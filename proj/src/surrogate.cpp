#include "curepinn/surrogate.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "curepinn/errors.hpp"

namespace curepinn {

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed ^ (salt * 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double canonical(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void require_convective(const ProblemConfig& cfg, const char* what) {
  if (cfg.bc.kind != BcKind::Convective)
    throw ConfigError(std::string(what) +
                      " requires a convective-boundary config");
}

}  // namespace

void validate_surrogate_range(const SurrogateRange& range) {
  if (!(range.min < range.max)) {
    std::ostringstream os;
    os << "surrogate range must satisfy min < max (got " << range.min
       << " >= " << range.max << ")";
    throw ConfigError(os.str());
  }
  for (double a : range.anchors)
    if (!(a >= range.min && a <= range.max)) {
      std::ostringstream os;
      os << "surrogate anchor " << a << " outside range [" << range.min << ", "
         << range.max << "]";
      throw ConfigError(os.str());
    }
  if (range.zeta_colloc < 0)
    throw ConfigError("surrogate zeta_colloc must be non-negative");
}

LabeledDataset generate_labeled_data(const ProblemConfig& cfg,
                                     const SurrogateRange& range,
                                     const GridSpec& grid, int per_anchor,
                                     std::uint64_t seed) {
  require_convective(cfg, "labeled-data generation");
  validate_surrogate_range(range);
  if (per_anchor <= 0)
    throw ConfigError("labeled-data count per anchor must be positive");

  LabeledDataset out;
  out.points.reserve(range.anchors.size() * static_cast<std::size_t>(per_anchor));
  for (std::size_t ai = 0; ai < range.anchors.size(); ++ai) {
    ProblemConfig anchored = cfg;
    anchored.bc.h_t = range.anchors[ai];
    const FieldGrid f = solve_fd(anchored, grid);

    std::mt19937_64 rng(mix(seed, ai + 1));
    for (int s = 0; s < per_anchor; ++s) {
      const int i =
          std::min(f.nx() - 1, static_cast<int>(canonical(rng) * f.nx()));
      const int j =
          std::min(f.nt() - 1, static_cast<int>(canonical(rng) * f.nt()));
      LabeledPoint p;
      p.x = f.x[static_cast<std::size_t>(i)];
      p.t = f.t[static_cast<std::size_t>(j)];
      p.zeta = range.anchors[ai];
      p.T_target = f.T(i, j);
      p.alpha_target = f.alpha(i, j);
      out.points.push_back(p);
    }
  }
  return out;
}

PinnModel train_surrogate(const ProblemConfig& cfg, const SurrogateRange& range,
                          const LabeledDataset& data,
                          const TrainSchedule& schedule, std::uint64_t seed,
                          TrainResult* result) {
  require_convective(cfg, "surrogate training");
  validate_surrogate_range(range);
  for (const LabeledPoint& p : data.points) {
    if (!std::isfinite(p.T_target))
      throw ConfigError("labeled T target must be finite");
    if (std::isfinite(p.alpha_target) &&
        (p.alpha_target < 0.0 || p.alpha_target > 1.0))
      throw ConfigError("labeled alpha target must lie in [0, 1]");
    if (p.x < 0.0 || p.x > cfg.length() || p.t < 0.0 || p.t > cfg.cycle.t_e)
      throw ConfigError("labeled point outside the space-time domain");
    if (p.zeta < range.min || p.zeta > range.max)
      throw ConfigError("labeled point zeta outside the surrogate range");
  }

  PinnModel m = init_pinn(cfg, seed, ZetaRange{range.min, range.max});
  TrainResult r = train_model(m, schedule, seed, &data.points);
  if (result) *result = std::move(r);
  return m;
}

SurrogateEval eval_surrogate(const PinnModel& m, double x, double t,
                             double zeta) {
  const ComposedPoint c = compose_fields(m, x, t, zeta);
  SurrogateEval out;
  out.T = c.T.value;
  out.alpha = c.has_alpha ? c.alpha.value : std::nan("");
  out.extrapolated = zeta < m.norm.zeta_min || zeta > m.norm.zeta_max;
  return out;
}

FieldGrid sample_model_grid(const PinnModel& m, const std::vector<double>& x,
                            const std::vector<double>& t,
                            std::optional<double> zeta) {
  FieldGrid f;
  f.x = x;
  f.t = t;
  f.interface_node = 0;
  while (f.interface_node < static_cast<int>(x.size()) &&
         x[static_cast<std::size_t>(f.interface_node)] < m.x_I)
    ++f.interface_node;
  f.T.resize(f.nx(), f.nt());
  f.alpha.resize(f.nx(), f.nt());
  for (int i = 0; i < f.nx(); ++i)
    for (int j = 0; j < f.nt(); ++j) {
      const ComposedPoint c = compose_fields(m, x[static_cast<std::size_t>(i)],
                                             t[static_cast<std::size_t>(j)],
                                             zeta);
      f.T(i, j) = c.T.value;
      f.alpha(i, j) = c.has_alpha ? c.alpha.value : std::nan("");
    }
  return f;
}

ThermalLag thermal_lag(const FieldGrid& fields, const ProblemConfig& cfg) {
  ThermalLag out;
  if (cfg.bc.kind == BcKind::Prescribed) return out;
  for (int j = 0; j < fields.nt(); ++j) {
    const double t = fields.t[static_cast<std::size_t>(j)];
    if (t > cfg.cycle.t_he) break;
    const double lag = air_temperature(t, cfg.cycle) - fields.T(0, j);
    if (lag > out.lag_K) {
      out.lag_K = lag;
      out.t_at_max = t;
    }
  }
  return out;
}

ThermalLag thermal_lag(const PinnModel& m, std::optional<double> zeta,
                       int samples) {
  ThermalLag out;
  if (m.config.bc.kind == BcKind::Prescribed) return out;
  if (samples < 2) throw std::invalid_argument("thermal_lag needs >= 2 samples");
  for (int j = 0; j < samples; ++j) {
    const double t = m.config.cycle.t_he * j / (samples - 1);
    const double T0 = compose_fields(m, 0.0, t, zeta).T.value;
    const double lag = air_temperature(t, m.config.cycle) - T0;
    if (lag > out.lag_K) {
      out.lag_K = lag;
      out.t_at_max = t;
    }
  }
  return out;
}

Exotherm exotherm(const FieldGrid& fields) {
  Exotherm out;
  out.T_max = -std::numeric_limits<double>::infinity();
  for (int i = fields.interface_node; i < fields.nx(); ++i)
    for (int j = 0; j < fields.nt(); ++j)
      if (fields.T(i, j) > out.T_max) {
        out.T_max = fields.T(i, j);
        out.x_at = fields.x[static_cast<std::size_t>(i)];
        out.t_at = fields.t[static_cast<std::size_t>(j)];
      }
  return out;
}

}  // namespace curepinn
