#include "curepinn/physics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "curepinn/errors.hpp"

namespace curepinn {

namespace {

// Overflow-safe logistic 1/(1+exp(-x)).
double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Diffusion denominator D(alpha,T); literal form drops the leading 1.
double diffusion_denominator(double alpha, double T, const KineticsParams& p) {
  const double u = p.C * (alpha - p.CT * T - p.C0);
  if (p.literal_denominator) return std::exp(u);
  // 1 + exp(u), computed without overflow for large u.
  if (u > 700.0) return std::exp(u);  // the +1 is negligible far before exp overflows
  return 1.0 + std::exp(u);
}

}  // namespace

double cure_rate(double alpha, double T, const KineticsParams& p) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::domain_error("cure_rate: alpha must lie in [0, 1]");
  if (!(T > 0.0)) throw std::domain_error("cure_rate: T must be positive");
  if (alpha == 0.0) return 0.0;  // a^M with M < 1 is 0 at a = 0
  const double arrhenius = p.A * std::exp(-p.dE / (p.R * T));
  const double shape = std::pow(alpha, p.M) * std::pow(1.0 - alpha, p.N);
  return arrhenius / diffusion_denominator(alpha, T, p) * shape;
}

double cure_rate_dalpha(double alpha, double T, const KineticsParams& p) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("cure_rate_dalpha: alpha must lie in (0, 1)");
  if (!(T > 0.0)) throw std::domain_error("cure_rate_dalpha: T must be positive");
  const double g = cure_rate(alpha, T, p);
  // d/da log D = C * sigma(u) for D = 1 + exp(u); = C for D = exp(u).
  const double u = p.C * (alpha - p.CT * T - p.C0);
  const double dlogD = p.literal_denominator ? p.C : p.C * logistic(u);
  return g * (p.M / alpha - p.N / (1.0 - alpha) - dlogD);
}

double cure_rate_clamped(double alpha, double T, const KineticsParams& p) {
  if (alpha >= 1.0) return 0.0;
  return cure_rate(std::max(alpha, 0.0), T, p);
}

EffectiveMaterial effective_composite_props(const ConstituentProps& fibre,
                                            const ConstituentProps& resin,
                                            double Hr,
                                            std::optional<double> k_override) {
  EffectiveMaterial m;
  m.rho = fibre.nu * fibre.rho + resin.nu * resin.rho;
  m.cp = fibre.nu * fibre.cp + resin.nu * resin.cp;

  if (k_override) {
    m.k = *k_override;
  } else {
    // Transverse conductivity of a square array of cylindrical fibres in resin.
    const double gamma = 2.0 * (resin.k / fibre.k - 1.0);
    const double omega = std::sqrt(fibre.nu / M_PI);
    const double ups = std::sqrt(1.0 - gamma * gamma * omega * omega);
    m.k = resin.k * ((1.0 - 2.0 * omega) +
                     (1.0 / gamma) *
                         (M_PI - (4.0 / ups) * std::atan(ups / (1.0 + omega * gamma))));
  }

  m.a = m.k / (m.rho * m.cp);
  m.b = resin.nu * resin.rho * Hr / (m.rho * m.cp);
  return m;
}

EffectiveMaterial effective_tool_props(const ToolProps& tool) {
  EffectiveMaterial m;
  m.rho = tool.rho;
  m.cp = tool.cp;
  m.k = tool.k;
  m.a = m.k / (m.rho * m.cp);
  m.b = 0.0;
  return m;
}

double air_temperature(double t, const CureCycle& c) {
  if (t <= 0.0) return c.T0;
  if (t < c.t_hs) return c.T0 + (c.Th - c.T0) * (t / c.t_hs);
  if (t < c.t_he) return c.Th;
  if (t < c.t_e) return c.Th + (c.T_end - c.Th) * ((t - c.t_he) / (c.t_e - c.t_he));
  return c.T_end;
}

void validate_config(const ProblemConfig& cfg) {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(cfg.Lt > 0.0, "tool thickness must be positive");
  require(cfg.Lc > 0.0, "composite thickness must be positive");
  require(cfg.fibre.nu > 0.0 && cfg.fibre.nu < 1.0,
          "fibre volume fraction must lie in (0, 1)");
  require(cfg.resin.nu > 0.0 && cfg.resin.nu < 1.0,
          "resin volume fraction must lie in (0, 1)");
  require(std::abs(cfg.fibre.nu + cfg.resin.nu - 1.0) < 1e-9,
          "fibre and resin volume fractions must sum to 1");
  require(cfg.fibre.rho > 0.0 && cfg.resin.rho > 0.0 && cfg.tool.rho > 0.0,
          "densities must be positive");
  require(cfg.fibre.k > 0.0 && cfg.resin.k > 0.0 && cfg.tool.k > 0.0,
          "conductivities must be positive");
  require(cfg.fibre.cp > 0.0 && cfg.resin.cp > 0.0 && cfg.tool.cp > 0.0,
          "heat capacities must be positive");
  require(cfg.Hr >= 0.0, "heat of reaction must be non-negative");
  if (cfg.k_composite_override)
    require(*cfg.k_composite_override > 0.0,
            "composite conductivity override must be positive");

  require(cfg.kinetics.A > 0.0, "kinetic pre-exponential factor must be positive");
  require(cfg.kinetics.dE > 0.0, "activation energy must be positive");
  require(cfg.kinetics.R > 0.0, "gas constant must be positive");
  require(cfg.kinetics.M > 0.0 && cfg.kinetics.N > 0.0,
          "reaction order exponents must be positive");

  require(cfg.cycle.T0 > 0.0 && cfg.cycle.Th > 0.0 && cfg.cycle.T_end > 0.0,
          "cycle temperatures must be positive (kelvin)");
  require(cfg.cycle.t_hs > 0.0, "heat-up end time must be positive");
  require(cfg.cycle.t_he > cfg.cycle.t_hs,
          "hold end time must exceed heat-up end time");
  require(cfg.cycle.t_e > cfg.cycle.t_he, "cycle end time must exceed hold end time");

  if (cfg.bc.kind == BcKind::Convective) {
    require(cfg.bc.h_t > 0.0 && cfg.bc.h_c > 0.0,
            "convective film coefficients must be positive");
  }

  require(cfg.T_init > 0.0, "initial temperature must be positive (kelvin)");
  require(cfg.alpha0 > 0.0 && cfg.alpha0 < 1.0,
          "initial degree of cure must lie in (0, 1)");

  // The mixture conductivity model must produce a physical value.
  const EffectiveMaterial comp = effective_composite_props(
      cfg.fibre, cfg.resin, cfg.Hr, cfg.k_composite_override);
  require(comp.k > 0.0, "effective composite conductivity must be positive");
}

}  // namespace curepinn
