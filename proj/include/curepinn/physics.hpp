#pragma once

#include <optional>
#include <string>

namespace curepinn {

/// Cure kinetics parameters of the resin reaction model.
/// Rate law: g(a, T) = A * exp(-dE / (R*T)) / (1 + exp(C*(a - CT*T - C0))) * a^M * (1-a)^N
/// With literal_denominator = true the leading 1 in the denominator is dropped,
/// i.e. the diffusion factor becomes exp(-C*(a - CT*T - C0)).
struct KineticsParams {
  double A = 1.528e5;    // pre-exponential factor [1/s]
  double dE = 6.650e4;   // activation energy [J/mol]
  double M = 0.8129;     // first reaction order exponent
  double N = 2.7360;     // second reaction order exponent
  double C = 43.09;      // diffusion constant
  double C0 = -1.6840;   // critical degree of cure at T = 0 K
  double CT = 5.475e-3;  // critical-cure temperature slope [1/K]
  double R = 8.314;      // universal gas constant [J/(mol K)]
  bool literal_denominator = false;
};

/// Properties of one constituent of the composite (fibre or resin).
struct ConstituentProps {
  double nu = 0.0;   // volume fraction
  double rho = 0.0;  // density [kg/m^3]
  double k = 0.0;    // thermal conductivity [W/(m K)]
  double cp = 0.0;   // specific heat capacity [J/(kg K)]
};

/// Homogeneous tool material.
struct ToolProps {
  double rho = 8150.0;  // [kg/m^3]
  double k = 13.0;      // [W/(m K)]
  double cp = 510.0;    // [J/(kg K)]
};

/// Effective coefficients of the heat equation dT/dt = a * d2T/dx2 + b * da/dt
/// in one material region (b = 0 in the tool, which hosts no resin).
struct EffectiveMaterial {
  double rho = 0.0;  // [kg/m^3]
  double cp = 0.0;   // [J/(kg K)]
  double k = 0.0;    // [W/(m K)]
  double a = 0.0;    // diffusivity k/(rho*cp) [m^2/s]
  double b = 0.0;    // exotherm coupling nu_r*rho_r*Hr/(rho*cp) [K]
};

/// Piecewise-linear air/autoclave temperature cycle:
/// ramp T0 -> Th over [0, t_hs], hold Th over [t_hs, t_he],
/// ramp Th -> T_end over [t_he, t_e], constant T_end afterwards.
struct CureCycle {
  double T0 = 293.0;       // [K]
  double Th = 453.0;       // [K]
  double t_hs = 3120.0;    // heat-up end [s]
  double t_he = 10320.0;   // hold end [s]
  double t_e = 13320.0;    // cycle end [s]
  double T_end = 293.0;    // [K]
};

enum class BcKind { Prescribed, Convective };

/// Boundary handling at x = 0 (tool bottom) and x = L (composite top).
/// Prescribed: T = T_air(t) on both faces.
/// Convective: h_t*(T(0,t) - T_air) = k_tool * dT/dx(0,t)
///             h_c*(T_air - T(L,t)) = k_comp * dT/dx(L,t)
struct BoundarySpec {
  BcKind kind = BcKind::Prescribed;
  double h_t = 0.0;  // film coefficient, tool face [W/(m^2 K)]
  double h_c = 0.0;  // film coefficient, composite face [W/(m^2 K)]
};

/// Full problem description for the bi-material slab [0, Lt] (tool) and
/// [Lt, Lt+Lc] (composite). All fields are SI after validation.
struct ProblemConfig {
  double Lt = 0.02;  // tool thickness [m]
  double Lc = 0.03;  // composite thickness [m]

  ConstituentProps fibre{0.574, 1790.0, 3.960, 914.0};
  ConstituentProps resin{0.426, 1300.0, 0.212, 1304.2};
  ToolProps tool{};
  double Hr = 540.0e3;  // total heat of reaction per unit resin mass [J/kg]
  std::optional<double> k_composite_override;  // bypass the conductivity mixture rule

  KineticsParams kinetics{};
  CureCycle cycle{};
  BoundarySpec bc{};

  double T_init = 293.0;   // uniform initial temperature [K]
  double alpha0 = 0.01;    // initial degree of cure (also the cure net floor)

  double x_interface() const { return Lt; }
  double length() const { return Lt + Lc; }
};

/// Cure reaction rate g(alpha, T) [1/s]. Throws std::domain_error outside
/// alpha in [0, 1] or T <= 0.
double cure_rate(double alpha, double T, const KineticsParams& p);

/// Partial derivative of cure_rate with respect to alpha.
double cure_rate_dalpha(double alpha, double T, const KineticsParams& p);

/// As cure_rate but clamps alpha into [eps, 1] first; safe for ODE stages
/// that may overshoot the admissible interval. Returns 0 at/above alpha = 1.
double cure_rate_clamped(double alpha, double T, const KineticsParams& p);

/// Effective composite-region material from fibre/resin constituents.
/// rho and cp follow volume- and mass-fraction mixture rules; k follows the
/// cylindrical-fibre conduction model. k_override, when given, replaces the
/// mixture conductivity.
EffectiveMaterial effective_composite_props(const ConstituentProps& fibre,
                                            const ConstituentProps& resin,
                                            double Hr,
                                            std::optional<double> k_override = {});

/// Effective tool-region material (no heat source: b = 0).
EffectiveMaterial effective_tool_props(const ToolProps& tool);

/// Air temperature of the cure cycle at time t [s].
double air_temperature(double t, const CureCycle& cycle);

/// Checks physical invariants and normalizes nothing (input must be SI);
/// throws ConfigError naming the violated constraint.
void validate_config(const ProblemConfig& cfg);

}  // namespace curepinn
