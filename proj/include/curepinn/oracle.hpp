#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "curepinn/physics.hpp"

namespace curepinn {

/// Finite-difference discretization. Cell counts are intervals per region, so
/// the node total is cells_tool + cells_comp + 1 with the interface node
/// shared (e.g. 32+32 cells -> 65 nodes).
struct GridSpec {
  int cells_tool = 32;
  int cells_comp = 32;
  int time_steps = 4000;
  int cure_substeps = 0;      // RK4 substeps per time step; 0 = automatic
  bool strang_split = false;  // alternate half-diffusion/cure/half-diffusion coupling
};

/// Dense space-time fields on the solver grid. alpha is NaN at pure tool
/// nodes (indices < interface_node); the interface node belongs to the
/// composite side.
struct FieldGrid {
  std::vector<double> x;  // node coordinates [m], includes both faces
  std::vector<double> t;  // time levels [s], includes t = 0
  int interface_node = 0;
  Eigen::MatrixXd T;      // nodes x times [K]
  Eigen::MatrixXd alpha;  // nodes x times, NaN on tool-only nodes

  int nx() const { return static_cast<int>(x.size()); }
  int nt() const { return static_cast<int>(t.size()); }
};

/// Hooks for manufactured-solution and study runs.
struct SolveOverrides {
  std::function<double(double)> T0_profile;  // initial T(x); default uniform T_init
  bool freeze_cure = false;                  // hold alpha at alpha0 throughout
};

/// Crank-Nicolson bi-material solve of the coupled heat/cure system.
/// The interface node carries an algebraic flux-continuity row built from
/// second-order one-sided differences weighted by the regional conductivities;
/// boundary rows pin T to the air temperature (prescribed) or encode the
/// convective balance with second-order one-sided gradients. The cure ODE is
/// advanced per time step with explicit RK4 at the node's start-of-step
/// temperature, substepped for accuracy.
FieldGrid solve_fd(const ProblemConfig& cfg, const GridSpec& grid,
                   const SolveOverrides* overrides = nullptr);

struct CureTable {
  std::vector<double> t;
  std::vector<double> alpha;
};

/// High-accuracy isothermal cure reference: adaptive Dormand-Prince
/// integration of d(alpha)/dt = g(alpha, T_const) at relative tolerance 1e-10.
CureTable isothermal_cure(double T_const, double alpha0, double t_end,
                          const KineticsParams& kinetics, int samples = 2001);

enum class Refine { Space, Time, Both };

/// Successive-refinement study: solves at the base grid and `levels-1`
/// doublings, measuring max-norm temperature differences on the shared coarse
/// nodes/times. observed_order is the Richardson estimate from the last pair.
struct ConvergenceResult {
  std::vector<double> diffs;  // levels-1 entries
  double observed_order = 0.0;
  bool monotone = true;  // false when refinement did not shrink differences
};

ConvergenceResult convergence_study(const ProblemConfig& cfg, const GridSpec& base,
                                    int levels, Refine what,
                                    const SolveOverrides* overrides = nullptr);

/// CSV export: header `x_m,t_s,T_K,alpha`, one row per node-time pair,
/// t-major order, doubles at full precision, `nan` for absent alpha.
void write_field_csv(const std::string& path, const FieldGrid& fields);
FieldGrid read_field_csv(const std::string& path);

}  // namespace curepinn
