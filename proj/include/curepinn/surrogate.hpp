#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "curepinn/oracle.hpp"
#include "curepinn/physics.hpp"
#include "curepinn/pinn.hpp"

namespace curepinn {

/// Range of the parametric input (the tool-face film coefficient) for
/// surrogate training, plus the anchor values where labeled oracle data is
/// generated. zeta_colloc = 0 keeps the default policy of one fresh uniform
/// draw per interior batch point.
struct SurrogateRange {
  std::string param_id = "h_t";
  double min = 40.0;   // [W/(m^2 K)]
  double max = 80.0;   // [W/(m^2 K)]
  std::vector<double> anchors = {50.0, 60.0, 70.0};
  int zeta_colloc = 0;
};

/// Throws ConfigError unless min < max and every anchor lies in [min, max].
void validate_surrogate_range(const SurrogateRange& range);

/// Labeled (x, t, zeta, T, alpha) tuples produced by an oracle solve;
/// alpha_target is NaN for tool-region points.
struct LabeledDataset {
  std::vector<LabeledPoint> points;
  std::string source = "oracle";
};

/// One oracle solve per anchor (with the anchor substituted as h_t), then a
/// uniform random subsample of `per_anchor` node-time cells from each solve.
/// Deterministic in `seed`. Requires a convective-boundary config.
LabeledDataset generate_labeled_data(const ProblemConfig& cfg,
                                     const SurrogateRange& range,
                                     const GridSpec& grid,
                                     int per_anchor = 2000,
                                     std::uint64_t seed = 0);

/// init_pinn with the parametric input spanning `range`, then train_model
/// with the labeled data joining the loss. An empty dataset trains on physics
/// terms alone. Requires a convective-boundary config; validates the dataset
/// against the domain and range.
PinnModel train_surrogate(const ProblemConfig& cfg, const SurrogateRange& range,
                          const LabeledDataset& data,
                          const TrainSchedule& schedule, std::uint64_t seed,
                          TrainResult* result = nullptr);

/// One composed forward pass at physical (x, t, zeta). `extrapolated` flags
/// zeta outside the trained range (the evaluation still runs). alpha is NaN
/// at tool-region points.
struct SurrogateEval {
  double T = 0.0;
  double alpha = 0.0;
  bool extrapolated = false;
};
SurrogateEval eval_surrogate(const PinnModel& m, double x, double t,
                             double zeta);

/// Evaluate a model over an explicit node/time grid into the oracle field
/// layout (alpha = NaN on pure tool nodes, interface node composite-side).
FieldGrid sample_model_grid(const PinnModel& m, const std::vector<double>& x,
                            const std::vector<double>& t,
                            std::optional<double> zeta = {});

/// Maximum of T_air(t) - T(0, t) over the heat-up/hold window [0, t_he] and
/// the time where it occurs. Prescribed boundaries pin the face to the air
/// temperature, so their lag is identically zero.
struct ThermalLag {
  double lag_K = 0.0;
  double t_at_max = 0.0;
};
ThermalLag thermal_lag(const FieldGrid& fields, const ProblemConfig& cfg);
ThermalLag thermal_lag(const PinnModel& m, std::optional<double> zeta = {},
                       int samples = 2001);

/// Arg-max of temperature over composite-region nodes and all time levels.
struct Exotherm {
  double T_max = 0.0;
  double x_at = 0.0;
  double t_at = 0.0;
};
Exotherm exotherm(const FieldGrid& fields);

}  // namespace curepinn
