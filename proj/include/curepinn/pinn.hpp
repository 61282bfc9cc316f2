#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "curepinn/net.hpp"
#include "curepinn/physics.hpp"

namespace curepinn {

/// Input normalization applied before every network evaluation. Networks see
/// x_hat = x / x_scale, t_hat = t / t_scale and (for parametric surrogates)
/// zeta_hat = (zeta - zeta_min) / (zeta_max - zeta_min); outputs stay in
/// physical units and derivative channels are chain-ruled back at the loss
/// layer.
struct Normalization {
  double x_scale = 1.0;
  double t_scale = 1.0;
  bool has_zeta = false;
  double zeta_min = 0.0;
  double zeta_max = 1.0;

  double zeta_span() const { return zeta_max - zeta_min; }
};

/// Bi-material model: one cure network over the composite and a temperature
/// network per material region, joined at x_I with the convention that the
/// interface point itself belongs to the composite-side networks.
struct PinnModel {
  MlpParams net_alpha;    // composite region only, output in (alpha0, 1)
  MlpParams net_T_minus;  // tool region x < x_I, output in Kelvin
  MlpParams net_T_plus;   // composite region x >= x_I, output in Kelvin
  double x_I = 0.0;
  Normalization norm;
  ProblemConfig config;
};

/// Fresh Glorot-initialized model for `cfg`. When `zeta` is supplied the
/// networks take a third parametric input spanning the given physical range.
struct ZetaRange {
  double min = 40.0;
  double max = 80.0;
};
PinnModel init_pinn(const ProblemConfig& cfg, std::uint64_t seed,
                    const std::optional<ZetaRange>& zeta = {});

/// Composed physical-unit jets at one point. `alpha` is populated only in the
/// composite region.
struct ComposedPoint {
  EvalJet T;
  EvalJet alpha;
  bool has_alpha = false;
};

/// Evaluate the composed fields at physical (x, t[, zeta]). Temperature comes
/// from exactly one regional network selected by x (interface -> composite
/// side). Requesting `alpha` implicitly happens for x >= x_I; temperatures are
/// defined everywhere. Throws std::domain_error for out-of-domain x or t and
/// std::invalid_argument when the zeta argument does not match the model.
ComposedPoint compose_fields(const PinnModel& m, double x, double t,
                             std::optional<double> zeta = {});

/// Cure-rate residual d(alpha)/dt - g(alpha, T) at a composite-region point.
/// Throws std::domain_error in the tool region.
double residual_alpha(const PinnModel& m, double x, double t,
                      std::optional<double> zeta = {});

/// Heat residual dT/dt - a d2T/dx2 - b d(alpha)/dt with b = 0 in the tool.
double residual_temperature(const PinnModel& m, double x, double t,
                            std::optional<double> zeta = {});

/// Collocation sizes. Interior points form an nx-by-nt grid of cell centers
/// (all strictly inside the open domain); the other sets are uniform cell
/// centers over their own 1-D ranges.
struct CollocationCounts {
  int nx = 500;
  int nt = 1000;
  int n_initial = 10000;
  int n_boundary = 5000;   // per boundary
  int n_interface = 1000;
};

/// Deterministic collocation sets. Interior indices are split by material
/// region (interface convention: x >= x_I is composite).
struct CollocationSet {
  std::vector<double> interior_x, interior_t;   // nx*nt points, x-major
  std::vector<std::int32_t> tool_idx, comp_idx; // region split of interior
  std::vector<double> initial_x;                // t = 0
  std::vector<double> boundary_t;               // shared by both boundaries
  std::vector<double> interface_t;              // x = x_I
};
CollocationSet sample_collocation(const ProblemConfig& cfg,
                                  const CollocationCounts& counts,
                                  std::uint64_t seed);

/// Mean-squared residual per loss term. Data terms stay zero unless labeled
/// samples are supplied (parametric-surrogate training).
struct LossBreakdown {
  double L_alpha = 0.0;
  double L_T = 0.0;
  double L_alpha0 = 0.0;
  double L_T0 = 0.0;
  double L_bc1 = 0.0;  // bottom boundary x = 0 (tool side)
  double L_bc2 = 0.0;  // top boundary x = L (composite side)
  double L_tau = 0.0;  // interface temperature continuity
  double L_q = 0.0;    // interface flux continuity
  double L_data_T = 0.0;
  double L_data_alpha = 0.0;
};

/// Per-term weights; the two PDE terms always carry weight 1.
struct LossWeights {
  double w_alpha0 = 1.0;
  double w_T0 = 1.0;
  double w_bc1 = 1.0;
  double w_bc2 = 1.0;
  double w_tau = 1.0;
  double w_q = 1.0;
  double w_data_T = 1.0;
  double w_data_alpha = 1.0;
  double beta = 0.9;  // smoothing constant of the adaptive update
};

/// L_alpha + L_T + sum of weighted auxiliary terms.
double weighted_total(const LossBreakdown& l, const LossWeights& w);

/// Starting weights that bring every auxiliary term onto the same
/// kelvin-squared scale as the temperature value terms. The interface flux
/// residual is in W/m² and therefore carries a (k/L)² factor relative to
/// plain temperature mismatches — about 10⁷ for metre-scale domains — and
/// convective boundary residuals likewise carry h². Left at weight 1 those
/// terms dominate the gradient field purely through their units (strongly
/// enough to flatten spatial structure the other terms are asking for), so
/// the returned weights divide each one by its unit factor. Intended as
/// TrainSchedule::start_weights; the adaptive refresh then evolves from a
/// dimensionally even footing.
LossWeights scale_rational_weights(const ProblemConfig& cfg);

/// One adaptive-weight update: w_hat = (1/w_old) * max_grad_main /
/// mean_grad_term, smoothed as beta*w_old + (1-beta)*w_hat. A zero
/// mean_grad_term leaves the weight unchanged.
double update_one_weight(double w_old, double max_grad_main,
                         double mean_grad_term, double beta);

/// Labeled sample for surrogate training; alpha_target may be NaN for points
/// in the tool region (no cure value there).
struct LabeledPoint {
  double x = 0.0;
  double t = 0.0;
  double zeta = 0.0;
  double T_target = 0.0;
  double alpha_target = 0.0;
};

/// Explicit evaluation batch for loss_terms. Zeta vectors must either be
/// empty (non-parametric model) or match their point counts.
struct EvalBatches {
  std::vector<double> interior_x, interior_t, interior_zeta;
  std::vector<double> initial_x, initial_zeta;
  std::vector<double> bc_lo_t, bc_lo_zeta;
  std::vector<double> bc_hi_t, bc_hi_zeta;
  std::vector<double> interface_t, interface_zeta;
  std::vector<LabeledPoint> data;
};

/// Mean-squared residuals of every loss term over the given batch. Empty
/// point sets yield zero for their terms. The boundary terms follow the
/// configured boundary kind: prescribed pins T to the air temperature;
/// convective balances conduction against film transfer with the sign
/// conventions h_t (T - T_a) = k_t dT/dx at x = 0 and
/// h_c (T_a - T) = k_c dT/dx at x = L. For parametric models the bottom film
/// coefficient is the per-point zeta. An optional initial-temperature profile
/// replaces the uniform T_init target.
LossBreakdown loss_terms(const PinnModel& m, const EvalBatches& batch,
                         const std::function<double(double)>* T0_profile =
                             nullptr);

/// Which training phases run inside each outer iteration.
enum class PhaseSelect { Both, AlphaOnly, TOnly };

/// Sequential-training schedule.
struct TrainSchedule {
  int iterations = 10;
  int epochs_per_net = 30;
  int batch = 512;
  double lr0 = 1e-3;
  int patience_alpha = 10;
  int patience_T = 20;
  double plateau_factor = 0.5;
  double min_lr = 1e-6;
  bool adaptive_weights = true;
  // Abort bar for the weighted probe total. Convective runs start around
  // (h (T - T_air))^2 ~ 1e9 from a fresh Kelvin-scale init, so the default
  // leaves room above any sane starting loss while still catching blow-ups.
  double divergence_threshold = 1e12;
  double early_stop_total = 0.0;  // 0 disables early stopping
  PhaseSelect phases = PhaseSelect::Both;
  CollocationCounts colloc;
  /// Starting per-term weights (all 1 by default). With adaptive weighting
  /// these are the state the refreshes evolve from; without it they stay
  /// fixed for the whole run. Useful when a term's physical units put it on
  /// a very different scale than the others (the interface flux term scales
  /// like (k/L)^2 relative to the value terms).
  LossWeights start_weights;
  /// Optional initial temperature profile (defaults to uniform T_init).
  std::function<double(double)> T0_profile;
};

/// One history row per epoch, evaluated on a fixed deterministic probe batch.
struct HistoryRow {
  int epoch = 0;        // global 1-based counter across phases
  char phase = 'T';     // 'a' or 'T'
  LossBreakdown losses;
  double lr = 0.0;
  LossWeights weights;
};

struct TrainResult {
  std::vector<HistoryRow> history;
  LossWeights final_weights;
  bool stopped_early = false;
  bool has_data_terms = false;
};

/// Train `m` in place: per outer iteration, refresh the cure-term weights and
/// run `epochs_per_net` epochs on the cure network (temperature frozen), then
/// refresh the temperature-term weights and run `epochs_per_net` epochs on
/// both temperature networks jointly (cure frozen). Optimizer and scheduler
/// state persists across iterations. Throws NumericsError when the weighted
/// probe total exceeds the divergence threshold or turns non-finite.
TrainResult train_model(PinnModel& m, const TrainSchedule& schedule,
                        std::uint64_t seed,
                        const std::vector<LabeledPoint>* data = nullptr);

/// init_pinn + train_model.
PinnModel train_sequential(const ProblemConfig& cfg,
                           const TrainSchedule& schedule, std::uint64_t seed,
                           TrainResult* result = nullptr);

/// Build a model for `cfg` with all parameters taken from the three
/// checkpoints. Throws ArtifactError when any architecture differs from the
/// one init_pinn would build, listing the mismatched layers.
PinnModel warm_start(const std::string& alpha_ckpt,
                     const std::string& t_minus_ckpt,
                     const std::string& t_plus_ckpt, const ProblemConfig& cfg);

/// Checkpoint triple <stem>_alpha.ckpt / <stem>_tminus.ckpt /
/// <stem>_tplus.ckpt under `dir`, written atomically. Parametric models embed
/// their normalization metadata.
void save_pinn(const PinnModel& m, const std::string& dir,
               const std::string& stem);
PinnModel load_pinn(const std::string& dir, const std::string& stem,
                    const ProblemConfig& cfg);

/// Training-history CSV. Base columns: epoch, phase, the eight loss terms,
/// lr, and the six auxiliary weights; runs with data terms append the two
/// data losses and their weights.
void write_history_csv(const std::string& path,
                       const std::vector<HistoryRow>& rows,
                       bool data_columns = false);

}  // namespace curepinn
