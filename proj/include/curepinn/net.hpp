#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace curepinn {

enum class Act : std::uint32_t {
  Tanh = 0,
  Softplus = 1,        // smooth positive output, asymptotically identity
  ModifiedSigmoid = 2, // (1-a0)/(1+exp(-x)) + a0, range (a0, 1)
  Identity = 3,
};

struct ActivationSpec {
  Act kind = Act::Tanh;
  double param = 0.0;  // ModifiedSigmoid lower asymptote a0; unused otherwise
};

/// Dense fully-connected network. widths = [in, hidden..., out];
/// hidden activation applied after every layer except the last, which
/// uses the output activation.
struct MlpParams {
  std::vector<int> widths;
  ActivationSpec hidden{Act::Tanh};
  ActivationSpec output{Act::Identity};
  std::vector<Eigen::MatrixXd> W;  // W[l] is widths[l+1] x widths[l]
  std::vector<Eigen::VectorXd> b;  // b[l] has widths[l+1] entries

  int layer_count() const { return static_cast<int>(widths.size()) - 1; }
  int input_dim() const { return widths.front(); }
  int output_dim() const { return widths.back(); }
  long param_count() const;

  /// Flat parameter vector: per layer, W row-major, then b.
  Eigen::VectorXd to_vector() const;
  void from_vector(const Eigen::VectorXd& theta);
};

/// Glorot-uniform weights (limit sqrt(6/(fan_in+fan_out))), zero biases.
/// Deterministic in `seed`: weights are drawn row-major, layer by layer.
MlpParams init_mlp(const std::vector<int>& widths, ActivationSpec hidden,
                   ActivationSpec output, std::uint64_t seed);

/// Derivative channels propagated alongside the value. d2_dx2 requires d_dx.
/// d_dzeta requires an input dimension of at least 3.
struct JetChannels {
  bool d_dx = false;
  bool d_dt = false;
  bool d2_dx2 = false;
  bool d_dzeta = false;
};

/// Batched first/second-order jets of a scalar-output network. Channels that
/// were not requested stay empty. Derivatives are taken with respect to the
/// network's own inputs (row 0 = x, row 1 = t, row 2 = zeta).
struct JetBatch {
  Eigen::RowVectorXd value;
  Eigen::RowVectorXd d_dx;
  Eigen::RowVectorXd d_dt;
  Eigen::RowVectorXd d2_dx2;
  Eigen::RowVectorXd d_dzeta;

  int size() const { return static_cast<int>(value.size()); }
};

/// Single-point jet (same conventions as JetBatch).
struct EvalJet {
  double value = 0.0;
  double d_dx = 0.0;
  double d_dt = 0.0;
  double d2_dx2 = 0.0;
  double d_dzeta = 0.0;
};

/// Per-layer activations and derivative stashes from a forward pass; reused
/// across calls to avoid reallocation. One workspace serves one network at a
/// time; backward consumes the most recent forward stored here.
struct MlpWorkspace {
  struct ChannelMats {
    Eigen::MatrixXd v, dx, dt, dxx, dz;
  };
  JetChannels ch;
  bool for_backward = false;
  int n = 0;
  ChannelMats input;
  std::vector<ChannelMats> out;    // post-activation tuples per layer
  std::vector<ChannelMats> zder;   // pre-activation derivative channels per layer
  std::vector<Eigen::MatrixXd> d1, d2, d3;  // activation derivatives per layer
};

/// Forward pass over a batch. X is input_dim x n with rows (x, t[, zeta]).
/// If `for_backward` is set, enough is stashed in `ws` for one subsequent
/// backward_jet_batch call. Output width must be 1.
JetBatch forward_jet_batch(const MlpParams& p, const Eigen::MatrixXd& X,
                           JetChannels ch, MlpWorkspace& ws,
                           bool for_backward = false);

/// Reverse sweep: given cotangents (seeds) for the output jet channels of the
/// last forward pass, returns d(sum of seeded outputs)/d(theta) as a flat
/// vector in to_vector() layout. Empty seed rows mean zero.
Eigen::VectorXd backward_jet_batch(const MlpParams& p, MlpWorkspace& ws,
                                   const JetBatch& seeds);

/// Convenience single-point forward.
EvalJet eval_jet(const MlpParams& p, double x, double t, JetChannels ch);
EvalJet eval_jet3(const MlpParams& p, double x, double t, double zeta,
                  JetChannels ch);

/// Adam optimizer state over the flat parameter vector.
struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long t = 0;
  Eigen::VectorXd m, v;  // sized on first step
};

void adam_step(MlpParams& params, const Eigen::VectorXd& grad, AdamState& st);

/// Reduce-on-plateau schedule: after `patience` consecutive epochs without
/// improvement of the monitored metric, multiply lr by `factor` down to
/// `min_lr`. Returns true when a reduction happened.
struct PlateauState {
  double factor = 0.5;
  int patience = 20;
  double min_lr = 1e-6;
  double best = 0.0;
  int bad_epochs = 0;
  bool seen = false;
};

bool plateau_step(PlateauState& st, double metric, double& lr);

/// Optional trailer describing a parametric-surrogate checkpoint.
struct SurrogateMeta {
  std::string param_id;     // which config scalar zeta stands for
  double zeta_min = 0.0;
  double zeta_max = 1.0;
  double x_scale = 1.0;     // input normalization used during training
  double t_scale = 1.0;
};

/// Binary checkpoint: magic "CPNN", format version, widths, activation tags,
/// row-major weights and biases per layer, optional surrogate metadata.
void save_checkpoint(const std::string& path, const MlpParams& p,
                     const std::optional<SurrogateMeta>& meta = {});
MlpParams load_checkpoint(const std::string& path,
                          std::optional<SurrogateMeta>* meta_out = nullptr);

}  // namespace curepinn
