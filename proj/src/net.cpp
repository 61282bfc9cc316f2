#include "curepinn/net.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

#include "curepinn/errors.hpp"

namespace curepinn {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

// Value and first `order` derivatives of the activation, elementwise over z.
// Pointers for orders above `order` are left untouched.
void activation_derivs(const ActivationSpec& act, const Eigen::MatrixXd& z,
                       int order, Eigen::MatrixXd& s, Eigen::MatrixXd& d1,
                       Eigen::MatrixXd& d2, Eigen::MatrixXd& d3) {
  const auto rows = z.rows(), cols = z.cols();
  s.resize(rows, cols);
  if (order >= 1) d1.resize(rows, cols);
  if (order >= 2) d2.resize(rows, cols);
  if (order >= 3) d3.resize(rows, cols);

  switch (act.kind) {
    case Act::Tanh: {
      s.array() = z.array().tanh();
      if (order >= 1) d1.array() = 1.0 - s.array().square();
      if (order >= 2) d2.array() = -2.0 * s.array() * d1.array();
      if (order >= 3) d3.array() = -2.0 * d1.array() * (1.0 - 3.0 * s.array().square());
      return;
    }
    case Act::Softplus: {
      for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) {
          const double x = z(i, j);
          const double sg = logistic(x);
          s(i, j) = softplus(x);
          if (order >= 1) d1(i, j) = sg;
          if (order >= 2) d2(i, j) = sg * (1.0 - sg);
          if (order >= 3) d3(i, j) = sg * (1.0 - sg) * (1.0 - 2.0 * sg);
        }
      return;
    }
    case Act::ModifiedSigmoid: {
      const double span = 1.0 - act.param;
      for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) {
          const double sg = logistic(z(i, j));
          const double p = sg * (1.0 - sg);
          const double q = 1.0 - 2.0 * sg;
          s(i, j) = span * sg + act.param;
          if (order >= 1) d1(i, j) = span * p;
          if (order >= 2) d2(i, j) = span * p * q;
          if (order >= 3) d3(i, j) = span * p * (q * q - 2.0 * p);
        }
      return;
    }
    case Act::Identity: {
      s = z;
      if (order >= 1) d1.setOnes(rows, cols);
      if (order >= 2) d2.setZero(rows, cols);
      if (order >= 3) d3.setZero(rows, cols);
      return;
    }
  }
  throw std::logic_error("unhandled activation kind");
}

}  // namespace

long MlpParams::param_count() const {
  long n = 0;
  for (int l = 0; l < layer_count(); ++l)
    n += static_cast<long>(widths[l + 1]) * widths[l] + widths[l + 1];
  return n;
}

Eigen::VectorXd MlpParams::to_vector() const {
  Eigen::VectorXd theta(param_count());
  long off = 0;
  for (int l = 0; l < layer_count(); ++l) {
    const long r = W[l].rows(), c = W[l].cols();
    Eigen::Map<RowMat>(theta.data() + off, r, c) = W[l];
    off += r * c;
    theta.segment(off, r) = b[l];
    off += r;
  }
  return theta;
}

void MlpParams::from_vector(const Eigen::VectorXd& theta) {
  if (theta.size() != param_count())
    throw std::invalid_argument("from_vector: parameter vector size mismatch");
  long off = 0;
  for (int l = 0; l < layer_count(); ++l) {
    const long r = W[l].rows(), c = W[l].cols();
    W[l] = Eigen::Map<const RowMat>(theta.data() + off, r, c);
    off += r * c;
    b[l] = theta.segment(off, r);
    off += r;
  }
}

MlpParams init_mlp(const std::vector<int>& widths, ActivationSpec hidden,
                   ActivationSpec output, std::uint64_t seed) {
  if (widths.size() < 2) throw std::invalid_argument("init_mlp: need at least two widths");
  for (int w : widths)
    if (w < 1) throw std::invalid_argument("init_mlp: widths must be positive");

  MlpParams p;
  p.widths = widths;
  p.hidden = hidden;
  p.output = output;

  std::mt19937_64 rng(seed);
  auto unit = [&rng]() {  // canonical double in [0, 1); fixed conversion
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };

  const int L = static_cast<int>(widths.size()) - 1;
  p.W.resize(L);
  p.b.resize(L);
  for (int l = 0; l < L; ++l) {
    const int fan_in = widths[l], fan_out = widths[l + 1];
    const double lim = std::sqrt(6.0 / (fan_in + fan_out));
    p.W[l].resize(fan_out, fan_in);
    for (int i = 0; i < fan_out; ++i)        // row-major draw order
      for (int j = 0; j < fan_in; ++j) p.W[l](i, j) = lim * (2.0 * unit() - 1.0);
    p.b[l] = Eigen::VectorXd::Zero(fan_out);
  }
  return p;
}

JetBatch forward_jet_batch(const MlpParams& p, const Eigen::MatrixXd& X,
                           JetChannels ch, MlpWorkspace& ws, bool for_backward) {
  if (X.rows() != p.input_dim())
    throw std::invalid_argument("forward_jet_batch: input row count mismatch");
  if (p.output_dim() != 1)
    throw std::invalid_argument("forward_jet_batch: output width must be 1");
  if (ch.d2_dx2 && !ch.d_dx)
    throw std::invalid_argument("forward_jet_batch: d2_dx2 requires d_dx");
  if (ch.d_dzeta && p.input_dim() < 3)
    throw std::invalid_argument("forward_jet_batch: d_dzeta requires a 3rd input");

  const int n = static_cast<int>(X.cols());
  const int L = p.layer_count();
  ws.ch = ch;
  ws.for_backward = for_backward;
  ws.n = n;
  ws.out.resize(L);
  ws.zder.resize(L);
  ws.d1.resize(L);
  ws.d2.resize(L);
  ws.d3.resize(L);

  // Forward derivative order needed, +1 when a reverse sweep will follow.
  int order = ch.d2_dx2 ? 2 : ((ch.d_dx || ch.d_dt || ch.d_dzeta) ? 1 : 0);
  if (for_backward) order = std::min(order + 1, 3);

  // Input tuples: unit derivative of each coordinate w.r.t. itself.
  ws.input.v = X;
  if (ch.d_dx) {
    ws.input.dx.setZero(X.rows(), n);
    ws.input.dx.row(0).setOnes();
  }
  if (ch.d_dt) {
    ws.input.dt.setZero(X.rows(), n);
    ws.input.dt.row(1).setOnes();
  }
  if (ch.d2_dx2) ws.input.dxx.setZero(X.rows(), n);
  if (ch.d_dzeta) {
    ws.input.dz.setZero(X.rows(), n);
    ws.input.dz.row(2).setOnes();
  }

  const MlpWorkspace::ChannelMats* prev = &ws.input;
  Eigen::MatrixXd z;  // pre-activation values for the current layer
  for (int l = 0; l < L; ++l) {
    auto& zd = ws.zder[l];
    z.noalias() = p.W[l] * prev->v;
    z.colwise() += p.b[l];
    if (ch.d_dx) zd.dx.noalias() = p.W[l] * prev->dx;
    if (ch.d_dt) zd.dt.noalias() = p.W[l] * prev->dt;
    if (ch.d2_dx2) zd.dxx.noalias() = p.W[l] * prev->dxx;
    if (ch.d_dzeta) zd.dz.noalias() = p.W[l] * prev->dz;

    const ActivationSpec& act = (l == L - 1) ? p.output : p.hidden;
    activation_derivs(act, z, order, ws.out[l].v, ws.d1[l], ws.d2[l], ws.d3[l]);

    auto& o = ws.out[l];
    if (ch.d_dx) o.dx = ws.d1[l].cwiseProduct(zd.dx);
    if (ch.d_dt) o.dt = ws.d1[l].cwiseProduct(zd.dt);
    if (ch.d2_dx2)
      o.dxx = ws.d2[l].cwiseProduct(zd.dx.cwiseAbs2()) +
              ws.d1[l].cwiseProduct(zd.dxx);
    if (ch.d_dzeta) o.dz = ws.d1[l].cwiseProduct(zd.dz);

    prev = &ws.out[l];
  }

  JetBatch out;
  const auto& last = ws.out[L - 1];
  out.value = last.v.row(0);
  if (ch.d_dx) out.d_dx = last.dx.row(0);
  if (ch.d_dt) out.d_dt = last.dt.row(0);
  if (ch.d2_dx2) out.d2_dx2 = last.dxx.row(0);
  if (ch.d_dzeta) out.d_dzeta = last.dz.row(0);
  return out;
}

Eigen::VectorXd backward_jet_batch(const MlpParams& p, MlpWorkspace& ws,
                                   const JetBatch& seeds) {
  if (!ws.for_backward)
    throw std::logic_error("backward_jet_batch: forward pass was not run with for_backward");
  const int n = ws.n;
  const int L = p.layer_count();
  const JetChannels ch = ws.ch;

  auto seeded = [n](const Eigen::RowVectorXd& s, const char* name, bool allowed) {
    if (s.size() == 0) return false;
    if (!allowed)
      throw std::invalid_argument(std::string("backward_jet_batch: seed for inactive channel ") + name);
    if (s.size() != n)
      throw std::invalid_argument("backward_jet_batch: seed length mismatch");
    return true;
  };
  const bool sv = seeds.value.size() > 0;
  if (sv && seeds.value.size() != n)
    throw std::invalid_argument("backward_jet_batch: seed length mismatch");
  const bool sx = seeded(seeds.d_dx, "d_dx", ch.d_dx);
  const bool st = seeded(seeds.d_dt, "d_dt", ch.d_dt);
  const bool sxx = seeded(seeds.d2_dx2, "d2_dx2", ch.d2_dx2);
  const bool sz = seeded(seeds.d_dzeta, "d_dzeta", ch.d_dzeta);

  // Output adjoint tuples (width 1 at the top layer).
  MlpWorkspace::ChannelMats obar;
  obar.v = sv ? Eigen::MatrixXd(seeds.value) : Eigen::MatrixXd::Zero(1, n);
  if (ch.d_dx) obar.dx = sx ? Eigen::MatrixXd(seeds.d_dx) : Eigen::MatrixXd::Zero(1, n);
  if (ch.d_dt) obar.dt = st ? Eigen::MatrixXd(seeds.d_dt) : Eigen::MatrixXd::Zero(1, n);
  if (ch.d2_dx2)
    obar.dxx = sxx ? Eigen::MatrixXd(seeds.d2_dx2) : Eigen::MatrixXd::Zero(1, n);
  if (ch.d_dzeta)
    obar.dz = sz ? Eigen::MatrixXd(seeds.d_dzeta) : Eigen::MatrixXd::Zero(1, n);

  // Flat gradient with per-layer offsets matching to_vector().
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(p.param_count());
  std::vector<long> w_off(L), b_off(L);
  {
    long off = 0;
    for (int l = 0; l < L; ++l) {
      w_off[l] = off;
      off += static_cast<long>(p.widths[l + 1]) * p.widths[l];
      b_off[l] = off;
      off += p.widths[l + 1];
    }
  }

  MlpWorkspace::ChannelMats zbar, abar;
  for (int l = L - 1; l >= 0; --l) {
    const auto& zd = ws.zder[l];
    const auto& d1 = ws.d1[l];
    const auto& d2 = ws.d2[l];
    const auto& d3 = ws.d3[l];

    // Activation backward: from output adjoints to pre-activation adjoints.
    zbar.v = obar.v.cwiseProduct(d1);
    if (ch.d_dx) {
      zbar.v += obar.dx.cwiseProduct(d2).cwiseProduct(zd.dx);
      zbar.dx = obar.dx.cwiseProduct(d1);
    }
    if (ch.d_dt) {
      zbar.v += obar.dt.cwiseProduct(d2).cwiseProduct(zd.dt);
      zbar.dt = obar.dt.cwiseProduct(d1);
    }
    if (ch.d_dzeta) {
      zbar.v += obar.dz.cwiseProduct(d2).cwiseProduct(zd.dz);
      zbar.dz = obar.dz.cwiseProduct(d1);
    }
    if (ch.d2_dx2) {
      zbar.v += obar.dxx.cwiseProduct(d3.cwiseProduct(zd.dx.cwiseAbs2()) +
                                      d2.cwiseProduct(zd.dxx));
      zbar.dx += obar.dxx.cwiseProduct(d2).cwiseProduct(zd.dx) * 2.0;
      zbar.dxx = obar.dxx.cwiseProduct(d1);
    }

    // Affine backward: weight/bias gradients and input adjoints.
    const auto& in = (l == 0) ? ws.input : ws.out[l - 1];
    Eigen::Map<RowMat> Wbar(grad.data() + w_off[l], p.widths[l + 1], p.widths[l]);
    Wbar.noalias() = zbar.v * in.v.transpose();
    if (ch.d_dx) Wbar.noalias() += zbar.dx * in.dx.transpose();
    if (ch.d_dt) Wbar.noalias() += zbar.dt * in.dt.transpose();
    if (ch.d2_dx2) Wbar.noalias() += zbar.dxx * in.dxx.transpose();
    if (ch.d_dzeta) Wbar.noalias() += zbar.dz * in.dz.transpose();
    grad.segment(b_off[l], p.widths[l + 1]) = zbar.v.rowwise().sum();

    if (l > 0) {
      abar.v.noalias() = p.W[l].transpose() * zbar.v;
      if (ch.d_dx) abar.dx.noalias() = p.W[l].transpose() * zbar.dx;
      if (ch.d_dt) abar.dt.noalias() = p.W[l].transpose() * zbar.dt;
      if (ch.d2_dx2) abar.dxx.noalias() = p.W[l].transpose() * zbar.dxx;
      if (ch.d_dzeta) abar.dz.noalias() = p.W[l].transpose() * zbar.dz;
      std::swap(obar, abar);
    }
  }
  return grad;
}

EvalJet eval_jet(const MlpParams& p, double x, double t, JetChannels ch) {
  Eigen::MatrixXd X(2, 1);
  X << x, t;
  MlpWorkspace ws;
  const JetBatch jb = forward_jet_batch(p, X, ch, ws);
  EvalJet j;
  j.value = jb.value(0);
  if (ch.d_dx) j.d_dx = jb.d_dx(0);
  if (ch.d_dt) j.d_dt = jb.d_dt(0);
  if (ch.d2_dx2) j.d2_dx2 = jb.d2_dx2(0);
  return j;
}

EvalJet eval_jet3(const MlpParams& p, double x, double t, double zeta,
                  JetChannels ch) {
  Eigen::MatrixXd X(3, 1);
  X << x, t, zeta;
  MlpWorkspace ws;
  const JetBatch jb = forward_jet_batch(p, X, ch, ws);
  EvalJet j;
  j.value = jb.value(0);
  if (ch.d_dx) j.d_dx = jb.d_dx(0);
  if (ch.d_dt) j.d_dt = jb.d_dt(0);
  if (ch.d2_dx2) j.d2_dx2 = jb.d2_dx2(0);
  if (ch.d_dzeta) j.d_dzeta = jb.d_dzeta(0);
  return j;
}

void adam_step(MlpParams& params, const Eigen::VectorXd& grad, AdamState& st) {
  Eigen::VectorXd theta = params.to_vector();
  if (grad.size() != theta.size())
    throw std::invalid_argument("adam_step: gradient size mismatch");
  if (st.m.size() != theta.size()) {
    st.m = Eigen::VectorXd::Zero(theta.size());
    st.v = Eigen::VectorXd::Zero(theta.size());
    st.t = 0;
  }
  ++st.t;
  st.m = st.beta1 * st.m + (1.0 - st.beta1) * grad;
  st.v = st.beta2 * st.v + (1.0 - st.beta2) * grad.cwiseProduct(grad);
  const double bc1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.t));
  const double bc2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.t));
  theta.array() -=
      st.lr * (st.m.array() / bc1) / ((st.v.array() / bc2).sqrt() + st.eps);
  params.from_vector(theta);
}

bool plateau_step(PlateauState& st, double metric, double& lr) {
  if (!st.seen || metric < st.best) {
    st.best = metric;
    st.seen = true;
    st.bad_epochs = 0;
    return false;
  }
  ++st.bad_epochs;
  if (st.bad_epochs <= st.patience) return false;
  st.bad_epochs = 0;
  const double next = std::max(lr * st.factor, st.min_lr);
  if (next == lr) return false;
  lr = next;
  return true;
}

namespace {

constexpr char kMagic[4] = {'C', 'P', 'N', 'N'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const char* what) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ArtifactError(std::string("checkpoint truncated while reading ") + what);
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const MlpParams& p,
                     const std::optional<SurrogateMeta>& meta) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArtifactError("cannot open checkpoint for writing: " + path);
  out.write(kMagic, 4);
  put(out, kVersion);
  put(out, static_cast<std::uint32_t>(p.widths.size()));
  for (int w : p.widths) put(out, static_cast<std::uint32_t>(w));
  put(out, static_cast<std::uint32_t>(p.hidden.kind));
  put(out, p.hidden.param);
  put(out, static_cast<std::uint32_t>(p.output.kind));
  put(out, p.output.param);
  for (int l = 0; l < p.layer_count(); ++l) {
    const RowMat w = p.W[l];
    out.write(reinterpret_cast<const char*>(w.data()),
              static_cast<std::streamsize>(sizeof(double)) * w.size());
    out.write(reinterpret_cast<const char*>(p.b[l].data()),
              static_cast<std::streamsize>(sizeof(double)) * p.b[l].size());
  }
  put(out, static_cast<std::uint8_t>(meta ? 1 : 0));
  if (meta) {
    put(out, static_cast<std::uint32_t>(meta->param_id.size()));
    out.write(meta->param_id.data(),
              static_cast<std::streamsize>(meta->param_id.size()));
    put(out, meta->zeta_min);
    put(out, meta->zeta_max);
    put(out, meta->x_scale);
    put(out, meta->t_scale);
  }
  if (!out) throw ArtifactError("failed writing checkpoint: " + path);
}

MlpParams load_checkpoint(const std::string& path,
                          std::optional<SurrogateMeta>* meta_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArtifactError("cannot open checkpoint: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw ArtifactError("not a checkpoint file (bad magic): " + path);
  const auto version = get<std::uint32_t>(in, "version");
  if (version != kVersion)
    throw ArtifactError("unsupported checkpoint version " + std::to_string(version) +
                        " in " + path);

  MlpParams p;
  const auto nw = get<std::uint32_t>(in, "width count");
  if (nw < 2 || nw > 1024) throw ArtifactError("implausible width count in " + path);
  p.widths.resize(nw);
  for (auto& w : p.widths) {
    const auto v = get<std::uint32_t>(in, "width");
    if (v < 1 || v > 100000) throw ArtifactError("implausible layer width in " + path);
    w = static_cast<int>(v);
  }
  auto read_act = [&](const char* what) {
    ActivationSpec a;
    const auto tag = get<std::uint32_t>(in, what);
    if (tag > 3) throw ArtifactError("unknown activation tag in " + path);
    a.kind = static_cast<Act>(tag);
    a.param = get<double>(in, what);
    return a;
  };
  p.hidden = read_act("hidden activation");
  p.output = read_act("output activation");

  const int L = static_cast<int>(nw) - 1;
  p.W.resize(L);
  p.b.resize(L);
  for (int l = 0; l < L; ++l) {
    RowMat w(p.widths[l + 1], p.widths[l]);
    in.read(reinterpret_cast<char*>(w.data()),
            static_cast<std::streamsize>(sizeof(double)) * w.size());
    p.b[l].resize(p.widths[l + 1]);
    in.read(reinterpret_cast<char*>(p.b[l].data()),
            static_cast<std::streamsize>(sizeof(double)) * p.b[l].size());
    if (!in) throw ArtifactError("checkpoint truncated in layer data: " + path);
    p.W[l] = w;
  }

  const auto has_meta = get<std::uint8_t>(in, "metadata flag");
  if (meta_out) meta_out->reset();
  if (has_meta) {
    SurrogateMeta m;
    const auto len = get<std::uint32_t>(in, "metadata id length");
    if (len > 4096) throw ArtifactError("implausible metadata length in " + path);
    m.param_id.resize(len);
    in.read(m.param_id.data(), len);
    m.zeta_min = get<double>(in, "zeta_min");
    m.zeta_max = get<double>(in, "zeta_max");
    m.x_scale = get<double>(in, "x_scale");
    m.t_scale = get<double>(in, "t_scale");
    if (!in) throw ArtifactError("checkpoint truncated in metadata: " + path);
    if (meta_out) *meta_out = std::move(m);
  }
  return p;
}

}  // namespace curepinn
