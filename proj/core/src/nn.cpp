#include <cmath>
#include <stdexcept>

#include "marllb/nn/gaussian.hpp"
#include "marllb/nn/layers.hpp"
#include "marllb/nn/tensor.hpp"

namespace marllb::nn {

Tensor Tensor::make(std::size_t rows, std::size_t cols) {
  Tensor t;
  t.rows = rows;
  t.cols = cols;
  t.v.assign(rows * cols, 0.0);
  t.g.assign(rows * cols, 0.0);
  return t;
}

void Tensor::zero_grad() { g.assign(g.size(), 0.0); }

bool Tensor::values_finite() const {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

bool Tensor::grads_finite() const {
  for (double x : g)
    if (!std::isfinite(x)) return false;
  return true;
}

void soft_update(Tensor& target, const Tensor& source, double tau) {
  if (target.rows != source.rows || target.cols != source.cols)
    throw std::domain_error("soft_update shape mismatch");
  if (!(tau > 0.0) || tau > 1.0)
    throw std::domain_error("soft_update tau must be in (0, 1]");
  for (std::size_t i = 0; i < target.v.size(); ++i)
    target.v[i] = (1.0 - tau) * target.v[i] + tau * source.v[i];
}

void soft_update(const std::vector<Tensor*>& target,
                 const std::vector<Tensor*>& source, double tau) {
  if (target.size() != source.size())
    throw std::domain_error("soft_update tensor count mismatch");
  for (std::size_t i = 0; i < target.size(); ++i)
    soft_update(*target[i], *source[i], tau);
}

DenseParams make_dense(std::size_t in, std::size_t out) {
  DenseParams p;
  p.w = Tensor::make(out, in);
  p.b = Tensor::make(out, 1);
  return p;
}

std::vector<double> dense_forward(const DenseParams& p,
                                  const std::vector<double>& x) {
  if (x.size() != p.in_dim()) throw std::domain_error("dense input mismatch");
  const std::size_t out = p.out_dim();
  const std::size_t in = p.in_dim();
  std::vector<double> y(out);
  for (std::size_t i = 0; i < out; ++i) {
    double acc = p.b.v[i];
    const double* row = p.w.v.data() + i * in;
    for (std::size_t j = 0; j < in; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
  return y;
}

std::vector<double> dense_backward(DenseParams& p, const std::vector<double>& x,
                                   const std::vector<double>& dy) {
  if (x.size() != p.in_dim() || dy.size() != p.out_dim())
    throw std::domain_error("dense backward mismatch");
  const std::size_t out = p.out_dim();
  const std::size_t in = p.in_dim();
  std::vector<double> dx(in, 0.0);
  for (std::size_t i = 0; i < out; ++i) {
    const double d = dy[i];
    p.b.g[i] += d;
    double* grow = p.w.g.data() + i * in;
    const double* wrow = p.w.v.data() + i * in;
    for (std::size_t j = 0; j < in; ++j) {
      grow[j] += d * x[j];
      dx[j] += wrow[j] * d;
    }
  }
  return dx;
}

void tanh_inplace(std::vector<double>& x) {
  for (double& v : x) v = std::tanh(v);
}

std::vector<double> tanh_backward(const std::vector<double>& y,
                                  const std::vector<double>& dy) {
  std::vector<double> dx(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    dx[i] = dy[i] * (1.0 - y[i] * y[i]);
  return dx;
}

GruParams make_gru(std::size_t input_dim, std::size_t hidden_dim) {
  GruParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  p.update = make_dense(input_dim + hidden_dim, hidden_dim);
  p.reset = make_dense(input_dim + hidden_dim, hidden_dim);
  p.candidate = make_dense(input_dim + hidden_dim, hidden_dim);
  return p;
}

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<double> concat(const std::vector<double>& a,
                           const std::vector<double>& b) {
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

std::vector<double> gru_forward(const GruParams& p, const std::vector<double>& x,
                                const std::vector<double>& h,
                                GruCache* cache) {
  if (x.size() != p.input_dim || h.size() != p.hidden_dim)
    throw std::domain_error("gru input mismatch");
  const std::vector<double> xh = concat(x, h);
  std::vector<double> z = dense_forward(p.update, xh);
  std::vector<double> r = dense_forward(p.reset, xh);
  for (double& v : z) v = sigmoid(v);
  for (double& v : r) v = sigmoid(v);

  std::vector<double> gated = x;
  gated.resize(p.input_dim + p.hidden_dim);
  for (std::size_t i = 0; i < p.hidden_dim; ++i)
    gated[p.input_dim + i] = r[i] * h[i];
  std::vector<double> cand = dense_forward(p.candidate, gated);
  tanh_inplace(cand);

  std::vector<double> h_new(p.hidden_dim);
  for (std::size_t i = 0; i < p.hidden_dim; ++i)
    h_new[i] = (1.0 - z[i]) * h[i] + z[i] * cand[i];

  if (cache != nullptr) {
    cache->x = x;
    cache->h_prev = h;
    cache->z = std::move(z);
    cache->r = std::move(r);
    cache->h_tilde = std::move(cand);
  }
  return h_new;
}

std::vector<double> gru_backward(GruParams& p, const GruCache& cache,
                                 const std::vector<double>& dh_new,
                                 std::vector<double>* dx) {
  const std::size_t nh = p.hidden_dim;
  const std::size_t nx = p.input_dim;
  if (dh_new.size() != nh) throw std::domain_error("gru backward mismatch");

  std::vector<double> dh_prev(nh);
  std::vector<double> da_cand(nh);
  std::vector<double> da_z(nh);
  for (std::size_t i = 0; i < nh; ++i) {
    const double z = cache.z[i];
    const double ht = cache.h_tilde[i];
    dh_prev[i] = dh_new[i] * (1.0 - z);
    da_cand[i] = dh_new[i] * z * (1.0 - ht * ht);
    da_z[i] = dh_new[i] * (ht - cache.h_prev[i]) * z * (1.0 - z);
  }

  std::vector<double> gated = cache.x;
  gated.resize(nx + nh);
  for (std::size_t i = 0; i < nh; ++i)
    gated[nx + i] = cache.r[i] * cache.h_prev[i];
  const std::vector<double> dgated =
      dense_backward(p.candidate, gated, da_cand);

  std::vector<double> da_r(nh);
  for (std::size_t i = 0; i < nh; ++i) {
    const double drh = dgated[nx + i];
    dh_prev[i] += drh * cache.r[i];
    da_r[i] = drh * cache.h_prev[i] * cache.r[i] * (1.0 - cache.r[i]);
  }

  const std::vector<double> xh = concat(cache.x, cache.h_prev);
  const std::vector<double> dxh_z = dense_backward(p.update, xh, da_z);
  const std::vector<double> dxh_r = dense_backward(p.reset, xh, da_r);

  for (std::size_t i = 0; i < nh; ++i)
    dh_prev[i] += dxh_z[nx + i] + dxh_r[nx + i];
  if (dx != nullptr) {
    dx->assign(nx, 0.0);
    for (std::size_t j = 0; j < nx; ++j)
      (*dx)[j] = dgated[j] + dxh_z[j] + dxh_r[j];
  }
  return dh_prev;
}

void init_uniform_fan_in(Tensor& w, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(w.cols));
  for (double& v : w.v) v = (2.0 * rng.uniform01() - 1.0) * bound;
}

void init_dense(DenseParams& p, Rng& rng) {
  init_uniform_fan_in(p.w, rng);
  p.b.v.assign(p.b.v.size(), 0.0);
}

namespace {

// Gram-Schmidt on Gaussian rows; hidden sizes here are small enough that two
// orthogonalization passes keep it numerically clean.
std::vector<std::vector<double>> orthogonal_rows(std::size_t n, Rng& rng) {
  std::vector<std::vector<double>> rows(n, std::vector<double>(n));
  for (auto& row : rows)
    for (double& v : row) v = rng.normal01();
  for (std::size_t i = 0; i < n; ++i) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < i; ++k) {
        double dot = 0.0;
        for (std::size_t j = 0; j < n; ++j) dot += rows[i][j] * rows[k][j];
        for (std::size_t j = 0; j < n; ++j) rows[i][j] -= dot * rows[k][j];
      }
    }
    double norm = 0.0;
    for (double v : rows[i]) norm += v * v;
    norm = std::sqrt(norm);
    if (norm < 1e-12) throw std::runtime_error("degenerate orthogonal init");
    for (double& v : rows[i]) v /= norm;
  }
  return rows;
}

void init_gru_gate(DenseParams& gate, std::size_t input_dim,
                   std::size_t hidden_dim, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(input_dim));
  const auto rec = orthogonal_rows(hidden_dim, rng);
  for (std::size_t i = 0; i < hidden_dim; ++i) {
    for (std::size_t j = 0; j < input_dim; ++j)
      gate.w.at(i, j) = (2.0 * rng.uniform01() - 1.0) * bound;
    for (std::size_t j = 0; j < hidden_dim; ++j)
      gate.w.at(i, input_dim + j) = rec[i][j];
  }
  gate.b.v.assign(gate.b.v.size(), 0.0);
}

}  // namespace

void init_gru(GruParams& p, Rng& rng) {
  init_gru_gate(p.update, p.input_dim, p.hidden_dim, rng);
  init_gru_gate(p.reset, p.input_dim, p.hidden_dim, rng);
  init_gru_gate(p.candidate, p.input_dim, p.hidden_dim, rng);
}

double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double clamp_log_std(double log_std) {
  if (log_std < kLogStdMin) return kLogStdMin;
  if (log_std > kLogStdMax) return kLogStdMax;
  return log_std;
}

SquashEval squash_eval(double mean, double log_std, double xi) {
  static const double kHalfLog2Pi = 0.5 * std::log(2.0 * 3.14159265358979323846);
  const double ls = clamp_log_std(log_std);
  const double clamp_gate =
      (log_std > kLogStdMin && log_std < kLogStdMax) ? 1.0 : 0.0;
  const double std = std::exp(ls);

  SquashEval e;
  e.u = mean + std * xi;
  e.action = std::tanh(e.u);

  // -log(1 - tanh(u)^2) = -2 (log 2 - u - softplus(-2u)), stable in both tails
  const double log2 = std::log(2.0);
  const double correction = -2.0 * (log2 - e.u - softplus(-2.0 * e.u));
  e.log_prob = -0.5 * xi * xi - kHalfLog2Pi - ls + correction;

  const double dcorr_du = 2.0 - 4.0 / (1.0 + std::exp(2.0 * e.u));
  const double du_dls = std * xi;  // equals u - mean
  const double dact_du = 1.0 - e.action * e.action;
  e.dlogp_dmean = dcorr_du;
  e.dlogp_dlogstd = clamp_gate * (-1.0 + dcorr_du * du_dls);
  e.daction_dmean = dact_du;
  e.daction_dlogstd = clamp_gate * dact_du * du_dls;
  return e;
}

double squash_deterministic(double mean) { return std::tanh(mean); }

}  // namespace marllb::nn
