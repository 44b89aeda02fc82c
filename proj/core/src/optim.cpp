#include <cmath>
#include <stdexcept>

#include "marllb/nn/gradcheck.hpp"
#include "marllb/nn/optim.hpp"
#include "marllb/rng.hpp"

namespace marllb::nn {

AdamOptimizer::AdamOptimizer(std::vector<Tensor*> params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
  if (!(cfg_.lr > 0.0)) throw std::domain_error("adam lr must be positive");
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const Tensor* t : params_) {
    m_.emplace_back(t->size(), 0.0);
    v_.emplace_back(t->size(), 0.0);
  }
}

void AdamOptimizer::step() {
  for (Tensor* t : params_) {
    if (!t->grads_finite()) {
      ++skipped_;
      for (Tensor* u : params_) u->zero_grad();
      return;
    }
  }
  ++step_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
  for (std::size_t k = 0; k < params_.size(); ++k) {
    Tensor& t = *params_[k];
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < t.v.size(); ++i) {
      const double g = t.g[i];
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g;
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g * g;
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      t.v[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.epsilon);
    }
    t.zero_grad();
  }
}

GradCheckResult grad_check(const std::vector<NamedTensor>& params,
                           const std::function<double()>& loss, double h,
                           std::size_t max_coords, std::uint64_t select_seed) {
  GradCheckResult result;
  Rng rng(select_seed);
  for (const NamedTensor& named : params) {
    Tensor& t = *named.tensor;
    const std::size_t n = t.size();
    std::vector<std::size_t> coords;
    if (max_coords == 0 || max_coords >= n) {
      coords.resize(n);
      for (std::size_t i = 0; i < n; ++i) coords[i] = i;
    } else {
      for (std::size_t i = 0; i < max_coords; ++i)
        coords.push_back(rng.uniform_int(n));
    }
    for (std::size_t i : coords) {
      const double saved = t.v[i];
      t.v[i] = saved + h;
      const double up = loss();
      t.v[i] = saved - h;
      const double down = loss();
      t.v[i] = saved;
      const double fd = (up - down) / (2.0 * h);
      const double analytic = t.g[i];
      const double denom =
          std::max({1e-6, std::abs(fd), std::abs(analytic)});
      const double rel = std::abs(fd - analytic) / denom;
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst_tensor = named.name;
        result.worst_index = i;
      }
    }
  }
  return result;
}

}  // namespace marllb::nn
