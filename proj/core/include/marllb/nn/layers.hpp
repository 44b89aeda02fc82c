#pragma once

#include <vector>

#include "marllb/nn/tensor.hpp"
#include "marllb/rng.hpp"

namespace marllb::nn {

struct DenseParams {
  Tensor w;  // out x in
  Tensor b;  // out x 1

  std::size_t in_dim() const { return w.cols; }
  std::size_t out_dim() const { return w.rows; }
  std::vector<Tensor*> tensors() { return {&w, &b}; }
};

DenseParams make_dense(std::size_t in, std::size_t out);

std::vector<double> dense_forward(const DenseParams& p,
                                  const std::vector<double>& x);
// Accumulates weight gradients from dL/dy and returns dL/dx.
std::vector<double> dense_backward(DenseParams& p, const std::vector<double>& x,
                                   const std::vector<double>& dy);

void tanh_inplace(std::vector<double>& x);
// y holds tanh outputs already; returns dL/dx given dL/dy.
std::vector<double> tanh_backward(const std::vector<double>& y,
                                  const std::vector<double>& dy);

// z = sigma(Wz [x,h] + bz), r = sigma(Wr [x,h] + br),
// cand = tanh(Wh [x, r*h] + bh), h' = (1-z)*h + z*cand.
struct GruParams {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  DenseParams update;
  DenseParams reset;
  DenseParams candidate;

  std::vector<Tensor*> tensors() {
    return {&update.w, &update.b, &reset.w, &reset.b, &candidate.w,
            &candidate.b};
  }
};

GruParams make_gru(std::size_t input_dim, std::size_t hidden_dim);

struct GruCache {
  std::vector<double> x, h_prev, z, r, h_tilde;
};

std::vector<double> gru_forward(const GruParams& p, const std::vector<double>& x,
                                const std::vector<double>& h,
                                GruCache* cache = nullptr);
// Returns dL/dh_prev and, when dx is given, adds dL/dx into it.
std::vector<double> gru_backward(GruParams& p, const GruCache& cache,
                                 const std::vector<double>& dh_new,
                                 std::vector<double>* dx = nullptr);

void init_uniform_fan_in(Tensor& w, Rng& rng);
void init_dense(DenseParams& p, Rng& rng);
// Input columns get fan-in uniform init, recurrent columns an orthogonal
// block, biases zero; tanh-bounded hidden state keeps early outputs near the
// uniform action.
void init_gru(GruParams& p, Rng& rng);

}  // namespace marllb::nn
