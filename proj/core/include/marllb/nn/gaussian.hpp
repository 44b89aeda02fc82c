#pragma once

namespace marllb::nn {

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

double softplus(double x);
double clamp_log_std(double log_std);

// One coordinate of a reparameterized tanh-Gaussian draw. Derivatives treat
// the noise xi as a constant and gate through the log_std clamp.
struct SquashEval {
  double u = 0.0;        // mean + exp(log_std) * xi
  double action = 0.0;   // tanh(u)
  double log_prob = 0.0;  // includes the tanh change-of-variables term
  double dlogp_dmean = 0.0;
  double dlogp_dlogstd = 0.0;
  double daction_dmean = 0.0;
  double daction_dlogstd = 0.0;
};

SquashEval squash_eval(double mean, double log_std, double xi);
double squash_deterministic(double mean);

}  // namespace marllb::nn
