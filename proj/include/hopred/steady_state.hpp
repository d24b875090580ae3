#pragma once

#include <optional>
#include <vector>

#include "hopred/model.hpp"

namespace hopred {

/// Steady-state weights of the periodic chain:
///   r_j = (1/u_j) [1 + sum_{k=1}^{N-1} prod_{i=j+1}^{j+k} w_i/u_i]
///   s_j = (1/u_j) [1 + sum_{k=1}^{N-1} prod_{m=1}^{k} w_{j-m+1}/u_{j-m}]
///   R_N = sum r_j,  G_N = sum u_j r_j s_j,
///   S_N = sum_j s_j sum_{k=0}^{N-1} (k+1) r_{k+j+1},
///   Gamma = prod w_j/u_j,  p_j = r_j/R_N.
///
/// The natural-log fields are always valid. When a cumulative product or sum
/// leaves [1e-300, 1e300] the linear fields may be inf/0 and `log_domain`
/// is set; downstream consumers should then work from the logs.
struct SteadyStateReport {
  std::vector<double> probabilities;
  std::vector<double> r_values;
  std::vector<double> s_values;
  double r_sum = 0.0;      ///< R_N
  double s_weighted = 0.0; ///< S_N
  double g_sum = 0.0;      ///< G_N
  double gamma = 0.0;      ///< Gamma

  bool log_domain = false;
  std::vector<double> log_r;
  std::vector<double> log_s;
  double log_r_sum = 0.0;
  double log_s_weighted = 0.0;
  double log_g_sum = 0.0;
  double log_gamma = 0.0;  ///< sum of log(w_j/u_j); -inf when some w_j = 0
};

/// Transport statistics of the chain:
///   V = L (1 - Gamma) / R_N
///   D = (L/N) [ (L G_N + V S_N)/R_N^2 - (N+2) V / 2 ]
///   T = R_N / (1 + Gamma)
/// `randomness` = 2D/(V L), absent when V = 0.
struct TransportStats {
  double velocity = 0.0;
  double diffusion = 0.0;
  double period_mfpt = 0.0;
  double gamma = 0.0;
  double r_sum = 0.0;
  double s_weighted = 0.0;
  double g_sum = 0.0;
  std::optional<double> randomness;
};

enum class WeightsMode {
  automatic,  ///< linear doubles, falling back to log-space on overflow
  linear,
  log_space,
};

SteadyStateReport compute_weights(const HoppingModel& model,
                                  WeightsMode mode = WeightsMode::automatic);

TransportStats transport_stats(const HoppingModel& model,
                               WeightsMode mode = WeightsMode::automatic);

}  // namespace hopred
