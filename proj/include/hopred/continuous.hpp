#pragma once

#include <cstddef>
#include <vector>

#include "hopred/model.hpp"
#include "hopred/steady_state.hpp"

namespace hopred {

enum class QuadMethod {
  adaptive_simpson,  ///< composite Simpson on a uniformly doubling grid
  gauss_legendre,    ///< 8-point Gauss-Legendre panels, doubling panel count
};

struct QuadratureConfig {
  QuadMethod method = QuadMethod::gauss_legendre;
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int max_subdivisions = 12;  ///< grid doublings from the initial 64 panels
};

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Mean drift velocity of the tilted-potential model,
///   V = D (1 - e^{-beta F L}) L / I,
///   I = int_0^L e^{beta Phi(x)} ( int_{x-L}^x e^{-beta Phi(y)} dy ) dx.
/// Both printed arrangements of the double integral (inner integral ahead of
/// x and behind x) are evaluated and must agree; a mismatch raises
/// Error(quadrature_failure).
QuadResult continuous_velocity(const ContinuousModel& model,
                               const QuadratureConfig& quad = {});

/// Mean first-passage time from 0 to +-L,
///   T(0) = I / [D (1 + e^{-beta F L})]
/// with the same core integral I. The pre-simplification arrangement (split
/// at z = 0, negative-axis part evaluated on its own grid) is evaluated as a
/// transcription self-check.
QuadResult continuous_period_mfpt(const ContinuousModel& model,
                                  const QuadratureConfig& quad = {});

struct ReducedRatesResult {
  OneStateModel model;
  double error_estimate = 0.0;
};

/// (V, T)-preserving one-state reduction of the continuous model:
///   u_r = D / I,  w_r = u_r e^{-beta F L}.
ReducedRatesResult continuous_reduce_one_state(const ContinuousModel& model,
                                               const QuadratureConfig& quad = {});

/// Local-detailed-balance discretization on the grid x_j = j L / N:
///   u_j = (D N^2/L^2) exp(-beta [Phi(x_{j+1}) - Phi(x_j)]/2)
///   w_j = (D N^2/L^2) exp(-beta [Phi(x_{j-1}) - Phi(x_j)]/2)
/// The discrete Gamma telescopes to e^{-beta F L} exactly.
HoppingModel discretize(const ContinuousModel& model, std::size_t n_states);

/// Increasing state counts for the discrete limit, plus the Richardson
/// depth used to accelerate the O(N^-2) convergence.
struct DiscretizationBridge {
  std::vector<std::size_t> state_counts = {64, 128, 256, 512};
  int extrapolation_order = 3;
  double rel_tol = 1e-6;  ///< NonConvergent if the deepest extrapolants differ more
};

/// Effective diffusion constant via the discrete limit: D_N of the
/// discretized chain for each bridge level, Richardson-extrapolated assuming
/// an even-power error expansion. error_estimate compares the two deepest
/// extrapolants.
QuadResult effective_diffusion(const ContinuousModel& model,
                               const DiscretizationBridge& bridge = {});

/// Richardson extrapolation of values at grid halvings h, h/2, h/4, ...
/// assuming error ~ c1 h^2 + c2 h^4 + ...; returns the extrapolation table's
/// deepest entry and the difference to the previous depth.
QuadResult richardson_extrapolate(const std::vector<double>& values, int max_order);

}  // namespace hopred
