#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "hopred/errors.hpp"

namespace hopred {

/// Periodic one-dimensional hopping model: N internal states per spatial
/// period of length L. The particle in state j jumps forward with rate u_j
/// and backward with rate w_j; indices wrap modulo N (periodic extension
/// u_{lN+j} = u_j). One full cycle of N jumps advances the position by L,
/// so a single jump moves L/N.
struct HoppingModel {
  std::size_t period_count = 0;        ///< N
  double step_length = 1.0;            ///< L, length per period
  std::vector<double> forward_rates;   ///< u_0..u_{N-1}, each > 0
  std::vector<double> backward_rates;  ///< w_0..w_{N-1}, each >= 0

  std::size_t wrap(long j) const {
    const long n = static_cast<long>(period_count);
    return static_cast<std::size_t>(((j % n) + n) % n);
  }
  double u(long j) const { return forward_rates[wrap(j)]; }
  double w(long j) const { return backward_rates[wrap(j)]; }
};

/// One-state reduced model: a biased random walk with step L.
struct OneStateModel {
  double forward_rate = 0.0;   ///< u_r > 0
  double backward_rate = 0.0;  ///< w_r >= 0
  double step_length = 1.0;
};

/// Two-state reduced model. The transport statistics depend on the rates only
/// through u = u_r0*u_r1, w = w_r0*w_r1 and Sigma = u_r0+u_r1+w_r0+w_r1.
struct TwoStateModel {
  double u_r0 = 0.0;
  double u_r1 = 0.0;
  double w_r0 = 0.0;
  double w_r1 = 0.0;
  double step_length = 1.0;

  double aggregate_u() const { return u_r0 * u_r1; }
  double aggregate_w() const { return w_r0 * w_r1; }
  double aggregate_sigma() const { return u_r0 + u_r1 + w_r0 + w_r1; }

  HoppingModel as_hopping_model() const {
    return HoppingModel{2, step_length, {u_r0, u_r1}, {w_r0, w_r1}};
  }
};

// Periodic potential families for the continuous model. The periodic part phi
// is stored separately from the tilt so that Phi(x) = phi(x) - F*x satisfies
// Phi(x - L) = Phi(x) + F*L structurally.

struct SinusoidalPotential {
  double amplitude = 0.0;
  double phase = 0.0;  ///< radians
};

/// Continuous triangle wave: rises 0 -> amplitude over the first half period,
/// falls back over the second. `phase` shifts the pattern (radians, 2*pi = L).
struct SawtoothPotential {
  double amplitude = 0.0;
  double phase = 0.0;
};

/// M uniform samples of phi on [0, L), interpolated by a periodic cubic
/// spline. Needs at least 4 samples.
struct SampledPotential {
  std::vector<double> values;
  // second derivatives at the knots; filled lazily by prepare()
  mutable std::vector<double> second_derivs;
};

using Potential = std::variant<SinusoidalPotential, SawtoothPotential, SampledPotential>;

/// Overdamped diffusion in a tilted periodic potential
/// Phi(x) = phi(x) - F*x with phi(x + L) = phi(x).
struct ContinuousModel {
  double period_length = 1.0;  ///< L
  double tilt_force = 0.0;     ///< F (energy/length)
  double beta = 1.0;           ///< 1/kT
  double bare_diffusion = 1.0; ///< D (length^2/time)
  Potential potential;

  /// Periodic part phi evaluated with wraparound.
  double periodic_part(double x) const;
  /// Full tilted potential Phi(x) = phi(x) - F*x.
  double tilted(double x) const { return periodic_part(x) - tilt_force * x; }
};

void validate(const HoppingModel& model);
void validate(const OneStateModel& model);
void validate(const TwoStateModel& model);
void validate(const ContinuousModel& model);

/// Cyclic relabeling of the internal states: u'_j = u_{(j+shift) mod N}.
HoppingModel rotate(const HoppingModel& model, long shift);

/// Multiplies every rate by c > 0 (a pure change of time unit).
HoppingModel scale_rates(const HoppingModel& model, double c);

}  // namespace hopred
