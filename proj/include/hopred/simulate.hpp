#pragma once

#include <cstdint>

#include "hopred/model.hpp"

namespace hopred {

/// Continuous-time Markov-chain simulation settings. The horizon is either a
/// total time per trajectory (horizon_time > 0) or a total jump count.
/// burn_in_time < 0 selects the default burn-in of 1% of the horizon.
struct SimConfig {
  std::uint64_t trajectory_count = 10'000;
  double horizon_time = 0.0;
  std::uint64_t horizon_jumps = 0;
  double burn_in_time = -1.0;
  std::uint64_t burn_in_jumps = 0;
  std::uint64_t rng_seed = 0;
  std::uint64_t max_jumps_per_trial = 1'000'000'000;
  unsigned threads = 0;  ///< 0 = hardware; HOPRED_THREADS caps either way
};

struct SimEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t trajectories = 0;
  double effective_samples = 0.0;
  std::uint64_t seed = 0;
};

struct TransportEstimates {
  SimEstimate velocity;
  SimEstimate diffusion;
};

/// Gillespie trajectories of the hopping chain. Initial states are drawn from
/// the stationary distribution (per-trajectory stream), so x(t) has zero
/// initial-transient bias. V is estimated as the across-trajectory mean of
/// x(t_end)/t_end; D from the across-trajectory variance of the displacement
/// accumulated after the burn-in, var/(2 (t_end - t_burn)).
/// Identical (model, config) pairs give bit-identical results regardless of
/// thread count. Throws Error(degenerate_horizon) when the expected jump
/// count is below 100.
TransportEstimates simulate_transport(const HoppingModel& model, const SimConfig& config);

/// Each trial starts in state 0 at position 0 and runs until the position
/// first reaches +L or -L (one full period either way); returns the mean
/// absorption time. A trial exceeding max_jumps_per_trial raises a
/// diagnostic error instead of hanging.
SimEstimate simulate_first_passage(const HoppingModel& model, const SimConfig& config);

/// Default time horizon used by the CLI: 100 / max individual rate.
double default_horizon(const HoppingModel& model);

}  // namespace hopred
