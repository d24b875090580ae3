#include "hopred/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>
#include <vector>

#include "hopred/detail/rng.hpp"
#include "hopred/steady_state.hpp"

namespace hopred {

namespace {

using detail::SplitMix64;

unsigned resolve_threads(unsigned requested) {
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("HOPRED_THREADS")) {
    char* end = nullptr;
    const unsigned long cap = std::strtoul(env, &end, 10);
    if (end != env && cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return std::max(1u, n);
}

/// Runs fn(trajectory_index) over [0, count) on `threads` threads in fixed
/// contiguous chunks. Each trajectory writes only its own slots, so the
/// result is independent of the schedule.
template <class Fn>
void for_each_trajectory(std::uint64_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count < 2) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::uint64_t chunk = (count + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::uint64_t lo = t * chunk;
    const std::uint64_t hi = std::min<std::uint64_t>(lo + chunk, count);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::uint64_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

struct MeanVar {
  double mean = 0.0;
  double var = 0.0;    // unbiased sample variance
  double m4 = 0.0;     // fourth central moment (biased, /n)
};

MeanVar moments(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  MeanVar out;
  double acc = 0.0;
  for (double x : xs) acc += x;
  out.mean = acc / n;
  double s2 = 0.0, s4 = 0.0;
  for (double x : xs) {
    const double d = x - out.mean;
    s2 += d * d;
    s4 += d * d * d * d;
  }
  out.var = xs.size() > 1 ? s2 / (n - 1.0) : 0.0;
  out.m4 = s4 / n;
  return out;
}

// standard error of the unbiased sample variance from the fourth moment
double variance_std_error(const MeanVar& mv, std::size_t n) {
  if (n < 2) return 0.0;
  const double nn = static_cast<double>(n);
  const double inside = (mv.m4 - mv.var * mv.var * (nn - 3.0) / (nn - 1.0)) / nn;
  return std::sqrt(std::max(inside, 0.0));
}

double stationary_mean_rate(const HoppingModel& m, const std::vector<double>& p) {
  double acc = 0.0;
  for (std::size_t j = 0; j < m.period_count; ++j)
    acc += p[j] * (m.forward_rates[j] + m.backward_rates[j]);
  return acc;
}

std::size_t sample_state(const std::vector<double>& cdf, double uniform) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), uniform);
  const std::size_t idx = static_cast<std::size_t>(it - cdf.begin());
  return std::min(idx, cdf.size() - 1);
}

}  // namespace

double default_horizon(const HoppingModel& model) {
  validate(model);
  double hi = 0.0;
  for (std::size_t j = 0; j < model.period_count; ++j)
    hi = std::max({hi, model.forward_rates[j], model.backward_rates[j]});
  return 100.0 / hi;
}

TransportEstimates simulate_transport(const HoppingModel& model, const SimConfig& config) {
  validate(model);
  if (config.trajectory_count < 1)
    throw Error(errc::invalid_argument, "trajectory_count must be at least 1");
  const bool time_horizon = config.horizon_time > 0.0;
  if (!time_horizon && config.horizon_jumps == 0)
    throw Error(errc::invalid_argument, "a positive horizon is required");

  const SteadyStateReport rep = compute_weights(model);
  const double mean_rate = stationary_mean_rate(model, rep.probabilities);
  const double expected_jumps =
      time_horizon ? config.horizon_time * mean_rate : static_cast<double>(config.horizon_jumps);
  if (expected_jumps < 100.0)
    throw Error(errc::degenerate_horizon,
                "expected jump count below 100; lengthen the horizon");

  std::vector<double> cdf(model.period_count);
  double run = 0.0;
  for (std::size_t j = 0; j < model.period_count; ++j) {
    run += rep.probabilities[j];
    cdf[j] = run;
  }
  cdf.back() = 1.0;

  const double t_end = config.horizon_time;
  const double t_burn = time_horizon
                            ? (config.burn_in_time >= 0.0 ? config.burn_in_time : 0.01 * t_end)
                            : 0.0;
  const std::uint64_t j_end = config.horizon_jumps;
  const std::uint64_t j_burn =
      time_horizon ? 0
                   : (config.burn_in_jumps > 0 ? config.burn_in_jumps
                                               : static_cast<std::uint64_t>(0.01 * static_cast<double>(j_end)));
  if (time_horizon && t_burn >= t_end)
    throw Error(errc::invalid_argument, "burn-in must be shorter than the horizon");
  if (!time_horizon && j_burn >= j_end)
    throw Error(errc::invalid_argument, "burn-in must be shorter than the horizon");

  const std::uint64_t count = config.trajectory_count;
  const double sub_step = model.step_length / static_cast<double>(model.period_count);

  std::vector<double> vel(count), disp(count), span(count);
  const auto& u = model.forward_rates;
  const auto& w = model.backward_rates;
  const std::size_t n_states = model.period_count;

  for_each_trajectory(count, resolve_threads(config.threads), [&](std::uint64_t i) {
    SplitMix64 rng = SplitMix64::stream(config.rng_seed, i);
    std::size_t j = sample_state(cdf, rng.uniform01());
    long long pos = 0;
    double time = 0.0;
    long long pos_burn = 0;
    double time_burn_at = 0.0;
    bool burned = !time_horizon && j_burn == 0;
    std::uint64_t jumps = 0;
    while (true) {
      if (!time_horizon && jumps >= j_end) break;
      const double total = u[j] + w[j];
      const double dt = rng.exponential() / total;
      if (time_horizon && time + dt >= t_end) {
        if (!burned) {  // horizon hit before burn-in: realign at the end
          pos_burn = pos;
          time_burn_at = t_end;
          burned = true;
        }
        time = t_end;
        break;
      }
      if (time_horizon && !burned && time + dt >= t_burn) {
        pos_burn = pos;
        time_burn_at = t_burn;
        burned = true;
      }
      time += dt;
      const bool forward = rng.uniform01() * total < u[j];
      pos += forward ? 1 : -1;
      j = forward ? (j + 1 == n_states ? 0 : j + 1) : (j == 0 ? n_states - 1 : j - 1);
      ++jumps;
      if (!time_horizon && !burned && jumps >= j_burn) {
        pos_burn = pos;
        time_burn_at = time;
        burned = true;
      }
    }
    const double x_end = static_cast<double>(pos) * sub_step;
    const double x_burn = static_cast<double>(pos_burn) * sub_step;
    const double total_time = time_horizon ? t_end : time;
    vel[i] = x_end / total_time;
    disp[i] = x_end - x_burn;
    span[i] = total_time - time_burn_at;
  });

  TransportEstimates out;
  const MeanVar mv_v = moments(vel);
  out.velocity.value = mv_v.mean;
  out.velocity.std_error = std::sqrt(mv_v.var / static_cast<double>(count));
  out.velocity.trajectories = count;
  out.velocity.effective_samples = static_cast<double>(count);
  out.velocity.seed = config.rng_seed;

  double mean_span = 0.0;
  for (double s : span) mean_span += s;
  mean_span /= static_cast<double>(count);

  std::vector<double> centered = disp;
  if (!time_horizon) {
    // remove the drift-time jitter at a fixed jump count
    for (std::uint64_t i = 0; i < count; ++i) centered[i] = disp[i] - mv_v.mean * span[i];
  }
  const MeanVar mv_d = moments(centered);
  out.diffusion.value = mv_d.var / (2.0 * mean_span);
  out.diffusion.std_error = variance_std_error(mv_d, centered.size()) / (2.0 * mean_span);
  out.diffusion.trajectories = count;
  const double kurt = mv_d.var > 0.0 ? mv_d.m4 / (mv_d.var * mv_d.var) : 3.0;
  out.diffusion.effective_samples =
      2.0 * static_cast<double>(count) / std::max(kurt - 1.0, 1e-3);
  out.diffusion.seed = config.rng_seed;
  return out;
}

SimEstimate simulate_first_passage(const HoppingModel& model, const SimConfig& config) {
  validate(model);
  if (config.trajectory_count < 1)
    throw Error(errc::invalid_argument, "trajectory_count must be at least 1");

  const std::uint64_t count = config.trajectory_count;
  const long n = static_cast<long>(model.period_count);
  const auto& u = model.forward_rates;
  const auto& w = model.backward_rates;
  const std::uint64_t cap = config.max_jumps_per_trial;

  std::vector<double> times(count);
  std::vector<unsigned char> capped(count, 0);

  for_each_trajectory(count, resolve_threads(config.threads), [&](std::uint64_t i) {
    SplitMix64 rng = SplitMix64::stream(config.rng_seed, i);
    long pos = 0;
    double time = 0.0;
    std::uint64_t jumps = 0;
    while (pos != n && pos != -n) {
      if (jumps >= cap) {
        capped[i] = 1;
        return;
      }
      const std::size_t j = static_cast<std::size_t>(((pos % n) + n) % n);
      const double total = u[j] + w[j];
      time += rng.exponential() / total;
      pos += (rng.uniform01() * total < u[j]) ? 1 : -1;
      ++jumps;
    }
    times[i] = time;
  });

  for (std::uint64_t i = 0; i < count; ++i)
    if (capped[i])
      throw Error(errc::simulation_cap_exceeded,
                  "first-passage trial exceeded the jump cap", static_cast<std::size_t>(i));

  const MeanVar mv = moments(times);
  SimEstimate out;
  out.value = mv.mean;
  out.std_error = std::sqrt(mv.var / static_cast<double>(count));
  out.trajectories = count;
  out.effective_samples = static_cast<double>(count);
  out.seed = config.rng_seed;
  return out;
}

}  // namespace hopred
