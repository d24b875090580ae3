#include "hopred/steady_state.hpp"

#include <cmath>

#include "hopred/detail/log_number.hpp"

namespace hopred {

namespace {

using detail::log1pexp;
using detail::LogDouble;

// Arithmetic adapters so the weight sums can run in plain doubles or in
// log-space with the same code.
struct LinearOps {
  using Num = double;
  static Num from_value(double v) { return v; }
  static Num zero() { return 0.0; }
  static Num one() { return 1.0; }
  static double log_of(Num x) { return std::log(x); }
  static double value_of(Num x) { return x; }
};

struct LogOps {
  using Num = LogDouble;
  static Num from_value(double v) { return LogDouble::from_value(v); }
  static Num zero() { return LogDouble(); }
  static Num one() { return LogDouble::from_value(1.0); }
  static double log_of(Num x) { return x.log(); }
  static double value_of(Num x) { return x.value(); }
};

template <class Ops>
struct Weights {
  using Num = typename Ops::Num;
  std::vector<Num> r, s;
  Num r_sum, s_weighted, g_sum;
};

constexpr double kRangeHi = 1e300;
constexpr double kRangeLo = 1e-300;

// true when a positive intermediate left the representable window
inline bool out_of_range(double x) { return x > kRangeHi || (x > 0.0 && x < kRangeLo); }

template <class Ops>
Weights<Ops> weights_kernel(const HoppingModel& m, bool* range_violation) {
  using Num = typename Ops::Num;
  const std::size_t n = m.period_count;
  const auto& u = m.forward_rates;
  const auto& w = m.backward_rates;

  bool flagged = false;
  auto watch = [&](double v) {
    if (out_of_range(v)) flagged = true;
  };

  std::vector<Num> r(n), s(n);
  for (std::size_t j = 0; j < n; ++j) {
    // r_j
    Num acc = Ops::one();
    Num prod = Ops::one();
    for (std::size_t k = 1; k < n; ++k) {
      const std::size_t i = m.wrap(static_cast<long>(j + k));
      prod = prod * Ops::from_value(w[i]) / Ops::from_value(u[i]);
      if constexpr (std::is_same_v<Num, double>) {
        watch(prod);
        if (prod == 0.0) break;  // an irreversible step kills the rest of the window
      } else {
        if (prod.is_zero()) break;
      }
      acc += prod;
    }
    r[j] = acc / Ops::from_value(u[j]);
    // s_j
    Num acc2 = Ops::one();
    Num prod2 = Ops::one();
    for (std::size_t k = 1; k < n; ++k) {
      const std::size_t num_i = m.wrap(static_cast<long>(j) - static_cast<long>(k) + 1);
      const std::size_t den_i = m.wrap(static_cast<long>(j) - static_cast<long>(k));
      prod2 = prod2 * Ops::from_value(w[num_i]) / Ops::from_value(u[den_i]);
      if constexpr (std::is_same_v<Num, double>) {
        watch(prod2);
        if (prod2 == 0.0) break;
      } else {
        if (prod2.is_zero()) break;
      }
      acc2 += prod2;
    }
    s[j] = acc2 / Ops::from_value(u[j]);
    if constexpr (std::is_same_v<Num, double>) {
      watch(r[j]);
      watch(s[j]);
    }
  }

  Weights<Ops> out;
  out.r = std::move(r);
  out.s = std::move(s);
  out.r_sum = Ops::zero();
  out.g_sum = Ops::zero();
  out.s_weighted = Ops::zero();
  for (std::size_t j = 0; j < n; ++j) {
    out.r_sum += out.r[j];
    out.g_sum += Ops::from_value(u[j]) * out.r[j] * out.s[j];
    Num inner = Ops::zero();
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t idx = m.wrap(static_cast<long>(k + j + 1));
      inner += Ops::from_value(static_cast<double>(k + 1)) * out.r[idx];
    }
    out.s_weighted += out.s[j] * inner;
  }
  if constexpr (std::is_same_v<Num, double>) {
    watch(out.r_sum);
    watch(out.g_sum);
    watch(out.s_weighted);
  }
  if (range_violation) *range_violation = flagged;
  return out;
}

double sum_log_ratios(const HoppingModel& m, bool* has_zero) {
  double acc = 0.0;
  *has_zero = false;
  for (std::size_t j = 0; j < m.period_count; ++j) {
    if (m.backward_rates[j] == 0.0) {
      *has_zero = true;
      return -std::numeric_limits<double>::infinity();
    }
    acc += std::log(m.backward_rates[j] / m.forward_rates[j]);
  }
  return acc;
}

SteadyStateReport report_from_linear(const HoppingModel& m, const Weights<LinearOps>& wts,
                                     double log_gamma, bool gamma_zero) {
  const std::size_t n = m.period_count;
  SteadyStateReport rep;
  rep.log_domain = false;
  rep.r_values = wts.r;
  rep.s_values = wts.s;
  rep.r_sum = wts.r_sum;
  rep.s_weighted = wts.s_weighted;
  rep.g_sum = wts.g_sum;
  rep.gamma = gamma_zero ? 0.0 : std::exp(log_gamma);
  rep.log_gamma = log_gamma;
  rep.log_r.resize(n);
  rep.log_s.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    rep.log_r[j] = std::log(wts.r[j]);
    rep.log_s[j] = std::log(wts.s[j]);
  }
  rep.log_r_sum = std::log(wts.r_sum);
  rep.log_s_weighted = std::log(wts.s_weighted);
  rep.log_g_sum = std::log(wts.g_sum);
  rep.probabilities.resize(n);
  for (std::size_t j = 0; j < n; ++j) rep.probabilities[j] = wts.r[j] / wts.r_sum;
  return rep;
}

SteadyStateReport report_from_log(const HoppingModel& m, const Weights<LogOps>& wts,
                                  double log_gamma, bool gamma_zero) {
  const std::size_t n = m.period_count;
  SteadyStateReport rep;
  rep.log_domain = true;
  rep.log_r.resize(n);
  rep.log_s.resize(n);
  rep.r_values.resize(n);
  rep.s_values.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    rep.log_r[j] = wts.r[j].log();
    rep.log_s[j] = wts.s[j].log();
    rep.r_values[j] = wts.r[j].value();
    rep.s_values[j] = wts.s[j].value();
  }
  rep.log_r_sum = wts.r_sum.log();
  rep.log_s_weighted = wts.s_weighted.log();
  rep.log_g_sum = wts.g_sum.log();
  rep.r_sum = wts.r_sum.value();
  rep.s_weighted = wts.s_weighted.value();
  rep.g_sum = wts.g_sum.value();
  rep.gamma = gamma_zero ? 0.0 : std::exp(log_gamma);
  rep.log_gamma = log_gamma;
  rep.probabilities.resize(n);
  for (std::size_t j = 0; j < n; ++j)
    rep.probabilities[j] = std::exp(rep.log_r[j] - rep.log_r_sum);
  return rep;
}

}  // namespace

SteadyStateReport compute_weights(const HoppingModel& model, WeightsMode mode) {
  validate(model);
  bool gamma_zero = false;
  const double log_gamma = sum_log_ratios(model, &gamma_zero);

  if (mode != WeightsMode::log_space) {
    bool flagged = false;
    auto wts = weights_kernel<LinearOps>(model, &flagged);
    if (!gamma_zero && std::fabs(log_gamma) > 690.0) flagged = true;  // Gamma near the double range
    if (!flagged || mode == WeightsMode::linear)
      return report_from_linear(model, wts, log_gamma, gamma_zero);
    // fall through: recompute in log space
  }
  auto wts = weights_kernel<LogOps>(model, nullptr);
  return report_from_log(model, wts, log_gamma, gamma_zero);
}

TransportStats transport_stats(const HoppingModel& model, WeightsMode mode) {
  const SteadyStateReport rep = compute_weights(model, mode);
  const double L = model.step_length;
  const double n = static_cast<double>(model.period_count);
  const double lg = rep.log_gamma;

  TransportStats out;
  out.gamma = rep.gamma;
  out.r_sum = rep.r_sum;
  out.s_weighted = rep.s_weighted;
  out.g_sum = rep.g_sum;

  // 1 - Gamma from the accumulated log, accurate also near Gamma = 1
  const double one_minus_gamma = -std::expm1(lg);

  if (!rep.log_domain) {
    out.velocity = L * one_minus_gamma / rep.r_sum;
    out.period_mfpt = rep.r_sum / (1.0 + rep.gamma);
    const double v = out.velocity;
    out.diffusion = (L / n) * ((L * rep.g_sum + v * rep.s_weighted) /
                                   (rep.r_sum * rep.r_sum) -
                               (n + 2.0) * v / 2.0);
  } else {
    const double lR = rep.log_r_sum;
    double v;
    if (lg == 0.0) {
      v = 0.0;
    } else if (lg < 0.0) {
      v = L * std::exp(detail::log1mexp(lg) - lR);
    } else {
      v = -L * std::exp(lg + detail::log1mexp(-lg) - lR);
    }
    out.velocity = v;
    out.period_mfpt = std::exp(lR - log1pexp(lg));
    const double t1 = L * std::exp(rep.log_g_sum - 2.0 * lR);
    const double t2 = v * std::exp(rep.log_s_weighted - 2.0 * lR);
    out.diffusion = (L / n) * (t1 + t2 - (n + 2.0) * v / 2.0);
  }

  if (out.velocity != 0.0)
    out.randomness = 2.0 * out.diffusion / (out.velocity * L);
  return out;
}

}  // namespace hopred
