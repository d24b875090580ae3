#pragma once

// Shared helpers for the test suites: randomized model generators and small
// independent oracles (dense stationary solve, literal textbook formulas)
// that the implementation under test must reproduce.

#include <cmath>
#include <cstdint>
#include <vector>

#include "hopred/detail/rng.hpp"
#include "hopred/first_passage.hpp"
#include "hopred/model.hpp"

namespace hopred::testing {

using detail::SplitMix64;

inline HoppingModel random_model(SplitMix64& rng, std::size_t n, double rate_lo, double rate_hi,
                                 double step_length = 1.0) {
  HoppingModel m;
  m.period_count = n;
  m.step_length = step_length;
  m.forward_rates.resize(n);
  m.backward_rates.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    m.forward_rates[j] = rng.log_uniform(rate_lo, rate_hi);
    m.backward_rates[j] = rng.log_uniform(rate_lo, rate_hi);
  }
  return m;
}

inline IntervalProblem random_interval(SplitMix64& rng, std::size_t m_count, std::size_t k_count,
                                       double rate_lo, double rate_hi) {
  IntervalProblem p;
  p.left_count = m_count;
  p.right_count = k_count;
  const std::size_t n = p.state_count();
  p.forward_rates.resize(n);
  p.backward_rates.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    p.forward_rates[i] = rng.log_uniform(rate_lo, rate_hi);
    p.backward_rates[i] = rng.log_uniform(rate_lo, rate_hi);
  }
  return p;
}

/// Stationary distribution via dense Gaussian elimination on the rate matrix
/// of the master equation (independent of the closed-form route): solves
/// u_{j-1} p_{j-1} + w_{j+1} p_{j+1} - (u_j + w_j) p_j = 0 with sum p = 1.
inline std::vector<double> stationary_dense_solve(const HoppingModel& m) {
  const std::size_t n = m.period_count;
  if (n == 1) return {1.0};
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    a[j][m.wrap(static_cast<long>(j) - 1)] += m.u(static_cast<long>(j) - 1);
    a[j][m.wrap(static_cast<long>(j) + 1)] += m.w(static_cast<long>(j) + 1);
    a[j][j] -= m.forward_rates[j] + m.backward_rates[j];
  }
  for (std::size_t k = 0; k < n; ++k) a[n - 1][k] = 1.0;  // normalization row
  a[n - 1][n] = 1.0;
  // partial pivoting
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0.0) continue;
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::vector<double> p(n);
  for (std::size_t j = 0; j < n; ++j) p[j] = a[j][n] / a[j][j];
  return p;
}

/// Largest stationarity residual of the master equation, relative to the
/// largest flux term.
inline double stationarity_residual(const HoppingModel& m, const std::vector<double>& p) {
  const std::size_t n = m.period_count;
  double max_flux = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    max_flux = std::max(max_flux, m.forward_rates[j] * p[j]);
    max_flux = std::max(max_flux, m.backward_rates[j] * p[j]);
  }
  double worst = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const long lj = static_cast<long>(j);
    const double res = m.u(lj - 1) * p[m.wrap(lj - 1)] + m.w(lj + 1) * p[m.wrap(lj + 1)] -
                       (m.forward_rates[j] + m.backward_rates[j]) * p[j];
    worst = std::max(worst, std::fabs(res));
  }
  return max_flux > 0.0 ? worst / max_flux : worst;
}

/// Literal transcription of the textbook two-term closed form
///   T_n = (A_n / A) B - C_n
/// kept as an independent cross-check on mildly biased chains (the two-term
/// arrangement cancels catastrophically on strongly biased ones).
inline std::vector<double> mfpt_literal_two_term(const IntervalProblem& p) {
  const std::size_t n = p.state_count();
  const auto& u = p.forward_rates;
  const auto& w = p.backward_rates;
  std::vector<double> prefix(n + 1);  // A_m = 1 + sum products
  prefix[0] = 1.0;
  double prod = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    prod *= w[k] / u[k];
    prefix[k + 1] = prefix[k] + prod;
  }
  std::vector<double> b(n);
  b[0] = 1.0 / u[0];
  for (std::size_t k = 1; k < n; ++k) {
    double acc = 1.0, pr = 1.0;
    for (std::size_t i = k; i-- > 0;) {
      pr *= w[i + 1] / u[i];
      acc += pr;
    }
    b[k] = acc / u[k];
  }
  double btot = 0.0;
  for (double x : b) btot += x;
  std::vector<double> out(n);
  double c = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    out[m] = prefix[m] / prefix[n] * btot - c;
    c += b[m];
  }
  return out;
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return scale > 0.0 ? std::fabs(a - b) / scale : 0.0;
}

}  // namespace hopred::testing
