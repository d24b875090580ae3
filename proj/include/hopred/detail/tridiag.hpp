#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "hopred/errors.hpp"

namespace hopred::detail {

/// Thomas algorithm for a general tridiagonal system
///   a[i]*x[i-1] + b[i]*x[i] + c[i]*x[i+1] = d[i]
/// (a[0] and c[n-1] unused). No pivoting; intended for the diagonally
/// dominant systems that arise here. Throws on a vanishing pivot.
inline std::vector<double> thomas_solve(const std::vector<double>& a,
                                        const std::vector<double>& b,
                                        const std::vector<double>& c,
                                        const std::vector<double>& d) {
  const std::size_t n = b.size();
  std::vector<double> cp(n), dp(n), x(n);
  if (b[0] == 0.0) throw Error(errc::singular_system, "zero pivot in tridiagonal solve");
  cp[0] = c[0] / b[0];
  dp[0] = d[0] / b[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double m = b[i] - a[i] * cp[i - 1];
    if (m == 0.0 || !std::isfinite(m))
      throw Error(errc::singular_system, "degenerate pivot in tridiagonal solve");
    cp[i] = c[i] / m;
    dp[i] = (d[i] - a[i] * dp[i - 1]) / m;
  }
  x[n - 1] = dp[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = dp[i] - cp[i] * x[i + 1];
  return x;
}

/// Cyclic tridiagonal solve (corner entries alpha = A[0][n-1],
/// beta = A[n-1][0]) via the Sherman-Morrison rank-one update.
inline std::vector<double> cyclic_thomas_solve(const std::vector<double>& a,
                                               const std::vector<double>& b,
                                               const std::vector<double>& c,
                                               const std::vector<double>& d,
                                               double alpha, double beta) {
  const std::size_t n = b.size();
  const double gamma = -b[0];
  std::vector<double> bb = b;
  bb[0] -= gamma;
  bb[n - 1] -= alpha * beta / gamma;
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = beta;
  const auto y = thomas_solve(a, bb, c, d);
  const auto z = thomas_solve(a, bb, c, u);
  const double fact = (y[0] + alpha * y[n - 1] / gamma) /
                      (1.0 + z[0] + alpha * z[n - 1] / gamma);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = y[i] - fact * z[i];
  return x;
}

}  // namespace hopred::detail
