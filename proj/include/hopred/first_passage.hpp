#pragma once

#include <cstddef>
#include <vector>

#include "hopred/model.hpp"

namespace hopred {

/// Birth-death chain on the finite interval of states -M..K with absorbing
/// boundaries at -(M+1) and K+1. Rates are indexed by state: forward_rates[i]
/// is the forward rate of state n = i - M.
struct IntervalProblem {
  std::size_t left_count = 0;   ///< M, interior states below 0
  std::size_t right_count = 0;  ///< K, interior states above 0
  std::vector<double> forward_rates;   ///< U_{-M}..U_K, each > 0
  std::vector<double> backward_rates;  ///< W_{-M}..W_K, each >= 0
  long start_state = 0;

  std::size_t state_count() const { return left_count + right_count + 1; }
  std::size_t index_of(long n) const {
    return static_cast<std::size_t>(n + static_cast<long>(left_count));
  }
};

void validate(const IntervalProblem& problem);

/// Mean first-passage times for every state of the interval, including the
/// absorbing boundaries (whose times are exactly 0): times[i] is the MFPT of
/// state n = i - (M+1).
struct MfptSolution {
  std::size_t left_count = 0;
  std::size_t right_count = 0;
  std::vector<double> times;  ///< size M + K + 3

  double at(long n) const {
    return times[static_cast<std::size_t>(n + static_cast<long>(left_count) + 1)];
  }
};

/// Closed-form MFPT of the two-absorber interval problem. Algebraically this
/// is the explicit solution of U_n(T_{n+1}-T_n) + W_n(T_{n-1}-T_n) = -1 with
/// zero boundary values, evaluated as a sum of positive terms
///   T_n = [ sum_i (1/U_i) A_{min(n,i)} Rsuf_{i,max(n,i)} ] / A
/// (A_m: prefix sums of the products prod_{j<=k} W_j/U_j; Rsuf: suffix sums
/// of ratio products starting after i). The regrouping is exactly equivalent
/// to the textbook two-term expression but avoids its catastrophic
/// cancellation on strongly biased chains.
MfptSolution mfpt_closed_form(const IntervalProblem& problem);

/// Direct solve of the defining tridiagonal system with a subtraction-free
/// elimination (the system matrix is a weakly diagonally dominant M-matrix,
/// so pivots can be accumulated as positive quantities). Serves as the
/// independent oracle for mfpt_closed_form.
MfptSolution mfpt_linear_solve(const IntervalProblem& problem);

/// MFPT to complete one forward or backward full cycle from state 0:
/// T_N = R_N / (1 + Gamma).
double period_mfpt(const HoppingModel& model);

/// Interval problem built from a hopping model by periodic extension of the
/// rates (u_{-n} = u_{N-n}); with M = K = N-1 and start 0 its MFPT equals
/// period_mfpt(model).
IntervalProblem periodic_interval_problem(const HoppingModel& model, std::size_t left_count,
                                          std::size_t right_count, long start_state = 0);

}  // namespace hopred
