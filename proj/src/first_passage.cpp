#include "hopred/first_passage.hpp"

#include <cmath>
#include <limits>

#include "hopred/detail/log_number.hpp"
#include "hopred/steady_state.hpp"

namespace hopred {

namespace {

using detail::LogDouble;

struct LinearOps {
  using Num = double;
  static Num from_value(double v) { return v; }
  static Num zero() { return 0.0; }
  static Num one() { return 1.0; }
  static double value_of(Num x) { return x; }
};

struct LogOps {
  using Num = LogDouble;
  static Num from_value(double v) { return LogDouble::from_value(v); }
  static Num zero() { return LogDouble(); }
  static Num one() { return LogDouble::from_value(1.0); }
  static double value_of(Num x) { return x.value(); }
};

constexpr double kRangeHi = 1e300;
constexpr double kRangeLo = 1e-300;

inline bool out_of_range(double x) { return x > kRangeHi || (x > 0.0 && x < kRangeLo); }

// T_n = [ sum_i (1/U_i) * A_{min(n,i)} * Rsuf_{i,max(n,i)} ] / A  with
//   P_k   = prod_{j<=k} W_j/U_j            (P at the left absorber = 1)
//   A_m   = sum_{k<m} P_k                  (prefix)
//   Rsuf_{i,m} = sum_{b>=m} prod_{i<j<=b} W_j/U_j.
// Every term is nonnegative, so the evaluation is cancellation-free.
template <class Ops>
std::vector<double> closed_form_kernel(const IntervalProblem& p, bool* range_violation) {
  using Num = typename Ops::Num;
  const std::size_t n = p.state_count();
  const auto& U = p.forward_rates;
  const auto& W = p.backward_rates;

  bool flagged = false;
  auto watch = [&](double v) {
    if (out_of_range(v)) flagged = true;
  };

  // prefix sums of the boundary-anchored products
  std::vector<Num> apre(n + 2);
  apre[0] = Ops::zero();
  Num pk = Ops::one();
  apre[1] = pk;
  for (std::size_t k = 0; k < n; ++k) {
    pk = pk * Ops::from_value(W[k]) / Ops::from_value(U[k]);
    if constexpr (std::is_same_v<Num, double>) watch(pk);
    apre[k + 2] = apre[k + 1] + pk;
  }
  const Num a_total = apre[n + 1];

  std::vector<Num> num(n, Ops::zero());
  std::vector<Num> t(n), rsuf(n + 1);
  std::vector<Num> c_suffix(n + 1, Ops::zero());
  std::vector<Num> r_at_i(n);

  for (std::size_t i = 0; i < n; ++i) {
    t[i] = Ops::one();
    for (std::size_t b = i + 1; b < n; ++b) {
      t[b] = t[b - 1] * Ops::from_value(W[b]) / Ops::from_value(U[b]);
      if constexpr (std::is_same_v<Num, double>) watch(Ops::value_of(t[b]));
    }
    rsuf[n] = Ops::zero();
    for (std::size_t b = n; b-- > i;) rsuf[b] = rsuf[b + 1] + t[b];
    r_at_i[i] = rsuf[i];
    // states strictly right of i use A_i and the suffix starting at them
    const Num di = apre[i + 1] / Ops::from_value(U[i]);
    for (std::size_t m = i + 1; m < n; ++m) num[m] += di * rsuf[m];
  }
  // states at or left of i share the factor (1/U_i) * Rsuf_{i,i}
  for (std::size_t i = n; i-- > 0;)
    c_suffix[i] = c_suffix[i + 1] + r_at_i[i] / Ops::from_value(U[i]);
  for (std::size_t m = 0; m < n; ++m) num[m] += apre[m + 1] * c_suffix[m];

  std::vector<double> times(n);
  for (std::size_t m = 0; m < n; ++m) {
    const Num v = num[m] / a_total;
    times[m] = Ops::value_of(v);
    if constexpr (std::is_same_v<Num, double>) watch(times[m]);
  }
  if (range_violation) *range_violation = flagged;
  return times;
}

// Forward elimination of the M-matrix system
//   -W_i T_{i-1} + (U_i + W_i) T_i - U_i T_{i+1} = 1
// with pivots pi_i = U_i + p_i, p_i = W_i p_{i-1} / pi_{i-1}: all recurrence
// quantities stay positive, which keeps every component of the solution
// accurate in a relative sense even when T spans many orders of magnitude.
template <class Ops>
std::vector<double> linear_solve_kernel(const IntervalProblem& p, bool* range_violation) {
  using Num = typename Ops::Num;
  const std::size_t n = p.state_count();
  const auto& U = p.forward_rates;
  const auto& W = p.backward_rates;

  bool flagged = false;
  auto watch = [&](double v) {
    if (out_of_range(v)) flagged = true;
  };

  std::vector<Num> pivot(n), rhs(n);
  Num excess = Ops::from_value(W[0]);
  pivot[0] = Ops::from_value(U[0]) + excess;
  rhs[0] = Ops::one();
  for (std::size_t i = 1; i < n; ++i) {
    excess = Ops::from_value(W[i]) * excess / pivot[i - 1];
    pivot[i] = Ops::from_value(U[i]) + excess;
    rhs[i] = Ops::one() + Ops::from_value(W[i]) * rhs[i - 1] / pivot[i - 1];
    if constexpr (std::is_same_v<Num, double>) {
      watch(Ops::value_of(pivot[i]));
      watch(Ops::value_of(rhs[i]));
      if (!(Ops::value_of(pivot[i]) > 0.0))
        throw Error(errc::singular_system, "nonpositive pivot in MFPT solve");
    }
  }
  std::vector<Num> sol(n);
  sol[n - 1] = rhs[n - 1] / pivot[n - 1];
  for (std::size_t i = n - 1; i-- > 0;)
    sol[i] = (rhs[i] + Ops::from_value(U[i]) * sol[i + 1]) / pivot[i];

  std::vector<double> times(n);
  for (std::size_t i = 0; i < n; ++i) {
    times[i] = Ops::value_of(sol[i]);
    if constexpr (std::is_same_v<Num, double>) watch(times[i]);
  }
  if (range_violation) *range_violation = flagged;
  return times;
}

MfptSolution wrap_solution(const IntervalProblem& p, std::vector<double> interior) {
  MfptSolution out;
  out.left_count = p.left_count;
  out.right_count = p.right_count;
  out.times.assign(p.state_count() + 2, 0.0);
  for (std::size_t i = 0; i < interior.size(); ++i) out.times[i + 1] = interior[i];
  return out;
}

template <std::vector<double> (*Kernel)(const IntervalProblem&, bool*),
          std::vector<double> (*LogKernel)(const IntervalProblem&, bool*)>
MfptSolution run_with_fallback(const IntervalProblem& p) {
  bool flagged = false;
  auto interior = Kernel(p, &flagged);
  if (flagged) interior = LogKernel(p, nullptr);
  return wrap_solution(p, std::move(interior));
}

}  // namespace

void validate(const IntervalProblem& problem) {
  const std::size_t n = problem.left_count + problem.right_count + 1;
  if (problem.forward_rates.size() != n || problem.backward_rates.size() != n)
    throw Error(errc::empty_model, "interval rate arrays must have M+K+1 entries");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(problem.forward_rates[i] > 0.0) || !std::isfinite(problem.forward_rates[i]))
      throw Error(errc::non_positive_forward_rate, "forward rate must be positive", i);
    if (!(problem.backward_rates[i] >= 0.0) || !std::isfinite(problem.backward_rates[i]))
      throw Error(errc::negative_backward_rate, "backward rate must be nonnegative", i);
  }
  const long lo = -static_cast<long>(problem.left_count);
  const long hi = static_cast<long>(problem.right_count);
  if (problem.start_state < lo || problem.start_state > hi)
    throw Error(errc::invalid_argument, "start_state outside the interval");
}

MfptSolution mfpt_closed_form(const IntervalProblem& problem) {
  validate(problem);
  return run_with_fallback<closed_form_kernel<LinearOps>, closed_form_kernel<LogOps>>(problem);
}

MfptSolution mfpt_linear_solve(const IntervalProblem& problem) {
  validate(problem);
  return run_with_fallback<linear_solve_kernel<LinearOps>, linear_solve_kernel<LogOps>>(problem);
}

double period_mfpt(const HoppingModel& model) {
  const SteadyStateReport rep = compute_weights(model);
  // T = R_N / (1 + Gamma), assembled from logs so extreme biases stay finite
  return std::exp(rep.log_r_sum - detail::log1pexp(rep.log_gamma));
}

IntervalProblem periodic_interval_problem(const HoppingModel& model, std::size_t left_count,
                                          std::size_t right_count, long start_state) {
  validate(model);
  IntervalProblem p;
  p.left_count = left_count;
  p.right_count = right_count;
  p.start_state = start_state;
  const std::size_t n = p.state_count();
  p.forward_rates.resize(n);
  p.backward_rates.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const long state = static_cast<long>(i) - static_cast<long>(left_count);
    p.forward_rates[i] = model.u(state);
    p.backward_rates[i] = model.w(state);
  }
  return p;
}

}  // namespace hopred
