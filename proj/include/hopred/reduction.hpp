#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hopred/model.hpp"

namespace hopred {

enum class ReductionStatus {
  ok,
  infeasible,             ///< VD one-state rates would be negative
  degenerate_velocity,    ///< two-state reduction at Gamma = 1 (V = 0)
  infeasible_aggregates,  ///< two-state aggregates outside the valid cone
  no_real_factorization,  ///< aggregates valid but no nonnegative four-rate split
};

const char* reduction_status_name(ReductionStatus s);

struct StatComparison {
  std::string name;
  double original = 0.0;
  double reduced = 0.0;
};

struct TwoStateAggregates {
  double u = 0.0;      ///< u_r0 * u_r1
  double w = 0.0;      ///< w_r0 * w_r1
  double sigma = 0.0;  ///< u_r0 + u_r1 + w_r0 + w_r1
};

struct ReductionReport {
  ReductionStatus status = ReductionStatus::ok;
  std::optional<OneStateModel> one_state;
  std::optional<TwoStateModel> two_state;
  std::optional<TwoStateAggregates> aggregates;
  /// One-state rates as computed, kept even when infeasible (w_r < 0).
  double computed_u_r = 0.0;
  double computed_w_r = 0.0;
  std::vector<StatComparison> preserved;
  std::vector<StatComparison> discarded;
  std::string detail;
};

/// How to split two-state aggregates (u, w, Sigma) into four rates; the
/// system is underdetermined by one degree of freedom.
struct FactorizationPolicy {
  enum class Kind {
    symmetric_backward,  ///< w_r0 = w_r1 = sqrt(w)
    free_forward,        ///< caller fixes u_r0 = t
  };
  Kind kind = Kind::symmetric_backward;
  double free_u_r0 = 0.0;

  static FactorizationPolicy symmetric() { return {}; }
  static FactorizationPolicy free_forward(double t) {
    return {Kind::free_forward, t};
  }
};

/// One-state reduction preserving mean velocity and period MFPT:
/// u_r = 1/R_N, w_r = Gamma/R_N. Always feasible. The discarded statistic is
/// the diffusion constant, reported as D_r = L^2 (1+Gamma)/(2 R_N) against
/// the original D_N.
ReductionReport reduce_one_state_vt(const HoppingModel& model);

/// One-state reduction preserving mean velocity and diffusion constant.
/// May be infeasible (w_r < 0); the report then carries the computed rates
/// instead of a clamped model. The discarded statistic is the period MFPT.
ReductionReport reduce_one_state_vd(const HoppingModel& model);

/// Two-state reduction preserving (V, T, D): computes the aggregates
///   u = N(1-Gamma)^2 / Q,  w = Gamma u,  Sigma = R_N u,
///   Q = (N+1-Gamma) R_N^2 - G_N R_N - (1-Gamma) S_N,
/// verifies the round trip through the two-state closed forms, and splits the
/// aggregates into four rates with the given policy.
ReductionReport reduce_two_state(const HoppingModel& model,
                                 const FactorizationPolicy& policy = {});

/// Splits aggregates into four nonnegative rates under the policy; throws
/// Error(no_real_factorization) when no real nonnegative solution exists
/// (requires Sigma >= 2 sqrt(u) + 2 sqrt(w)).
TwoStateModel factorize_two_state(double u, double w, double sigma,
                                  const FactorizationPolicy& policy = {},
                                  double step_length = 1.0);

/// V, T, D of a two-state model from its aggregates:
///   V = (u - w) L / Sigma,  T = Sigma/(u + w),  D = L^2/(2T) - V^2/Sigma.
struct TwoStateStats {
  double velocity = 0.0;
  double period_mfpt = 0.0;
  double diffusion = 0.0;
};
TwoStateStats two_state_stats(const TwoStateAggregates& agg, double step_length);

}  // namespace hopred
