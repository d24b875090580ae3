#include "hopred/reduction.hpp"

#include <cmath>

#include "hopred/detail/log_number.hpp"
#include "hopred/steady_state.hpp"

namespace hopred {

namespace {

// Signed evaluation of the Eq-style assemblies from the log-domain report:
// each term is sign * exp(sum of logs), which stays finite for any physical
// model even when the weights themselves overflow doubles.
struct DerridaTerms {
  double n = 0.0;
  double one_minus_gamma = 0.0;  // 1 - Gamma
  double inv_r = 0.0;            // 1/R
  double inv_r2 = 0.0;           // 1/R^2
  double s_over_r3 = 0.0;        // S/R^3
  double s_over_r2 = 0.0;        // S/R^2
  double g_over_r2 = 0.0;        // G/R^2
  double g_over_r = 0.0;         // G/R
  double gamma = 0.0;
};

DerridaTerms derrida_terms(const HoppingModel& model, const SteadyStateReport& rep) {
  DerridaTerms t;
  t.n = static_cast<double>(model.period_count);
  t.one_minus_gamma = -std::expm1(rep.log_gamma);
  t.gamma = rep.gamma;
  if (!rep.log_domain) {
    const double r = rep.r_sum;
    t.inv_r = 1.0 / r;
    t.inv_r2 = 1.0 / (r * r);
    t.s_over_r3 = rep.s_weighted / (r * r * r);
    t.s_over_r2 = rep.s_weighted / (r * r);
    t.g_over_r2 = rep.g_sum / (r * r);
    t.g_over_r = rep.g_sum / r;
  } else {
    t.inv_r = std::exp(-rep.log_r_sum);
    t.inv_r2 = std::exp(-2.0 * rep.log_r_sum);
    t.s_over_r3 = std::exp(rep.log_s_weighted - 3.0 * rep.log_r_sum);
    t.s_over_r2 = std::exp(rep.log_s_weighted - 2.0 * rep.log_r_sum);
    t.g_over_r2 = std::exp(rep.log_g_sum - 2.0 * rep.log_r_sum);
    t.g_over_r = std::exp(rep.log_g_sum - rep.log_r_sum);
  }
  return t;
}

}  // namespace

const char* reduction_status_name(ReductionStatus s) {
  switch (s) {
    case ReductionStatus::ok: return "ok";
    case ReductionStatus::infeasible: return "Infeasible";
    case ReductionStatus::degenerate_velocity: return "DegenerateVelocity";
    case ReductionStatus::infeasible_aggregates: return "InfeasibleAggregates";
    case ReductionStatus::no_real_factorization: return "NoRealFactorization";
  }
  return "unknown";
}

TwoStateStats two_state_stats(const TwoStateAggregates& agg, double step_length) {
  TwoStateStats out;
  const double L = step_length;
  out.velocity = (agg.u - agg.w) * L / agg.sigma;
  out.period_mfpt = agg.sigma / (agg.u + agg.w);
  out.diffusion = L * L / (2.0 * out.period_mfpt) -
                  out.velocity * out.velocity / agg.sigma;
  return out;
}

ReductionReport reduce_one_state_vt(const HoppingModel& model) {
  const SteadyStateReport rep = compute_weights(model);
  const TransportStats stats = transport_stats(model);
  const double L = model.step_length;

  // u_r = 1/R_N, w_r = Gamma/R_N
  const double u_r = std::exp(-rep.log_r_sum);
  const double w_r = std::exp(rep.log_gamma - rep.log_r_sum);

  ReductionReport report;
  report.status = ReductionStatus::ok;
  report.computed_u_r = u_r;
  report.computed_w_r = w_r;
  report.one_state = OneStateModel{u_r, w_r, L};
  report.preserved.push_back({"V", stats.velocity, (u_r - w_r) * L});
  report.preserved.push_back({"T", stats.period_mfpt, 1.0 / (u_r + w_r)});
  const double d_r = L * L * (u_r + w_r) / 2.0;
  report.discarded.push_back({"D", stats.diffusion, d_r});
  return report;
}

ReductionReport reduce_one_state_vd(const HoppingModel& model) {
  const SteadyStateReport rep = compute_weights(model);
  const TransportStats stats = transport_stats(model);
  const DerridaTerms t = derrida_terms(model, rep);
  const double L = model.step_length;

  // u_r = (1/N) [ (1-G) S/R^3 + G_N/R^2 - (1-G)/R ]
  // w_r = (1/N) [ (1-G) S/R^3 + G_N/R^2 - (N+1)(1-G)/R ]
  const double common = t.one_minus_gamma * t.s_over_r3 + t.g_over_r2;
  const double u_r = (common - t.one_minus_gamma * t.inv_r) / t.n;
  const double w_r = (common - (t.n + 1.0) * t.one_minus_gamma * t.inv_r) / t.n;

  ReductionReport report;
  report.computed_u_r = u_r;
  report.computed_w_r = w_r;

  // rounding guard: treat a w_r within a few ulps of zero as exactly zero
  const double scale =
      std::fabs(common) + (t.n + 1.0) * std::fabs(t.one_minus_gamma) * t.inv_r;
  const double tol = 1e-13 * scale;
  double w_eff = w_r;
  if (w_eff < 0.0 && w_eff > -tol) w_eff = 0.0;

  if (!(u_r > 0.0) || w_eff < 0.0) {
    report.status = ReductionStatus::infeasible;
    report.detail = "no nonnegative one-state model matches both V and D";
    return report;
  }
  report.status = ReductionStatus::ok;
  report.one_state = OneStateModel{u_r, w_eff, L};
  // re-evaluate the closed forms at N = 1 on the reduced rates
  const HoppingModel reduced{1, L, {u_r}, {w_eff}};
  const TransportStats rstats = transport_stats(reduced);
  report.preserved.push_back({"V", stats.velocity, rstats.velocity});
  report.preserved.push_back({"D", stats.diffusion, rstats.diffusion});
  report.discarded.push_back({"T", stats.period_mfpt, rstats.period_mfpt});
  return report;
}

ReductionReport reduce_two_state(const HoppingModel& model, const FactorizationPolicy& policy) {
  const SteadyStateReport rep = compute_weights(model);
  const TransportStats stats = transport_stats(model);
  const DerridaTerms t = derrida_terms(model, rep);
  const double L = model.step_length;

  ReductionReport report;

  if (rep.log_gamma == 0.0 || stats.velocity == 0.0) {
    report.status = ReductionStatus::degenerate_velocity;
    report.detail = "zero mean velocity (Gamma = 1): the two-state construction collapses";
    return report;
  }

  // Q = (N+1-G) R^2 - G_N R - (1-G) S, rescaled by R^2 for conditioning:
  // q = (N+1-G) - G_N/R - (1-G) S/R^2
  const double q = (t.n + 1.0 - t.gamma) - t.g_over_r - t.one_minus_gamma * t.s_over_r2;
  const double q_scale =
      (t.n + 1.0 + t.gamma) + t.g_over_r + std::fabs(t.one_minus_gamma) * t.s_over_r2;

  // L^2 - 2DT carries the same sign as q
  const double l2m2dt = L * L - 2.0 * stats.diffusion * stats.period_mfpt;

  if (q <= 1e-12 * q_scale || l2m2dt <= 0.0) {
    report.status = ReductionStatus::infeasible_aggregates;
    report.detail = "L^2 - 2 D T <= 0: no two-state model reproduces (V, T, D)";
    return report;
  }

  // u = N (1-G)^2 / (q R^2), w = Gamma u, Sigma = R u = N (1-G)^2 / (q R)
  const double omg2 = t.one_minus_gamma * t.one_minus_gamma;
  const double u = t.n * omg2 * t.inv_r2 / q;
  const double w = t.gamma * u;
  const double sigma = t.n * omg2 * t.inv_r / q;
  report.aggregates = TwoStateAggregates{u, w, sigma};

  const TwoStateStats check = two_state_stats(*report.aggregates, L);
  report.preserved.push_back({"V", stats.velocity, check.velocity});
  report.preserved.push_back({"T", stats.period_mfpt, check.period_mfpt});
  report.preserved.push_back({"D", stats.diffusion, check.diffusion});

  try {
    TwoStateModel split = factorize_two_state(u, w, sigma, policy, L);
    report.two_state = split;
    report.status = ReductionStatus::ok;
  } catch (const Error& e) {
    if (e.code() != errc::no_real_factorization) throw;
    report.status = ReductionStatus::no_real_factorization;
    report.detail = e.what();
  }
  return report;
}

TwoStateModel factorize_two_state(double u, double w, double sigma,
                                  const FactorizationPolicy& policy, double step_length) {
  if (!(u > 0.0) || !std::isfinite(u))
    throw Error(errc::invalid_argument, "aggregate u must be positive");
  if (!(w >= 0.0) || !std::isfinite(w))
    throw Error(errc::invalid_argument, "aggregate w must be nonnegative");
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw Error(errc::invalid_argument, "aggregate Sigma must be positive");

  // tolerance for discriminants that vanish up to rounding (AM-GM boundary)
  const double disc_tol = 1e-14 * (sigma * sigma + 4.0 * (u + w));

  if (policy.kind == FactorizationPolicy::Kind::symmetric_backward) {
    const double wr = std::sqrt(w);
    const double su = sigma - 2.0 * wr;  // u_r0 + u_r1
    double disc = su * su - 4.0 * u;
    if (su < 0.0 || disc < -disc_tol)
      throw Error(errc::no_real_factorization,
                  "Sigma < 2 sqrt(u) + 2 sqrt(w): no nonnegative factorization");
    if (disc < 0.0) disc = 0.0;
    const double root_hi = (su + std::sqrt(disc)) / 2.0;
    const double root_lo = root_hi > 0.0 ? u / root_hi : 0.0;
    TwoStateModel out{root_hi, root_lo, wr, wr, step_length};
    validate(out);
    return out;
  }

  // free policy: u_r0 = t fixed by the caller
  const double tpar = policy.free_u_r0;
  if (!(tpar > 0.0) || !std::isfinite(tpar))
    throw Error(errc::invalid_argument, "free factorization parameter must be positive");
  const double u_r1 = u / tpar;
  const double ws = sigma - tpar - u_r1;  // w_r0 + w_r1
  double disc = ws * ws - 4.0 * w;
  if (ws < -disc_tol || disc < -disc_tol)
    throw Error(errc::no_real_factorization,
                "no nonnegative backward rates for the requested u_r0");
  if (ws < 0.0 || disc < 0.0) disc = 0.0;
  const double w_hi = (std::max(ws, 0.0) + std::sqrt(disc)) / 2.0;
  const double w_lo = w_hi > 0.0 ? w / w_hi : 0.0;
  TwoStateModel out{tpar, u_r1, w_hi, w_lo, step_length};
  validate(out);
  return out;
}

}  // namespace hopred
