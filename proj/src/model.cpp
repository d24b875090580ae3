#include "hopred/model.hpp"

#include <cmath>

#include "hopred/detail/tridiag.hpp"

namespace hopred {

const char* errc_name(errc c) {
  switch (c) {
    case errc::non_positive_forward_rate: return "NonPositiveForwardRate";
    case errc::negative_backward_rate: return "NegativeBackwardRate";
    case errc::empty_model: return "EmptyModel";
    case errc::non_positive_step: return "NonPositiveStep";
    case errc::non_positive_scale: return "NonPositiveScale";
    case errc::parse_error: return "ParseError";
    case errc::schema_error: return "SchemaError";
    case errc::invalid_argument: return "InvalidArgument";
    case errc::degenerate_horizon: return "DegenerateHorizon";
    case errc::overflow: return "Overflow";
    case errc::singular_system: return "SingularSystem";
    case errc::quadrature_failure: return "QuadratureFailure";
    case errc::non_convergent: return "NonConvergent";
    case errc::simulation_cap_exceeded: return "SimulationCapExceeded";
    case errc::no_real_factorization: return "NoRealFactorization";
  }
  return "UnknownError";
}

void validate(const HoppingModel& model) {
  if (model.period_count == 0 || model.forward_rates.empty())
    throw Error(errc::empty_model, "model has no states");
  if (model.forward_rates.size() != model.period_count ||
      model.backward_rates.size() != model.period_count)
    throw Error(errc::empty_model, "rate array lengths do not match period_count");
  if (!(model.step_length > 0.0) || !std::isfinite(model.step_length))
    throw Error(errc::non_positive_step, "step_length must be positive");
  for (std::size_t j = 0; j < model.period_count; ++j) {
    const double u = model.forward_rates[j];
    if (!(u > 0.0) || !std::isfinite(u))
      throw Error(errc::non_positive_forward_rate, "forward rate must be positive", j);
  }
  for (std::size_t j = 0; j < model.period_count; ++j) {
    const double w = model.backward_rates[j];
    if (!(w >= 0.0) || !std::isfinite(w))
      throw Error(errc::negative_backward_rate, "backward rate must be nonnegative", j);
  }
}

void validate(const OneStateModel& model) {
  if (!(model.forward_rate > 0.0) || !std::isfinite(model.forward_rate))
    throw Error(errc::non_positive_forward_rate, "forward rate must be positive", 0);
  if (!(model.backward_rate >= 0.0) || !std::isfinite(model.backward_rate))
    throw Error(errc::negative_backward_rate, "backward rate must be nonnegative", 0);
  if (!(model.step_length > 0.0) || !std::isfinite(model.step_length))
    throw Error(errc::non_positive_step, "step_length must be positive");
}

void validate(const TwoStateModel& model) {
  const double u[2] = {model.u_r0, model.u_r1};
  const double w[2] = {model.w_r0, model.w_r1};
  for (std::size_t i = 0; i < 2; ++i) {
    if (!(u[i] > 0.0) || !std::isfinite(u[i]))
      throw Error(errc::non_positive_forward_rate, "forward rate must be positive", i);
    if (!(w[i] >= 0.0) || !std::isfinite(w[i]))
      throw Error(errc::negative_backward_rate, "backward rate must be nonnegative", i);
  }
  if (!(model.step_length > 0.0) || !std::isfinite(model.step_length))
    throw Error(errc::non_positive_step, "step_length must be positive");
}

void validate(const ContinuousModel& model) {
  if (!(model.period_length > 0.0) || !std::isfinite(model.period_length))
    throw Error(errc::non_positive_step, "period_length must be positive");
  if (!(model.beta > 0.0) || !std::isfinite(model.beta))
    throw Error(errc::invalid_argument, "beta must be positive");
  if (!(model.bare_diffusion > 0.0) || !std::isfinite(model.bare_diffusion))
    throw Error(errc::invalid_argument, "bare_diffusion must be positive");
  if (!std::isfinite(model.tilt_force))
    throw Error(errc::invalid_argument, "tilt_force must be finite");
  if (const auto* s = std::get_if<SampledPotential>(&model.potential)) {
    if (s->values.size() < 4)
      throw Error(errc::schema_error, "sampled potential needs at least 4 values");
    for (std::size_t i = 0; i < s->values.size(); ++i)
      if (!std::isfinite(s->values[i]))
        throw Error(errc::schema_error, "sampled potential value must be finite", i);
  }
}

HoppingModel rotate(const HoppingModel& model, long shift) {
  validate(model);
  const std::size_t n = model.period_count;
  HoppingModel out = model;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = model.wrap(static_cast<long>(j) + shift);
    out.forward_rates[j] = model.forward_rates[src];
    out.backward_rates[j] = model.backward_rates[src];
  }
  return out;
}

HoppingModel scale_rates(const HoppingModel& model, double c) {
  if (!(c > 0.0) || !std::isfinite(c))
    throw Error(errc::non_positive_scale, "scale factor must be positive");
  validate(model);
  HoppingModel out = model;
  for (auto& u : out.forward_rates) u *= c;
  for (auto& w : out.backward_rates) w *= c;
  return out;
}

namespace {

double wrap_unit(double t) {
  double f = t - std::floor(t);
  if (f >= 1.0) f = 0.0;  // guard against rounding at the seam
  return f;
}

// Periodic natural cubic spline through M uniform samples; solves the cyclic
// tridiagonal system for the knot second derivatives once.
void prepare_spline(const SampledPotential& pot, double period) {
  const std::size_t m = pot.values.size();
  const double h = period / static_cast<double>(m);
  std::vector<double> a(m, h), b(m, 4.0 * h), c(m, h), d(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double prev = pot.values[(i + m - 1) % m];
    const double next = pot.values[(i + 1) % m];
    d[i] = 6.0 * (next - 2.0 * pot.values[i] + prev) / h;
  }
  pot.second_derivs = detail::cyclic_thomas_solve(a, b, c, d, h, h);
}

double eval_spline(const SampledPotential& pot, double period, double x) {
  if (pot.second_derivs.size() != pot.values.size()) prepare_spline(pot, period);
  const std::size_t m = pot.values.size();
  const double h = period / static_cast<double>(m);
  const double t = wrap_unit(x / period) * static_cast<double>(m);
  std::size_t i = static_cast<std::size_t>(t);
  if (i >= m) i = m - 1;
  const double dx = (t - static_cast<double>(i)) * h;
  const std::size_t i1 = (i + 1) % m;
  const double y0 = pot.values[i], y1 = pot.values[i1];
  const double m0 = pot.second_derivs[i], m1 = pot.second_derivs[i1];
  const double a0 = (h - dx);
  return (m0 * a0 * a0 * a0 + m1 * dx * dx * dx) / (6.0 * h) +
         (y0 / h - m0 * h / 6.0) * a0 + (y1 / h - m1 * h / 6.0) * dx;
}

}  // namespace

double ContinuousModel::periodic_part(double x) const {
  const double L = period_length;
  if (const auto* p = std::get_if<SinusoidalPotential>(&potential)) {
    return p->amplitude * std::sin(2.0 * M_PI * x / L + p->phase);
  }
  if (const auto* p = std::get_if<SawtoothPotential>(&potential)) {
    const double s = wrap_unit(x / L + p->phase / (2.0 * M_PI));
    return p->amplitude * (1.0 - std::fabs(2.0 * s - 1.0));
  }
  const auto& samples = std::get<SampledPotential>(potential);
  return eval_spline(samples, L, x);
}

}  // namespace hopred
