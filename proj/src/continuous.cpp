#include "hopred/continuous.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "hopred/detail/log_number.hpp"

namespace hopred {

namespace {

using detail::log1pexp;

constexpr int kInitialPanels = 64;
constexpr int kMaxCheckPanels = 4096;

constexpr double kGlNodes[8] = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr double kGlWeights[8] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

// composite Simpson over an even number of panels with node values f and
// panel width h
double simpson_sum(const std::vector<double>& f, double h) {
  const std::size_t n = f.size() - 1;
  double odd = 0.0, even = 0.0;
  for (std::size_t i = 1; i < n; i += 2) odd += f[i];
  for (std::size_t i = 2; i < n; i += 2) even += f[i];
  return h / 3.0 * (f[0] + f[n] + 4.0 * odd + 2.0 * even);
}

/// Natural logs of the cell integrals over one period:
///   i2 = int_0^L e^{bPhi(y)} ( int_{y-L}^y e^{-bPhi} ) dy   [folded to the cell]
///   a  = int_0^L e^{bPhi(y)} ( int_0^y     e^{-bPhi} ) dy
///   b  = int_0^L e^{bPhi(y)} ( int_y^L     e^{-bPhi} ) dy
/// so that i2 = a + e^{-beta F L} b. Every assembly is a sum of positive
/// terms; the max exponents are factored out and carried in the logs.
struct CellIntegrals {
  double log_i2 = 0.0;
  double log_a = 0.0;
  double log_b = 0.0;
};

CellIntegrals assemble_simpson(const ContinuousModel& m, int outer_panels) {
  const double L = m.period_length;
  const int n = outer_panels;
  const int fine = 2 * n;
  const double hf = L / fine;
  const double bfl = m.beta * m.tilt_force * L;
  const double efl = std::exp(-bfl);

  std::vector<double> tp(fine + 1);
  for (int i = 0; i <= fine; ++i) tp[i] = m.beta * m.tilted(hf * i);
  const double mp = *std::max_element(tp.begin(), tp.end());
  const double mm = -*std::min_element(tp.begin(), tp.end());

  // Simpson pair integrals of e^{-bPhi - mm}, one per outer panel
  std::vector<double> pair(n);
  for (int k = 0; k < n; ++k) {
    pair[k] = hf / 3.0 *
              (std::exp(-tp[2 * k] - mm) + 4.0 * std::exp(-tp[2 * k + 1] - mm) +
               std::exp(-tp[2 * k + 2] - mm));
  }
  std::vector<double> cm(n + 1, 0.0), cmc(n + 1, 0.0);
  for (int j = 0; j < n; ++j) cm[j + 1] = cm[j] + pair[j];
  for (int j = n; j-- > 0;) cmc[j] = cmc[j + 1] + pair[j];

  std::vector<double> f_i2(n + 1), f_a(n + 1), f_b(n + 1);
  for (int j = 0; j <= n; ++j) {
    const double gp = std::exp(tp[2 * j] - mp);
    f_i2[j] = gp * (cm[j] + efl * cmc[j]);
    f_a[j] = gp * cm[j];
    f_b[j] = gp * cmc[j];
  }
  const double h = L / n;
  CellIntegrals out;
  out.log_i2 = mp + mm + std::log(simpson_sum(f_i2, h));
  out.log_a = mp + mm + std::log(simpson_sum(f_a, h));
  out.log_b = mp + mm + std::log(simpson_sum(f_b, h));
  return out;
}

CellIntegrals assemble_gauss(const ContinuousModel& m, int outer_panels) {
  const double L = m.period_length;
  const int n = outer_panels;
  const double h = L / n;
  const double bfl = m.beta * m.tilt_force * L;
  const double efl = std::exp(-bfl);

  // probe max exponents on a uniform grid (scaling only needs a near-max)
  double mp = -1e308, mm = -1e308;
  for (int i = 0; i <= 4 * n; ++i) {
    const double t = m.beta * m.tilted(L * i / (4.0 * n));
    mp = std::max(mp, t);
    mm = std::max(mm, -t);
  }

  auto gm = [&](double x) { return std::exp(-m.beta * m.tilted(x) - mm); };
  auto gp = [&](double x) { return std::exp(m.beta * m.tilted(x) - mp); };
  auto piece_integral = [&](double a, double b) {
    const double c = 0.5 * (a + b), r = 0.5 * (b - a);
    double acc = 0.0;
    for (int k = 0; k < 8; ++k) acc += kGlWeights[k] * gm(c + r * kGlNodes[k]);
    return acc * r;
  };

  // pass 1: panel totals of gm -> global prefix/suffix tables
  std::vector<double> total(n);
  for (int j = 0; j < n; ++j) {
    const double a = h * j;
    double edges[10];
    edges[0] = a;
    for (int k = 0; k < 8; ++k) edges[k + 1] = a + 0.5 * h * (1.0 + kGlNodes[k]);
    edges[9] = a + h;
    double acc = 0.0;
    for (int p = 0; p < 9; ++p) acc += piece_integral(edges[p], edges[p + 1]);
    total[j] = acc;
  }
  std::vector<double> cm(n + 1, 0.0), cmc(n + 1, 0.0);
  for (int j = 0; j < n; ++j) cm[j + 1] = cm[j] + total[j];
  for (int j = n; j-- > 0;) cmc[j] = cmc[j + 1] + total[j];

  // pass 2: outer quadrature with the inner antiderivative at the panel nodes
  double acc_i2 = 0.0, acc_a = 0.0, acc_b = 0.0;
  for (int j = 0; j < n; ++j) {
    const double a = h * j;
    double edges[10];
    edges[0] = a;
    for (int k = 0; k < 8; ++k) edges[k + 1] = a + 0.5 * h * (1.0 + kGlNodes[k]);
    edges[9] = a + h;
    double pieces[9];
    for (int p = 0; p < 9; ++p) pieces[p] = piece_integral(edges[p], edges[p + 1]);
    double suffix[10];
    suffix[9] = 0.0;
    for (int p = 9; p-- > 0;) suffix[p] = suffix[p + 1] + pieces[p];
    double run = cm[j];
    for (int k = 0; k < 8; ++k) {
      run += pieces[k];  // antiderivative of gm at node k
      const double inner_m = run;
      const double inner_c = suffix[k + 1] + cmc[j + 1];
      const double g = gp(edges[k + 1]);
      const double wgt = kGlWeights[k] * 0.5 * h;
      acc_i2 += wgt * g * (inner_m + efl * inner_c);
      acc_a += wgt * g * inner_m;
      acc_b += wgt * g * inner_c;
    }
  }
  CellIntegrals out;
  out.log_i2 = mp + mm + std::log(acc_i2);
  out.log_a = mp + mm + std::log(acc_a);
  out.log_b = mp + mm + std::log(acc_b);
  return out;
}

CellIntegrals assemble(const ContinuousModel& m, int outer_panels, QuadMethod method) {
  return method == QuadMethod::adaptive_simpson ? assemble_simpson(m, outer_panels)
                                                : assemble_gauss(m, outer_panels);
}

struct ConvergedCell {
  CellIntegrals cell;
  int panels = 0;
  double rel_err = 0.0;  // relative change between the two finest levels
};

double rel_change(double log_new, double log_old) {
  return std::fabs(std::expm1(log_old - log_new));
}

ConvergedCell converge_cell(const ContinuousModel& m, const QuadratureConfig& q) {
  validate(m);
  if (!(q.rel_tol > 0.0) || !(q.abs_tol > 0.0) || q.max_subdivisions < 1)
    throw Error(errc::invalid_argument, "invalid quadrature configuration");
  int n = kInitialPanels;
  CellIntegrals prev = assemble(m, n, q.method);
  for (int level = 1; level <= q.max_subdivisions; ++level) {
    n *= 2;
    CellIntegrals cur = assemble(m, n, q.method);
    const double d2 = rel_change(cur.log_i2, prev.log_i2);
    const double da = rel_change(cur.log_a, prev.log_a);
    const double db = rel_change(cur.log_b, prev.log_b);
    const double worst = std::max({d2, da, db});
    const double value = std::exp(cur.log_i2);
    if (worst <= q.rel_tol || (std::isfinite(value) && worst * value <= q.abs_tol))
      return {cur, n, worst};
    prev = cur;
  }
  throw Error(errc::quadrature_failure,
              "integral did not converge within max subdivisions");
}

/// log of form 1 of the velocity integral,
///   int_0^L e^{-bPhi(x)} ( int_x^{x+L} e^{bPhi} ) dx,
/// evaluated directly on [0, 2L] with positive windowed sums (no folding
/// identities), as a guard against transcription errors.
double velocity_form1_log(const ContinuousModel& m, int outer_panels) {
  const double L = m.period_length;
  const int n = outer_panels;
  const int fine = 4 * n;  // fine grid across [0, 2L]
  const double hf = 2.0 * L / fine;

  std::vector<double> tp(fine + 1);
  for (int i = 0; i <= fine; ++i) tp[i] = m.beta * m.tilted(hf * i);
  const double mp = *std::max_element(tp.begin(), tp.end());
  double mm = -1e308;
  for (int i = 0; i <= 2 * n; ++i) mm = std::max(mm, -tp[i]);

  std::vector<double> pair(2 * n);
  for (int k = 0; k < 2 * n; ++k) {
    pair[k] = hf / 3.0 *
              (std::exp(tp[2 * k] - mp) + 4.0 * std::exp(tp[2 * k + 1] - mp) +
               std::exp(tp[2 * k + 2] - mp));
  }
  std::vector<double> f(n + 1);
  for (int j = 0; j <= n; ++j) {
    double window = 0.0;
    for (int k = j; k < j + n; ++k) window += pair[k];
    f[j] = std::exp(-tp[2 * j] - mm) * window;
  }
  return mp + mm + std::log(simpson_sum(f, L / n));
}

/// log of the pre-simplification piece int_0^L e^{bPhi(y)} (int_{y-L}^0
/// e^{-bPhi(z)} dz) dy with the inner integral evaluated on its own grid over
/// [-L, 0] (exercises the quasi-periodic extension of Phi directly).
double mfpt_negative_part_log(const ContinuousModel& m, int outer_panels) {
  const double L = m.period_length;
  const int n = outer_panels;
  const int fine = 2 * n;
  const double hf = L / fine;

  std::vector<double> tneg(fine + 1), tcell(fine + 1);
  for (int i = 0; i <= fine; ++i) {
    tneg[i] = m.beta * m.tilted(-L + hf * i);
    tcell[i] = m.beta * m.tilted(hf * i);
  }
  const double mneg = -*std::min_element(tneg.begin(), tneg.end());
  const double mp = *std::max_element(tcell.begin(), tcell.end());

  std::vector<double> pair(n);
  for (int k = 0; k < n; ++k) {
    pair[k] = hf / 3.0 *
              (std::exp(-tneg[2 * k] - mneg) + 4.0 * std::exp(-tneg[2 * k + 1] - mneg) +
               std::exp(-tneg[2 * k + 2] - mneg));
  }
  std::vector<double> dm(n + 1, 0.0);  // int_{z_j}^0 e^{-bPhi - mneg}
  for (int j = n; j-- > 0;) dm[j] = dm[j + 1] + pair[j];

  std::vector<double> f(n + 1);
  for (int j = 0; j <= n; ++j) f[j] = std::exp(tcell[2 * j] - mp) * dm[j];
  return mp + mneg + std::log(simpson_sum(f, L / n));
}

double logsumexp2(double a, double b) {
  const double hi = std::max(a, b), lo = std::min(a, b);
  if (hi == -std::numeric_limits<double>::infinity()) return hi;
  return hi + std::log1p(std::exp(lo - hi));
}

// converged value + error estimate for a secondary check integral
std::pair<double, double> two_level_log(double (*eval)(const ContinuousModel&, int),
                                        const ContinuousModel& m, int panels) {
  const int p = std::min(panels, kMaxCheckPanels);
  const double coarse = eval(m, p / 2);
  const double finev = eval(m, p);
  return {finev, rel_change(finev, coarse)};
}

}  // namespace

QuadResult richardson_extrapolate(const std::vector<double>& values, int max_order) {
  if (values.empty()) throw Error(errc::invalid_argument, "no values to extrapolate");
  if (values.size() == 1)
    return {values[0], std::numeric_limits<double>::infinity()};
  std::vector<double> row = values;
  std::vector<double> prev_row;
  const int depth = std::min<int>(max_order, static_cast<int>(values.size()) - 1);
  for (int j = 1; j <= depth; ++j) {
    prev_row = row;
    const double f = std::pow(4.0, j);
    std::vector<double> next(row.size() - 1);
    for (std::size_t k = 0; k + 1 < row.size(); ++k)
      next[k] = (f * row[k + 1] - row[k]) / (f - 1.0);
    row = std::move(next);
  }
  const double value = row.back();
  double err;
  if (depth == 0)
    err = std::fabs(values.back() - values[values.size() - 2]);
  else
    err = std::fabs(value - prev_row.back());
  return {value, err};
}

QuadResult continuous_velocity(const ContinuousModel& model, const QuadratureConfig& quad) {
  const ConvergedCell cc = converge_cell(model, quad);
  const double bfl = model.beta * model.tilt_force * model.period_length;
  const double omefl = -std::expm1(-bfl);  // 1 - e^{-beta F L}
  const double v = model.bare_diffusion * model.period_length * omefl * std::exp(-cc.cell.log_i2);

  // both printed arrangements of the double integral must agree
  const auto [log_i1, err1] = two_level_log(&velocity_form1_log, model, cc.panels);
  const double mismatch = rel_change(cc.cell.log_i2, log_i1);
  const double allowance = 50.0 * (quad.rel_tol + cc.rel_err + err1) + 1e-12;
  if (mismatch > allowance)
    throw Error(errc::quadrature_failure,
                "velocity integral forms disagree beyond quadrature tolerance");

  return {v, std::fabs(v) * std::max(cc.rel_err, mismatch)};
}

QuadResult continuous_period_mfpt(const ContinuousModel& model, const QuadratureConfig& quad) {
  const ConvergedCell cc = converge_cell(model, quad);
  const double bfl = model.beta * model.tilt_force * model.period_length;
  const double log_d = std::log(model.bare_diffusion);
  const double log_t = cc.cell.log_i2 - log_d - log1pexp(-bfl);

  // pre-simplification arrangement (forward-weighted form)
  const double log_t_first = logsumexp2(bfl + cc.cell.log_a, cc.cell.log_b) - log_d - log1pexp(bfl);
  // split-at-zero arrangement with the negative-axis inner integral
  const auto [log_bdir, err3] = two_level_log(&mfpt_negative_part_log, model, cc.panels);
  const double log_t_split = logsumexp2(cc.cell.log_a, log_bdir) - log_d - log1pexp(-bfl);

  const double allowance = 50.0 * (quad.rel_tol + cc.rel_err + err3) + 1e-12;
  if (rel_change(log_t, log_t_first) > allowance ||
      rel_change(log_t, log_t_split) > allowance)
    throw Error(errc::quadrature_failure,
                "first-passage integral forms disagree beyond quadrature tolerance");

  const double t = std::exp(log_t);
  return {t, t * std::max(cc.rel_err, rel_change(log_t, log_t_split))};
}

ReducedRatesResult continuous_reduce_one_state(const ContinuousModel& model,
                                               const QuadratureConfig& quad) {
  const ConvergedCell cc = converge_cell(model, quad);
  const double bfl = model.beta * model.tilt_force * model.period_length;
  const double log_d = std::log(model.bare_diffusion);
  const double u_r = std::exp(log_d - cc.cell.log_i2);
  const double w_r = std::exp(log_d - cc.cell.log_i2 - bfl);

  // consistency with the velocity and MFPT assemblies
  const QuadResult v = continuous_velocity(model, quad);
  const QuadResult t = continuous_period_mfpt(model, quad);
  const double allowance = 50.0 * (quad.rel_tol + cc.rel_err) + 1e-12;
  const double vd = std::fabs((u_r - w_r) * model.period_length - v.value);
  const double td = std::fabs((u_r + w_r) * t.value - 1.0);
  if (vd > allowance * std::max(std::fabs(v.value), u_r * model.period_length) ||
      td > allowance)
    throw Error(errc::quadrature_failure, "reduced rates inconsistent with V and T");

  ReducedRatesResult out;
  out.model = OneStateModel{u_r, w_r, model.period_length};
  out.error_estimate = u_r * cc.rel_err;
  return out;
}

HoppingModel discretize(const ContinuousModel& model, std::size_t n_states) {
  validate(model);
  if (n_states < 2)
    throw Error(errc::invalid_argument, "discretization needs at least 2 states");
  const double L = model.period_length;
  const double n = static_cast<double>(n_states);
  const double prefactor = model.bare_diffusion * n * n / (L * L);
  HoppingModel out;
  out.period_count = n_states;
  out.step_length = L;
  out.forward_rates.resize(n_states);
  out.backward_rates.resize(n_states);
  for (std::size_t j = 0; j < n_states; ++j) {
    const double x = L * static_cast<double>(j) / n;
    const double xp = L * (static_cast<double>(j) + 1.0) / n;
    const double xm = L * (static_cast<double>(j) - 1.0) / n;
    const double here = model.tilted(x);
    out.forward_rates[j] = prefactor * std::exp(-model.beta * (model.tilted(xp) - here) / 2.0);
    out.backward_rates[j] = prefactor * std::exp(-model.beta * (model.tilted(xm) - here) / 2.0);
  }
  return out;
}

QuadResult effective_diffusion(const ContinuousModel& model, const DiscretizationBridge& bridge) {
  validate(model);
  if (bridge.state_counts.size() < 2)
    throw Error(errc::invalid_argument, "bridge needs at least two state counts");
  for (std::size_t i = 1; i < bridge.state_counts.size(); ++i)
    if (bridge.state_counts[i] <= bridge.state_counts[i - 1])
      throw Error(errc::invalid_argument, "bridge state counts must increase");

  std::vector<double> levels;
  levels.reserve(bridge.state_counts.size());
  for (std::size_t n : bridge.state_counts)
    levels.push_back(transport_stats(discretize(model, n)).diffusion);

  const QuadResult res = richardson_extrapolate(levels, bridge.extrapolation_order);
  if (!(res.error_estimate <= bridge.rel_tol * std::fabs(res.value) + 1e-300))
    throw Error(errc::non_convergent,
                "effective diffusion extrapolation did not reach the requested tolerance");
  return res;
}

}  // namespace hopred
