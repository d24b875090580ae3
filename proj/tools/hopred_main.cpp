// hopred: transport statistics and model reduction for periodic 1D hopping
// models, with a Fokker-Planck front end for tilted periodic potentials and a
// Monte Carlo cross-check.
//
// Exit codes: 0 success, 1 verification failure, 2 input error,
// 3 infeasible reduction, 4 numerical failure.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hopred/continuous.hpp"
#include "hopred/first_passage.hpp"
#include "hopred/model_io.hpp"
#include "hopred/reduction.hpp"
#include "hopred/simulate.hpp"
#include "hopred/steady_state.hpp"
#include "hopred/version.hpp"

namespace {

using namespace hopred;

constexpr int kExitVerifyFail = 1;
constexpr int kExitInput = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumerical = 4;

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt2e(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

void print_row(const std::string& name, const std::string& value, const std::string& units) {
  std::printf("%-14s %-22s %s\n", name.c_str(), value.c_str(), units.c_str());
}

struct CsvWriter {
  std::vector<std::array<std::string, 3>> rows;
  void add(const std::string& q, double v, const std::string& units) {
    rows.push_back({q, fmt17(v), units});
  }
};

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const std::string& out_path, const std::string& command,
                    const std::string& input, const nlohmann::json& config) {
  nlohmann::json j;
  j["command"] = command;
  j["input"] = input;
  j["config"] = config;
  j["version"] = hopred::version;
  j["timestamp"] = timestamp_utc();
  std::ofstream out(out_path + ".manifest.json", std::ios::binary);
  out << j.dump(2) << "\n";
}

void write_csv(const std::string& path, const CsvWriter& csv, const std::string& command,
               const std::string& input, const nlohmann::json& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(errc::parse_error, "cannot open CSV output: " + path);
  out << "quantity,value,units\n";
  for (const auto& r : csv.rows) out << r[0] << "," << r[1] << "," << r[2] << "\n";
  out.close();
  write_manifest(path, command, input, config);
}

HoppingModel load_discrete(const std::string& path) {
  AnyModel m = load_model(path);
  if (!std::holds_alternative<HoppingModel>(m))
    throw Error(errc::schema_error, "command needs a discrete model file");
  return std::get<HoppingModel>(m);
}

ContinuousModel load_continuous(const std::string& path) {
  AnyModel m = load_model(path);
  if (!std::holds_alternative<ContinuousModel>(m))
    throw Error(errc::schema_error, "command needs a continuous model file");
  return std::get<ContinuousModel>(m);
}

// ---------------------------------------------------------------- solve ----

int cmd_solve(const std::string& path, const std::string& csv_path) {
  const HoppingModel model = load_discrete(path);
  const SteadyStateReport rep = compute_weights(model);
  const TransportStats stats = transport_stats(model);

  print_row("quantity", "value", "units");
  print_row("velocity", fmt6(stats.velocity), "length/time");
  print_row("diffusion", fmt6(stats.diffusion), "length^2/time");
  print_row("period_mfpt", fmt6(stats.period_mfpt), "time");
  print_row("gamma", fmt6(stats.gamma), "dimensionless");
  if (stats.randomness)
    print_row("randomness", fmt6(*stats.randomness), "dimensionless");
  for (std::size_t j = 0; j < rep.probabilities.size(); ++j)
    print_row("p[" + std::to_string(j) + "]", fmt6(rep.probabilities[j]), "dimensionless");

  if (!csv_path.empty()) {
    CsvWriter csv;
    csv.add("velocity", stats.velocity, "length/time");
    csv.add("diffusion", stats.diffusion, "length^2/time");
    csv.add("period_mfpt", stats.period_mfpt, "time");
    csv.add("gamma", stats.gamma, "dimensionless");
    if (stats.randomness) csv.add("randomness", *stats.randomness, "dimensionless");
    for (std::size_t j = 0; j < rep.probabilities.size(); ++j)
      csv.add("p[" + std::to_string(j) + "]", rep.probabilities[j], "dimensionless");
    write_csv(csv_path, csv, "solve", path, nlohmann::json::object());
  }
  return 0;
}

// --------------------------------------------------------------- reduce ----

FactorizationPolicy parse_policy(const std::string& text) {
  if (text == "symmetric") return FactorizationPolicy::symmetric();
  if (text.rfind("free:", 0) == 0) {
    const double t = std::strtod(text.c_str() + 5, nullptr);
    return FactorizationPolicy::free_forward(t);
  }
  throw Error(errc::invalid_argument,
              "--factorization must be \"symmetric\" or \"free:<t>\"");
}

int cmd_reduce(const std::string& path, const std::string& target,
               const std::string& policy_text, const std::string& csv_path) {
  const HoppingModel model = load_discrete(path);

  ReductionReport report;
  if (target == "vt") {
    report = reduce_one_state_vt(model);
  } else if (target == "vd") {
    report = reduce_one_state_vd(model);
  } else if (target == "vtd") {
    report = reduce_two_state(model, parse_policy(policy_text));
  } else {
    throw Error(errc::invalid_argument, "--target must be vt, vd or vtd");
  }

  print_row("target", target, "");
  print_row("status", reduction_status_name(report.status), "");
  CsvWriter csv;

  if (report.status != ReductionStatus::ok) {
    std::printf("reason: %s\n", report.detail.c_str());
    if (report.status == ReductionStatus::infeasible) {
      print_row("u_r", fmt6(report.computed_u_r), "1/time");
      print_row("w_r", fmt6(report.computed_w_r), "1/time");
    }
    if (report.aggregates) {
      print_row("agg_u", fmt6(report.aggregates->u), "1/time^2");
      print_row("agg_w", fmt6(report.aggregates->w), "1/time^2");
      print_row("agg_sigma", fmt6(report.aggregates->sigma), "1/time");
    }
    return kExitInfeasible;
  }

  if (report.one_state) {
    print_row("u_r", fmt6(report.one_state->forward_rate), "1/time");
    print_row("w_r", fmt6(report.one_state->backward_rate), "1/time");
    csv.add("u_r", report.one_state->forward_rate, "1/time");
    csv.add("w_r", report.one_state->backward_rate, "1/time");
  }
  if (report.aggregates) {
    print_row("agg_u", fmt6(report.aggregates->u), "1/time^2");
    print_row("agg_w", fmt6(report.aggregates->w), "1/time^2");
    print_row("agg_sigma", fmt6(report.aggregates->sigma), "1/time");
    csv.add("agg_u", report.aggregates->u, "1/time^2");
    csv.add("agg_w", report.aggregates->w, "1/time^2");
    csv.add("agg_sigma", report.aggregates->sigma, "1/time");
  }
  if (report.two_state) {
    print_row("u_r0", fmt6(report.two_state->u_r0), "1/time");
    print_row("u_r1", fmt6(report.two_state->u_r1), "1/time");
    print_row("w_r0", fmt6(report.two_state->w_r0), "1/time");
    print_row("w_r1", fmt6(report.two_state->w_r1), "1/time");
    csv.add("u_r0", report.two_state->u_r0, "1/time");
    csv.add("u_r1", report.two_state->u_r1, "1/time");
    csv.add("w_r0", report.two_state->w_r0, "1/time");
    csv.add("w_r1", report.two_state->w_r1, "1/time");
  }
  for (const auto& s : report.preserved) {
    std::printf("preserved %-4s %s -> %s\n", s.name.c_str(), fmt6(s.original).c_str(),
                fmt6(s.reduced).c_str());
    csv.add("preserved_" + s.name, s.reduced, "");
  }
  for (const auto& s : report.discarded) {
    std::printf("discarded %-4s %s -> %s\n", s.name.c_str(), fmt6(s.original).c_str(),
                fmt6(s.reduced).c_str());
    csv.add("discarded_" + s.name + "_original", s.original, "");
    csv.add("discarded_" + s.name + "_reduced", s.reduced, "");
  }
  if (!csv_path.empty()) {
    nlohmann::json cfg;
    cfg["target"] = target;
    cfg["factorization"] = policy_text;
    write_csv(csv_path, csv, "reduce", path, cfg);
  }
  return 0;
}

// ----------------------------------------------------------------- mfpt ----

int cmd_mfpt(const std::string& path, const std::vector<long>& interval, long start,
             const std::string& csv_path) {
  const HoppingModel model = load_discrete(path);
  CsvWriter csv;

  if (interval.empty()) {
    const double t = period_mfpt(model);
    print_row("period_mfpt", fmt6(t), "time");
    csv.add("period_mfpt", t, "time");
  } else {
    if (interval.size() != 2 || interval[0] < 0 || interval[1] < 0)
      throw Error(errc::invalid_argument, "--interval needs nonnegative M and K");
    const auto problem = periodic_interval_problem(
        model, static_cast<std::size_t>(interval[0]), static_cast<std::size_t>(interval[1]), start);
    validate(problem);
    const MfptSolution closed = mfpt_closed_form(problem);
    const MfptSolution solved = mfpt_linear_solve(problem);
    std::printf("%-8s %-22s %-22s %s\n", "state", "closed_form", "linear_solve", "rel_dev");
    double worst = 0.0;
    for (long n = -static_cast<long>(problem.left_count) - 1;
         n <= static_cast<long>(problem.right_count) + 1; ++n) {
      const double a = closed.at(n);
      const double b = solved.at(n);
      const double denom = std::max(std::fabs(b), 1e-300);
      const double dev = (a == b) ? 0.0 : std::fabs(a - b) / denom;
      worst = std::max(worst, dev);
      std::printf("%-8ld %-22s %-22s %s\n", n, fmt6(a).c_str(), fmt6(b).c_str(),
                  fmt2e(dev).c_str());
      csv.add("mfpt[" + std::to_string(n) + "]", b, "time");
    }
    std::printf("max_rel_deviation %s\n", fmt2e(worst).c_str());
    std::printf("start_state %ld -> %s\n", start, fmt6(solved.at(start)).c_str());
  }
  if (!csv_path.empty()) {
    nlohmann::json cfg;
    if (!interval.empty()) {
      cfg["interval"] = interval;
      cfg["start"] = start;
    }
    write_csv(csv_path, csv, "mfpt", path, cfg);
  }
  return 0;
}

// ----------------------------------------------------------- continuous ----

int cmd_continuous(const std::string& path, const std::string& quantity, double tol,
                   const std::string& csv_path) {
  const ContinuousModel model = load_continuous(path);
  QuadratureConfig quad;
  if (tol > 0.0) quad.rel_tol = tol;
  DiscretizationBridge bridge;
  if (tol > 0.0) bridge.rel_tol = tol;

  CsvWriter csv;
  if (quantity == "v") {
    const QuadResult v = continuous_velocity(model, quad);
    print_row("velocity", fmt6(v.value) + " +- " + fmt2e(v.error_estimate), "length/time");
    csv.add("velocity", v.value, "length/time");
    csv.add("velocity_error", v.error_estimate, "length/time");
  } else if (quantity == "t") {
    const QuadResult t = continuous_period_mfpt(model, quad);
    print_row("period_mfpt", fmt6(t.value) + " +- " + fmt2e(t.error_estimate), "time");
    csv.add("period_mfpt", t.value, "time");
    csv.add("period_mfpt_error", t.error_estimate, "time");
  } else if (quantity == "rates") {
    const ReducedRatesResult r = continuous_reduce_one_state(model, quad);
    print_row("u_r", fmt6(r.model.forward_rate) + " +- " + fmt2e(r.error_estimate), "1/time");
    print_row("w_r", fmt6(r.model.backward_rate), "1/time");
    csv.add("u_r", r.model.forward_rate, "1/time");
    csv.add("w_r", r.model.backward_rate, "1/time");
  } else if (quantity == "deff") {
    const QuadResult d = effective_diffusion(model, bridge);
    print_row("d_eff", fmt6(d.value) + " +- " + fmt2e(d.error_estimate), "length^2/time");
    csv.add("d_eff", d.value, "length^2/time");
    csv.add("d_eff_error", d.error_estimate, "length^2/time");
  } else {
    throw Error(errc::invalid_argument, "--quantity must be v, t, rates or deff");
  }
  if (!csv_path.empty()) {
    nlohmann::json cfg;
    cfg["quantity"] = quantity;
    cfg["rel_tol"] = quad.rel_tol;
    write_csv(csv_path, csv, "continuous", path, cfg);
  }
  return 0;
}

// --------------------------------------------------------------- verify ----

int cmd_verify(const std::string& path, std::uint64_t seed, std::uint64_t trajectories,
               double horizon, bool corrupt, const std::string& csv_path) {
  const HoppingModel model = load_discrete(path);
  const TransportStats stats = transport_stats(model);
  const double t_closed = period_mfpt(model);

  SimConfig config;
  config.rng_seed = seed;
  config.trajectory_count = trajectories;
  config.horizon_time = horizon > 0.0 ? horizon : default_horizon(model);

  const TransportEstimates transport = simulate_transport(model, config);
  const SimEstimate fp = simulate_first_passage(model, config);

  // test hook: shift the closed forms to force a failure
  const double bias = corrupt ? 1.25 : 1.0;

  struct Line {
    const char* name;
    double closed;
    SimEstimate est;
  } lines[] = {
      {"V", stats.velocity * bias, transport.velocity},
      {"D", stats.diffusion * bias, transport.diffusion},
      {"T", t_closed * bias, fp},
  };

  std::printf("%-4s %-14s %-14s %-14s %-8s %s\n", "qty", "closed_form", "mc_estimate",
              "std_error", "z", "result");
  bool all_pass = true;
  CsvWriter csv;
  for (const auto& l : lines) {
    const double z = l.est.std_error > 0.0
                         ? std::fabs(l.closed - l.est.value) / l.est.std_error
                         : (l.closed == l.est.value ? 0.0 : std::numeric_limits<double>::infinity());
    const bool pass = z <= 4.0;
    all_pass = all_pass && pass;
    char zbuf[32];
    std::snprintf(zbuf, sizeof zbuf, "%.2f", z);
    std::printf("%-4s %-14s %-14s %-14s %-8s %s\n", l.name, fmt6(l.closed).c_str(),
                fmt6(l.est.value).c_str(), fmt6(l.est.std_error).c_str(), zbuf,
                pass ? "PASS" : "FAIL");
    csv.add(std::string(l.name) + "_closed", l.closed, "");
    csv.add(std::string(l.name) + "_estimate", l.est.value, "");
    csv.add(std::string(l.name) + "_std_error", l.est.std_error, "");
  }
  std::printf("verdict: %s\n", all_pass ? "PASS" : "FAIL");
  if (!csv_path.empty()) {
    nlohmann::json cfg;
    cfg["seed"] = seed;
    cfg["trajectories"] = trajectories;
    cfg["horizon"] = config.horizon_time;
    write_csv(csv_path, csv, "verify", path, cfg);
  }
  return all_pass ? 0 : kExitVerifyFail;
}

// ---------------------------------------------------------------- sweep ----

int cmd_sweep(const std::string& path, const std::string& param, double from, double to,
              int steps, const std::string& quantity, const std::string& plot_path) {
  if (steps < 2) throw Error(errc::invalid_argument, "--steps must be at least 2");
  const AnyModel any = load_model(path);

  std::vector<std::pair<double, double>> points;
  for (int i = 0; i < steps; ++i) {
    const double x = from + (to - from) * static_cast<double>(i) / (steps - 1);
    double y = 0.0;
    if (std::holds_alternative<ContinuousModel>(any)) {
      ContinuousModel m = std::get<ContinuousModel>(any);
      if (param == "tilt_force")
        m.tilt_force = x;
      else
        throw Error(errc::invalid_argument,
                    "continuous sweep supports --param tilt_force");
      if (quantity == "v")
        y = continuous_velocity(m).value;
      else if (quantity == "t")
        y = continuous_period_mfpt(m).value;
      else if (quantity == "deff")
        y = effective_diffusion(m).value;
      else
        throw Error(errc::invalid_argument, "continuous sweep quantity must be v, t or deff");
    } else {
      const HoppingModel& base = std::get<HoppingModel>(any);
      if (param != "scale")
        throw Error(errc::invalid_argument, "discrete sweep supports --param scale");
      const HoppingModel m = scale_rates(base, x);
      const TransportStats s = transport_stats(m);
      if (quantity == "v")
        y = s.velocity;
      else if (quantity == "d")
        y = s.diffusion;
      else if (quantity == "t")
        y = s.period_mfpt;
      else
        throw Error(errc::invalid_argument, "discrete sweep quantity must be v, d or t");
    }
    points.emplace_back(x, y);
  }

  std::printf("%-22s %s\n", param.c_str(), quantity.c_str());
  for (const auto& [x, y] : points) std::printf("%-22s %s\n", fmt6(x).c_str(), fmt6(y).c_str());

  if (!plot_path.empty()) {
    std::ofstream out(plot_path, std::ios::binary);
    if (!out) throw Error(errc::parse_error, "cannot open plot data output: " + plot_path);
    out << "# " << param << " " << quantity << "\n";
    for (const auto& [x, y] : points) out << fmt17(x) << " " << fmt17(y) << "\n";
    out.close();
    nlohmann::json cfg;
    cfg["param"] = param;
    cfg["from"] = from;
    cfg["to"] = to;
    cfg["steps"] = steps;
    cfg["quantity"] = quantity;
    write_manifest(plot_path, "sweep", path, cfg);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transport statistics and reduction of periodic 1D hopping models"};
  app.set_version_flag("--version", hopred::version);
  app.require_subcommand(1);

  std::string model_path, csv_path, target = "vt", policy = "symmetric";
  std::string quantity = "v", param = "tilt_force", plot_path;
  std::vector<long> interval;
  long start = 0;
  double tol = -1.0, horizon = -1.0, from = 0.0, to = 1.0;
  int steps = 11;
  std::uint64_t seed = 42, trajectories = 10'000;
  bool corrupt = false;

  auto* solve = app.add_subcommand("solve", "steady-state transport statistics");
  solve->add_option("model", model_path)->required();
  solve->add_option("--csv", csv_path);

  auto* reduce = app.add_subcommand("reduce", "reduce to a one- or two-state model");
  reduce->add_option("model", model_path)->required();
  reduce->add_option("--target", target)->check(CLI::IsMember({"vt", "vd", "vtd"}));
  reduce->add_option("--factorization", policy);
  reduce->add_option("--csv", csv_path);

  auto* mfpt = app.add_subcommand("mfpt", "mean first-passage times");
  mfpt->add_option("model", model_path)->required();
  mfpt->add_option("--interval", interval)->expected(2);
  mfpt->add_option("--start", start);
  mfpt->add_option("--csv", csv_path);

  auto* cont = app.add_subcommand("continuous", "tilted-potential closed forms");
  cont->add_option("model", model_path)->required();
  cont->add_option("--quantity", quantity)->check(CLI::IsMember({"v", "t", "rates", "deff"}));
  cont->add_option("--tol", tol);
  cont->add_option("--csv", csv_path);

  auto* verify = app.add_subcommand("verify", "Monte Carlo cross-check of the closed forms");
  verify->add_option("model", model_path)->required();
  verify->add_option("--seed", seed);
  verify->add_option("--trajectories", trajectories);
  verify->add_option("--horizon", horizon);
  verify->add_option("--csv", csv_path);
  verify->add_flag("--test-corrupt", corrupt)->group("");  // test hook, hidden

  auto* sweep = app.add_subcommand("sweep", "sweep a parameter and tabulate a quantity");
  sweep->add_option("model", model_path)->required();
  sweep->add_option("--param", param);
  sweep->add_option("--from", from);
  sweep->add_option("--to", to);
  sweep->add_option("--steps", steps);
  sweep->add_option("--quantity", quantity);
  sweep->add_option("--emit-plot-data", plot_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return kExitInput;
  }

  try {
    if (solve->parsed()) return cmd_solve(model_path, csv_path);
    if (reduce->parsed()) return cmd_reduce(model_path, target, policy, csv_path);
    if (mfpt->parsed()) return cmd_mfpt(model_path, interval, start, csv_path);
    if (cont->parsed()) return cmd_continuous(model_path, quantity, tol, csv_path);
    if (verify->parsed())
      return cmd_verify(model_path, seed, trajectories, horizon, corrupt, csv_path);
    if (sweep->parsed())
      return cmd_sweep(model_path, param, from, to, steps, quantity, plot_path);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    switch (e.code()) {
      case errc::overflow:
      case errc::singular_system:
      case errc::quadrature_failure:
      case errc::non_convergent:
      case errc::simulation_cap_exceeded:
        return kExitNumerical;
      case errc::no_real_factorization:
        return kExitInfeasible;
      default:
        return kExitInput;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  }
  return 0;
}
