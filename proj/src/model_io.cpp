#include "hopred/model_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace hopred {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key()))
      throw Error(errc::schema_error, "unknown field \"" + item.key() + "\" in " + where);
  }
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw Error(errc::schema_error, "missing field \"" + key + "\" in " + where);
  return *it;
}

double get_number(const json& obj, const std::string& key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number())
    throw Error(errc::schema_error, "field \"" + key + "\" must be a number");
  return v.get<double>();
}

std::vector<double> get_number_array(const json& obj, const std::string& key,
                                     const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_array())
    throw Error(errc::schema_error, "field \"" + key + "\" must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number())
      throw Error(errc::schema_error, "field \"" + key + "\" must contain only numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

HoppingModel parse_discrete(const json& j) {
  reject_unknown(j, {"kind", "period_count", "step_length", "forward_rates", "backward_rates"},
                 "discrete model");
  const json& pc = require(j, "period_count", "discrete model");
  if (!pc.is_number_integer() || pc.get<long long>() <= 0)
    throw Error(errc::schema_error, "field \"period_count\" must be a positive integer");
  HoppingModel model;
  model.period_count = pc.get<std::size_t>();
  model.step_length = get_number(j, "step_length", "discrete model");
  model.forward_rates = get_number_array(j, "forward_rates", "discrete model");
  model.backward_rates = get_number_array(j, "backward_rates", "discrete model");
  if (model.forward_rates.size() != model.period_count)
    throw Error(errc::schema_error, "field \"forward_rates\" length does not match period_count");
  if (model.backward_rates.size() != model.period_count)
    throw Error(errc::schema_error, "field \"backward_rates\" length does not match period_count");
  validate(model);
  return model;
}

ContinuousModel parse_continuous(const json& j) {
  reject_unknown(j, {"kind", "period_length", "tilt_force", "beta", "bare_diffusion", "potential"},
                 "continuous model");
  ContinuousModel model;
  model.period_length = get_number(j, "period_length", "continuous model");
  model.tilt_force = get_number(j, "tilt_force", "continuous model");
  model.beta = get_number(j, "beta", "continuous model");
  model.bare_diffusion = get_number(j, "bare_diffusion", "continuous model");
  const json& pot = require(j, "potential", "continuous model");
  if (!pot.is_object())
    throw Error(errc::schema_error, "field \"potential\" must be an object");
  const json& fam = require(pot, "family", "potential");
  if (!fam.is_string())
    throw Error(errc::schema_error, "field \"family\" must be a string");
  const std::string family = fam.get<std::string>();
  if (family == "sinusoidal" || family == "sawtooth") {
    reject_unknown(pot, {"family", "amplitude", "phase"}, "potential");
    const double amplitude = get_number(pot, "amplitude", "potential");
    const double phase = pot.contains("phase") ? get_number(pot, "phase", "potential") : 0.0;
    if (family == "sinusoidal")
      model.potential = SinusoidalPotential{amplitude, phase};
    else
      model.potential = SawtoothPotential{amplitude, phase};
  } else if (family == "samples") {
    reject_unknown(pot, {"family", "values"}, "potential");
    SampledPotential samples;
    samples.values = get_number_array(pot, "values", "potential");
    model.potential = std::move(samples);
  } else {
    throw Error(errc::schema_error, "field \"family\" must be \"sinusoidal\", \"sawtooth\" or \"samples\"");
  }
  validate(model);
  return model;
}

json to_json(const HoppingModel& m) {
  json j;
  j["kind"] = "discrete";
  j["period_count"] = m.period_count;
  j["step_length"] = m.step_length;
  j["forward_rates"] = m.forward_rates;
  j["backward_rates"] = m.backward_rates;
  return j;
}

json to_json(const ContinuousModel& m) {
  json j;
  j["kind"] = "continuous";
  j["period_length"] = m.period_length;
  j["tilt_force"] = m.tilt_force;
  j["beta"] = m.beta;
  j["bare_diffusion"] = m.bare_diffusion;
  json pot;
  if (const auto* p = std::get_if<SinusoidalPotential>(&m.potential)) {
    pot["family"] = "sinusoidal";
    pot["amplitude"] = p->amplitude;
    pot["phase"] = p->phase;
  } else if (const auto* p = std::get_if<SawtoothPotential>(&m.potential)) {
    pot["family"] = "sawtooth";
    pot["amplitude"] = p->amplitude;
    pot["phase"] = p->phase;
  } else {
    const auto& s = std::get<SampledPotential>(m.potential);
    pot["family"] = "samples";
    pot["values"] = s.values;
  }
  j["potential"] = pot;
  return j;
}

}  // namespace

AnyModel parse_model(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(errc::parse_error, e.what());
  }
  if (!j.is_object()) throw Error(errc::schema_error, "top level must be an object");
  const json& kind = require(j, "kind", "model");
  if (!kind.is_string())
    throw Error(errc::schema_error, "field \"kind\" must be a string");
  const std::string k = kind.get<std::string>();
  if (k == "discrete") return parse_discrete(j);
  if (k == "continuous") return parse_continuous(j);
  throw Error(errc::schema_error, "field \"kind\" must be \"discrete\" or \"continuous\"");
}

AnyModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::parse_error, "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

std::string serialize_model(const AnyModel& model) {
  json j = std::visit([](const auto& m) { return to_json(m); }, model);
  return j.dump(2) + "\n";
}

void save_model(const AnyModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(errc::parse_error, "cannot open file for writing: " + path);
  out << serialize_model(model);
}

void save_model(const HoppingModel& model, const std::string& path) {
  save_model(AnyModel{model}, path);
}

void save_model(const ContinuousModel& model, const std::string& path) {
  save_model(AnyModel{model}, path);
}

}  // namespace hopred
