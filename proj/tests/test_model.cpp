#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "hopred/model.hpp"
#include "hopred/model_io.hpp"
#include "test_support.hpp"

using namespace hopred;
using hopred::testing::SplitMix64;

TEST_CASE("validate accepts the minimal model") {
  HoppingModel m{1, 1.0, {2.0}, {1.0}};
  CHECK_NOTHROW(validate(m));
}

TEST_CASE("validate rejects a zero forward rate with the offending index") {
  HoppingModel m{2, 1.0, {2.0, 0.0}, {1.0, 1.0}};
  try {
    validate(m);
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(e.code() == errc::non_positive_forward_rate);
    CHECK(e.index() == std::size_t{1});
  }
}

TEST_CASE("validate rejects a negative backward rate with the offending index") {
  HoppingModel m{2, 1.0, {2.0, 3.0}, {1.0, -0.5}};
  try {
    validate(m);
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(e.code() == errc::negative_backward_rate);
    CHECK(e.index() == std::size_t{1});
  }
}

TEST_CASE("validate rejects empty and mismatched models") {
  CHECK_THROWS_AS(validate(HoppingModel{0, 1.0, {}, {}}), Error);
  CHECK_THROWS_AS(validate(HoppingModel{3, 1.0, {1.0, 2.0}, {0.0, 0.0, 0.0}}), Error);
  CHECK_THROWS_AS(validate(HoppingModel{1, 0.0, {1.0}, {0.0}}), Error);
  CHECK_THROWS_AS(validate(HoppingModel{1, -2.0, {1.0}, {0.0}}), Error);
}

TEST_CASE("w_j = 0 is a valid irreversible step") {
  CHECK_NOTHROW(validate(HoppingModel{2, 1.0, {2.0, 3.0}, {0.0, 0.0}}));
}

TEST_CASE("rotate shifts rate arrays cyclically") {
  HoppingModel m{2, 1.0, {2.0, 3.0}, {1.0, 0.5}};
  const HoppingModel r = rotate(m, 1);
  CHECK(r.forward_rates == std::vector<double>{3.0, 2.0});
  CHECK(r.backward_rates == std::vector<double>{0.5, 1.0});

  const HoppingModel id0 = rotate(m, 0);
  CHECK(id0.forward_rates == m.forward_rates);
  const HoppingModel idN = rotate(m, 2);
  CHECK(idN.forward_rates == m.forward_rates);
  CHECK(idN.backward_rates == m.backward_rates);
}

TEST_CASE("rotate composed N times is the identity; negative shifts wrap") {
  SplitMix64 rng(11);
  const HoppingModel m = testing::random_model(rng, 7, 0.1, 10.0);
  HoppingModel acc = m;
  for (int i = 0; i < 7; ++i) acc = rotate(acc, 1);
  CHECK(acc.forward_rates == m.forward_rates);
  CHECK(acc.backward_rates == m.backward_rates);
  const HoppingModel neg = rotate(m, -3);
  const HoppingModel pos = rotate(m, 4);
  CHECK(neg.forward_rates == pos.forward_rates);
}

TEST_CASE("scale_rates multiplies every rate and rejects c <= 0") {
  HoppingModel m{1, 1.0, {2.0}, {1.0}};
  const HoppingModel s = scale_rates(m, 2.0);
  CHECK(s.forward_rates[0] == 4.0);
  CHECK(s.backward_rates[0] == 2.0);
  const HoppingModel id = scale_rates(m, 1.0);
  CHECK(id.forward_rates == m.forward_rates);
  CHECK_THROWS_AS(scale_rates(m, 0.0), Error);
  CHECK_THROWS_AS(scale_rates(m, -1.0), Error);
}

TEST_CASE("rotate and scale_rates preserve validity on random models") {
  SplitMix64 rng(12);
  for (int t = 0; t < 50; ++t) {
    const auto n = 1 + rng.next() % 12;
    HoppingModel m = testing::random_model(rng, n, 1e-3, 1e3);
    if (rng.uniform01() < 0.3) m.backward_rates[rng.next() % n] = 0.0;
    CHECK_NOTHROW(validate(rotate(m, static_cast<long>(rng.next() % 40) - 20)));
    CHECK_NOTHROW(validate(scale_rates(m, rng.log_uniform(1e-3, 1e3))));
  }
}

TEST_CASE("validate accepts exactly the models satisfying the invariants") {
  SplitMix64 rng(13);
  for (int t = 0; t < 100; ++t) {
    const auto n = 1 + rng.next() % 8;
    HoppingModel m = testing::random_model(rng, n, 1e-2, 1e2);
    const int corruption = static_cast<int>(rng.next() % 4);
    if (corruption == 0) {
      CHECK_NOTHROW(validate(m));
      continue;
    }
    const std::size_t idx = rng.next() % n;
    if (corruption == 1) m.forward_rates[idx] = -m.forward_rates[idx];
    if (corruption == 2) m.backward_rates[idx] = -1e-9;
    if (corruption == 3) m.step_length = 0.0;
    CHECK_THROWS_AS(validate(m), Error);
  }
}

TEST_CASE("model file round trip reproduces the rates exactly") {
  const HoppingModel m{2, 1.0, {2.0, 3.0}, {1.0, 0.5}};
  const std::string path = (std::filesystem::temp_directory_path() / "hopred_rt.json").string();
  save_model(m, path);
  const AnyModel loaded = load_model(path);
  REQUIRE(std::holds_alternative<HoppingModel>(loaded));
  const auto& l = std::get<HoppingModel>(loaded);
  CHECK(l.period_count == m.period_count);
  CHECK(l.step_length == m.step_length);
  CHECK(l.forward_rates == m.forward_rates);
  CHECK(l.backward_rates == m.backward_rates);
  std::remove(path.c_str());
}

TEST_CASE("round trip with awkward decimal values is bit exact") {
  SplitMix64 rng(14);
  HoppingModel m = testing::random_model(rng, 5, 1e-8, 1e8);
  m.step_length = 8e-9;
  const AnyModel back = parse_model(serialize_model(AnyModel{m}));
  const auto& l = std::get<HoppingModel>(back);
  CHECK(l.forward_rates == m.forward_rates);
  CHECK(l.backward_rates == m.backward_rates);
  CHECK(l.step_length == m.step_length);
}

TEST_CASE("continuous model round trip") {
  ContinuousModel c;
  c.period_length = 8.0;
  c.tilt_force = -0.25;
  c.beta = 0.243;
  c.bare_diffusion = 1.75;
  c.potential = SinusoidalPotential{2.0, 0.5};
  const AnyModel back = parse_model(serialize_model(AnyModel{c}));
  REQUIRE(std::holds_alternative<ContinuousModel>(back));
  const auto& l = std::get<ContinuousModel>(back);
  CHECK(l.period_length == c.period_length);
  CHECK(l.tilt_force == c.tilt_force);
  CHECK(l.beta == c.beta);
  CHECK(l.bare_diffusion == c.bare_diffusion);
  CHECK(std::get<SinusoidalPotential>(l.potential).amplitude == 2.0);
  CHECK(std::get<SinusoidalPotential>(l.potential).phase == 0.5);
}

TEST_CASE("schema violations are rejected with the field named") {
  auto expect_schema = [](const std::string& text, const std::string& needle) {
    try {
      parse_model(text);
      FAIL("expected a schema error for: ", text);
    } catch (const Error& e) {
      CHECK(e.code() == errc::schema_error);
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_schema(R"({"kind":"discrete","period_count":0,"step_length":1,)"
                R"("forward_rates":[],"backward_rates":[]})",
                "period_count");
  expect_schema(R"({"kind":"discrete","step_length":1,)"
                R"("forward_rates":[1],"backward_rates":[0]})",
                "period_count");
  expect_schema(R"({"kind":"discrete","period_count":2,"step_length":1,)"
                R"("forward_rates":[1],"backward_rates":[0,0]})",
                "forward_rates");
  expect_schema(R"({"kind":"discrete","period_count":1,"step_length":1,)"
                R"("forward_rates":[1],"backward_rates":[0],"extra":3})",
                "extra");
  expect_schema(R"({"kind":"continuous","period_length":1,"tilt_force":0,"beta":1,)"
                R"("bare_diffusion":1,"potential":{"family":"cubic","amplitude":1}})",
                "family");
  expect_schema(R"({"kind":"what"})", "kind");
}

TEST_CASE("malformed JSON raises a parse error with diagnostics") {
  try {
    parse_model("{ not json");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == errc::parse_error);
  }
}

TEST_CASE("sampled potential interpolates a sine accurately and wraps periodically") {
  ContinuousModel exact;
  exact.period_length = 2.0;
  exact.beta = 1.0;
  exact.potential = SinusoidalPotential{1.5, 0.0};
  ContinuousModel sampled = exact;
  SampledPotential pot;
  const int m = 64;
  for (int i = 0; i < m; ++i)
    pot.values.push_back(exact.periodic_part(2.0 * i / m));
  sampled.potential = std::move(pot);
  for (double x : {0.03, 0.77, 1.31, 1.999, -0.4, 5.13}) {
    CHECK(sampled.periodic_part(x) ==
          doctest::Approx(exact.periodic_part(x)).epsilon(1e-6));
    CHECK(sampled.periodic_part(x) ==
          doctest::Approx(sampled.periodic_part(x + 2.0)).epsilon(1e-12));
  }
}

TEST_CASE("tilted potential has the structural quasi-periodicity") {
  ContinuousModel c;
  c.period_length = 3.0;
  c.tilt_force = 0.8;
  c.potential = SawtoothPotential{1.2, 0.3};
  for (double x : {0.0, 0.4, 1.9, 2.9}) {
    const double lhs = c.tilted(x - c.period_length);
    const double rhs = c.tilted(x) + c.tilt_force * c.period_length;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
  }
}
