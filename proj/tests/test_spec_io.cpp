#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "stochorder/errors.hpp"
#include "stochorder/spec_io.hpp"

using namespace stochorder;
using doctest::Approx;

TEST_SUITE("spec_io") {

TEST_CASE("parametric families parse from JSON") {
  const auto g = parse_family_spec(
      R"({"family":"gamma","params":{"shape":2,"scale":1.5}})");
  const auto* gs = std::get_if<GammaSpec>(&g);
  REQUIRE(gs != nullptr);
  CHECK(gs->shape == 2.0);
  CHECK(gs->scale == 1.5);

  const auto z = parse_family_spec(
      R"({"family":"zip","params":{"pi":0.5,"lambda":0.693}})");
  CHECK(std::get_if<ZeroInflatedPoissonSpec>(&z) != nullptr);

  const auto u =
      parse_family_spec(R"({"family":"uniform","params":{"a":0,"b":1}})");
  CHECK(std::get_if<UniformSpec>(&u) != nullptr);
}

TEST_CASE("piecewise spec with an infinite tail and the free constant") {
  const auto s = parse_family_spec(R"json({
    "family": "piecewise",
    "pieces": [
      {"from": 0, "to": 1, "expr": "exp(-x)"},
      {"from": 1, "to": 2, "expr": "(1 + c*(x-1)*(2-x))*exp(-x)"},
      {"from": 2, "to": 3, "expr": "exp(-x)"},
      {"from": 3, "to": "inf", "expr": "exp(3 - 2*x)"}
    ]})json");
  const auto* pw = std::get_if<PiecewiseSpec>(&s);
  REQUIRE(pw != nullptr);
  REQUIRE(pw->pieces.size() == 4);
  CHECK(std::isinf(pw->pieces.back().to));
  const Distribution d = build(s);
  CHECK(d.density(0.5) == Approx(std::exp(-0.5)).epsilon(1e-10));
}

TEST_CASE("tabulated spec round-trips through build") {
  const auto s = parse_family_spec(
      R"({"family":"tabulated","support":[0,3],"weights":[1,2,3,4]})");
  const Distribution d = build(s);
  CHECK(d.density(3.0) == Approx(0.4));
}

TEST_CASE("input errors carry the origin and reason") {
  CHECK_THROWS_WITH_AS(parse_family_spec("{", "bad.json"),
                       doctest::Contains("bad.json"), InputError);
  CHECK_THROWS_WITH_AS(
      parse_family_spec(R"({"family":"sine"})"),
      doctest::Contains("unknown family"), InputError);
  CHECK_THROWS_AS(parse_family_spec(R"({"family":"gamma","params":{}})"),
                  InputError);
  CHECK_THROWS_AS(
      parse_family_spec(
          R"({"family":"piecewise","pieces":[{"from":0,"to":1,"expr":"1+"}]})"),
      InputError);
  CHECK_THROWS_AS(
      parse_family_spec(R"({"family":"tabulated","support":[0,1]})"),
      InputError);
  CHECK_THROWS_AS(parse_family_spec(R"([1,2,3])"), InputError);
}

TEST_CASE("file loading reports missing files") {
  CHECK_THROWS_WITH_AS(load_family_spec_file("/nonexistent/path.json"),
                       doctest::Contains("cannot open"), InputError);
}

TEST_CASE("spec serialization round-trips") {
  for (const char* text : {
           R"({"family":"gamma","params":{"shape":2,"scale":1.5}})",
           R"({"family":"exponential","params":{"rate":0.5}})",
           R"({"family":"zip","params":{"pi":0.25,"lambda":2}})",
           R"({"family":"tabulated","support":[0,2],"weights":[1,2,1]})",
       }) {
    const FamilySpec spec = parse_family_spec(text);
    const std::string json = family_spec_to_json(spec);
    const FamilySpec again = parse_family_spec(json);
    CHECK(family_spec_to_json(again) == json);
    CHECK(family_name(again) == family_name(spec));
  }
  // piecewise with infinite tail keeps the "inf" marker
  const FamilySpec pw = parse_family_spec(
      R"json({"family":"piecewise","pieces":[{"from":0,"to":"inf","expr":"exp(-x)"}]})json");
  const std::string json = family_spec_to_json(pw);
  CHECK(json.find("\"inf\"") != std::string::npos);
  CHECK(family_spec_to_json(parse_family_spec(json)) == json);
}

}  // TEST_SUITE
