#include "stochorder/spec_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "stochorder/errors.hpp"
#include "stochorder/serialize.hpp"

namespace stochorder {

namespace {

using nlohmann::json;

double num(const json& j, const char* key, const std::string& origin) {
  if (!j.contains(key) || !j[key].is_number())
    throw InputError(origin + ": missing numeric parameter \"" + key + "\"");
  return j[key].get<double>();
}

}  // namespace

FamilySpec parse_family_spec(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(origin + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
    throw InputError(origin + ": expected an object with a \"family\" string");
  const std::string fam = j["family"].get<std::string>();
  const json params = j.value("params", json::object());

  if (fam == "gamma") return GammaSpec{num(params, "shape", origin), num(params, "scale", origin)};
  if (fam == "exponential") return ExponentialSpec{num(params, "rate", origin)};
  if (fam == "halfnormal") return HalfNormalSpec{num(params, "sigma", origin)};
  if (fam == "halfstudent") return HalfStudentSpec{num(params, "nu", origin)};
  if (fam == "foldednormal")
    return FoldedNormalSpec{num(params, "mu", origin), num(params, "sigma", origin)};
  if (fam == "poisson") return PoissonSpec{num(params, "lambda", origin)};
  if (fam == "zip")
    return ZeroInflatedPoissonSpec{num(params, "pi", origin),
                                   num(params, "lambda", origin)};
  if (fam == "uniform") return UniformSpec{num(params, "a", origin), num(params, "b", origin)};

  if (fam == "piecewise") {
    if (!j.contains("pieces") || !j["pieces"].is_array() || j["pieces"].empty())
      throw InputError(origin + ": piecewise needs a nonempty \"pieces\" array");
    PiecewiseSpec pw;
    for (const auto& pj : j["pieces"]) {
      PiecewiseSpec::Piece piece;
      piece.from = num(pj, "from", origin);
      if (pj.contains("to") && pj["to"].is_string()) {
        const std::string s = pj["to"].get<std::string>();
        if (s != "inf" && s != "+inf")
          throw InputError(origin + ": piece \"to\" must be a number or \"inf\"");
        piece.to = std::numeric_limits<double>::infinity();
      } else {
        piece.to = num(pj, "to", origin);
      }
      if (!pj.contains("expr") || !pj["expr"].is_string())
        throw InputError(origin + ": piece needs an \"expr\" string");
      piece.expr = pj["expr"].get<std::string>();
      expr::parse(piece.expr);  // surface column-level errors at parse time
      pw.pieces.push_back(std::move(piece));
    }
    return pw;
  }

  if (fam == "tabulated") {
    if (!j.contains("support") || !j["support"].is_array() ||
        j["support"].size() != 2)
      throw InputError(origin + ": tabulated needs \"support\": [lo, hi]");
    TabulatedSpec tab;
    tab.lo = j["support"][0].get<long long>();
    tab.hi = j["support"][1].get<long long>();
    if (!j.contains("weights") || !j["weights"].is_array())
      throw InputError(origin + ": tabulated needs a \"weights\" array");
    for (const auto& w : j["weights"]) {
      if (!w.is_number()) throw InputError(origin + ": weights must be numbers");
      tab.weights.push_back(w.get<double>());
    }
    return tab;
  }

  throw InputError(origin + ": unknown family \"" + fam + "\"");
}

FamilySpec load_family_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_family_spec(buf.str(), path);
}

std::string family_spec_to_json(const FamilySpec& spec) {
  serialize::JsonWriter w;
  w.begin_object();
  w.key("family").value(family_name(spec));
  struct Visitor {
    serialize::JsonWriter& w;
    void params_open() { w.key("params").begin_object(); }
    void operator()(const GammaSpec& s) {
      params_open();
      w.key("shape").value(s.shape).key("scale").value(s.scale).end_object();
    }
    void operator()(const ExponentialSpec& s) {
      params_open();
      w.key("rate").value(s.rate).end_object();
    }
    void operator()(const HalfNormalSpec& s) {
      params_open();
      w.key("sigma").value(s.sigma).end_object();
    }
    void operator()(const HalfStudentSpec& s) {
      params_open();
      w.key("nu").value(s.nu).end_object();
    }
    void operator()(const FoldedNormalSpec& s) {
      params_open();
      w.key("mu").value(s.mu).key("sigma").value(s.sigma).end_object();
    }
    void operator()(const PoissonSpec& s) {
      params_open();
      w.key("lambda").value(s.lambda).end_object();
    }
    void operator()(const ZeroInflatedPoissonSpec& s) {
      params_open();
      w.key("pi").value(s.pi).key("lambda").value(s.lambda).end_object();
    }
    void operator()(const UniformSpec& s) {
      params_open();
      w.key("a").value(s.a).key("b").value(s.b).end_object();
    }
    void operator()(const PiecewiseSpec& s) {
      w.key("pieces").begin_array();
      for (const auto& piece : s.pieces) {
        w.begin_object();
        w.key("from").value(piece.from);
        if (std::isinf(piece.to))
          w.key("to").value("inf");
        else
          w.key("to").value(piece.to);
        w.key("expr").value(piece.expr);
        w.end_object();
      }
      w.end_array();
    }
    void operator()(const TabulatedSpec& s) {
      w.key("support").begin_array().value_int(s.lo).value_int(s.hi).end_array();
      w.key("weights").begin_array();
      for (double x : s.weights) w.value(x);
      w.end_array();
    }
  };
  std::visit(Visitor{w}, spec);
  w.end_object();
  return w.str();
}

}  // namespace stochorder
