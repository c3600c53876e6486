#include "stochorder/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "stochorder/corpus.hpp"
#include "stochorder/criteria.hpp"
#include "stochorder/errors.hpp"
#include "stochorder/oracle.hpp"
#include "stochorder/serialize.hpp"
#include "stochorder/spec_io.hpp"

namespace stochorder::cli {

namespace {

using serialize::JsonWriter;

struct CommonOpts {
  std::string p_file, q_file;
  int grid_n = 2001;
  std::vector<std::string> tol_overrides;
  std::string format = "json";
  std::uint64_t seed = 90210;
};

RunConfig make_config(const CommonOpts& o) {
  RunConfig cfg;
  cfg.grid_n = o.grid_n;
  cfg.seed = o.seed;
  if (o.format == "csv")
    cfg.format = OutputFormat::Csv;
  else if (o.format == "json")
    cfg.format = OutputFormat::Json;
  else
    throw InputError("unknown format \"" + o.format + "\"");
  for (const auto& kv : o.tol_overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw InputError("--tol expects KEY=VAL, got \"" + kv + "\"");
    char* end = nullptr;
    const std::string val = kv.substr(eq + 1);
    const double v = std::strtod(val.c_str(), &end);
    if (end != val.c_str() + val.size())
      throw InputError("--tol " + kv + ": value is not a number");
    cfg.set_tolerance(kv.substr(0, eq), v);
  }
  cfg.validate();
  return cfg;
}

void write_shape_json(JsonWriter& w, const ShapeReport& s) {
  w.key("shape").begin_object();
  w.key("log_concave").value(to_string(s.log_concave));
  w.key("worst_curvature").value(s.worst_curvature);
  w.key("worst_curvature_at").value(s.worst_curvature_at);
  w.key("unimodal").value(to_string(s.unimodal));
  w.key("mode_x").value(s.mode_x);
  if (s.has_unimodal_witness) {
    w.key("unimodal_witness").begin_array();
    for (double x : s.unimodal_witness) w.value(x);
    w.end_array();
  }
  w.key("phi_sign").begin_object();
  w.key("runs").value(s.phi_sign.runs());
  w.key("collapsed").value(s.phi_sign.collapsed);
  w.key("change_count").value_int(s.phi_sign.change_count);
  w.key("rightmost").value(s.phi_sign.rightmost == SignWord::Rightmost::Plus
                               ? "+"
                               : s.phi_sign.rightmost == SignWord::Rightmost::Minus
                                     ? "-"
                                     : "all-zero");
  w.end_object();
  w.key("superlevel").begin_object();
  w.key("is_interval").value(s.superlevel_is_interval);
  w.key("empty").value(s.superlevel_empty);
  w.key("left").value(s.superlevel_left);
  w.key("right").value(s.superlevel_right);
  w.end_object();
  w.key("rightmost_piece_nonincreasing").value(s.rightmost_piece_nonincreasing);
  w.key("tolerance_used").value(s.tolerance_used);
  w.key("max_grid_spacing").value(s.max_grid_spacing);
  w.key("discrete").value(s.discrete);
  w.end_object();
}

void write_chain_json(JsonWriter& w, const ShapeReport& s) {
  w.key("hypothesis_chain").begin_array();
  if (s.log_concave == Tri::True) w.value("log-concave");
  if (s.unimodal == Tri::True) w.value("unimodal");
  if (s.phi_sign.change_count <= 2 &&
      s.phi_sign.rightmost != SignWord::Rightmost::Plus)
    w.value("sign-pattern");
  if (s.superlevel_is_interval) w.value("superlevel-interval");
  w.end_array();
}

void write_verdict_json(JsonWriter& w, const CriterionVerdict& v) {
  w.begin_object();
  w.key("criterion").value(to_string(v.criterion));
  w.key("applicable").value(v.applicable);
  w.key("st").value(to_string(v.st));
  w.key("hr").value(to_string(v.hr));
  w.key("lr").value(to_string(v.lr));
  w.key("endpoint_value").value(v.endpoint_value);
  w.key("endpoint_resolved").value(v.endpoint_resolved);
  w.key("support_relation").value(to_string(v.support_relation));
  w.key("assumptions").begin_array();
  for (const auto& a : v.assumptions) {
    w.begin_object();
    w.key("name").value(a.name);
    w.key("status").value(to_string(a.status));
    if (!a.witness.empty()) w.key("witness").value(a.witness);
    w.end_object();
  }
  w.end_array();
  w.end_object();
}

void write_oracle_json(JsonWriter& w, const OracleReport& r) {
  w.begin_object();
  w.key("holds").value(r.holds);
  w.key("worst_violation").value(r.worst_violation);
  w.key("witness").value(r.witness);
  w.key("resolution")
      .value(r.resolution == OracleReport::Resolution::Exact ? "exact" : "grid");
  w.key("neglected_tail").value(r.neglected_tail);
  w.key("refined").value(r.refined);
  w.end_object();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

// CSV rendering of the same report: key,value rows in identical order.
class CsvRows {
 public:
  void add(const std::string& k, const std::string& v) {
    rows_ += csv_escape(k) + "," + csv_escape(v) + "\n";
  }
  void add(const std::string& k, double v) { add(k, serialize::fmt_double_csv(v)); }
  void add(const std::string& k, bool v) { add(k, v ? std::string("true") : std::string("false")); }
  std::string str() const { return "key,value\n" + rows_; }

 private:
  std::string rows_;
};

void shape_csv(CsvRows& rows, const ShapeReport& s) {
  rows.add("shape.log_concave", to_string(s.log_concave));
  rows.add("shape.worst_curvature", s.worst_curvature);
  rows.add("shape.worst_curvature_at", s.worst_curvature_at);
  rows.add("shape.unimodal", to_string(s.unimodal));
  rows.add("shape.mode_x", s.mode_x);
  rows.add("shape.phi_runs", s.phi_sign.runs());
  rows.add("shape.phi_collapsed", s.phi_sign.collapsed);
  rows.add("shape.change_count", static_cast<double>(s.phi_sign.change_count));
  rows.add("shape.superlevel_is_interval", s.superlevel_is_interval);
  rows.add("shape.superlevel_left", s.superlevel_left);
  rows.add("shape.superlevel_right", s.superlevel_right);
  rows.add("shape.rightmost_piece_nonincreasing", s.rightmost_piece_nonincreasing);
  rows.add("shape.tolerance_used", s.tolerance_used);
  rows.add("shape.max_grid_spacing", s.max_grid_spacing);
}

int cmd_classify(const CommonOpts& opts, std::string& out) {
  const RunConfig cfg = make_config(opts);
  const Distribution p = build(load_family_spec_file(opts.p_file));
  const Distribution q = build(load_family_spec_file(opts.q_file));
  const PairContext ctx = analyze_pair(p, q, cfg);

  if (cfg.format == OutputFormat::Csv) {
    CsvRows rows;
    rows.add("p", p.label());
    rows.add("q", q.label());
    rows.add("support_relation", to_string(ctx.relation));
    shape_csv(rows, ctx.shape);
    out = rows.str();
    return 0;
  }
  JsonWriter w;
  w.begin_object();
  w.key("command").value("classify");
  w.key("p").value(p.label());
  w.key("q").value(q.label());
  w.key("support_relation").value(to_string(ctx.relation));
  w.key("grid").begin_object();
  w.key("points").value_int(static_cast<long long>(ctx.grid.size()));
  w.key("left").value(ctx.grid.front());
  w.key("right").value(ctx.grid.back());
  w.end_object();
  write_shape_json(w, ctx.shape);
  write_chain_json(w, ctx.shape);
  w.end_object();
  out = w.str() + "\n";
  return 0;
}

int cmd_compare(const CommonOpts& opts, std::string& out) {
  const RunConfig cfg = make_config(opts);
  const Distribution p = build(load_family_spec_file(opts.p_file));
  const Distribution q = build(load_family_spec_file(opts.q_file));
  const ClassifyResult cls = classify_and_decide(p, q, cfg);
  const OracleReport o_st = verify_st(p, q, cls.ctx.grid, cfg);
  const OracleReport o_hr = verify_hr(p, q, cls.ctx.grid, cfg);
  const OracleReport o_lr = verify_lr(p, q, cls.ctx.grid, cfg);

  struct Entry {
    std::string criterion, order, criterion_verdict, oracle_verdict;
    bool agree;
  };
  std::vector<Entry> entries;
  bool consistent = true;
  const auto check = [&](const CriterionVerdict& v, const char* order,
                         const std::string& cv, bool oracle_holds) {
    if (cv != "holds" && cv != "fails") return;
    const std::string ov = oracle_holds ? "holds" : "fails";
    const bool agree = cv == ov;
    consistent = consistent && agree;
    entries.push_back({to_string(v.criterion), order, cv, ov, agree});
  };
  for (const auto& v : cls.verdicts) {
    if (!v.applicable) continue;
    check(v, "st", to_string(v.st), o_st.holds);
    check(v, "hr", to_string(v.hr), o_hr.holds);
    if (v.lr == LrVerdict::Holds || v.lr == LrVerdict::Fails)
      check(v, "lr", to_string(v.lr), o_lr.holds);
  }

  if (cfg.format == OutputFormat::Csv) {
    CsvRows rows;
    rows.add("p", p.label());
    rows.add("q", q.label());
    rows.add("support_relation", to_string(cls.ctx.relation));
    shape_csv(rows, cls.ctx.shape);
    for (const auto& v : cls.verdicts) {
      const std::string base = "criterion." + to_string(v.criterion);
      rows.add(base + ".applicable", v.applicable);
      rows.add(base + ".st", to_string(v.st));
      rows.add(base + ".hr", to_string(v.hr));
      rows.add(base + ".lr", to_string(v.lr));
      rows.add(base + ".endpoint_value", v.endpoint_value);
    }
    rows.add("merged.st", to_string(cls.st));
    rows.add("merged.hr", to_string(cls.hr));
    rows.add("merged.lr", to_string(cls.lr));
    rows.add("oracle.st", o_st.holds);
    rows.add("oracle.st.worst_violation", o_st.worst_violation);
    rows.add("oracle.hr", o_hr.holds);
    rows.add("oracle.hr.worst_violation", o_hr.worst_violation);
    rows.add("oracle.lr", o_lr.holds);
    rows.add("oracle.lr.worst_violation", o_lr.worst_violation);
    rows.add("agreement.consistent", consistent);
    out = rows.str();
    return consistent ? 0 : 1;
  }

  JsonWriter w;
  w.begin_object();
  w.key("command").value("compare");
  w.key("p").value(p.label());
  w.key("q").value(q.label());
  w.key("support_relation").value(to_string(cls.ctx.relation));
  write_shape_json(w, cls.ctx.shape);
  w.key("verdicts").begin_array();
  for (const auto& v : cls.verdicts) write_verdict_json(w, v);
  w.end_array();
  w.key("merged").begin_object();
  w.key("st").value(to_string(cls.st));
  w.key("hr").value(to_string(cls.hr));
  w.key("lr").value(to_string(cls.lr));
  w.end_object();
  w.key("oracles").begin_object();
  w.key("st");
  write_oracle_json(w, o_st);
  w.key("hr");
  write_oracle_json(w, o_hr);
  w.key("lr");
  write_oracle_json(w, o_lr);
  w.end_object();
  w.key("agreement").begin_object();
  w.key("consistent").value(consistent);
  w.key("entries").begin_array();
  for (const auto& e : entries) {
    w.begin_object();
    w.key("criterion").value(e.criterion);
    w.key("order").value(e.order);
    w.key("criterion_verdict").value(e.criterion_verdict);
    w.key("oracle_verdict").value(e.oracle_verdict);
    w.key("agree").value(e.agree);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  w.end_object();
  out = w.str() + "\n";
  return consistent ? 0 : 1;
}

int cmd_figure(const std::string& panel_arg, const CommonOpts& opts,
               std::string& out) {
  const RunConfig cfg = make_config(opts);
  const auto corpus = load_corpus();
  std::vector<const Scenario*> selected;
  for (const auto& s : corpus) {
    if (s.figure_panel == 0) continue;
    if (panel_arg == "all" ||
        (panel_arg.size() == 1 && panel_arg[0] == s.figure_panel))
      selected.push_back(&s);
  }
  if (selected.empty())
    throw InputError("unknown figure panel \"" + panel_arg +
                     "\" (expected A..F or all)");

  std::ostringstream os;
  os << "panel,x,ell,log_ell,phi_sign\n";
  for (const Scenario* s : selected) {
    const Distribution p = build(s->p_spec);
    const Distribution q = build(s->q_spec);
    const auto grid = evaluation_grid(p, q, cfg.grid_n, cfg.tail_mass);
    const RatioProfile prof = ratio_profile(p, q, grid);
    std::vector<double> phis(prof.phi.begin(), prof.phi.end());
    const SignWord sw = sign_word(phis, cfg.zero_tol);
    for (std::size_t i = 0; i < prof.size(); ++i) {
      os << s->figure_panel << ',' << serialize::fmt_double_csv(prof.grid[i])
         << ',' << serialize::fmt_double_csv(prof.ell[i]) << ','
         << serialize::fmt_double_csv(prof.log_ell[i]) << ',' << sw.word[i]
         << '\n';
    }
  }
  out = os.str();
  return 0;
}

int cmd_corpus(const CommonOpts& opts, const std::string& dump_dir,
               std::string& out) {
  const RunConfig cfg = make_config(opts);
  const auto corpus = load_corpus();

  if (!dump_dir.empty()) {
    std::filesystem::create_directories(dump_dir);
    for (const auto& s : corpus) {
      for (const auto& [suffix, spec] :
           {std::pair<const char*, const FamilySpec*>{"P", &s.p_spec},
            std::pair<const char*, const FamilySpec*>{"Q", &s.q_spec}}) {
        const std::string path = dump_dir + "/" + s.name + "." + suffix + ".json";
        std::ofstream f(path);
        if (!f) throw InputError("cannot write " + path);
        f << family_spec_to_json(*spec) << "\n";
      }
    }
  }

  std::ostringstream os;
  bool all_pass = true;
  int inconclusive = 0;
  for (const auto& s : corpus) {
    const ScenarioReport rep = run_scenario(s, cfg);
    all_pass = all_pass && rep.pass;
    os << (rep.pass ? "PASS" : "FAIL") << "  " << rep.name << "  ("
       << rep.checks.size() << " checks)\n";
    for (const auto& c : rep.checks) {
      if (c.pass) continue;
      os << "      " << c.key << ": expected " << c.expected << ", got "
         << c.actual << "\n";
      if (c.actual == "unknown") ++inconclusive;
    }
  }
  os << (all_pass ? "corpus: all scenarios pass\n"
                  : inconclusive > 0
                        ? "corpus: failures present (" +
                              std::to_string(inconclusive) +
                              " inconclusive verdicts)\n"
                        : "corpus: failures present\n");
  out = os.str();
  return all_pass ? 0 : 1;
}

}  // namespace

CommandResult run_command(const std::vector<std::string>& args) {
  CommandResult result;
  CLI::App app{"stochastic-order endpoint criteria and oracles"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string panel = "all";
  std::string dump_dir;

  const auto add_common = [&](CLI::App* sub, bool needs_pq) {
    if (needs_pq) {
      sub->add_option("--p", opts.p_file, "P spec file (JSON)")->required();
      sub->add_option("--q", opts.q_file, "Q spec file (JSON)")->required();
    }
    sub->add_option("--grid-n", opts.grid_n, "grid size (default 2001)");
    sub->add_option("--tol", opts.tol_overrides,
                    "tolerance override KEY=VAL (repeatable)");
    sub->add_option("--format", opts.format, "json|csv");
    sub->add_option("--seed", opts.seed, "seed for randomized property runs");
  };

  CLI::App* classify = app.add_subcommand("classify", "shape report for a pair");
  add_common(classify, true);
  CLI::App* compare =
      app.add_subcommand("compare", "criteria, oracles and agreement matrix");
  add_common(compare, true);
  CLI::App* figure = app.add_subcommand("figure", "per-panel ratio data (CSV)");
  figure->add_option("--panel", panel, "A..F or all");
  add_common(figure, false);
  CLI::App* corpus = app.add_subcommand("corpus", "run all corpus scenarios");
  corpus->add_option("--dump", dump_dir, "write scenario spec files to DIR");
  add_common(corpus, false);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    std::ostringstream os;
    os << e.get_name() << ": " << e.what() << "\n";
    result.error = os.str();
    result.exit_code = 2;
    return result;
  }

  try {
    if (classify->parsed())
      result.exit_code = cmd_classify(opts, result.output);
    else if (compare->parsed())
      result.exit_code = cmd_compare(opts, result.output);
    else if (figure->parsed())
      result.exit_code = cmd_figure(panel, opts, result.output);
    else if (corpus->parsed())
      result.exit_code = cmd_corpus(opts, dump_dir, result.output);
  } catch (const ConvergenceError& e) {
    result.error = std::string("numeric non-convergence: ") + e.what() + "\n";
    result.exit_code = 3;
  } catch (const DiagnosticError& e) {
    result.error = std::string("diagnostic failure: ") + e.what() + "\n";
    result.exit_code = 1;
  } catch (const InputError& e) {
    result.error = std::string("input error: ") + e.what() + "\n";
    result.exit_code = 2;
  } catch (const std::domain_error& e) {
    result.error = std::string("input error: ") + e.what() + "\n";
    result.exit_code = 2;
  }
  return result;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  const CommandResult r = run_command(args);
  if (!r.output.empty()) std::cout << r.output;
  if (!r.error.empty()) std::cerr << r.error;
  return r.exit_code;
}

}  // namespace stochorder::cli
