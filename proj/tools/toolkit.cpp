// Command-line front end: `toolkit [check] FILE` verifies a protocol file,
// `toolkit qe FORMULA` runs quantifier elimination on a formula.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "mpst/mpst.hpp"

using nlohmann::json;

namespace {

json position(mpst::SourcePos pos) {
  if (!pos.known()) return nullptr;
  return json{{"line", pos.line}, {"column", pos.column}};
}

json violation_json(const mpst::Violation& v) {
  return json{{"kind", mpst::to_string(v.kind)}, {"path", v.path},       {"message", v.message},
              {"position", position(v.pos)},     {"details", v.details}, {"note", v.note}};
}

json trace_json(const mpst::runtime::Trace& t) {
  json events = json::array();
  for (const auto& e : t.events)
    events.push_back({{"step", e.step},
                      {"participant", e.participant},
                      {"action", mpst::runtime::to_string(e.action)},
                      {"channel", e.channel},
                      {"payload", e.payload},
                      {"wire", e.wire}});
  json stores = json::object();
  for (const auto& [p, s] : t.stores) {
    json vars = json::object();
    for (const auto& [k, v] : s) std::visit([&](const auto& x) { vars[k] = x; }, v);
    stores[p] = vars;
  }
  return json{{"events", events}, {"stores", stores}};
}

json report_json(const mpst::PipelineResult& r, const std::string& filename) {
  json out;
  out["file"] = filename;
  out["verdict"] = r.verified() && r.errors.empty() ? "ok" : "failed";
  out["exit_code"] = r.exit_code();
  out["parsed"] = r.file.has_value();
  json errors = json::array();
  for (const auto& d : r.errors)
    errors.push_back({{"stage", d.stage}, {"kind", mpst::to_string(d.kind)}, {"message", d.message}, {"position", position(d.pos)}});
  out["errors"] = errors;
  json global = {{"checked", r.global_checked}, {"well_asserted_and_linear", r.global_checked && r.global_report.ok()}};
  global["violations"] = json::array();
  for (const auto& v : r.global_report.violations) global["violations"].push_back(violation_json(v));
  out["global"] = global;
  json projections = json::array();
  for (const auto& p : r.projections) projections.push_back({{"participant", p.participant}, {"type", mpst::local::to_string(p.type)}});
  out["projections"] = projections;
  json types = json::array();
  for (const auto& t : r.types)
    types.push_back({{"participant", t.participant}, {"heading", t.heading}, {"type", mpst::local::to_string(t.type)}});
  out["types"] = types;
  json typing = json::array();
  for (const auto& v : r.typing_report.violations) typing.push_back(violation_json(v));
  out["typing_violations"] = typing;
  out["trace"] = r.trace ? trace_json(*r.trace) : json(nullptr);
  return out;
}

int run_check(const std::string& path, const mpst::PipelineOptions& options, bool as_json, const std::string& trace_path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << path << ": cannot read file\n";
    return 2;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();

  mpst::PipelineResult r = mpst::run_pipeline(buffer.str(), options);
  if (as_json)
    std::cout << report_json(r, path).dump(2) << "\n";
  else
    std::cout << mpst::render_text(r, path);

  if (!trace_path.empty() && r.trace) {
    std::ofstream t(trace_path);
    if (!t) {
      std::cerr << trace_path << ": cannot write file\n";
      return 2;
    }
    t << trace_json(*r.trace).dump(2) << "\n";
  }
  return r.exit_code();
}

int run_qe(const std::string& text, mpst::SolverOptions options, bool as_json) {
  try {
    mpst::FormulaPtr f = mpst::parse_formula(text);
    mpst::Solver solver(options);
    mpst::QeResult qe = solver.eliminate_quantifiers(f);
    bool sat = solver.is_satisfiable(f);
    bool valid = solver.is_valid(f);
    if (as_json) {
      std::cout << json{{"input", mpst::logic::to_string(f, mpst::logic::Style::Spaced)},
                        {"result", mpst::logic::to_string(qe.formula, mpst::logic::Style::Spaced)},
                        {"eliminated", qe.stats.eliminated},
                        {"atoms", qe.stats.atoms},
                        {"satisfiable", sat},
                        {"valid", valid}}
                       .dump(2)
                << "\n";
    } else {
      std::cout << "input:       " << mpst::logic::to_string(f, mpst::logic::Style::Spaced) << "\n"
                << "result:      " << mpst::logic::to_string(qe.formula, mpst::logic::Style::Spaced) << "\n"
                << "eliminated:  " << qe.stats.eliminated << "\n"
                << "satisfiable: " << (sat ? "yes" : "no") << "\n"
                << "valid:       " << (valid ? "yes" : "no") << "\n";
    }
    return 0;
  } catch (const mpst::Error& e) {
    std::cerr << mpst::format_diagnostic("<formula>", e) << "\n";
    return e.kind() == mpst::ErrorKind::ResourceExhausted ? 1 : 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  // `check` is the default subcommand.
  std::vector<std::string> args(argv + 1, argv + argc);
  if (!args.empty() && args[0] != "check" && args[0] != "qe" && args[0] != "-h" && args[0] != "--help")
    args.insert(args.begin(), "check");
  std::reverse(args.begin(), args.end());

  CLI::App app{"Multiparty session type toolkit"};
  app.require_subcommand(1);

  mpst::PipelineOptions options;
  std::string path, mode = "multiparty", trace_path;
  bool as_json = false, no_monitor = false;
  std::uint64_t seed = 0;
  std::uint64_t budget = mpst::SolverOptions{}.budget;

  auto* check = app.add_subcommand("check", "Verify a protocol file");
  check->add_option("file", path, "Protocol file")->required();
  check->add_flag("--run", options.run, "Simulate the system after verification");
  check->add_option("--mode", mode, "Typing mode")->check(CLI::IsMember({"multiparty", "binary"}));
  check->add_flag("--json", as_json, "Print the report as JSON");
  auto* seed_opt = check->add_option("--seed", seed, "Use a seeded random scheduler");
  check->add_flag("--no-assertions", options.no_assertions, "Treat every assertion as [-]");
  check->add_option("--qe-budget", budget, "Step budget for quantifier elimination")->check(CLI::PositiveNumber);
  check->add_flag("--keep-going", options.keep_going, "Continue after a failing stage");
  check->add_flag("--force", options.force, "Simulate even when verification failed");
  check->add_flag("--no-monitor", no_monitor, "Do not check assertions while simulating");
  check->add_option("--trace-json", trace_path, "Write the simulation trace as JSON to this file");

  std::string formula;
  auto* qe = app.add_subcommand("qe", "Eliminate quantifiers from a formula");
  qe->add_option("formula", formula, "Formula")->required();
  qe->add_flag("--json", as_json, "Print the result as JSON");
  qe->add_option("--qe-budget", budget, "Step budget for quantifier elimination")->check(CLI::PositiveNumber);

  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  options.solver.budget = budget;
  if (*qe) return run_qe(formula, options.solver, as_json);

  options.mode = mode == "binary" ? mpst::TypingModeKind::Binary : mpst::TypingModeKind::Multiparty;
  options.monitor = !no_monitor;
  if (*seed_opt) options.scheduler = mpst::runtime::Scheduler::seeded(seed);
  return run_check(path, options, as_json, trace_path);
}
