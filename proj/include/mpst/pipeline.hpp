#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mpst/analysis/linearity.hpp"
#include "mpst/analysis/unfold.hpp"
#include "mpst/analysis/well_asserted.hpp"
#include "mpst/frontend/frontend.hpp"
#include "mpst/projection/projection.hpp"
#include "mpst/runtime/simulator.hpp"
#include "mpst/typing/validate.hpp"

namespace mpst {

enum class TypingModeKind { Multiparty, Binary };

struct PipelineOptions {
  TypingModeKind mode = TypingModeKind::Multiparty;
  bool run = false;
  bool no_assertions = false;
  bool keep_going = false;
  bool force = false;  // simulate even when verification failed
  bool monitor = true;
  SolverOptions solver;
  runtime::Scheduler scheduler;
};

/// A failure that stopped a stage.
struct Diagnostic {
  std::string stage;
  ErrorKind kind;
  std::string message;
  SourcePos pos;
};

struct PipelineResult {
  std::optional<ProtocolFile> file;
  std::vector<Diagnostic> errors;
  CheckReport global_report;  // linearity and well-assertedness
  bool global_checked = false;
  std::vector<Projection> projections;
  bool projected = false;
  CheckReport typing_report;
  std::vector<InferredType> types;
  bool typed = false;
  std::optional<runtime::Trace> trace;

  bool verified() const {
    return errors.empty() && global_checked && global_report.ok() && projected && typed && typing_report.ok();
  }
  int exit_code() const { return verified() && errors.empty() ? 0 : 1; }
};

inline ProtocolFile erase_assertions(ProtocolFile file) {
  file.global = global::erase_assertions(file.global);
  for (auto& p : file.participants) p.process = process::erase_assertions(p.process);
  return file;
}

/// parse, linearity on the unfolded global, well-assertedness, projection,
/// per-participant typing against the projections, then optionally the
/// simulation. A failing stage stops the run unless `keep_going` is set.
inline PipelineResult run_pipeline(std::string_view text, const PipelineOptions& options = {}) {
  PipelineResult r;
  Solver solver(options.solver);
  auto fail = [&](const char* stage, const Error& e) {
    r.errors.push_back(Diagnostic{stage, e.kind(), e.what(), e.pos()});
  };

  try {
    r.file = parse_protocol_file(text);
    if (options.no_assertions) r.file = erase_assertions(*r.file);
  } catch (const Error& e) {
    fail("parse", e);
    return r;
  }
  const ProtocolFile& file = *r.file;

  try {
    r.global_report = analysis::check_linearity(analysis::unfold_once(file.global));
    r.global_report.merge(analysis::check_well_asserted(file.global, solver));
    r.global_checked = true;
  } catch (const Error& e) {
    fail("global", e);
  }
  bool proceed = r.errors.empty() && r.global_report.ok();

  if (proceed || options.keep_going) {
    try {
      r.projections = project_all(file.global);
      r.projected = true;
    } catch (const Error& e) {
      fail("projection", e);
    }
  }
  proceed = proceed && r.projected;

  if ((proceed || options.keep_going) && r.projected) {
    try {
      TypingMode mode = options.mode == TypingModeKind::Binary ? TypingMode::binary_sessions() : TypingMode::multiparty();
      Validation v = validate_all(file, r.projections, mode, solver);
      r.typing_report = std::move(v.report);
      r.types = std::move(v.types);
      r.typed = true;
    } catch (const Error& e) {
      fail("typing", e);
    }
  }

  if (options.run && (r.verified() || options.force)) {
    try {
      runtime::SimulationOptions sim;
      sim.monitor_assertions = options.monitor && !options.no_assertions;
      sim.scheduler = options.scheduler;
      sim.solver = options.solver;
      r.trace = runtime::simulate(file, sim);
    } catch (const Error& e) {
      fail("simulation", e);
    }
  }
  return r;
}

inline std::string locate(const std::string& filename, SourcePos pos) {
  if (!pos.known()) return filename + ": ";
  return filename + ":" + std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": ";
}

/// Text report in the layout of the toolkit's console output.
inline std::string render_text(const PipelineResult& r, const std::string& filename) {
  std::string out;
  auto line = [&](const std::string& s) { out += s + "\n"; };

  if (r.file) line("Parsing ... ok");
  for (const auto& d : r.errors)
    if (d.stage == "parse") line(locate(filename, d.pos) + d.message);
  if (!r.file) return out;

  if (r.global_checked && r.global_report.ok()) line("Global description is well-asserted (and linear).");
  for (const auto& v : r.global_report.violations) line(locate(filename, v.pos) + v.render());
  for (const auto& d : r.errors)
    if (d.stage == "global" || d.stage == "projection") line(locate(filename, d.pos) + d.message);

  if (r.projected) {
    line("");
    line("Projections:");
    for (const auto& p : r.projections) line(p.participant + ": " + local::to_string(p.type));
  }

  if (r.typed) {
    line("");
    line("Types:");
    for (const auto& t : r.types) line(t.heading + ". " + local::to_string(t.type));
    line("");
    for (const auto& v : r.typing_report.violations) {
      if (v.kind == ViolationKind::Refinement) {
        line(v.message);
        for (const auto& d : v.details) line(d);
      } else if (v.kind == ViolationKind::Typing) {
        line(locate(filename, v.pos) + v.message);
      } else {
        line(locate(filename, v.pos) + v.render());
      }
    }
    if (r.typing_report.ok()) line("All types match their projections.");
  }
  for (const auto& d : r.errors)
    if (d.stage == "typing") line(locate(filename, d.pos) + d.message);

  if (r.trace) {
    line("");
    line("Trace:");
    for (const auto& e : r.trace->events) line(e.render());
  }
  for (const auto& d : r.errors)
    if (d.stage == "simulation") line(locate(filename, d.pos) + d.message);
  return out;
}

}  // namespace mpst
