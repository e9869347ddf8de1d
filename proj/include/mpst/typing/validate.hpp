#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "mpst/analysis/report.hpp"
#include "mpst/frontend/parser.hpp"
#include "mpst/projection/projection.hpp"
#include "mpst/typing/infer.hpp"
#include "mpst/typing/refine.hpp"

namespace mpst {

struct InferredType {
  std::string participant;
  std::string heading;  // e.g. "init:a[B1,B2,S](s,b1,b2)"
  LocalPtr type;        // over the initiator's channel names
};

struct Validation {
  CheckReport report;
  std::vector<InferredType> types;  // in file order
  TypingEnvironment environment;
};

/// Branch identifiers declared anywhere in the file.
inline std::set<std::string> branch_ids(const ProtocolFile& file) {
  std::set<std::string> ids;
  global::collect_branch_ids(file.global, ids);
  for (const auto& part : file.participants) process::collect_branch_ids(part.process, ids);
  return ids;
}

/// Infers every participant's type, composes the environments under `mode`
/// and checks each type against the participant's projection.
inline Validation validate_all(const ProtocolFile& file, const std::vector<Projection>& projections,
                               const TypingMode& mode, const Solver& solver = Solver{}) {
  Validation out;
  const auto ids = branch_ids(file);

  std::vector<std::string> canonical;
  for (const auto& part : file.participants)
    if (const auto* i = std::get_if<Process::Init>(&part.process->node)) canonical = i->channels;

  bool composed_any = false;
  for (const auto& part : file.participants) {
    TypingEnvironment env;
    try {
      env = infer_type(part.process, mode, ids, solver);
    } catch (const Error& e) {
      out.report.add(Violation{ViolationKind::Typing, "", e.what(), e.pos(), {}, to_string(e.kind())});
      continue;
    }
    TypingEnvironment renamed;
    renamed.declared_roles = env.declared_roles;
    for (const auto& [key, entry] : env.entries) {
      std::map<std::string, std::string> names;
      for (std::size_t i = 0; i < key.channels.size() && i < canonical.size(); ++i) names[key.channels[i]] = canonical[i];
      SessionKey k{key.service, canonical.empty() ? key.channels : canonical, key.role};
      LocalPtr t = local::rename_channels(entry.type, names);
      renamed.entries[k] = SessionType{t, entry.bottom};
      renamed.groups[TypingEnvironment::group_of(k)] = Completeness::Open;
      out.types.push_back(InferredType{part.name, process::heading(part.process), t});
    }
    if (!renamed.declared_roles.empty()) {
      std::map<ChannelGroup, std::vector<std::string>> roles;
      for (const auto& [g, r] : renamed.declared_roles) roles[ChannelGroup{g.service, canonical}] = r;
      renamed.declared_roles = roles;
    }
    renamed.refresh_completeness();
    if (!composed_any) {
      out.environment = renamed;
      composed_any = true;
    } else if (auto why = mode.incompatibility(out.environment, renamed)) {
      out.report.add(Violation{ViolationKind::Compatibility, "", "environment of " + part.name + " is not compatible: " + *why,
                               part.pos, {}, {}});
    } else {
      out.environment = mode.compose(out.environment, renamed);
    }
  }

  std::map<std::string, LocalPtr> projected;
  for (const auto& p : projections) projected[p.participant] = p.type;
  for (const auto& t : out.types) {
    auto it = projected.find(t.participant);
    if (it == projected.end()) continue;
    if (auto m = refines(t.type, it->second, solver)) {
      SourcePos pos;
      for (const auto& part : file.participants)
        if (part.name == t.participant) pos = part.pos;
      out.report.add(Violation{ViolationKind::Refinement, m->path,
                               "Local type doesn't match projection for " + t.participant + "!", pos,
                               {"Type:       " + local::to_string(t.type), "Projection: " + local::to_string(it->second)},
                               m->reason});
    }
  }
  return out;
}

}  // namespace mpst
