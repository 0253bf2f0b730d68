// Attack traces: the message sequence the search produced, rendered as a
// message sequence chart or JSON, plus the equivalence used to compare
// against published listings (fillers and placeholder atoms erased).
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dywa/term.hpp"

namespace dywa {

struct TraceStep {
  std::string from, to;
  TermPtr term;   // concrete message
  TermPtr shape;  // source template; equals term for internal exchanges
  Bindings env;   // assignment rendering the shape
  bool attacker_request = false;
  std::string branch_id;  // entity branch fired, set on attacker requests
  std::string tag;        // concretization tag of that branch
};

struct AttackTrace {
  std::vector<TraceStep> steps;
  std::vector<std::string> branch_sequence;  // entity + backend branches, firing order
  std::map<std::string, TermPtr> bindings;   // flat binder map, later steps suffixed on clash
  std::map<std::string, std::string> fresh_names;  // fresh constant -> origin variable
};

// One line per step: "<from> -> <to> : <message>". Filler atoms disappear;
// an attacker-chosen field that is entirely filler renders as its binder
// name in request lines and is dropped from internal and response lines;
// fresh values render as their origin variable.
std::string render_msc(const AttackTrace& trace);

// Parses the render_msc format (tolerating loose spacing around the arrow
// and colon). Capitalized atoms read back as placeholder constants.
std::optional<AttackTrace> parse_msc(const std::string& text, std::string* error = nullptr);

// Step-for-step equality modulo fillers: same endpoints, and messages equal
// after dropping `none`, capitalized placeholder atoms, and fresh values
// from concat runs.
bool trace_equivalent(const AttackTrace& a, const AttackTrace& b);

// Stable JSON: steps with from/to/term (requests also branch, tag,
// bindings), the flat bindings map, branches, and fresh-name table.
std::string trace_to_json(const AttackTrace& trace);
std::optional<AttackTrace> trace_from_json(const std::string& text, std::string* error = nullptr);

}  // namespace dywa
