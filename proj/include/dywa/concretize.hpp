// Concretization: turns an abstract attack trace into an executable HTTP
// plan through a per-application JSON map (tag entries carrying url, method,
// and form-field names, page check markers, payload file paths).
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dywa/model.hpp"
#include "dywa/trace.hpp"

namespace dywa {

// How one form field or cookie gets its value at execution time: a fixed
// literal, an injection payload picked from the dictionary for the stated
// objective, a path-traversal fuzz value, an uploaded payload file, or a
// value captured from an earlier response (session cookies).
struct ParamValue {
  enum class kind { literal, sqli_inject, fsi_fuzz, upload_file, runtime_var };
  kind k = kind::literal;
  std::string text;       // literal text, payload file path, or runtime variable
  std::string objective;  // sqli_inject: auth, read_file, or write_file
};

std::string to_text(const ParamValue& v);

struct TagSpec {
  std::string url;
  std::string method;
  std::map<std::string, std::string> mapping;  // abstract key -> form field
  std::map<std::string, std::string> params;   // form field -> "?", "_", or literal
  std::map<std::string, std::string> tables;   // form field -> table.column
};

struct ConcretizationMap {
  std::string domain;
  std::map<std::string, TagSpec> tags;
  std::map<std::string, std::string> page_checks;  // response page -> body marker
  std::map<std::string, std::string> files;        // abstract file name -> disk path
  std::string base_dir;                            // resolves relative file paths
};

// Tolerates one recoverable author slip: a ';' where JSON wants ':' outside
// any string literal. Anything else unparseable is an error.
std::optional<ConcretizationMap> load_concretization(const std::string& text,
                                                     std::string* error = nullptr);
std::optional<ConcretizationMap> load_concretization_file(const std::string& path,
                                                          std::string* error = nullptr);

// Cross-checks the map against the model: every branch needs a tag entry,
// and every @keys key must land on a declared form field of that entry.
std::vector<std::string> check_against_model(const ConcretizationMap& map,
                                             const ModelSpec& model);

struct HttpAction {
  std::string tag;
  std::string method;
  std::string url;
  std::string check;  // response body marker, empty when the map has none
  bool capture_session = false;
  bool multipart = false;
  std::map<std::string, ParamValue> params;
  std::map<std::string, ParamValue> cookies;
};

struct AttackPlan {
  std::string domain;
  std::string evidence_pattern;  // regex the exploited response must match
  std::vector<HttpAction> actions;
};

// One action per attacker request in the trace, in order. The goal decides
// what counts as final evidence: knowledge goals demand the leaked-file
// pattern, fact goals settle for the last page check.
std::optional<AttackPlan> concretize_trace(const AttackTrace& trace, const ModelSpec& model,
                                           const ConcretizationMap& map, const GoalSpec& goal,
                                           std::string* error = nullptr);

std::string plan_to_json(const AttackPlan& plan);
std::optional<AttackPlan> plan_from_json(const std::string& text, std::string* error = nullptr);

}  // namespace dywa
