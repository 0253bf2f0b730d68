// Loads concretization maps and compiles traces into HTTP plans.
#include "dywa/concretize.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace dywa {

namespace {

using nlohmann::json;

void fail(std::string* error, const std::string& message) {
  if (error) *error = message;
}

// One retry after swapping stray ';' separators outside string literals.
json parse_with_repair(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (!j.is_discarded()) return j;
  std::string repaired = text;
  bool in_string = false;
  for (size_t i = 0; i < repaired.size(); ++i) {
    char c = repaired[i];
    if (in_string) {
      if (c == '\\')
        ++i;
      else if (c == '"')
        in_string = false;
    } else if (c == '"') {
      in_string = true;
    } else if (c == ';') {
      repaired[i] = ':';
    }
  }
  return json::parse(repaired, nullptr, false);
}

bool read_string_map(const json& node, std::map<std::string, std::string>& out) {
  if (!node.is_object()) return false;
  for (const auto& [k, v] : node.items()) {
    if (!v.is_string()) return false;
    out[k] = v.get<std::string>();
  }
  return true;
}

const std::set<std::string>& known_methods() {
  static const std::set<std::string> methods{"GET", "POST", "PUT", "CREATE"};
  return methods;
}

std::string dirname_of(const std::string& path) {
  size_t slash = path.find_last_of('/');
  return slash == std::string::npos ? std::string() : path.substr(0, slash);
}

std::string resolve_path(const std::string& base_dir, const std::string& path) {
  if (path.empty() || path.front() == '/' || base_dir.empty()) return path;
  return base_dir + "/" + path;
}

// first constant leaf, reading left to right through concats and arguments
std::string first_const_atom(const TermPtr& t) {
  switch (t->kind) {
    case term_kind::constant:
      return t->name;
    case term_kind::variable:
      return "";
    case term_kind::concat:
    case term_kind::apply:
    case term_kind::enc:
      for (const TermPtr& p : t->parts) {
        std::string found = first_const_atom(p);
        if (!found.empty()) return found;
      }
      return "";
  }
  return "";
}

void collect_const_atoms(const TermPtr& t, std::set<std::string>& out) {
  if (t->kind == term_kind::constant) {
    out.insert(t->name);
    return;
  }
  for (const TermPtr& p : t->parts) collect_const_atoms(p, out);
}

std::string kind_name(ParamValue::kind k) {
  switch (k) {
    case ParamValue::kind::literal:
      return "Literal";
    case ParamValue::kind::sqli_inject:
      return "SqliInject";
    case ParamValue::kind::fsi_fuzz:
      return "FsiFuzz";
    case ParamValue::kind::upload_file:
      return "UploadFile";
    case ParamValue::kind::runtime_var:
      return "RuntimeVar";
  }
  return "Literal";
}

std::optional<ParamValue::kind> kind_from_name(const std::string& name) {
  for (ParamValue::kind k :
       {ParamValue::kind::literal, ParamValue::kind::sqli_inject, ParamValue::kind::fsi_fuzz,
        ParamValue::kind::upload_file, ParamValue::kind::runtime_var}) {
    if (kind_name(k) == name) return k;
  }
  return std::nullopt;
}

}  // namespace

std::string to_text(const ParamValue& v) {
  std::string inner = v.k == ParamValue::kind::sqli_inject ? v.objective : v.text;
  if (inner.empty()) return kind_name(v.k);
  return kind_name(v.k) + "(" + inner + ")";
}

std::optional<ConcretizationMap> load_concretization(const std::string& text,
                                                     std::string* error) {
  json root = parse_with_repair(text);
  if (root.is_discarded() || !root.is_object()) {
    fail(error, "concretization is not a JSON object");
    return std::nullopt;
  }

  ConcretizationMap map;
  for (const auto& [key, value] : root.items()) {
    if (key == "domain" && value.is_string()) {
      map.domain = value.get<std::string>();
      continue;
    }
    if (key == "files" && value.is_object()) {
      if (!read_string_map(value, map.files)) {
        fail(error, "files entries must be strings");
        return std::nullopt;
      }
      continue;
    }
    if (value.is_object() && value.contains("url")) {
      TagSpec spec;
      if (!value["url"].is_string()) {
        fail(error, "tag '" + key + "' url must be a string");
        return std::nullopt;
      }
      spec.url = value["url"].get<std::string>();
      spec.method = value.value("method", "GET");
      std::transform(spec.method.begin(), spec.method.end(), spec.method.begin(),
                     [](unsigned char c) { return std::toupper(c); });
      if (!known_methods().count(spec.method)) {
        fail(error, "tag '" + key + "' has unsupported method '" + spec.method + "'");
        return std::nullopt;
      }
      bool ok = true;
      if (value.contains("mapping")) ok = ok && read_string_map(value["mapping"], spec.mapping);
      if (value.contains("params")) ok = ok && read_string_map(value["params"], spec.params);
      if (value.contains("tables")) ok = ok && read_string_map(value["tables"], spec.tables);
      if (!ok) {
        fail(error, "tag '" + key + "' mapping, params, and tables must map strings to strings");
        return std::nullopt;
      }
      map.tags[key] = std::move(spec);
      continue;
    }
    if (value.is_string()) {
      // payload files may also sit at top level next to the page checks
      if (key == "evil_file")
        map.files[key] = value.get<std::string>();
      else
        map.page_checks[key] = value.get<std::string>();
      continue;
    }
    fail(error, "unexpected concretization entry '" + key + "'");
    return std::nullopt;
  }
  if (map.domain.empty()) {
    fail(error, "concretization lacks a domain");
    return std::nullopt;
  }
  return map;
}

std::optional<ConcretizationMap> load_concretization_file(const std::string& path,
                                                          std::string* error) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) {
    fail(error, "cannot open " + path);
    return std::nullopt;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  auto map = load_concretization(buf.str(), error);
  if (map) map->base_dir = dirname_of(path);
  return map;
}

std::vector<std::string> check_against_model(const ConcretizationMap& map,
                                             const ModelSpec& model) {
  std::vector<std::string> problems;
  for (const EntityBranch& branch : model.branches) {
    auto it = map.tags.find(branch.tag);
    if (it == map.tags.end()) {
      problems.push_back("no tag entry '" + branch.tag + "' for branch '" + branch.id + "'");
      continue;
    }
    const TagSpec& spec = it->second;
    if (spec.url.empty())
      problems.push_back("tag '" + branch.tag + "' has an empty url");
    for (const auto& [binder, key] : branch.keys) {
      auto mapped = spec.mapping.find(key);
      std::string field = mapped == spec.mapping.end() ? key : mapped->second;
      if (!spec.params.count(field)) {
        problems.push_back("tag '" + branch.tag + "' params lack a field for key '" + key +
                           "' (expected '" + field + "')");
      }
    }
  }
  return problems;
}

namespace {

ParamValue classify_value(const TermPtr& value, const std::string& objective,
                          const ConcretizationMap& map, const std::string& marker) {
  std::set<std::string> atoms;
  collect_const_atoms(value, atoms);
  for (const std::string& a : atoms) {
    if (map.files.count(a)) {
      ParamValue v;
      v.k = ParamValue::kind::upload_file;
      v.text = resolve_path(map.base_dir, map.files.at(a));
      return v;
    }
  }
  if (atoms.count("evil_file")) {
    ParamValue v;
    v.k = ParamValue::kind::upload_file;
    return v;  // no file configured, executor falls back to the canned payload
  }
  if (atoms.count("sqli")) {
    ParamValue v;
    v.k = ParamValue::kind::sqli_inject;
    v.objective = objective;
    return v;
  }
  if (atoms.count("fsi")) {
    ParamValue v;
    v.k = ParamValue::kind::fsi_fuzz;
    return v;
  }
  ParamValue v;
  v.k = ParamValue::kind::literal;
  v.text = (marker == "?" || marker == "_") ? "test" : marker;
  return v;
}

bool term_has_atom(const TermPtr& t, const std::map<std::string, std::string>& fresh_names) {
  std::set<std::string> atoms;
  collect_const_atoms(t, atoms);
  for (const std::string& a : atoms)
    if (fresh_names.count(a)) return true;
  return false;
}

}  // namespace

std::optional<AttackPlan> concretize_trace(const AttackTrace& trace, const ModelSpec& model,
                                           const ConcretizationMap& map, const GoalSpec& goal,
                                           std::string* error) {
  AttackPlan plan;
  plan.domain = map.domain;
  if (goal.k == GoalSpec::kind::never_derives) plan.evidence_pattern = "root:[^\\s\"<]*";

  std::set<std::string> captured;
  for (size_t i = 0; i < trace.steps.size(); ++i) {
    if (!trace.steps[i].attacker_request) {
      fail(error, "trace does not start its steps with an attacker request");
      return std::nullopt;
    }
    size_t end = i + 1;
    while (end < trace.steps.size() && !trace.steps[end].attacker_request) ++end;
    const TraceStep& request = trace.steps[i];

    const EntityBranch* branch = model.branch_by_id(request.branch_id);
    if (!branch) {
      fail(error, "trace step fires unknown branch '" + request.branch_id + "'");
      return std::nullopt;
    }
    std::string tag = request.tag.empty() ? branch->tag : request.tag;
    auto tag_it = map.tags.find(tag);
    if (tag_it == map.tags.end()) {
      fail(error, "concretization has no tag entry '" + tag + "'");
      return std::nullopt;
    }
    const TagSpec& spec = tag_it->second;

    HttpAction action;
    action.tag = tag;
    action.method = spec.method;
    action.url = spec.url;

    // what the injected query was used for inside this step
    std::string objective = "auth";
    for (size_t j = i + 1; j < end; ++j) {
      const TraceStep& s = trace.steps[j];
      if (s.from != "DB" || s.term->kind != term_kind::apply) continue;
      if (s.term->name == "readFile") objective = "read_file";
      if (s.term->name == "writeFile") objective = "write_file";
    }

    std::map<std::string, std::string> field_to_key;  // form field -> abstract key
    for (const auto& [binder, key] : branch->keys) {
      auto mapped = spec.mapping.find(key);
      field_to_key[mapped == spec.mapping.end() ? key : mapped->second] = key;
    }
    std::map<std::string, std::string> key_to_binder;
    for (const auto& [binder, key] : branch->keys) key_to_binder[key] = binder;

    for (const auto& [field, marker] : spec.params) {
      ParamValue value;
      auto key_it = field_to_key.find(field);
      if (key_it != field_to_key.end()) {
        const std::string& binder = key_to_binder.at(key_it->second);
        auto env_it = request.env.find(binder);
        if (env_it != request.env.end()) {
          value = classify_value(env_it->second, objective, map, marker);
        } else {
          value.text = (marker == "?" || marker == "_") ? "test" : marker;
        }
      } else {
        value.text = (marker == "?" || marker == "_") ? "test" : marker;
      }
      if (marker == "_" && action.method == "POST") action.multipart = true;
      action.params[field] = std::move(value);
    }

    // binders satisfied by session facts rather than @keys become cookies
    for (const auto& [binder, bound] : request.env) {
      bool keyed = false;
      for (const auto& [b, k] : branch->keys) keyed = keyed || b == binder;
      if (keyed) continue;
      if (bound->kind == term_kind::constant && trace.fresh_names.count(bound->name)) {
        if (!captured.count(bound->name)) {
          fail(error, "request uses session value '" + bound->name +
                          "' before any response produced it");
          return std::nullopt;
        }
        ParamValue v;
        v.k = ParamValue::kind::runtime_var;
        v.text = bound->name;
        action.cookies["PHPSESSID"] = std::move(v);
      }
    }

    // page check from the response the client sees, evidence capture from
    // any fresh value minted in this step
    for (size_t j = i + 1; j < end; ++j) {
      const TraceStep& s = trace.steps[j];
      if (s.to != "i") continue;
      std::string page = first_const_atom(s.term);
      if (action.check.empty() && !page.empty()) {
        auto check_it = map.page_checks.find(page);
        if (check_it == map.page_checks.end()) {
          for (auto it2 = map.page_checks.begin(); it2 != map.page_checks.end(); ++it2) {
            std::string lowered = it2->first;
            std::string target = page;
            std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                           [](unsigned char c) { return std::tolower(c); });
            std::transform(target.begin(), target.end(), target.begin(),
                           [](unsigned char c) { return std::tolower(c); });
            if (lowered == target) {
              check_it = it2;
              break;
            }
          }
        }
        if (check_it != map.page_checks.end()) action.check = check_it->second;
      }
      if (term_has_atom(s.term, trace.fresh_names)) {
        std::set<std::string> atoms;
        collect_const_atoms(s.term, atoms);
        for (const std::string& a : atoms) {
          if (trace.fresh_names.count(a) && captured.insert(a).second)
            action.capture_session = true;
        }
      }
    }

    plan.actions.push_back(std::move(action));
    i = end - 1;
  }

  if (plan.actions.empty()) {
    fail(error, "trace has no attacker requests");
    return std::nullopt;
  }
  return plan;
}

std::string plan_to_json(const AttackPlan& plan) {
  json j;
  j["domain"] = plan.domain;
  j["evidence"] = plan.evidence_pattern;
  j["actions"] = json::array();
  for (const HttpAction& a : plan.actions) {
    json node;
    node["tag"] = a.tag;
    node["method"] = a.method;
    node["url"] = a.url;
    node["check"] = a.check;
    node["capture_session"] = a.capture_session;
    node["multipart"] = a.multipart;
    node["params"] = json::object();
    for (const auto& [field, v] : a.params) {
      json pv;
      pv["kind"] = kind_name(v.k);
      if (!v.text.empty()) pv["text"] = v.text;
      if (!v.objective.empty()) pv["objective"] = v.objective;
      node["params"][field] = std::move(pv);
    }
    node["cookies"] = json::object();
    for (const auto& [name, v] : a.cookies) {
      json pv;
      pv["kind"] = kind_name(v.k);
      if (!v.text.empty()) pv["text"] = v.text;
      node["cookies"][name] = std::move(pv);
    }
    j["actions"].push_back(std::move(node));
  }
  return j.dump(2) + "\n";
}

namespace {

std::optional<ParamValue> param_from_json(const json& node, std::string* error) {
  if (!node.is_object() || !node.contains("kind") || !node["kind"].is_string()) {
    fail(error, "param value needs a kind");
    return std::nullopt;
  }
  auto k = kind_from_name(node["kind"].get<std::string>());
  if (!k) {
    fail(error, "unknown param kind '" + node["kind"].get<std::string>() + "'");
    return std::nullopt;
  }
  ParamValue v;
  v.k = *k;
  v.text = node.value("text", "");
  v.objective = node.value("objective", "");
  return v;
}

}  // namespace

std::optional<AttackPlan> plan_from_json(const std::string& text, std::string* error) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    fail(error, "plan is not a JSON object");
    return std::nullopt;
  }
  if (!j.contains("actions") || !j["actions"].is_array()) {
    fail(error, "plan lacks an actions array");
    return std::nullopt;
  }
  AttackPlan plan;
  plan.domain = j.value("domain", "");
  plan.evidence_pattern = j.value("evidence", "");
  for (const json& node : j["actions"]) {
    if (!node.is_object() || !node.contains("url") || !node["url"].is_string()) {
      fail(error, "every action needs a url");
      return std::nullopt;
    }
    HttpAction a;
    a.tag = node.value("tag", "");
    a.method = node.value("method", "GET");
    a.url = node["url"].get<std::string>();
    a.check = node.value("check", "");
    a.capture_session = node.value("capture_session", false);
    a.multipart = node.value("multipart", false);
    if (node.contains("params")) {
      if (!node["params"].is_object()) {
        fail(error, "action params must be an object");
        return std::nullopt;
      }
      for (const auto& [field, pv] : node["params"].items()) {
        auto v = param_from_json(pv, error);
        if (!v) return std::nullopt;
        a.params[field] = std::move(*v);
      }
    }
    if (node.contains("cookies")) {
      if (!node["cookies"].is_object()) {
        fail(error, "action cookies must be an object");
        return std::nullopt;
      }
      for (const auto& [name, pv] : node["cookies"].items()) {
        auto v = param_from_json(pv, error);
        if (!v) return std::nullopt;
        a.cookies[name] = std::move(*v);
      }
    }
    plan.actions.push_back(std::move(a));
  }
  return plan;
}

}  // namespace dywa
