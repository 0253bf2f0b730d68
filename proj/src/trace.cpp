// Trace rendering and comparison. Rendering works from each step's source
// shape and binding environment so filler-only fields can show their binder
// name; equivalence works on raw terms with fillers and placeholders
// erased, never on rendered text.
#include "dywa/trace.hpp"

#include <cctype>
#include <sstream>

#include "json.hpp"

namespace dywa {

namespace {

bool placeholder_const(const std::string& name) {
  if (name == "none") return true;
  if (!name.empty() && std::isupper(static_cast<unsigned char>(name[0]))) return true;
  return name.rfind("fresh_", 0) == 0;
}

std::string render_value(const TermPtr& t, const std::map<std::string, std::string>& fresh);

std::string render_apply(const std::string& name, const std::vector<std::string>& args) {
  std::string out = name + "(";
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    out += args[i].empty() ? "none" : args[i];
  }
  return out + ")";
}

std::string join_parts(const std::vector<std::string>& parts) {
  std::string out;
  for (const std::string& p : parts) {
    if (p.empty()) continue;
    if (!out.empty()) out += ".";
    out += p;
  }
  return out;
}

std::string render_value(const TermPtr& t, const std::map<std::string, std::string>& fresh) {
  switch (t->kind) {
    case term_kind::constant: {
      if (t->name == "none") return "";
      auto it = fresh.find(t->name);
      return it != fresh.end() ? it->second : t->name;
    }
    case term_kind::variable:
      return t->name == "*" ? "*" : "?" + t->name;
    case term_kind::concat: {
      std::vector<std::string> parts;
      for (const TermPtr& p : t->parts) parts.push_back(render_value(p, fresh));
      return join_parts(parts);
    }
    case term_kind::apply:
    case term_kind::enc: {
      std::vector<std::string> args;
      for (const TermPtr& p : t->parts) args.push_back(render_value(p, fresh));
      return render_apply(t->kind == term_kind::enc ? "enc" : t->name, args);
    }
  }
  return "";
}

std::string render_shape(const TermPtr& t, const Bindings& env,
                         const std::map<std::string, std::string>& fresh, bool request) {
  switch (t->kind) {
    case term_kind::constant:
      return t->name == "none" ? "" : t->name;
    case term_kind::variable: {
      if (t->name == "*") return "*";
      auto it = env.find(t->name);
      if (it == env.end()) return "?" + t->name;
      std::string s = render_value(it->second, fresh);
      if (s.empty() && request) return t->name;  // filler-only field, show the binder
      return s;
    }
    case term_kind::concat: {
      std::vector<std::string> parts;
      for (const TermPtr& p : t->parts) parts.push_back(render_shape(p, env, fresh, request));
      return join_parts(parts);
    }
    case term_kind::apply:
    case term_kind::enc: {
      std::vector<std::string> args;
      for (const TermPtr& p : t->parts) args.push_back(render_shape(p, env, fresh, request));
      return render_apply(t->kind == term_kind::enc ? "enc" : t->name, args);
    }
  }
  return "";
}

// nullptr when the whole term erases away
TermPtr erase_term(const TermPtr& t) {
  switch (t->kind) {
    case term_kind::constant:
      return placeholder_const(t->name) ? nullptr : t;
    case term_kind::variable:
      return t;
    case term_kind::concat: {
      std::vector<TermPtr> kept;
      for (const TermPtr& p : t->parts) {
        if (TermPtr e = erase_term(p)) kept.push_back(std::move(e));
      }
      if (kept.empty()) return nullptr;
      if (kept.size() == 1) return kept.front();
      return make_concat(std::move(kept));
    }
    case term_kind::apply:
    case term_kind::enc: {
      std::vector<TermPtr> args;
      for (const TermPtr& p : t->parts) {
        TermPtr e = erase_term(p);
        args.push_back(e ? std::move(e) : make_const("none"));
      }
      if (t->kind == term_kind::enc) return make_enc(args[0], args[1]);
      return make_apply(t->name, std::move(args));
    }
  }
  return t;
}

TermPtr erase_or_none(const TermPtr& t) {
  TermPtr e = erase_term(t);
  return e ? e : make_const("none");
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string render_msc(const AttackTrace& trace) {
  std::ostringstream out;
  for (const TraceStep& step : trace.steps) {
    std::string body;
    if (step.shape && (!step.env.empty() || !term_equal(step.shape, step.term))) {
      body = render_shape(step.shape, step.env, trace.fresh_names, step.attacker_request);
    } else {
      body = render_value(step.term, trace.fresh_names);
    }
    if (body.empty()) body = "none";
    out << step.from << " -> " << step.to << " : " << body << "\n";
  }
  return out.str();
}

std::optional<AttackTrace> parse_msc(const std::string& text, std::string* error) {
  AttackTrace trace;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& message) {
    if (error) *error = "line " + std::to_string(lineno) + ": " + message;
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty()) continue;
    size_t arrow = s.find("->");
    if (arrow == std::string::npos) {
      fail("expected '<from> -> <to> : <message>'");
      return std::nullopt;
    }
    size_t colon = s.find(':', arrow + 2);
    if (colon == std::string::npos) {
      fail("expected ':' before the message");
      return std::nullopt;
    }
    TraceStep step;
    step.from = trim(s.substr(0, arrow));
    step.to = trim(s.substr(arrow + 2, colon - arrow - 2));
    if (step.from.empty() || step.to.empty()) {
      fail("missing endpoint");
      return std::nullopt;
    }
    std::string term_error;
    auto term = parse_term(trim(s.substr(colon + 1)), &term_error);
    if (!term) {
      fail(term_error);
      return std::nullopt;
    }
    step.term = *term;
    step.shape = *term;
    step.attacker_request = step.from == "i";
    trace.steps.push_back(std::move(step));
  }
  return trace;
}

bool trace_equivalent(const AttackTrace& a, const AttackTrace& b) {
  if (a.steps.size() != b.steps.size()) return false;
  for (size_t i = 0; i < a.steps.size(); ++i) {
    const TraceStep& x = a.steps[i];
    const TraceStep& y = b.steps[i];
    if (x.from != y.from || x.to != y.to) return false;
    if (!term_equal(erase_or_none(x.term), erase_or_none(y.term))) return false;
  }
  return true;
}

std::string trace_to_json(const AttackTrace& trace) {
  nlohmann::json steps = nlohmann::json::array();
  for (const TraceStep& s : trace.steps) {
    nlohmann::json step;
    step["from"] = s.from;
    step["to"] = s.to;
    step["term"] = to_text(s.term);
    if (s.shape && !term_equal(s.shape, s.term)) step["shape"] = to_text(s.shape);
    if (!s.env.empty()) {
      nlohmann::json env = nlohmann::json::object();
      for (const auto& [name, value] : s.env) env[name] = to_text(value);
      step["env"] = env;
    }
    if (s.attacker_request) {
      step["request"] = true;
      step["branch"] = s.branch_id;
      step["tag"] = s.tag;
    }
    steps.push_back(std::move(step));
  }
  nlohmann::json root;
  root["steps"] = std::move(steps);
  root["branches"] = trace.branch_sequence;
  nlohmann::json bindings = nlohmann::json::object();
  for (const auto& [name, value] : trace.bindings) bindings[name] = to_text(value);
  root["bindings"] = std::move(bindings);
  nlohmann::json fresh = nlohmann::json::object();
  for (const auto& [name, origin] : trace.fresh_names) fresh[name] = origin;
  root["fresh"] = std::move(fresh);
  return root.dump(2);
}

std::optional<AttackTrace> trace_from_json(const std::string& text, std::string* error) {
  auto fail = [&](const std::string& message) {
    if (error) *error = message;
    return std::nullopt;
  };
  nlohmann::json root = nlohmann::json::parse(text, nullptr, false);
  if (root.is_discarded()) return fail("invalid JSON");
  if (!root.is_object() || !root.contains("steps") || !root["steps"].is_array())
    return fail("expected an object with a \"steps\" array");
  auto term_field = [&](const nlohmann::json& node, const char* key,
                        TermPtr& out) -> std::string {
    if (!node.contains(key) || !node[key].is_string()) return std::string(key) + " must be a string";
    std::string term_error;
    auto term = parse_term(node[key].get<std::string>(), &term_error);
    if (!term) return std::string(key) + ": " + term_error;
    out = *term;
    return "";
  };
  AttackTrace trace;
  for (const auto& node : root["steps"]) {
    if (!node.is_object() || !node.contains("from") || !node.contains("to"))
      return fail("every step needs from, to, and term");
    TraceStep step;
    step.from = node["from"].get<std::string>();
    step.to = node["to"].get<std::string>();
    if (std::string e = term_field(node, "term", step.term); !e.empty()) return fail(e);
    step.shape = step.term;
    if (node.contains("shape")) {
      if (std::string e = term_field(node, "shape", step.shape); !e.empty()) return fail(e);
    }
    if (node.contains("env")) {
      if (!node["env"].is_object()) return fail("env must be an object");
      for (const auto& [name, value] : node["env"].items()) {
        std::string term_error;
        auto term = parse_term(value.get<std::string>(), &term_error);
        if (!term) return fail("env." + name + ": " + term_error);
        step.env[name] = *term;
      }
    }
    if (node.value("request", false)) {
      step.attacker_request = true;
      step.branch_id = node.value("branch", "");
      step.tag = node.value("tag", "");
    }
    trace.steps.push_back(std::move(step));
  }
  if (root.contains("branches")) {
    if (!root["branches"].is_array()) return fail("branches must be an array");
    for (const auto& b : root["branches"]) trace.branch_sequence.push_back(b.get<std::string>());
  }
  if (root.contains("bindings")) {
    for (const auto& [name, value] : root["bindings"].items()) {
      std::string term_error;
      auto term = parse_term(value.get<std::string>(), &term_error);
      if (!term) return fail("bindings." + name + ": " + term_error);
      trace.bindings[name] = *term;
    }
  }
  if (root.contains("fresh")) {
    for (const auto& [name, origin] : root["fresh"].items())
      trace.fresh_names[name] = origin.get<std::string>();
  }
  return trace;
}

}  // namespace dywa
