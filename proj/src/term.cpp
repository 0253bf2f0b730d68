#include "dywa/term.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>

namespace dywa {

TermPtr make_const(const std::string& name) {
  return std::make_shared<Term>(Term{term_kind::constant, name, {}});
}

TermPtr make_var(const std::string& name) {
  return std::make_shared<Term>(Term{term_kind::variable, name, {}});
}

TermPtr make_concat(std::vector<TermPtr> parts) {
  std::vector<TermPtr> flat;
  for (auto& p : parts) {
    if (p->kind == term_kind::concat) {
      flat.insert(flat.end(), p->parts.begin(), p->parts.end());
    } else {
      flat.push_back(p);
    }
  }
  if (flat.size() == 1) return flat.front();
  return std::make_shared<Term>(Term{term_kind::concat, "", std::move(flat)});
}

TermPtr make_apply(const std::string& fn, std::vector<TermPtr> args) {
  return std::make_shared<Term>(Term{term_kind::apply, fn, std::move(args)});
}

TermPtr make_enc(TermPtr payload, TermPtr key) {
  return std::make_shared<Term>(Term{term_kind::enc, "", {std::move(payload), std::move(key)}});
}

int term_compare(const TermPtr& a, const TermPtr& b) {
  if (a.get() == b.get()) return 0;
  if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
  if (int c = a->name.compare(b->name)) return c < 0 ? -1 : 1;
  size_t n = std::min(a->parts.size(), b->parts.size());
  for (size_t i = 0; i < n; ++i) {
    if (int c = term_compare(a->parts[i], b->parts[i])) return c;
  }
  if (a->parts.size() != b->parts.size()) return a->parts.size() < b->parts.size() ? -1 : 1;
  return 0;
}

bool term_equal(const TermPtr& a, const TermPtr& b) { return term_compare(a, b) == 0; }

static void render(const TermPtr& t, std::ostringstream& out) {
  switch (t->kind) {
    case term_kind::constant:
      out << t->name;
      break;
    case term_kind::variable:
      if (t->name == "*") {
        out << '*';
      } else {
        out << '?' << t->name;
      }
      break;
    case term_kind::concat:
      for (size_t i = 0; i < t->parts.size(); ++i) {
        if (i) out << '.';
        render(t->parts[i], out);
      }
      break;
    case term_kind::apply:
      out << t->name << '(';
      for (size_t i = 0; i < t->parts.size(); ++i) {
        if (i) out << ", ";
        render(t->parts[i], out);
      }
      out << ')';
      break;
    case term_kind::enc:
      out << "enc(";
      render(t->parts[0], out);
      out << ", ";
      render(t->parts[1], out);
      out << ')';
      break;
  }
}

std::string to_text(const TermPtr& t) {
  std::ostringstream out;
  render(t, out);
  return out.str();
}

namespace {

struct term_reader {
  const std::string& s;
  size_t pos = 0;
  std::string error;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  std::string read_ident() {
    size_t start = pos;
    while (pos < s.size() && ident_char(s[pos])) ++pos;
    return s.substr(start, pos - start);
  }

  // concat is the lowest-precedence operator
  TermPtr read_term() {
    TermPtr first = read_atom();
    if (!first) return nullptr;
    std::vector<TermPtr> parts{first};
    skip_ws();
    while (pos < s.size() && s[pos] == '.') {
      ++pos;
      TermPtr next = read_atom();
      if (!next) return nullptr;
      parts.push_back(next);
      skip_ws();
    }
    return parts.size() == 1 ? parts.front() : make_concat(parts);
  }

  TermPtr read_atom() {
    skip_ws();
    if (pos >= s.size()) {
      error = "unexpected end of term";
      return nullptr;
    }
    char c = s[pos];
    if (c == '*') {
      ++pos;
      return make_var("*");
    }
    if (c == '?') {
      ++pos;
      if (pos < s.size() && ident_start(s[pos])) return make_var(read_ident());
      return make_var("");
    }
    if (c == '(') {
      ++pos;
      TermPtr inner = read_term();
      if (!inner) return nullptr;
      skip_ws();
      if (pos >= s.size() || s[pos] != ')') {
        error = "expected ')'";
        return nullptr;
      }
      ++pos;
      return inner;
    }
    if (!ident_start(c)) {
      error = std::string("unexpected character '") + c + "'";
      return nullptr;
    }
    std::string name = read_ident();
    if (pos < s.size() && s[pos] == '(') {
      ++pos;
      std::vector<TermPtr> args;
      skip_ws();
      if (pos < s.size() && s[pos] == ')') {
        error = "application needs at least one argument";
        return nullptr;
      }
      while (true) {
        TermPtr arg = read_term();
        if (!arg) return nullptr;
        args.push_back(arg);
        skip_ws();
        if (pos < s.size() && s[pos] == ',') {
          ++pos;
          continue;
        }
        break;
      }
      if (pos >= s.size() || s[pos] != ')') {
        error = "expected ')'";
        return nullptr;
      }
      ++pos;
      if (name == "enc" && args.size() == 2) return make_enc(args[0], args[1]);
      return make_apply(name, args);
    }
    return make_const(name);
  }
};

using Emit = std::function<bool(const Bindings&)>;

bool match_one(const TermPtr& pattern, const TermPtr& term, Bindings& bound, const Emit& emit);

bool match_args(const std::vector<TermPtr>& pat, const std::vector<TermPtr>& args, size_t idx,
                Bindings& bound, const Emit& emit) {
  if (idx == pat.size()) return emit(bound);
  return match_one(pat[idx], args[idx], bound, [&](const Bindings&) {
    return match_args(pat, args, idx + 1, bound, emit);
  });
}

// Matches pattern slots pat[pi..] against term parts [at..), shortest run for
// the leftmost open binder first. The emit callback returns false to stop.
bool match_parts(const std::vector<TermPtr>& pat, size_t pi, const std::vector<TermPtr>& parts,
                 size_t at, Bindings& bound, const Emit& emit) {
  if (pi == pat.size()) {
    if (at == parts.size()) return emit(bound);
    return true;
  }
  const TermPtr& p = pat[pi];
  if (p->kind == term_kind::variable && !p->name.empty()) {
    if (p->name == "*") {
      for (size_t len = 1; at + len <= parts.size(); ++len) {
        if (!match_parts(pat, pi + 1, parts, at + len, bound, emit)) return false;
      }
      return true;
    }
    auto it = bound.find(p->name);
    if (it != bound.end()) {
      const TermPtr& v = it->second;
      const std::vector<TermPtr> run =
          v->kind == term_kind::concat ? v->parts : std::vector<TermPtr>{v};
      if (at + run.size() > parts.size()) return true;
      for (size_t i = 0; i < run.size(); ++i) {
        if (!term_equal(run[i], parts[at + i])) return true;
      }
      return match_parts(pat, pi + 1, parts, at + run.size(), bound, emit);
    }
    for (size_t len = 1; at + len <= parts.size(); ++len) {
      std::vector<TermPtr> run(parts.begin() + at, parts.begin() + at + len);
      bound.emplace(p->name, len == 1 ? run.front() : make_concat(run));
      bool go = match_parts(pat, pi + 1, parts, at + len, bound, emit);
      bound.erase(p->name);
      if (!go) return false;
    }
    return true;
  }
  // single-slot pattern element: constant, application, enc, or anonymous `?`
  if (at >= parts.size()) return true;
  return match_one(p, parts[at], bound, [&](const Bindings&) {
    return match_parts(pat, pi + 1, parts, at + 1, bound, emit);
  });
}

bool match_one(const TermPtr& pattern, const TermPtr& term, Bindings& bound, const Emit& emit) {
  switch (pattern->kind) {
    case term_kind::variable: {
      if (pattern->name.empty() || pattern->name == "*") return emit(bound);
      auto it = bound.find(pattern->name);
      if (it != bound.end()) return term_equal(it->second, term) ? emit(bound) : true;
      bound.emplace(pattern->name, term);
      bool go = emit(bound);
      bound.erase(pattern->name);
      return go;
    }
    case term_kind::constant:
      if (term->kind == term_kind::constant && term->name == pattern->name) return emit(bound);
      return true;
    case term_kind::apply:
      if (term->kind != term_kind::apply || term->name != pattern->name ||
          term->parts.size() != pattern->parts.size())
        return true;
      return match_args(pattern->parts, term->parts, 0, bound, emit);
    case term_kind::enc:
      if (term->kind != term_kind::enc) return true;
      return match_args(pattern->parts, term->parts, 0, bound, emit);
    case term_kind::concat:
      if (term->kind != term_kind::concat) return true;
      return match_parts(pattern->parts, 0, term->parts, 0, bound, emit);
  }
  return true;
}

}  // namespace

std::optional<TermPtr> parse_term(const std::string& text, std::string* error) {
  term_reader r{text};
  TermPtr t = r.read_term();
  if (t) {
    r.skip_ws();
    if (r.pos != text.size()) {
      t = nullptr;
      r.error = "trailing input after term";
    }
  }
  if (!t) {
    if (error) *error = r.error;
    return std::nullopt;
  }
  return t;
}

bool matches(const TermPtr& pattern, const TermPtr& term) {
  bool found = false;
  Bindings b;
  match_one(pattern, term, b, [&](const Bindings&) {
    found = true;
    return false;
  });
  return found;
}

std::optional<Bindings> match_pattern(const TermPtr& pattern, const TermPtr& term) {
  std::optional<Bindings> result;
  Bindings b;
  match_one(pattern, term, b, [&](const Bindings& found) {
    result = found;
    return false;
  });
  return result;
}

std::vector<Bindings> match_all(const TermPtr& pattern, const TermPtr& term) {
  std::vector<Bindings> results;
  Bindings b;
  match_one(pattern, term, b, [&](const Bindings& found) {
    results.push_back(found);
    return true;
  });
  return results;
}

TermPtr substitute(const TermPtr& t, const Bindings& b) {
  switch (t->kind) {
    case term_kind::constant:
      return t;
    case term_kind::variable: {
      auto it = b.find(t->name);
      return it != b.end() ? it->second : t;
    }
    case term_kind::concat: {
      std::vector<TermPtr> parts;
      for (const auto& p : t->parts) parts.push_back(substitute(p, b));
      return make_concat(std::move(parts));
    }
    case term_kind::apply: {
      std::vector<TermPtr> args;
      for (const auto& p : t->parts) args.push_back(substitute(p, b));
      return make_apply(t->name, std::move(args));
    }
    case term_kind::enc:
      return make_enc(substitute(t->parts[0], b), substitute(t->parts[1], b));
  }
  return t;
}

bool is_ground(const TermPtr& t) {
  if (t->kind == term_kind::variable) return false;
  for (const auto& p : t->parts) {
    if (!is_ground(p)) return false;
  }
  return true;
}

namespace {

void collect_submessages(const TermPtr& t, std::vector<TermPtr>& out, std::set<std::string>& seen) {
  if (!seen.insert(to_text(t)).second) return;
  out.push_back(t);
  switch (t->kind) {
    case term_kind::constant:
    case term_kind::variable:
      break;
    case term_kind::concat: {
      for (const auto& p : t->parts) collect_submessages(p, out, seen);
      size_t n = t->parts.size();
      for (size_t len = 2; len < n; ++len) {
        for (size_t start = 0; start + len <= n; ++start) {
          std::vector<TermPtr> run(t->parts.begin() + start, t->parts.begin() + start + len);
          collect_submessages(make_concat(std::move(run)), out, seen);
        }
      }
      break;
    }
    case term_kind::apply:
    case term_kind::enc:
      for (const auto& p : t->parts) collect_submessages(p, out, seen);
      break;
  }
}

}  // namespace

std::vector<TermPtr> submessages(const TermPtr& t) {
  std::vector<TermPtr> out;
  std::set<std::string> seen;
  collect_submessages(t, out, seen);
  return out;
}

bool contains_match(const TermPtr& pattern, const TermPtr& t) {
  for (const auto& sub : submessages(t)) {
    if (matches(pattern, sub)) return true;
  }
  return false;
}

}  // namespace dywa
