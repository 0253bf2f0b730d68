#include "dywa/model.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "dywa/builtins.hpp"

namespace dywa {

std::string to_text(const Diagnostic& d) {
  std::ostringstream out;
  out << d.file << ':' << d.line << ':' << d.col << ": " << d.message;
  return out.str();
}

std::string to_text(const FactAtom& f) {
  std::ostringstream out;
  out << f.name << '(';
  for (size_t i = 0; i < f.args.size(); ++i) {
    if (i) out << ", ";
    out << to_text(f.args[i]);
  }
  out << ')';
  return out.str();
}

const EntityBranch* ModelSpec::branch_by_id(const std::string& id) const {
  for (const auto& b : branches) {
    if (b.id == id) return &b;
  }
  return nullptr;
}

const GoalSpec* ModelSpec::goal_by_label(const std::string& label) const {
  for (const auto& g : goals) {
    if (g.label == label) return &g;
  }
  return nullptr;
}

namespace {

struct validator {
  const ModelSpec& m;
  std::vector<Diagnostic> diags;
  std::set<std::string> agents;
  std::set<std::string> consts;
  std::map<std::string, int> fns;
  std::set<std::string> fact_names;

  explicit validator(const ModelSpec& model) : m(model) {
    agents.insert(model.agents.begin(), model.agents.end());
    consts = builtin_constants();
    const auto& npc = builtin_nonpublic_constants();
    consts.insert(npc.begin(), npc.end());
    consts.insert(model.public_consts.begin(), model.public_consts.end());
    consts.insert(model.nonpublic_consts.begin(), model.nonpublic_consts.end());
    fns = builtin_functions();
    for (const auto& [name, arity] : model.public_fn_decls) fns[name] = arity;
    for (const auto& [name, arity] : model.nonpublic_fn_decls) fns[name] = arity;
    fact_names = builtin_fact_names();
    for (const auto& c : model.clauses) fact_names.insert(c.head.name);
  }

  void report(int line, int col, const std::string& message) {
    diags.push_back({m.file, line, col, message});
  }

  void check_agent(const std::string& name, int line, int col) {
    if (!agents.count(name)) report(line, col, "undeclared agent '" + name + "'");
  }

  static bool uppercase_start(const std::string& s) {
    return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
  }

  // binding=true lets unbound variables bind here; otherwise they are errors
  void check_term(const TermPtr& t, std::set<std::string>& bound, bool binding, int line,
                  int col) {
    switch (t->kind) {
      case term_kind::constant:
        if (!consts.count(t->name)) {
          report(line, col, "undeclared constant '" + t->name + "'");
        }
        break;
      case term_kind::variable:
        if (t->name.empty() || t->name == "*") break;
        if (bound.count(t->name)) break;
        if (binding) {
          if (!uppercase_start(t->name)) {
            report(line, col, "variable '" + t->name + "' must start uppercase");
          }
          bound.insert(t->name);
        } else {
          report(line, col, "variable '" + t->name + "' is not bound here");
        }
        break;
      case term_kind::concat:
      case term_kind::enc:
        for (const auto& p : t->parts) check_term(p, bound, binding, line, col);
        break;
      case term_kind::apply: {
        auto it = fns.find(t->name);
        if (it == fns.end()) {
          report(line, col, "undeclared function '" + t->name + "'");
        } else if (it->second >= 0 && it->second != static_cast<int>(t->parts.size())) {
          report(line, col, "function '" + t->name + "' expects " +
                                std::to_string(it->second) + " arguments");
        }
        for (const auto& p : t->parts) check_term(p, bound, binding, line, col);
        break;
      }
    }
  }

  void check_fact(const FactAtom& f, std::set<std::string>& bound, bool binding, int line,
                  int col) {
    if (!fact_names.count(f.name)) report(line, col, "unknown fact '" + f.name + "'");
    for (const auto& a : f.args) check_term(a, bound, binding, line, col);
  }

  void check_guards(const std::vector<Guard>& guards, std::set<std::string>& bound, int line,
                    int col) {
    for (const auto& g : guards) {
      switch (g.k) {
        case Guard::kind::receive:
          check_agent(g.from, line, col);
          check_agent(g.to, line, col);
          check_term(g.pattern, bound, true, line, col);
          break;
        case Guard::kind::fact:
          check_fact(g.fact, bound, true, line, col);
          break;
        case Guard::kind::negated_fact:
          check_fact(g.fact, bound, false, line, col);
          break;
        case Guard::kind::match:
          check_term(g.subject, bound, false, line, col);
          check_term(g.pattern, bound, true, line, col);
          break;
      }
    }
  }

  void check_body(const std::vector<Stmt>& body, std::set<std::string> bound) {
    for (const auto& s : body) {
      switch (s.k) {
        case Stmt::kind::send:
          check_agent(s.from, s.line, s.col);
          check_agent(s.to, s.line, s.col);
          if (s.from != m.entity) {
            report(s.line, s.col, "sends must originate from entity '" + m.entity + "'");
          }
          check_term(s.term, bound, false, s.line, s.col);
          break;
        case Stmt::kind::receive_bind:
          check_agent(s.from, s.line, s.col);
          check_agent(s.to, s.line, s.col);
          check_term(s.term, bound, true, s.line, s.col);
          break;
        case Stmt::kind::fresh:
          if (!uppercase_start(s.var)) {
            report(s.line, s.col, "variable '" + s.var + "' must start uppercase");
          }
          bound.insert(s.var);
          break;
        case Stmt::kind::assert_fact:
          check_fact(s.fact, bound, false, s.line, s.col);
          break;
        case Stmt::kind::conditional:
          for (const auto& c : s.cond->cases) {
            std::set<std::string> scope = bound;
            check_guards(c.guard, scope, s.line, s.col);
            check_body(c.body, scope);
          }
          check_body(s.cond->else_body, bound);
          break;
      }
    }
  }

  std::vector<Diagnostic> run() {
    if (m.entity.empty()) {
      report(1, 1, "model has no entity block");
    } else if (!agents.count(m.entity)) {
      report(1, 1, "entity '" + m.entity + "' is not a declared agent");
    }
    std::set<std::string> seen_ids, seen_tags;
    for (const auto& b : m.branches) {
      if (b.id.empty()) {
        report(b.line, b.col, "branch needs an id: no constant atom in its pattern and no @id");
      } else if (!seen_ids.insert(b.id).second) {
        report(b.line, b.col, "duplicate branch id '" + b.id + "'");
      }
      if (!seen_tags.insert(b.tag).second) {
        report(b.line, b.col, "duplicate tag '" + b.tag + "'");
      }
      int receives = 0;
      for (const auto& g : b.guard) {
        if (g.k == Guard::kind::receive) ++receives;
      }
      if (receives != 1) {
        report(b.line, b.col, "entity branches take exactly one receive guard");
      } else {
        const Guard* recv = nullptr;
        for (const auto& g : b.guard) {
          if (g.k == Guard::kind::receive) recv = &g;
        }
        if (recv->to != m.entity) {
          report(b.line, b.col, "branch receive must target entity '" + m.entity + "'");
        }
        if (recv->from == m.entity) {
          report(b.line, b.col, "branch receive cannot come from the entity itself");
        }
      }
      std::set<std::string> bound;
      check_guards(b.guard, bound, b.line, b.col);
      for (const auto& [binder, key] : b.keys) {
        if (!bound.count(binder)) {
          report(b.line, b.col, "@keys names unknown binder '" + binder + "'");
        }
      }
      check_body(b.body, bound);
    }
    std::set<std::string> labels;
    for (const auto& g : m.goals) {
      if (!labels.insert(g.label).second) {
        report(1, 1, "duplicate goal label '" + g.label + "'");
      }
      std::set<std::string> bound;
      if (g.k == GoalSpec::kind::never_derives) {
        check_term(g.pattern, bound, true, 1, 1);
      } else {
        check_fact(g.fact, bound, true, 1, 1);
      }
    }
    for (const auto& f : m.init_facts) {
      std::set<std::string> bound;
      check_fact(f, bound, false, 1, 1);
      for (const auto& a : f.args) {
        if (!is_ground(a)) report(1, 1, "init facts must be ground");
      }
    }
    for (const auto& c : m.clauses) {
      std::set<std::string> bound(c.vars.begin(), c.vars.end());
      check_fact(c.head, bound, false, 1, 1);
      if (c.premise) check_fact(*c.premise, bound, false, 1, 1);
    }
    return diags;
  }
};

// Canonical printing tracks which variables are already bound so binding
// occurrences get the '?' prefix and later references stay bare.
struct printer {
  std::ostringstream out;
  std::set<std::string> bound;

  void term(const TermPtr& t) {
    switch (t->kind) {
      case term_kind::constant:
        out << t->name;
        break;
      case term_kind::variable:
        if (t->name == "*") {
          out << '*';
        } else if (t->name.empty()) {
          out << '?';
        } else if (bound.count(t->name)) {
          out << t->name;
        } else {
          out << '?' << t->name;
          bound.insert(t->name);
        }
        break;
      case term_kind::concat:
        for (size_t i = 0; i < t->parts.size(); ++i) {
          if (i) out << '.';
          term(t->parts[i]);
        }
        break;
      case term_kind::apply:
        out << t->name << '(';
        for (size_t i = 0; i < t->parts.size(); ++i) {
          if (i) out << ", ";
          term(t->parts[i]);
        }
        out << ')';
        break;
      case term_kind::enc:
        out << "enc(";
        term(t->parts[0]);
        out << ", ";
        term(t->parts[1]);
        out << ')';
        break;
    }
  }

  void fact(const FactAtom& f) {
    out << f.name << '(';
    for (size_t i = 0; i < f.args.size(); ++i) {
      if (i) out << ", ";
      term(f.args[i]);
    }
    out << ')';
  }

  void guards(const std::vector<Guard>& gs) {
    for (size_t i = 0; i < gs.size(); ++i) {
      if (i) out << " & ";
      const Guard& g = gs[i];
      switch (g.k) {
        case Guard::kind::receive:
          out << g.from << " -> " << g.to << " : ";
          term(g.pattern);
          break;
        case Guard::kind::fact:
          fact(g.fact);
          break;
        case Guard::kind::negated_fact:
          out << '!';
          fact(g.fact);
          break;
        case Guard::kind::match:
          term(g.subject);
          out << " == ";
          term(g.pattern);
          break;
      }
    }
  }

  void body(const std::vector<Stmt>& stmts, int indent) {
    std::string pad(indent, ' ');
    for (const auto& s : stmts) {
      switch (s.k) {
        case Stmt::kind::send:
        case Stmt::kind::receive_bind:
          out << pad << s.from << " -> " << s.to << " : ";
          term(s.term);
          out << ";\n";
          break;
        case Stmt::kind::fresh:
          out << pad << s.var << " := fresh();\n";
          bound.insert(s.var);
          break;
        case Stmt::kind::assert_fact:
          out << pad;
          fact(s.fact);
          out << ";\n";
          break;
        case Stmt::kind::conditional: {
          for (size_t i = 0; i < s.cond->cases.size(); ++i) {
            std::set<std::string> before = bound;
            out << (i == 0 ? pad + "if (" : " elseif (");
            guards(s.cond->cases[i].guard);
            out << ") {\n";
            body(s.cond->cases[i].body, indent + 2);
            out << pad << "}";
            bound = before;
          }
          if (s.cond->has_else) {
            out << " else {\n";
            body(s.cond->else_body, indent + 2);
            out << pad << "}";
          }
          out << "\n";
          break;
        }
      }
    }
  }
};

std::string derived_branch_id(const EntityBranch& b) {
  for (const auto& g : b.guard) {
    if (g.k != Guard::kind::receive || !g.pattern) continue;
    const TermPtr& p = g.pattern;
    if (p->kind == term_kind::constant) return p->name;
    if (p->kind == term_kind::concat) {
      for (const auto& part : p->parts) {
        if (part->kind == term_kind::constant) return part->name;
      }
    }
    break;
  }
  return "";
}

}  // namespace

std::vector<Diagnostic> validate(const ModelSpec& model) { return validator(model).run(); }

std::string print_model(const ModelSpec& model) {
  printer p;
  p.out << "model " << model.name << ";\n";
  if (!model.agents.empty()) {
    p.out << "\nagents ";
    for (size_t i = 0; i < model.agents.size(); ++i) {
      if (i) p.out << ", ";
      p.out << model.agents[i];
    }
    p.out << ";\n";
  }
  auto const_decl = [&](const std::vector<std::string>& names, const char* vis) {
    if (names.empty()) return;
    p.out << "constants ";
    for (size_t i = 0; i < names.size(); ++i) {
      if (i) p.out << ", ";
      p.out << names[i];
    }
    p.out << " : " << vis << ";\n";
  };
  auto fn_decl = [&](const std::vector<std::pair<std::string, int>>& fns, const char* vis) {
    if (fns.empty()) return;
    p.out << "functions ";
    for (size_t i = 0; i < fns.size(); ++i) {
      if (i) p.out << ", ";
      p.out << fns[i].first << '/' << fns[i].second;
    }
    p.out << " : " << vis << ";\n";
  };
  if (!model.public_consts.empty() || !model.nonpublic_consts.empty() ||
      !model.public_fn_decls.empty() || !model.nonpublic_fn_decls.empty()) {
    p.out << '\n';
  }
  const_decl(model.public_consts, "public");
  const_decl(model.nonpublic_consts, "nonpublic");
  fn_decl(model.public_fn_decls, "public");
  fn_decl(model.nonpublic_fn_decls, "nonpublic");
  if (!model.init_facts.empty() || !model.clauses.empty()) p.out << '\n';
  for (const auto& f : model.init_facts) {
    p.out << "init ";
    p.fact(f);
    p.out << ";\n";
  }
  for (const auto& c : model.clauses) {
    p.out << "clause " << c.name << '(';
    std::set<std::string> clause_scope = p.bound;
    p.bound.insert(c.vars.begin(), c.vars.end());
    for (size_t i = 0; i < c.vars.size(); ++i) {
      if (i) p.out << ", ";
      p.out << c.vars[i];
    }
    p.out << ") : ";
    p.fact(c.head);
    if (c.premise) {
      p.out << " :- ";
      p.fact(*c.premise);
    }
    p.out << ";\n";
    p.bound = clause_scope;
  }
  if (!model.entity.empty()) {
    p.out << "\nentity " << model.entity << " {\n";
    int n = 0;
    for (const auto& b : model.branches) {
      ++n;
      std::set<std::string> before = p.bound;
      p.out << "  " << (n == 1 ? "if (" : "elseif (");
      p.guards(b.guard);
      p.out << ")";
      if (b.id != derived_branch_id(b)) p.out << " @id(" << b.id << ")";
      if (b.tag != "tag" + std::to_string(n)) p.out << " @tag(" << b.tag << ")";
      if (!b.keys.empty()) {
        p.out << " @keys(";
        for (size_t i = 0; i < b.keys.size(); ++i) {
          if (i) p.out << ", ";
          p.out << b.keys[i].first << " = " << b.keys[i].second;
        }
        p.out << ")";
      }
      p.out << " {\n";
      p.body(b.body, 4);
      p.out << "  }\n";
      p.bound = before;
    }
    p.out << "}\n";
  }
  if (!model.goals.empty()) p.out << '\n';
  for (const auto& g : model.goals) {
    std::set<std::string> before = p.bound;
    p.out << "goal " << g.label << " : [](!(";
    if (g.k == GoalSpec::kind::never_derives) {
      p.out << "iknowledge(";
      p.term(g.pattern);
      p.out << ')';
    } else {
      p.fact(g.fact);
    }
    p.out << "));\n";
    p.bound = before;
  }
  return p.out.str();
}

}  // namespace dywa
