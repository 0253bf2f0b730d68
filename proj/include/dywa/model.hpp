// Model AST for the web-application dialect: agents, constant/function
// declarations, one entity with a guarded branch chain, initial facts,
// optional Horn clauses, and safety goals. Parsing lives in parser.hpp;
// validation and canonical printing live here.
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dywa/term.hpp"

namespace dywa {

struct Diagnostic {
  std::string file;
  int line = 0;
  int col = 0;
  std::string message;
};

std::string to_text(const Diagnostic& d);

struct FactAtom {
  std::string name;
  std::vector<TermPtr> args;
};

std::string to_text(const FactAtom& f);

struct Guard {
  enum class kind { receive, fact, negated_fact, match };
  kind k = kind::fact;
  std::string from, to;  // receive endpoints
  TermPtr pattern;       // receive pattern or match right-hand side
  TermPtr subject;       // match left-hand side
  FactAtom fact;
};

struct Stmt;

struct CondCase {
  std::vector<Guard> guard;  // conjunction
  std::vector<Stmt> body;
};

struct Conditional {
  std::vector<CondCase> cases;  // if / elseif chain, first match fires
  std::vector<Stmt> else_body;
  bool has_else = false;
};

struct Stmt {
  enum class kind { send, receive_bind, fresh, assert_fact, conditional };
  kind k = kind::send;
  std::string from, to;  // send / receive_bind endpoints
  TermPtr term;          // send payload or receive_bind pattern
  std::string var;       // fresh target
  FactAtom fact;
  std::shared_ptr<Conditional> cond;
  int line = 0, col = 0;
};

struct EntityBranch {
  std::string id;   // defaults to the first constant atom of the receive pattern
  std::string tag;  // concretization tag, defaults to tag<N> in declaration order
  bool explicit_id = false;
  std::vector<Guard> guard;  // conjunction, exactly one receive conjunct
  std::vector<Stmt> body;
  std::vector<std::pair<std::string, std::string>> keys;  // binder -> abstract param key
  int line = 0, col = 0;
};

struct GoalSpec {
  enum class kind { never_derives, never_fact };
  std::string label;
  kind k = kind::never_derives;
  TermPtr pattern;  // never_derives
  FactAtom fact;    // never_fact
};

struct HornClause {
  std::string name;
  std::vector<std::string> vars;
  FactAtom head;
  std::optional<FactAtom> premise;
};

struct ModelSpec {
  std::string name;
  std::string file;  // source filename for diagnostics
  std::vector<std::string> agents;
  std::vector<std::string> public_consts;
  std::vector<std::string> nonpublic_consts;
  std::vector<std::pair<std::string, int>> public_fn_decls;
  std::vector<std::pair<std::string, int>> nonpublic_fn_decls;
  std::string entity;
  std::vector<EntityBranch> branches;
  std::vector<FactAtom> init_facts;
  std::vector<HornClause> clauses;
  std::vector<GoalSpec> goals;

  const EntityBranch* branch_by_id(const std::string& id) const;
  const GoalSpec* goal_by_label(const std::string& label) const;
};

// Semantic checks: declared names, binder scoping, unique ids/tags/labels,
// endpoint sanity. Empty result means the model is well formed.
std::vector<Diagnostic> validate(const ModelSpec& model);

// Canonical form; parse(print(m)) prints identically (print-parse fixpoint).
std::string print_model(const ModelSpec& model);

}  // namespace dywa
