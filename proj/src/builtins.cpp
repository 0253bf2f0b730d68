#include "dywa/builtins.hpp"

#include <algorithm>
#include <sstream>

namespace dywa {

const std::set<std::string>& builtin_constants() {
  static const std::set<std::string> names{"none", "sqli", "fsi", "evil_file"};
  return names;
}

const std::set<std::string>& builtin_nonpublic_constants() {
  static const std::set<std::string> names{"no_file", "no_tuple"};
  return names;
}

const std::map<std::string, int>& builtin_functions() {
  static const std::map<std::string, int> fns{
      {"query", 1},    {"tuple", 1},     {"file", 1},          {"readFile", 1},
      {"writeFile", 1}, {"sanitized", 1}, {"new_file", 1},      {"enc", 2},
      {"http_request", -1}, {"http_response", -1},
  };
  return fns;
}

const std::set<std::string>& builtin_fact_names() {
  static const std::set<std::string> names{"inFS", "inDB", "isInFS", "sessionValue"};
  return names;
}

namespace {

std::string fact_key(const std::string& name, const std::vector<TermPtr>& args) {
  std::ostringstream out;
  out << name << '(';
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out << ',';
    out << to_text(args[i]);
  }
  out << ')';
  return out.str();
}

}  // namespace

void FactStore::assert_fact(const std::string& name, const std::vector<TermPtr>& args) {
  if (index_.insert(fact_key(name, args)).second) facts_.emplace_back(name, args);
}

bool FactStore::holds_exact(const std::string& name, const std::vector<TermPtr>& args) const {
  return index_.count(fact_key(name, args)) > 0;
}

std::vector<std::vector<TermPtr>> FactStore::instances(const std::string& name) const {
  std::vector<std::vector<TermPtr>> out;
  for (const auto& [n, args] : facts_) {
    if (n == name) out.push_back(args);
  }
  return out;
}

std::string FactStore::signature() const {
  std::vector<std::string> keys(index_.begin(), index_.end());
  std::ostringstream out;
  for (const auto& k : keys) out << k << '\x1f';
  return out.str();
}

bool FactStore::operator==(const FactStore& other) const { return index_ == other.index_; }

namespace {

bool first_atom_is(const TermPtr& t, const std::string& name) {
  return t->kind == term_kind::concat && t->parts.front()->kind == term_kind::constant &&
         t->parts.front()->name == name;
}

}  // namespace

bool holds_fact(const FactStore& store, const std::string& name,
                const std::vector<TermPtr>& args) {
  if (name == "inFS" && args.size() == 1) {
    const TermPtr& m = args[0];
    if (m->kind == term_kind::constant && m->name == "fsi") return true;
    if (first_atom_is(m, "fsi")) return true;
    if (store.holds_exact("isInFS", args)) return true;
    return store.holds_exact(name, args);
  }
  if (name == "inDB" && args.size() == 1) {
    if (first_atom_is(args[0], "sqli")) return true;
    return store.holds_exact(name, args);
  }
  return store.holds_exact(name, args);
}

const std::vector<std::string>& backend_branch_ids() {
  static const std::vector<std::string> ids{"fs.read",  "fs.write", "db.sanitized",
                                            "db.hit",   "db.read",  "db.write",
                                            "db.miss"};
  return ids;
}

namespace {

TermPtr fs_agent_reply(const FactStore& store, const TermPtr& path) {
  if (holds_fact(store, "inFS", {path})) return make_apply("file", {path});
  return make_const("no_file");
}

void fs_call(const TermPtr& message, const FactStore& store,
             const std::set<std::string>& disabled, std::vector<BackendOutcome>& out) {
  static const TermPtr read_pat = *parse_term("readFile(?Filepath)");
  static const TermPtr write_pat = *parse_term("writeFile(?Filepath)");
  if (auto b = match_pattern(read_pat, message)) {
    if (!disabled.count("fs.read")) {
      BackendOutcome o;
      o.branch_ids = {"fs.read"};
      o.reply = fs_agent_reply(store, b->at("Filepath"));
      o.store_after = store;
      out.push_back(std::move(o));
    }
    return;
  }
  if (auto b = match_pattern(write_pat, message)) {
    if (!disabled.count("fs.write")) {
      BackendOutcome o;
      o.branch_ids = {"fs.write"};
      o.store_after = store;
      o.store_after.assert_fact("isInFS", {b->at("Filepath")});
      out.push_back(std::move(o));
    }
    return;
  }
}

void db_call(const TermPtr& message, const FactStore& store,
             const std::set<std::string>& disabled, std::vector<BackendOutcome>& out) {
  static const TermPtr sanitized_pat = *parse_term("query(sanitized(?Q))");
  static const TermPtr query_pat = *parse_term("query(?Q)");
  static const TermPtr tuple_any = *parse_term("tuple(*)");
  static const TermPtr split_pat = *parse_term("?Sql.?File");

  if (auto b = match_pattern(sanitized_pat, message)) {
    if (!disabled.count("db.sanitized") && matches(tuple_any, b->at("Q"))) {
      BackendOutcome o;
      o.branch_ids = {"db.sanitized"};
      o.reply = make_const("no_tuple");
      o.store_after = store;
      out.push_back(std::move(o));
    }
    return;  // sanitized queries reach no other branch
  }
  auto b = match_pattern(query_pat, message);
  if (!b) return;
  const TermPtr q = b->at("Q");
  if (holds_fact(store, "inDB", {q})) {
    if (!disabled.count("db.hit")) {
      BackendOutcome o;
      o.branch_ids = {"db.hit"};
      o.reply = make_apply("tuple", {q});
      o.store_after = store;
      out.push_back(std::move(o));
    }
    // file read and write extract the trailing payload from the query
    std::vector<Bindings> splits = match_all(split_pat, q);
    if (!disabled.count("db.read")) {
      for (const auto& split : splits) {
        const TermPtr file = split.at("File");
        TermPtr request = make_apply("readFile", {file});
        std::vector<BackendOutcome> fs;
        fs_call(request, store, disabled, fs);
        for (auto& inner : fs) {
          BackendOutcome o;
          o.branch_ids = {"db.read"};
          o.branch_ids.insert(o.branch_ids.end(), inner.branch_ids.begin(),
                              inner.branch_ids.end());
          o.exchanges.emplace_back("DB", "FS", request);
          if (inner.reply) {
            o.exchanges.emplace_back("FS", "DB", *inner.reply);
            if (term_equal(*inner.reply, make_apply("file", {file}))) {
              o.reply = make_apply("tuple", {*inner.reply});
            }
          }
          o.store_after = inner.store_after;
          out.push_back(std::move(o));
        }
      }
    }
    if (!disabled.count("db.write")) {
      for (const auto& split : splits) {
        const TermPtr file = split.at("File");
        TermPtr request = make_apply("writeFile", {file});
        std::vector<BackendOutcome> fs;
        fs_call(request, store, disabled, fs);
        for (auto& inner : fs) {
          BackendOutcome o;
          o.branch_ids = {"db.write"};
          o.branch_ids.insert(o.branch_ids.end(), inner.branch_ids.begin(),
                              inner.branch_ids.end());
          o.exchanges.emplace_back("DB", "FS", request);
          o.reply = make_apply("tuple", {make_apply("new_file", {file})});
          o.store_after = inner.store_after;
          out.push_back(std::move(o));
        }
      }
    }
  } else if (!disabled.count("db.miss")) {
    BackendOutcome o;
    o.branch_ids = {"db.miss"};
    o.reply = make_const("no_tuple");
    o.store_after = store;
    out.push_back(std::move(o));
  }
}

}  // namespace

std::vector<BackendOutcome> backend_call(const std::string& agent, const TermPtr& message,
                                         const FactStore& store,
                                         const std::set<std::string>& disabled_branches) {
  std::vector<BackendOutcome> out;
  if (agent == "FS") fs_call(message, store, disabled_branches, out);
  if (agent == "DB") db_call(message, store, disabled_branches, out);
  return out;
}

}  // namespace dywa
