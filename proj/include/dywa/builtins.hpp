// Builtin vocabulary and the backend entities every model gets for free:
// a filesystem and a database, reached by internal sends from the web
// application. Their branch alternatives are what multiply attack traces.
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "dywa/term.hpp"

namespace dywa {

// Payload markers the attacker always knows, plus the optional-field filler.
const std::set<std::string>& builtin_constants();
// Constants the attacker learns only by receiving them.
const std::set<std::string>& builtin_nonpublic_constants();
// name -> arity, -1 meaning any arity
const std::map<std::string, int>& builtin_functions();
const std::set<std::string>& builtin_fact_names();

// Ground facts asserted during a run (isInFS rows, sessionValue entries).
class FactStore {
 public:
  void assert_fact(const std::string& name, const std::vector<TermPtr>& args);
  bool holds_exact(const std::string& name, const std::vector<TermPtr>& args) const;
  // All stored instances of a fact, in assertion order.
  std::vector<std::vector<TermPtr>> instances(const std::string& name) const;
  const std::vector<std::pair<std::string, std::vector<TermPtr>>>& entries() const {
    return facts_;
  }
  std::string signature() const;
  bool operator==(const FactStore& other) const;

 private:
  std::vector<std::pair<std::string, std::vector<TermPtr>>> facts_;
  std::set<std::string> index_;
};

// Clause-backed fact semantics. inFS holds for the bare fsi marker, any
// concat led by fsi, or a stored isInFS row; inDB holds for any concat of
// two or more parts led by sqli (the bare atom is not a row) or a stored
// base row; everything else is exact lookup.
bool holds_fact(const FactStore& store, const std::string& name, const std::vector<TermPtr>& args);

// One way a backend call can play out: the branches that fired (a database
// read also fires the filesystem read it delegates to), the internal
// message exchange to render, side effects already applied to the store,
// and the reply the caller receives (no reply for fire-and-forget writes).
struct BackendOutcome {
  std::vector<std::string> branch_ids;
  // (from, to, message) triples, in exchange order
  std::vector<std::tuple<std::string, std::string, TermPtr>> exchanges;
  std::optional<TermPtr> reply;
  FactStore store_after;
};

// All alternatives for a message sent to the filesystem or database agent,
// in fixed branch-declaration order, honoring disabled branch ids.
std::vector<BackendOutcome> backend_call(const std::string& agent, const TermPtr& message,
                                         const FactStore& store,
                                         const std::set<std::string>& disabled_branches);

// Branch ids a backend agent can fire, for validation and disable flags.
const std::vector<std::string>& backend_branch_ids();

}  // namespace dywa
