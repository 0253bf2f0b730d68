// Attacker knowledge under the Dolev-Yao rules: everything received is
// decomposed as far as possible (concat parts always, application arguments
// only for public functions, encryption payloads only with a known key), and
// new messages are synthesized from known material within bounds.
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dywa/term.hpp"

namespace dywa {

struct SynthesisBounds {
  // flattened part count allowed for any synthesized concat
  int max_concat_len = 4;
  // nested public function applications allowed during synthesis
  int max_depth = 3;
};

class Knowledge {
 public:
  void declare_public_fn(const std::string& name, int arity);
  bool is_public_fn(const std::string& name) const;
  const std::map<std::string, int>& public_fns() const { return fns_; }

  // Adds the term and closes under decomposition.
  void learn(const TermPtr& t);

  bool knows(const TermPtr& t) const;
  bool knows_atom(const std::string& name) const;

  // Known terms in canonical order; known_atoms is the constants subset.
  std::vector<TermPtr> known_terms() const;
  std::vector<std::string> known_atoms() const;

  size_t size() const { return terms_.size(); }

  // Signature string for state deduplication.
  std::string signature() const;

  friend bool can_derive(const Knowledge& kb, const TermPtr& t, const SynthesisBounds& bounds);

 private:
  void decompose(const TermPtr& t);

  std::map<std::string, TermPtr> terms_;
  std::map<std::string, int> fns_;
  mutable std::map<std::string, int> derive_memo_;  // min synthesis depth, -1 underivable
};

// True when the attacker can synthesize t from current knowledge within
// bounds: known terms cost nothing, concats are covered by contiguous chunks
// (known runs or derivable single parts), public applications cost one depth
// level per nesting.
bool can_derive(const Knowledge& kb, const TermPtr& t, const SynthesisBounds& bounds);

// Every derivable ground instance of the pattern within bounds, paired with
// its bindings, in nondecreasing term weight (atom plus function-symbol
// count), ties broken by canonical text.
std::vector<std::pair<TermPtr, Bindings>> synthesize_matching(const Knowledge& kb,
                                                              const TermPtr& pattern,
                                                              const SynthesisBounds& bounds);

// The full bounded synthesis universe (constant, concat, and application
// fragment; encryption synthesis is handled by can_derive but never
// enumerated), same order as synthesize_matching.
std::vector<TermPtr> synthesis_universe(const Knowledge& kb, const SynthesisBounds& bounds);

int term_weight(const TermPtr& t);

}  // namespace dywa
