// Message term algebra: constants, pattern variables, flat associative
// concatenation, function application, symmetric encryption. Terms are
// immutable and shared; constructors normalize eagerly so a concat never
// contains another concat and always has at least two parts.
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace dywa {

enum class term_kind { constant, variable, concat, apply, enc };

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  term_kind kind;
  std::string name;            // constant name, variable name, or applied function
  std::vector<TermPtr> parts;  // concat parts, apply args, or enc {payload, key}
};

// Variables: name "" is the anonymous single-slot wildcard `?`,
// name "*" is the anonymous run wildcard, anything else is a binder `?name`.
TermPtr make_const(const std::string& name);
TermPtr make_var(const std::string& name);
TermPtr make_concat(std::vector<TermPtr> parts);
TermPtr make_apply(const std::string& fn, std::vector<TermPtr> args);
TermPtr make_enc(TermPtr payload, TermPtr key);

bool term_equal(const TermPtr& a, const TermPtr& b);
// Total order for canonical state signatures: kind, then name, then parts.
int term_compare(const TermPtr& a, const TermPtr& b);

std::string to_text(const TermPtr& t);
// Parses the textual syntax: atoms, ?binders, ? and *, f(arg, ...), a.b.c.
// Returns nullopt and fills error on malformed input.
std::optional<TermPtr> parse_term(const std::string& text, std::string* error = nullptr);

using Bindings = std::map<std::string, TermPtr>;

// Pattern matching against ground terms. Binders in concat position bind a
// contiguous run of one or more parts; repeated binders must bind equal terms.
// `?` consumes exactly one part, `*` a run of one or more, neither binds.
bool matches(const TermPtr& pattern, const TermPtr& term);
std::optional<Bindings> match_pattern(const TermPtr& pattern, const TermPtr& term);
// All segmentations, leftmost binder shortest run first.
std::vector<Bindings> match_all(const TermPtr& pattern, const TermPtr& term);

// Replaces binders with their bound terms; a concat bound inside a concat
// splices flat. Unbound binders are kept as-is.
TermPtr substitute(const TermPtr& t, const Bindings& b);

bool is_ground(const TermPtr& t);

// The term itself, every concat part and contiguous sub-run, every apply
// argument and enc component, recursively. Deduplicated, discovery order.
std::vector<TermPtr> submessages(const TermPtr& t);

// True when some submessage of t matches the pattern.
bool contains_match(const TermPtr& pattern, const TermPtr& t);

}  // namespace dywa
