// Recursive-descent parser for model files. Returns a model plus
// diagnostics; a syntax error yields no model and at least one diagnostic
// with file:line:col position.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dywa/model.hpp"

namespace dywa {

struct ParseResult {
  std::optional<ModelSpec> model;
  std::vector<Diagnostic> diagnostics;
};

ParseResult parse_model(const std::string& text, const std::string& filename);

// Convenience: parse then validate; diagnostics from both phases.
ParseResult load_model(const std::string& text, const std::string& filename);

}  // namespace dywa
