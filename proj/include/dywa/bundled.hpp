// The four case-study models and their concretization files, embedded so
// commands and golden tests never depend on working-directory layout. The
// same texts are mirrored under models/ for editing and direct CLI use.
#pragma once

#include <string>
#include <vector>

namespace dywa {

struct BundledModel {
  std::string name;  // CLI name, e.g. "multistage"
  std::string model_text;
  std::string concretization_text;
};

const std::vector<BundledModel>& bundled_models();
const BundledModel* bundled_model(const std::string& name);

}  // namespace dywa
