#include "dywa/model.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "doctest.h"
#include "dywa/bundled.hpp"
#include "dywa/parser.hpp"

using namespace dywa;

namespace {

ModelSpec good(const std::string& text, const std::string& name) {
  ParseResult r = load_model(text, name);
  std::ostringstream all;
  for (const auto& d : r.diagnostics) all << to_text(d) << '\n';
  REQUIRE_MESSAGE(r.model.has_value(), name << " failed to load:\n" << all.str());
  REQUIRE_MESSAGE(r.diagnostics.empty(), name << " has diagnostics:\n" << all.str());
  return *r.model;
}

// A fixture with one seeded mistake must produce at least one diagnostic
// whose message contains the expected fragment.
void expect_error(const std::string& text, const std::string& fragment) {
  ParseResult r = load_model(text, "fixture.wam");
  REQUIRE_MESSAGE(!r.diagnostics.empty(), "expected a diagnostic mentioning '" << fragment << "'");
  bool found = false;
  std::ostringstream all;
  for (const auto& d : r.diagnostics) {
    all << to_text(d) << '\n';
    if (d.message.find(fragment) != std::string::npos) found = true;
  }
  CHECK_MESSAGE(found, "no diagnostic mentions '" << fragment << "', got:\n" << all.str());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "cannot open " << path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("bundled models load without diagnostics") {
  for (const auto& bm : bundled_models()) {
    ParseResult r = load_model(bm.model_text, bm.name);
    std::ostringstream all;
    for (const auto& d : r.diagnostics) all << to_text(d) << '\n';
    CHECK_MESSAGE(r.model.has_value(), bm.name << ":\n" << all.str());
    CHECK_MESSAGE(r.diagnostics.empty(), bm.name << ":\n" << all.str());
  }
}

TEST_CASE("print-parse reaches a fixpoint on every bundled model") {
  for (const auto& bm : bundled_models()) {
    ModelSpec m1 = good(bm.model_text, bm.name);
    std::string p1 = print_model(m1);
    ModelSpec m2 = good(p1, bm.name + " (reprinted)");
    std::string p2 = print_model(m2);
    CHECK_MESSAGE(p1 == p2, bm.name << " print is not a fixpoint");
    // The bundled sources are kept in canonical form, so one print is
    // already the identity. This pins the printer against drift.
    CHECK_MESSAGE(p1 == bm.model_text, bm.name << " source is not in canonical form");
  }
}

TEST_CASE("bundled texts match the files shipped in models/") {
  std::string dir = DYWA_MODELS_DIR;
  for (const auto& bm : bundled_models()) {
    CHECK(slurp(dir + "/" + bm.name + ".wam") == bm.model_text);
    CHECK(slurp(dir + "/" + bm.name + ".concretization.json") == bm.concretization_text);
  }
}

TEST_CASE("branch ids, tags, and keys on the multi-stage model") {
  const BundledModel* bm = bundled_model("multistage");
  REQUIRE(bm != nullptr);
  ModelSpec m = good(bm->model_text, bm->name);

  REQUIRE(m.branches.size() == 4);
  CHECK(m.branches[0].id == "login");
  CHECK(m.branches[1].id == "profileid");
  CHECK(m.branches[2].id == "edit");
  CHECK(m.branches[3].id == "evil_file");
  CHECK(m.branches[3].explicit_id);

  CHECK(m.branches[0].tag == "tag1");
  CHECK(m.branches[1].tag == "tag3");
  CHECK(m.branches[2].tag == "tag2");
  CHECK(m.branches[3].tag == "tag4");

  const EntityBranch* login = m.branch_by_id("login");
  REQUIRE(login != nullptr);
  REQUIRE(login->keys.size() == 2);
  CHECK(login->keys[0].first == "Username");
  CHECK(login->keys[0].second == "usr");
  CHECK(login->keys[1].second == "pwd");

  const EntityBranch* edit = m.branch_by_id("edit");
  REQUIRE(edit != nullptr);
  std::set<std::string> edit_keys;
  for (const auto& [binder, key] : edit->keys) edit_keys.insert(key);
  CHECK(edit_keys == std::set<std::string>{"name", "surname", "phone", "avatar"});

  const GoalSpec* goal = m.goal_by_label("file_leak");
  REQUIRE(goal != nullptr);
  CHECK(goal->k == GoalSpec::kind::never_derives);
  CHECK(to_text(goal->pattern) == "file(*)");
}

TEST_CASE("goal forms parse to the right kinds") {
  ModelSpec m = good(
      "model g;\n\nagents A, B;\n\nconstants x : public;\n\nentity A {\n  if (B -> A : x.?V) {\n"
      "    A -> B : x;\n  }\n}\n\n"
      "goal leak : [](!(iknowledge(file(*))));\n"
      "goal planted : [](!(inFS(evil_file)));\n",
      "goals.wam");
  REQUIRE(m.goals.size() == 2);
  CHECK(m.goals[0].k == GoalSpec::kind::never_derives);
  CHECK(m.goals[1].k == GoalSpec::kind::never_fact);
  CHECK(m.goals[1].fact.name == "inFS");
}

TEST_CASE("seeded mistakes each produce a diagnostic") {
  // undeclared constant in a send
  expect_error(
      "model bad;\n\nagents A, B;\n\nconstants login : public;\n\nentity A {\n  if (B -> A : login.?X) {\n"
      "    A -> B : mystery;\n  }\n}\n\ngoal g : [](!(iknowledge(file(*))));\n",
      "undeclared constant 'mystery'");

  // variable used before any binding occurrence
  expect_error(
      "model bad;\n\nagents A, B;\n\nconstants login : public;\n\nentity A {\n  if (B -> A : login.?X) {\n"
      "    A -> B : login.Stray;\n  }\n}\n\ngoal g : [](!(iknowledge(file(*))));\n",
      "'Stray' is not bound here");

  // two branches deriving the same id from their patterns
  expect_error(
      "model bad;\n\nagents A, B;\n\nconstants login : public;\n\nentity A {\n  if (B -> A : login.?X) {\n    A -> B : login;\n  }\n"
      "  elseif (B -> A : login.?Y.?Z) {\n    A -> B : login;\n  }\n}\n\n"
      "goal g : [](!(iknowledge(file(*))));\n",
      "duplicate branch id 'login'");

  // builtin function applied at the wrong arity
  expect_error(
      "model bad;\n\nagents A, B;\n\nconstants login : public;\n\nentity A {\n  if (B -> A : login.?X) {\n"
      "    A -> B : file(X, X);\n  }\n}\n\ngoal g : [](!(iknowledge(file(*))));\n",
      "'file' expects 1");

  // guard on a fact nobody declares or derives
  expect_error(
      "model bad;\n\nagents A, B;\n\nconstants login : public;\n\nentity A {\n  if (B -> A : login.?X & isAdmin(X)) {\n"
      "    A -> B : login;\n  }\n}\n\ngoal g : [](!(iknowledge(file(*))));\n",
      "unknown fact 'isAdmin'");

  // @keys naming a binder the pattern never introduces
  expect_error(
      "model bad;\n\nagents A, B;\n\nconstants login : public;\n\nentity A {\n  if (B -> A : login.?X) @keys(Missing = usr) {\n"
      "    A -> B : login;\n  }\n}\n\ngoal g : [](!(iknowledge(file(*))));\n",
      "@keys names unknown binder 'Missing'");
}

TEST_CASE("syntax errors carry a position and kill the model") {
  ParseResult r = parse_model("model oops\nagents A;\n", "oops.wam");
  CHECK(!r.model.has_value());
  REQUIRE(!r.diagnostics.empty());
  CHECK(r.diagnostics[0].file == "oops.wam");
  CHECK(r.diagnostics[0].line >= 1);
}

TEST_CASE("validation failures keep the parsed model out of load_model") {
  ParseResult r = load_model(
      "model bad;\n\nagents A, B;\n\nconstants login : public;\n\nentity A {\n  if (B -> A : login.?X) {\n"
      "    A -> B : mystery;\n  }\n}\n\ngoal g : [](!(iknowledge(file(*))));\n",
      "bad.wam");
  CHECK(!r.model.has_value());
  CHECK(!r.diagnostics.empty());
}
