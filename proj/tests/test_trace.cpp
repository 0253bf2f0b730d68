#include "dywa/trace.hpp"

#include <string>

#include "doctest.h"
#include "dywa/bundled.hpp"
#include "dywa/engine.hpp"
#include "dywa/parser.hpp"

using namespace dywa;

namespace {

ModelSpec load_bundled(const std::string& name) {
  const BundledModel* bm = bundled_model(name);
  REQUIRE(bm != nullptr);
  ParseResult r = load_model(bm->model_text, name);
  REQUIRE(r.model.has_value());
  return *r.model;
}

AttackTrace found(const std::string& model, const std::string& goal,
                  const std::set<std::string>& disabled = {}) {
  ModelSpec m = load_bundled(model);
  const GoalSpec* g = m.goal_by_label(goal);
  REQUIRE(g != nullptr);
  auto trace = explore(m, *g, SearchBounds{}, disabled);
  REQUIRE_MESSAGE(trace.has_value(), model << " found no trace");
  return *trace;
}

AttackTrace msc(const std::string& text) {
  std::string err;
  auto trace = parse_msc(text, &err);
  REQUIRE_MESSAGE(trace.has_value(), err);
  return *trace;
}

}  // namespace

TEST_CASE("single-branch model renders are byte-stable") {
  CHECK(render_msc(found("dvwa-fi", "file_leak")) ==
        "i -> WebApp : include.fsi\n"
        "WebApp -> FS : readFile(fsi)\n"
        "FS -> WebApp : file(fsi)\n"
        "WebApp -> i : include.file(fsi)\n");

  CHECK(render_msc(found("dvwa-upload", "no_evil_upload")) ==
        "i -> WebApp : uploaded.evil_file\n"
        "WebApp -> FS : writeFile(evil_file)\n"
        "WebApp -> i : uploaded\n");

  CHECK(render_msc(found("dvwa-sqli-read", "file_leak")) ==
        "i -> WebApp : userid.sqli.fsi\n"
        "WebApp -> DB : query(sqli.fsi)\n"
        "DB -> FS : readFile(fsi)\n"
        "FS -> DB : file(fsi)\n"
        "DB -> WebApp : tuple(file(fsi))\n"
        "WebApp -> i : userid.tuple(file(fsi))\n");
}

TEST_CASE("six-step chained render is byte-stable") {
  CHECK(render_msc(found("multistage", "file_leak")) ==
        "i -> WebApp : login.sqli.fsi\n"
        "WebApp -> DB : query(sqli.fsi)\n"
        "DB -> FS : readFile(fsi)\n"
        "FS -> DB : file(fsi)\n"
        "DB -> WebApp : tuple(file(fsi))\n"
        "WebApp -> i : dashboard.AuthCookie.tuple(file(fsi))\n");
}

TEST_CASE("thirteen-step chained render is byte-stable") {
  // fillers vanish, all-filler fields render as their binder names, fresh
  // cookies render as the variable that minted them
  CHECK(render_msc(found("multistage", "file_leak", {"db.read", "db.write"})) ==
        "i -> WebApp : login.sqli.Password\n"
        "WebApp -> DB : query(sqli)\n"
        "DB -> WebApp : tuple(sqli)\n"
        "WebApp -> i : dashboard.AuthCookie.tuple(sqli)\n"
        "i -> WebApp : edit.sqli.Surname.Phone.evil_file.AuthCookie\n"
        "WebApp -> DB : query(sqli)\n"
        "DB -> WebApp : tuple(sqli)\n"
        "WebApp -> FS : writeFile(evil_file)\n"
        "WebApp -> i : profileid.tuple(sqli)\n"
        "i -> WebApp : file.fsi\n"
        "WebApp -> FS : readFile(fsi)\n"
        "FS -> WebApp : file(fsi)\n"
        "WebApp -> i : file(fsi)\n");
}

TEST_CASE("parse_msc reads loose spacing and flags attacker lines") {
  AttackTrace t = msc("i->WebApp:login.sqli\nWebApp ->  DB :query(sqli.fsi)\n");
  REQUIRE(t.steps.size() == 2);
  CHECK(t.steps[0].from == "i");
  CHECK(t.steps[0].to == "WebApp");
  CHECK(t.steps[0].attacker_request);
  CHECK(to_text(t.steps[0].term) == "login.sqli");
  CHECK(!t.steps[1].attacker_request);
  CHECK(to_text(t.steps[1].term) == "query(sqli.fsi)");
}

TEST_CASE("parse_msc reports the offending line") {
  std::string err;
  CHECK(!parse_msc("WebApp -> i : file(fsi)\nnot a trace line\n", &err).has_value());
  CHECK(err.find("2") != std::string::npos);

  err.clear();
  CHECK(!parse_msc("WebApp -> i missing colon\n", &err).has_value());
  CHECK(!err.empty());
}

TEST_CASE("render and parse agree on a round trip") {
  AttackTrace first = msc(
      "i -> WebApp : login.sqli.evil_file.Password\n"
      "WebApp -> DB: query(sqli.evil_file)\n"
      "DB -> FS : writeFile(evil_file)\n"
      "WebApp -> i : dashboard.AuthCookie.tuple(new_file(evil_file))\n");
  AttackTrace second = msc(render_msc(first));
  REQUIRE(second.steps.size() == first.steps.size());
  for (size_t i = 0; i < first.steps.size(); ++i) {
    CHECK(first.steps[i].from == second.steps[i].from);
    CHECK(first.steps[i].to == second.steps[i].to);
    CHECK(term_equal(first.steps[i].term, second.steps[i].term));
    CHECK(first.steps[i].attacker_request == second.steps[i].attacker_request);
  }
}

TEST_CASE("trace equivalence erases fillers and placeholders") {
  CHECK(trace_equivalent(msc("i -> W : login.Username"), msc("i -> W : login.none")));
  CHECK(trace_equivalent(msc("i -> W : login.Username"), msc("i -> W : login")));
  CHECK(trace_equivalent(msc("A -> B : dashboard.fresh_1.tuple(sqli)"),
                         msc("A -> B : dashboard.Cookie.tuple(sqli)")));
  CHECK(trace_equivalent(msc("A -> B : tuple(Password)"), msc("A -> B : tuple(none)")));
  CHECK(trace_equivalent(msc("A -> B : Anything"), msc("A -> B : none")));

  CHECK(!trace_equivalent(msc("i -> W : login.sqli"), msc("i -> W : login.fsi")));
  CHECK(!trace_equivalent(msc("A -> B : tuple(sqli)"), msc("A -> B : tuple(fsi)")));
  CHECK(!trace_equivalent(msc("A -> B : file(fsi)"), msc("B -> A : file(fsi)")));
  CHECK(!trace_equivalent(msc("A -> B : x\nA -> B : x"), msc("A -> B : x")));
}

TEST_CASE("golden listings are equivalent to themselves and distinct from each other") {
  const char* aat1 =
      "i -> WebApp : login.sqli.fsi.Password\n"
      "WebApp -> DB: query(sqli.fsi)\n"
      "DB -> FS : readFile(fsi)\n"
      "FS -> DB : file(fsi)\n"
      "DB -> WebApp : tuple(file(fsi))\n"
      "WebApp -> i : dashboard.AuthCookie.tuple(file(fsi))\n";
  const char* upload =
      "i -> WebApp : uploaded.evil_file\n"
      "WebApp -> FS: writeFile(evil_file)\n"
      "WebApp -> i : uploaded\n";
  CHECK(trace_equivalent(msc(aat1), msc(aat1)));
  CHECK(trace_equivalent(msc(upload), msc(upload)));
  CHECK(!trace_equivalent(msc(aat1), msc(upload)));
}

TEST_CASE("traces survive a JSON round trip") {
  AttackTrace trace = found("multistage", "file_leak");
  std::string json = trace_to_json(trace);

  std::string err;
  auto back = trace_from_json(json, &err);
  REQUIRE_MESSAGE(back.has_value(), err);

  REQUIRE(back->steps.size() == trace.steps.size());
  for (size_t i = 0; i < trace.steps.size(); ++i) {
    CHECK(back->steps[i].from == trace.steps[i].from);
    CHECK(back->steps[i].to == trace.steps[i].to);
    CHECK(term_equal(back->steps[i].term, trace.steps[i].term));
    CHECK(back->steps[i].attacker_request == trace.steps[i].attacker_request);
    CHECK(back->steps[i].branch_id == trace.steps[i].branch_id);
    CHECK(back->steps[i].tag == trace.steps[i].tag);
  }
  CHECK(back->branch_sequence == trace.branch_sequence);
  REQUIRE(back->bindings.size() == trace.bindings.size());
  for (const auto& [name, value] : trace.bindings) {
    REQUIRE(back->bindings.count(name) == 1);
    CHECK(term_equal(back->bindings.at(name), value));
  }
  CHECK(back->fresh_names == trace.fresh_names);

  // serialization is stable
  CHECK(trace_to_json(*back) == json);
}

TEST_CASE("trace_from_json rejects malformed input") {
  std::string err;
  CHECK(!trace_from_json("{not json", &err).has_value());
  CHECK(!err.empty());

  err.clear();
  CHECK(!trace_from_json("{\"steps\": [{\"from\": \"i\"}]}", &err).has_value());
  CHECK(!err.empty());

  err.clear();
  CHECK(!trace_from_json("[]", &err).has_value());
  CHECK(!err.empty());
}
