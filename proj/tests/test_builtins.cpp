#include "dywa/builtins.hpp"

#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "dywa/term.hpp"

using namespace dywa;

namespace {

TermPtr t(const std::string& text) {
  std::string err;
  auto parsed = parse_term(text, &err);
  REQUIRE_MESSAGE(parsed.has_value(), text << ": " << err);
  return *parsed;
}

std::vector<BackendOutcome> call(const std::string& agent, const std::string& msg,
                                 const FactStore& store = {},
                                 const std::set<std::string>& disabled = {}) {
  return backend_call(agent, t(msg), store, disabled);
}

bool reply_is(const BackendOutcome& o, const std::string& expected) {
  return o.reply.has_value() && term_equal(*o.reply, t(expected));
}

}  // namespace

TEST_CASE("builtin vocabulary") {
  CHECK(builtin_constants() == std::set<std::string>{"none", "sqli", "fsi", "evil_file"});
  CHECK(builtin_nonpublic_constants() == std::set<std::string>{"no_file", "no_tuple"});
  CHECK(builtin_functions().at("query") == 1);
  CHECK(builtin_functions().at("enc") == 2);
  CHECK(builtin_functions().at("http_request") == -1);
  CHECK(builtin_fact_names().count("sessionValue") == 1);
  CHECK(backend_branch_ids() == std::vector<std::string>{"fs.read", "fs.write", "db.sanitized",
                                                         "db.hit", "db.read", "db.write",
                                                         "db.miss"});
}

TEST_CASE("fact store keeps assertion order and dedups") {
  FactStore s;
  s.assert_fact("isInFS", {t("evil_file")});
  s.assert_fact("sessionValue", {t("fresh_1")});
  s.assert_fact("isInFS", {t("evil_file")});
  s.assert_fact("isInFS", {t("fsi")});

  CHECK(s.entries().size() == 3);
  CHECK(s.holds_exact("isInFS", {t("evil_file")}));
  CHECK(!s.holds_exact("isInFS", {t("none")}));
  auto rows = s.instances("isInFS");
  REQUIRE(rows.size() == 2);
  CHECK(term_equal(rows[0][0], t("evil_file")));
  CHECK(term_equal(rows[1][0], t("fsi")));

  FactStore other;
  other.assert_fact("isInFS", {t("fsi")});
  other.assert_fact("isInFS", {t("evil_file")});
  other.assert_fact("sessionValue", {t("fresh_1")});
  // order-insensitive content equality via the signature
  CHECK(s.signature() == other.signature());
  CHECK(s == other);
}

TEST_CASE("inFS leniency") {
  FactStore s;
  CHECK(holds_fact(s, "inFS", {t("fsi")}));
  CHECK(holds_fact(s, "inFS", {t("fsi.none")}));
  CHECK(!holds_fact(s, "inFS", {t("none.fsi")}));
  CHECK(!holds_fact(s, "inFS", {t("evil_file")}));
  s.assert_fact("isInFS", {t("evil_file")});
  CHECK(holds_fact(s, "inFS", {t("evil_file")}));
  CHECK(!holds_fact(s, "inFS", {t("evil_file.none")}));
}

TEST_CASE("inDB needs a concat row, the bare marker is not one") {
  FactStore s;
  CHECK(holds_fact(s, "inDB", {t("sqli.none")}));
  CHECK(holds_fact(s, "inDB", {t("sqli.fsi")}));
  CHECK(!holds_fact(s, "inDB", {t("sqli")}));
  CHECK(!holds_fact(s, "inDB", {t("none.sqli")}));
  s.assert_fact("inDB", {t("sqli")});
  CHECK(holds_fact(s, "inDB", {t("sqli")}));
}

TEST_CASE("filesystem read replies with the file or a marker") {
  FactStore s;
  auto hit = call("FS", "readFile(fsi)", s);
  REQUIRE(hit.size() == 1);
  CHECK(hit[0].branch_ids == std::vector<std::string>{"fs.read"});
  CHECK(reply_is(hit[0], "file(fsi)"));
  CHECK(hit[0].exchanges.empty());

  auto miss = call("FS", "readFile(evil_file)", s);
  REQUIRE(miss.size() == 1);
  CHECK(reply_is(miss[0], "no_file"));

  s.assert_fact("isInFS", {t("evil_file")});
  auto planted = call("FS", "readFile(evil_file)", s);
  REQUIRE(planted.size() == 1);
  CHECK(reply_is(planted[0], "file(evil_file)"));

  CHECK(call("FS", "readFile(fsi)", s, {"fs.read"}).empty());
}

TEST_CASE("filesystem write stores the file and sends no reply") {
  auto out = call("FS", "writeFile(evil_file)");
  REQUIRE(out.size() == 1);
  CHECK(out[0].branch_ids == std::vector<std::string>{"fs.write"});
  CHECK(!out[0].reply.has_value());
  CHECK(out[0].store_after.holds_exact("isInFS", {t("evil_file")}));
  CHECK(call("FS", "writeFile(evil_file)", {}, {"fs.write"}).empty());
}

TEST_CASE("database fans out over hit, read, and write on an injected query") {
  auto out = call("DB", "query(sqli.fsi)");
  REQUIRE(out.size() == 3);

  CHECK(out[0].branch_ids == std::vector<std::string>{"db.hit"});
  CHECK(reply_is(out[0], "tuple(sqli.fsi)"));

  CHECK(out[1].branch_ids == std::vector<std::string>{"db.read", "fs.read"});
  REQUIRE(out[1].exchanges.size() == 2);
  CHECK(std::get<0>(out[1].exchanges[0]) == "DB");
  CHECK(std::get<1>(out[1].exchanges[0]) == "FS");
  CHECK(term_equal(std::get<2>(out[1].exchanges[0]), t("readFile(fsi)")));
  CHECK(std::get<1>(out[1].exchanges[1]) == "DB");
  CHECK(term_equal(std::get<2>(out[1].exchanges[1]), t("file(fsi)")));
  CHECK(reply_is(out[1], "tuple(file(fsi))"));

  CHECK(out[2].branch_ids == std::vector<std::string>{"db.write", "fs.write"});
  REQUIRE(out[2].exchanges.size() == 1);
  CHECK(term_equal(std::get<2>(out[2].exchanges[0]), t("writeFile(fsi)")));
  CHECK(reply_is(out[2], "tuple(new_file(fsi))"));
  CHECK(out[2].store_after.holds_exact("isInFS", {t("fsi")}));
}

TEST_CASE("database read keeps no reply when the delegated read misses") {
  auto out = call("DB", "query(sqli.evil_file)");
  REQUIRE(out.size() == 3);
  CHECK(out[1].branch_ids == std::vector<std::string>{"db.read", "fs.read"});
  CHECK(!out[1].reply.has_value());
  CHECK(reply_is(out[2], "tuple(new_file(evil_file))"));
}

TEST_CASE("query splits prefer the shortest payload run") {
  auto out = call("DB", "query(sqli.fsi.none)");
  // hit, two read splits, two write splits
  REQUIRE(out.size() == 5);
  CHECK(reply_is(out[0], "tuple(sqli.fsi.none)"));
  // first read split: Sql=sqli, File=fsi.none, and fsi.none is in the
  // filesystem because its leading atom is the marker
  CHECK(out[1].branch_ids == std::vector<std::string>{"db.read", "fs.read"});
  CHECK(reply_is(out[1], "tuple(file(fsi.none))"));
  // second read split reads none, which is not a file
  CHECK(!out[2].reply.has_value());
  CHECK(term_equal(std::get<2>(out[3].exchanges[0]), t("writeFile(fsi.none)")));
  CHECK(term_equal(std::get<2>(out[4].exchanges[0]), t("writeFile(none)")));
}

TEST_CASE("bare injection marker without a filler misses the database") {
  auto out = call("DB", "query(sqli)");
  REQUIRE(out.size() == 1);
  CHECK(out[0].branch_ids == std::vector<std::string>{"db.miss"});
  CHECK(reply_is(out[0], "no_tuple"));

  auto plain = call("DB", "query(none.none)");
  REQUIRE(plain.size() == 1);
  CHECK(reply_is(plain[0], "no_tuple"));
}

TEST_CASE("sanitized queries never fan out") {
  auto tuple_arg = call("DB", "query(sanitized(tuple(sqli)))");
  REQUIRE(tuple_arg.size() == 1);
  CHECK(tuple_arg[0].branch_ids == std::vector<std::string>{"db.sanitized"});
  CHECK(reply_is(tuple_arg[0], "no_tuple"));

  // a sanitized payload that is not a stored tuple sticks: no outcome at all
  CHECK(call("DB", "query(sanitized(sqli))").empty());
  CHECK(call("DB", "query(sanitized(sqli.fsi))").empty());
}

TEST_CASE("disabling database branches filters the fan-out") {
  auto no_read = call("DB", "query(sqli.fsi)", {}, {"db.read"});
  REQUIRE(no_read.size() == 2);
  CHECK(no_read[0].branch_ids == std::vector<std::string>{"db.hit"});
  CHECK(no_read[1].branch_ids == std::vector<std::string>{"db.write", "fs.write"});

  auto only_miss = call("DB", "query(sqli.fsi)", {}, {"db.hit", "db.read", "db.write"});
  CHECK(only_miss.empty());

  // fs.read disabled also cuts the delegated database read
  auto no_fs = call("DB", "query(sqli.fsi)", {}, {"fs.read"});
  REQUIRE(no_fs.size() == 2);
  CHECK(no_fs[0].branch_ids == std::vector<std::string>{"db.hit"});
  CHECK(no_fs[1].branch_ids == std::vector<std::string>{"db.write", "fs.write"});
}
