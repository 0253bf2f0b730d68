// Command-line front end: model validation, attack search, trace rendering,
// plan concretization, plan execution, the bundled mock target, and an
// end-to-end demo. Exit codes: 0 success (trace found, goal reached), 1 clean
// negative (no trace, validation or check failures), 2 usage or I/O errors.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "dywa/bundled.hpp"
#include "dywa/concretize.hpp"
#include "dywa/engine.hpp"
#include "dywa/executor.hpp"
#include "dywa/mock_target.hpp"
#include "dywa/parser.hpp"
#include "dywa/trace.hpp"
#include "json.hpp"

namespace {

using namespace dywa;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct ModelSource {
  std::string text;
  std::string name;                    // diagnostics label
  std::string concretization;          // paired map text, may be empty
  std::string concretization_origin;   // file path when read from disk
};

// a model argument is either a file path or the name of a bundled model
std::optional<ModelSource> resolve_model(const std::string& arg) {
  if (auto text = read_file(arg)) {
    ModelSource src{*text, arg, "", ""};
    size_t dot = arg.rfind(".wam");
    std::string sibling = (dot == arg.size() - 4 ? arg.substr(0, dot) : arg);
    sibling += ".concretization.json";
    if (auto map_text = read_file(sibling)) {
      src.concretization = *map_text;
      src.concretization_origin = sibling;
    }
    return src;
  }
  if (const BundledModel* bm = bundled_model(arg))
    return ModelSource{bm->model_text, arg, bm->concretization_text, ""};
  return std::nullopt;
}

// parse + validate; diagnostics go to stderr
std::optional<ModelSpec> load_checked(const ModelSource& src, int& rc) {
  ParseResult result = load_model(src.text, src.name);
  for (const Diagnostic& d : result.diagnostics) std::cerr << to_text(d) << "\n";
  if (!result.model.has_value() || !result.diagnostics.empty()) {
    rc = 1;
    return std::nullopt;
  }
  return result.model;
}

// a goal argument is a declared label or an inline formula, parsed in the
// context of the model's own declarations
std::optional<GoalSpec> pick_goal(const ModelSpec& model, const ModelSource& src,
                                  const std::string& arg) {
  if (arg.empty()) {
    if (model.goals.empty()) {
      std::cerr << "model declares no goals\n";
      return std::nullopt;
    }
    return model.goals.front();
  }
  if (const GoalSpec* g = model.goal_by_label(arg)) return *g;
  std::string label = "goal_from_cli";
  while (model.goal_by_label(label)) label += "_";
  ParseResult result = load_model(src.text + "\ngoal " + label + " : " + arg + ";\n", src.name);
  if (result.model.has_value() && result.diagnostics.empty()) {
    if (const GoalSpec* g = result.model->goal_by_label(label)) return *g;
  }
  std::cerr << "goal '" << arg << "' is neither a declared label nor a well-formed formula\n";
  for (const Diagnostic& d : result.diagnostics) std::cerr << to_text(d) << "\n";
  return std::nullopt;
}

struct SearchFlags {
  std::vector<std::string> disabled;
  int max_steps = 0;  // 0 keeps the command default
  int run_slack = -1;
  int payload_atoms = -1;
  bool parallel = false;
};

void add_search_flags(CLI::App* cmd, SearchFlags& flags) {
  cmd->add_option("--disable-branch", flags.disabled,
                  "backend branch to disable; repeatable (e.g. db.read)");
  cmd->add_option("--max-steps", flags.max_steps, "bound on attacker steps");
  cmd->add_option("--slack", flags.run_slack, "extra filler atoms per guard");
  cmd->add_option("--payload-atoms", flags.payload_atoms, "payload atoms per guard");
  cmd->add_flag("--parallel", flags.parallel, "expand frontier states in parallel");
}

SearchBounds bounds_from(const SearchFlags& flags, int default_steps) {
  SearchBounds bounds;
  bounds.max_attacker_steps = flags.max_steps > 0 ? flags.max_steps : default_steps;
  if (flags.run_slack >= 0) bounds.run_slack = flags.run_slack;
  if (flags.payload_atoms >= 0) bounds.max_payload_atoms = flags.payload_atoms;
  return bounds;
}

std::set<std::string> disabled_from(const SearchFlags& flags) {
  return {flags.disabled.begin(), flags.disabled.end()};
}

int cmd_validate(const std::string& model_arg) {
  auto src = resolve_model(model_arg);
  if (!src) {
    std::cerr << "cannot read model '" << model_arg << "'\n";
    return 2;
  }
  int rc = 1;
  return load_checked(*src, rc) ? 0 : rc;
}

int cmd_check(const std::string& model_arg, const std::string& goal_arg,
              const SearchFlags& flags, const std::string& format) {
  auto src = resolve_model(model_arg);
  if (!src) {
    std::cerr << "cannot read model '" << model_arg << "'\n";
    return 2;
  }
  int rc = 1;
  auto model = load_checked(*src, rc);
  if (!model) return rc;
  auto goal = pick_goal(*model, *src, goal_arg);
  if (!goal) return 2;

  auto trace = explore(*model, *goal, bounds_from(flags, 6), disabled_from(flags),
                       flags.parallel);
  if (!trace) {
    std::cerr << "no attack trace found within the step bound\n";
    return 1;
  }
  std::cout << (format == "json" ? trace_to_json(*trace) : render_msc(*trace));
  return 0;
}

int cmd_enumerate(const std::string& model_arg, const std::string& goal_arg,
                  const std::string& strategy, const SearchFlags& flags,
                  const std::string& format) {
  auto src = resolve_model(model_arg);
  if (!src) {
    std::cerr << "cannot read model '" << model_arg << "'\n";
    return 2;
  }
  int rc = 1;
  auto model = load_checked(*src, rc);
  if (!model) return rc;
  auto goal = pick_goal(*model, *src, goal_arg);
  if (!goal) return 2;

  bool exhaustive = strategy == "exhaustive";
  SearchBounds bounds = bounds_from(flags, exhaustive ? 3 : 6);
  auto traces = enumerate_traces(*model, *goal, bounds,
                                 exhaustive ? enumerate_strategy::exhaustive
                                            : enumerate_strategy::branch_disable,
                                 disabled_from(flags), flags.parallel);
  if (traces.empty()) {
    std::cerr << "no attack trace found within the step bound\n";
    return 1;
  }
  if (format == "json") {
    nlohmann::json all = nlohmann::json::array();
    for (const AttackTrace& t : traces) all.push_back(nlohmann::json::parse(trace_to_json(t)));
    std::cout << all.dump(2) << "\n";
    return 0;
  }
  for (size_t i = 0; i < traces.size(); ++i) {
    if (i) std::cout << "\n";
    std::cout << render_msc(traces[i]);
  }
  return 0;
}

std::optional<ConcretizationMap> map_for(const ModelSource& src, const std::string& map_arg) {
  std::string err;
  std::optional<ConcretizationMap> map;
  if (!map_arg.empty()) {
    map = load_concretization_file(map_arg, &err);
  } else if (!src.concretization_origin.empty()) {
    map = load_concretization_file(src.concretization_origin, &err);
  } else if (!src.concretization.empty()) {
    map = load_concretization(src.concretization, &err);
  } else {
    err = "no concretization map; pass one with --map";
  }
  if (!map) std::cerr << err << "\n";
  return map;
}

int cmd_concretize(const std::string& model_arg, const std::string& goal_arg,
                   const std::string& map_arg, const std::string& trace_arg,
                   const SearchFlags& flags) {
  auto src = resolve_model(model_arg);
  if (!src) {
    std::cerr << "cannot read model '" << model_arg << "'\n";
    return 2;
  }
  int rc = 1;
  auto model = load_checked(*src, rc);
  if (!model) return rc;
  auto goal = pick_goal(*model, *src, goal_arg);
  if (!goal) return 2;
  auto map = map_for(*src, map_arg);
  if (!map) return 2;

  std::vector<std::string> problems = check_against_model(*map, *model);
  if (!problems.empty()) {
    for (const std::string& p : problems) std::cerr << p << "\n";
    return 1;
  }

  std::optional<AttackTrace> trace;
  if (!trace_arg.empty()) {
    auto text = read_file(trace_arg);
    if (!text) {
      std::cerr << "cannot read trace '" << trace_arg << "'\n";
      return 2;
    }
    std::string err;
    trace = trace_from_json(*text, &err);
    if (!trace) {
      std::cerr << err << "\n";
      return 2;
    }
  } else {
    trace = explore(*model, *goal, bounds_from(flags, 6), disabled_from(flags),
                    flags.parallel);
    if (!trace) {
      std::cerr << "no attack trace found within the step bound\n";
      return 1;
    }
  }

  std::string err;
  auto plan = concretize_trace(*trace, *model, *map, *goal, &err);
  if (!plan) {
    std::cerr << err << "\n";
    return 1;
  }
  std::cout << plan_to_json(*plan);
  return 0;
}

void print_report(const ExecutionResult& result, const std::string& format) {
  if (format == "json") {
    nlohmann::json j;
    j["goal_reached"] = result.goal_reached;
    j["evidence"] = result.evidence;
    j["failed_action"] = result.failed_action;
    j["steps"] = nlohmann::json::array();
    for (const StepResult& s : result.steps) {
      nlohmann::json step;
      step["action"] = s.action;
      step["outcome"] = to_text(s.outcome);
      step["url"] = s.url;
      step["payload"] = s.payload;
      step["status"] = s.status;
      step["note"] = s.note;
      j["steps"].push_back(std::move(step));
    }
    std::cout << j.dump(2) << "\n";
    return;
  }
  for (const StepResult& s : result.steps) {
    std::cout << "action " << s.action << ": " << to_text(s.outcome);
    if (!s.payload.empty()) std::cout << " [" << s.payload << "]";
    if (!s.note.empty()) std::cout << " (" << s.note << ")";
    std::cout << "\n";
  }
  if (result.goal_reached)
    std::cout << "goal reached, evidence: " << result.evidence << "\n";
  else
    std::cout << "attack failed at action " << result.failed_action << "\n";
}

int cmd_run(const std::string& plan_arg, const ExecutionOptions& options,
            const std::string& format) {
  std::string text;
  if (plan_arg == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    text = buf.str();
  } else if (auto from_file = read_file(plan_arg)) {
    text = *from_file;
  } else {
    std::cerr << "cannot read plan '" << plan_arg << "'\n";
    return 2;
  }
  std::string err;
  auto plan = plan_from_json(text, &err);
  if (!plan) {
    std::cerr << err << "\n";
    return 2;
  }
  ExecutionResult result = execute_plan(*plan, options);
  if (!result.error.empty()) {
    std::cerr << result.error << "\n";
    return 2;
  }
  print_report(result, format);
  if (result.goal_reached) return 0;
  bool network = !result.steps.empty() &&
                 result.steps.back().outcome == step_outcome::network_error;
  return network ? 2 : 1;
}

int mock_port_from_env() {
  const char* env = std::getenv("DYWA_MOCK_PORT");
  if (!env || !*env) return 0;
  return std::atoi(env);
}

bool apply_switch(MockSwitches& switches, const std::string& name) {
  if (name == "login_sqli") switches.login_sqli = false;
  else if (name == "db_file_read_priv") switches.db_file_read_priv = false;
  else if (name == "db_file_write_priv") switches.db_file_write_priv = false;
  else if (name == "edit_sqli") switches.edit_sqli = false;
  else if (name == "upload_unrestricted") switches.upload_unrestricted = false;
  else if (name == "include_traversal") switches.include_traversal = false;
  else return false;
  return true;
}

int cmd_mock(int port, const std::vector<std::string>& off, const std::string& secret) {
  MockSwitches switches;
  for (const std::string& name : off) {
    if (!apply_switch(switches, name)) {
      std::cerr << "unknown switch '" << name << "'\n";
      return 2;
    }
  }
  MockTarget mock(switches, secret);
  if (port == 0) port = mock_port_from_env();
  if (!mock.start(port)) {
    std::cerr << "cannot bind the mock target to port " << port << "\n";
    return 2;
  }
  std::cout << "mock target serving on " << mock.base_url() << "\n";
  for (const std::string& name : off) std::cout << "switched off: " << name << "\n";
  std::cout.flush();
  while (true) std::this_thread::sleep_for(std::chrono::seconds(3600));
}

// End-to-end walkthrough on a bundled model. Prints no ports, addresses, or
// timings, so two runs emit identical bytes.
int cmd_demo(const std::string& name) {
  const BundledModel* bm = bundled_model(name);
  if (!bm) {
    std::cerr << "unknown bundled model '" << name << "'; one of";
    for (const BundledModel& b : bundled_models()) std::cerr << " " << b.name;
    std::cerr << "\n";
    return 2;
  }
  ModelSource src{bm->model_text, bm->name, bm->concretization_text, ""};
  int rc = 1;
  auto model = load_checked(src, rc);
  if (!model) return rc;
  std::cout << "== validate " << name << "\n";
  std::cout << "model is well formed\n";

  if (model->goals.empty()) {
    std::cerr << "model declares no goals\n";
    return 1;
  }
  const GoalSpec& goal = model->goals.front();

  std::cout << "\n== enumerate attack traces (branch-disable)\n";
  auto traces =
      enumerate_traces(*model, goal, SearchBounds{}, enumerate_strategy::branch_disable);
  if (traces.empty()) {
    std::cerr << "no attack trace found\n";
    return 1;
  }
  for (size_t i = 0; i < traces.size(); ++i) {
    std::cout << "\n-- trace " << i + 1 << " (branches:";
    for (const std::string& b : traces[i].branch_sequence) std::cout << " " << b;
    std::cout << ")\n" << render_msc(traces[i]);
  }

  std::string err;
  auto map = load_concretization(src.concretization, &err);
  if (!map) {
    std::cerr << err << "\n";
    return 2;
  }
  std::vector<AttackPlan> plans;
  for (size_t i = 0; i < traces.size(); ++i) {
    auto plan = concretize_trace(traces[i], *model, *map, goal, &err);
    if (!plan) {
      std::cerr << err << "\n";
      return 1;
    }
    std::cout << "\n== concretize trace " << i + 1 << "\n";
    std::cout << plan_to_json(*plan);
    plans.push_back(std::move(*plan));
  }

  int env_port = mock_port_from_env();
  auto run_against = [&](const AttackPlan& plan, MockSwitches switches) -> ExecutionResult {
    MockTarget mock(switches);
    if (!mock.start(env_port)) {
      ExecutionResult failed;
      failed.error = "cannot bind the mock target";
      return failed;
    }
    ExecutionOptions options;
    options.target = mock.base_url();
    ExecutionResult result = execute_plan(plan, options);
    mock.stop();
    return result;
  };

  bool all_good = true;
  for (size_t i = 0; i < plans.size(); ++i) {
    bool harden_write = plans.size() == 3 && i == 1;
    std::cout << "\n== run trace " << i + 1
              << (harden_write ? " with the file write privilege revoked"
                               : " against the bundled mock, all weaknesses on")
              << "\n";
    MockSwitches switches;
    if (harden_write) switches.db_file_write_priv = false;
    ExecutionResult result = run_against(plans[i], switches);
    if (!result.error.empty()) {
      std::cerr << result.error << "\n";
      return 2;
    }
    print_report(result, "text");
    if (harden_write) {
      bool stopped = !result.goal_reached && !result.steps.empty() &&
                     result.steps.back().outcome == step_outcome::not_exploitable;
      all_good = all_good && stopped;
    } else {
      all_good = all_good && result.goal_reached;
    }
  }
  return all_good ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "dywa: searches web application models for attack traces under a "
      "network attacker, renders them, compiles them into HTTP attack plans, "
      "and executes plans against its bundled mock target"};
  app.require_subcommand(1);
  int rc = 0;

  std::string model_arg, goal_arg, format = "msc", strategy = "branch-disable";
  std::string map_arg, trace_arg, plan_arg, secret;
  SearchFlags check_flags, enum_flags, conc_flags;
  ExecutionOptions exec_options;
  int mock_port = 0;
  std::vector<std::string> mock_off;
  std::string demo_name;

  CLI::App* validate = app.add_subcommand("validate", "parse and validate a model");
  validate->add_option("model", model_arg, "model file or bundled name")->required();
  validate->callback([&] { rc = cmd_validate(model_arg); });

  CLI::App* check = app.add_subcommand("check", "search for one attack trace");
  check->add_option("model", model_arg, "model file or bundled name")->required();
  check->add_option("--goal", goal_arg, "goal label or inline formula");
  check->add_option("--format", format, "msc or json")
      ->check(CLI::IsMember({"msc", "json"}));
  add_search_flags(check, check_flags);
  check->callback([&] { rc = cmd_check(model_arg, goal_arg, check_flags, format); });

  CLI::App* enumerate = app.add_subcommand("enumerate", "search for distinct attack traces");
  enumerate->add_option("model", model_arg, "model file or bundled name")->required();
  enumerate->add_option("--goal", goal_arg, "goal label or inline formula");
  enumerate->add_option("--strategy", strategy, "branch-disable or exhaustive")
      ->check(CLI::IsMember({"branch-disable", "exhaustive"}));
  enumerate->add_option("--format", format, "msc or json")
      ->check(CLI::IsMember({"msc", "json"}));
  add_search_flags(enumerate, enum_flags);
  enumerate->callback(
      [&] { rc = cmd_enumerate(model_arg, goal_arg, strategy, enum_flags, format); });

  CLI::App* concretize =
      app.add_subcommand("concretize", "compile a trace into an HTTP attack plan");
  concretize->add_option("model", model_arg, "model file or bundled name")->required();
  concretize->add_option("--goal", goal_arg, "goal label or inline formula");
  concretize->add_option("--map", map_arg, "concretization map file");
  concretize->add_option("--trace-json", trace_arg,
                         "trace file from check --format json; default: search again");
  add_search_flags(concretize, conc_flags);
  concretize->callback(
      [&] { rc = cmd_concretize(model_arg, goal_arg, map_arg, trace_arg, conc_flags); });

  CLI::App* run = app.add_subcommand("run", "execute an attack plan over HTTP");
  run->add_option("plan", plan_arg, "plan file, or - for stdin")->required();
  run->add_option("--target", exec_options.target,
                  "http://host:port that replaces every action's scheme and host");
  run->add_flag("--acknowledge-non-loopback", exec_options.acknowledge_non_loopback,
                "allow targets beyond 127.0.0.0/8 (only with authorization)");
  run->add_option("--timeout-ms", exec_options.timeout_ms, "per-request timeout");
  run->add_option("--format", format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));
  run->callback([&] {
    if (format == "msc") format = "text";
    rc = cmd_run(plan_arg, exec_options, format);
  });

  CLI::App* mock = app.add_subcommand("mock", "serve the bundled vulnerable target");
  mock->add_option("--port", mock_port, "port to bind; default DYWA_MOCK_PORT or ephemeral");
  mock->add_option("--off", mock_off,
                   "weakness switch to disable; repeatable (login_sqli, db_file_read_priv, "
                   "db_file_write_priv, edit_sqli, upload_unrestricted, include_traversal)");
  mock->add_option("--secret", secret, "replace the marker the mock leaks");
  mock->callback([&] { rc = cmd_mock(mock_port, mock_off, secret); });

  CLI::App* demo = app.add_subcommand("demo", "end-to-end walkthrough on a bundled model");
  demo->add_option("name", demo_name, "bundled model name")->required();
  demo->callback([&] { rc = cmd_demo(demo_name); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return rc;
}
