// Runs an HTTP attack plan against a live target: picks payloads from the
// dictionary for each injection objective, checks response markers, captures
// session cookies, and matches the final evidence pattern. Refuses to touch
// non-loopback hosts unless explicitly acknowledged.
#pragma once

#include <string>
#include <vector>

#include "dywa/concretize.hpp"

namespace dywa {

enum class step_outcome {
  exploited,        // a payload produced the expected response
  not_exploitable,  // the target denied the operation for every payload
  check_failed,     // no payload produced the expected marker or evidence
  network_error,    // the request never completed
};

std::string to_text(step_outcome o);

struct StepResult {
  int action = 0;
  step_outcome outcome = step_outcome::check_failed;
  std::string url;      // full URL of the attempt
  std::string payload;  // winning injection or traversal payload, if any
  int status = 0;
  std::string note;  // failure detail
};

struct ExecutionOptions {
  // scheme://host[:port] that replaces every action's scheme and host,
  // keeping paths; required for the https URLs concretization maps carry
  std::string target;
  bool acknowledge_non_loopback = false;
  int timeout_ms = 2000;
};

struct ExecutionResult {
  bool goal_reached = false;
  std::string evidence;    // matched evidence, or the page marker for fact goals
  int failed_action = -1;  // first action that did not exploit
  std::string error;       // refusal or malformed input, reported before any I/O
  std::vector<StepResult> steps;
};

ExecutionResult execute_plan(const AttackPlan& plan, const ExecutionOptions& options = {});

// Payload dictionaries, exposed so tests and documentation stay aligned with
// what the executor actually sends. Objectives: auth, read_file, write_file.
// Placeholders {path}, {name}, {content} are filled per attempt.
const std::vector<std::string>& injection_payloads(const std::string& objective);
const std::vector<std::string>& traversal_candidates();

// Inert marker used as upload content when the configured payload file is
// missing or unreadable.
const std::string& canned_upload_content();

bool is_loopback_host(const std::string& host);

}  // namespace dywa
