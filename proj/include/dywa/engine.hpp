// Bounded reachability over attacker steps: each step instantiates one
// entity branch with attacker-chosen field values, executes the body with
// its backend alternatives, and extends attacker knowledge with whatever
// came back. Search is breadth-first, so the first violating state found
// is minimal in attacker steps.
#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dywa/builtins.hpp"
#include "dywa/knowledge.hpp"
#include "dywa/model.hpp"
#include "dywa/trace.hpp"

namespace dywa {

struct SearchBounds {
  int max_attacker_steps = 6;
  // extra atoms allowed across one guard's free binder runs beyond one each
  int run_slack = 2;
  // payload (non-filler) atoms allowed across one guard's free binder runs
  int max_payload_atoms = 2;
  SynthesisBounds synthesis;
};

struct SystemState;
using StatePtr = std::shared_ptr<const SystemState>;

struct SystemState {
  Knowledge kb;
  FactStore facts;
  int fresh_counter = 0;
  int depth = 0;
  StatePtr parent;
  // the step from parent to this state
  std::vector<TraceStep> step_steps;
  std::vector<std::string> step_branches;
  std::map<std::string, std::string> fresh_names;  // minted in this step only
  std::set<std::string> atoms;                     // cached known atom names
};

// Raw signature (full knowledge + full fact store), for tests. The search
// itself deduplicates on a behavioral projection: known atoms plus the fact
// instances some guard or goal can actually distinguish. Opaque application
// terms and junk fact rows cannot influence any later step, so they do not
// multiply frontier states.
std::string state_signature(const SystemState& state);

StatePtr initial_state(const ModelSpec& model);

// All successor states of one attacker step, deduplicated behaviorally, in
// deterministic order: branches in declaration order, fact rows in
// assertion order, free assignments by increasing payload use, backend
// alternatives in their declaration order. Passing the goal exempts
// goal-violating successors from dedup, exactly as the search does; without
// it a violating state can collapse into the class of a harmless sibling.
std::vector<StatePtr> step_successors(const ModelSpec& model, const StatePtr& state,
                                      const SearchBounds& bounds,
                                      const std::set<std::string>& disabled_branches,
                                      const GoalSpec* goal = nullptr);

bool goal_violated(const SystemState& state, const GoalSpec& goal);

AttackTrace build_trace(const StatePtr& state);

// First violating state in search order, as a trace.
std::optional<AttackTrace> explore(const ModelSpec& model, const GoalSpec& goal,
                                   const SearchBounds& bounds,
                                   const std::set<std::string>& disabled_branches = {},
                                   bool parallel = false);

enum class enumerate_strategy { branch_disable, exhaustive };

// branch_disable: re-run explore, each time disabling the most significant
// backend branch the previous trace used. exhaustive: every violating
// state within bounds, deduplicated by branch firing sequence.
std::vector<AttackTrace> enumerate_traces(const ModelSpec& model, const GoalSpec& goal,
                                          const SearchBounds& bounds, enumerate_strategy strategy,
                                          const std::set<std::string>& disabled_branches = {},
                                          bool parallel = false);

// Re-executes the trace step by step through the successor machinery and
// confirms the final state violates the goal.
bool replay_trace(const ModelSpec& model, const GoalSpec& goal, const AttackTrace& trace,
                  const SearchBounds& bounds, const std::set<std::string>& disabled_branches = {});

}  // namespace dywa
