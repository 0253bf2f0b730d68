// Breadth-first attacker search over entity branches and backend
// alternatives. Guard binders are instantiated from small candidate pools:
// binders constrained by a positive fact draw from stored rows the attacker
// knows, the rest draw filler and payload atom runs under a per-guard
// length budget. Assignments are ordered cheapest-first so the first
// violation found is the canonical minimal trace.
#include "dywa/engine.hpp"

#include <algorithm>
#include <functional>
#include <thread>

namespace dywa {

namespace {

const std::vector<std::string>& pool_atom_names() {
  static const std::vector<std::string> names = {"none", "sqli", "fsi", "evil_file"};
  return names;
}

bool is_backend(const std::string& agent) { return agent == "DB" || agent == "FS"; }

// Guard and goal fact names against the names rows are stored under.
std::string store_fact_name(const std::string& name) {
  return name == "inFS" ? "isInFS" : name;
}

// Fact instances a guard or goal can distinguish; everything else is dead
// weight for the search and excluded from frontier signatures.
struct LiveFacts {
  std::set<std::string> fully;                            // store names, all rows live
  std::map<std::string, std::set<std::string>> by_const;  // store name -> live arg texts
};

void mark_live(LiveFacts& live, const FactAtom& fact) {
  std::string store_name = store_fact_name(fact.name);
  if (fact.args.empty()) {
    live.fully.insert(store_name);
    return;
  }
  for (const TermPtr& arg : fact.args) {
    if (arg->kind == term_kind::constant)
      live.by_const[store_name].insert(arg->name);
    else
      live.fully.insert(store_name);
  }
}

void scan_stmts(LiveFacts& live, const std::vector<Stmt>& stmts) {
  for (const Stmt& s : stmts) {
    if (s.k != Stmt::kind::conditional) continue;
    for (const CondCase& c : s.cond->cases) {
      for (const Guard& g : c.guard)
        if (g.k == Guard::kind::fact || g.k == Guard::kind::negated_fact) mark_live(live, g.fact);
      scan_stmts(live, c.body);
    }
    scan_stmts(live, s.cond->else_body);
  }
}

LiveFacts live_facts_for(const ModelSpec& model) {
  LiveFacts live;
  for (const EntityBranch& b : model.branches) {
    for (const Guard& g : b.guard)
      if (g.k == Guard::kind::fact || g.k == Guard::kind::negated_fact) mark_live(live, g.fact);
    scan_stmts(live, b.body);
  }
  for (const GoalSpec& g : model.goals)
    if (g.k == GoalSpec::kind::never_fact) mark_live(live, g.fact);
  return live;
}

bool fact_row_live(const LiveFacts& live, const std::string& name,
                   const std::vector<TermPtr>& args) {
  if (live.fully.count(name)) return true;
  auto it = live.by_const.find(name);
  if (it == live.by_const.end()) return false;
  for (const TermPtr& a : args)
    if (it->second.count(to_text(a))) return true;
  return false;
}

std::string class_signature(const std::set<std::string>& atoms, const FactStore& facts,
                            const LiveFacts& live) {
  std::string sig;
  for (const std::string& a : atoms) {
    sig += a;
    sig += '\x1f';
  }
  sig += '\x1e';
  std::vector<std::string> rows;
  for (const auto& [name, args] : facts.entries()) {
    if (!fact_row_live(live, name, args)) continue;
    std::string row = name + "(";
    for (size_t i = 0; i < args.size(); ++i) {
      if (i) row += ",";
      row += to_text(args[i]);
    }
    rows.push_back(row + ")");
  }
  std::sort(rows.begin(), rows.end());
  for (const std::string& r : rows) {
    sig += r;
    sig += '\x1f';
  }
  return sig;
}

// Atoms Knowledge::learn would add for this term: concat parts recurse,
// public application arguments recurse, opaque applications stop,
// encryption payloads open once the key is available.
void collect_new_atoms(const Knowledge& kb, const std::vector<TermPtr>& terms,
                       std::set<std::string>& found) {
  std::vector<TermPtr> work = terms;
  std::vector<TermPtr> deferred;
  bool progress = true;
  while (progress) {
    progress = false;
    while (!work.empty()) {
      TermPtr cur = work.back();
      work.pop_back();
      switch (cur->kind) {
        case term_kind::constant:
          if (!kb.knows_atom(cur->name) && found.insert(cur->name).second) progress = true;
          break;
        case term_kind::variable:
          break;
        case term_kind::concat:
          work.insert(work.end(), cur->parts.begin(), cur->parts.end());
          break;
        case term_kind::apply:
          if (kb.is_public_fn(cur->name))
            work.insert(work.end(), cur->parts.begin(), cur->parts.end());
          break;
        case term_kind::enc: {
          const TermPtr& key = cur->parts[1];
          bool key_known = kb.knows(key) ||
                           (key->kind == term_kind::constant && found.count(key->name));
          if (key_known)
            work.push_back(cur->parts[0]);
          else
            deferred.push_back(cur);
          break;
        }
      }
    }
    if (progress && !deferred.empty()) {
      work.swap(deferred);
    }
  }
}

// One candidate instantiation of a guard's free binders, pre-built so the
// candidate pool is shared across branches with the same binder count.
struct Assignment {
  int non_filler = 0;
  int total = 0;
  std::vector<std::vector<int>> runs;  // atom indices per binder
  std::vector<TermPtr> values;
};

std::vector<Assignment> build_assignments(int binder_count, int slack, int max_run, int nf_cap,
                                          const std::vector<TermPtr>& pool) {
  std::vector<Assignment> out;
  if (binder_count == 0) {
    out.push_back(Assignment{});
    return out;
  }
  int budget = binder_count + slack;
  // run length compositions, then an odometer over atom choices
  std::vector<int> lens(binder_count, 1);
  auto emit_atoms = [&](const std::vector<int>& lengths) {
    int total = 0;
    for (int l : lengths) total += l;
    std::vector<int> digits(total, 0);
    while (true) {
      Assignment a;
      a.total = total;
      a.runs.resize(lengths.size());
      a.values.reserve(lengths.size());
      int pos = 0;
      for (size_t b = 0; b < lengths.size(); ++b) {
        std::vector<TermPtr> parts;
        for (int i = 0; i < lengths[b]; ++i) {
          int d = digits[pos++];
          a.runs[b].push_back(d);
          if (d != 0) ++a.non_filler;
          parts.push_back(pool[d]);
        }
        a.values.push_back(parts.size() == 1 ? parts[0] : make_concat(std::move(parts)));
      }
      if (a.non_filler <= nf_cap) out.push_back(std::move(a));
      int i = total - 1;
      while (i >= 0 && digits[i] == static_cast<int>(pool.size()) - 1) digits[i--] = 0;
      if (i < 0) break;
      ++digits[i];
    }
  };
  std::function<void(int, int)> compose = [&](int idx, int used) {
    if (idx == binder_count) {
      emit_atoms(lens);
      return;
    }
    int remaining_min = binder_count - idx - 1;
    for (int l = 1; l <= max_run && used + l + remaining_min <= budget; ++l) {
      lens[idx] = l;
      compose(idx + 1, used + l);
    }
  };
  compose(0, 0);
  std::sort(out.begin(), out.end(), [](const Assignment& a, const Assignment& b) {
    if (a.non_filler != b.non_filler) return a.non_filler < b.non_filler;
    if (a.total != b.total) return a.total < b.total;
    return a.runs < b.runs;
  });
  return out;
}

// Positive fact conjunct whose rows feed one or more receive binders.
struct FactSlot {
  const Guard* guard = nullptr;
  std::vector<std::pair<size_t, std::string>> binder_args;  // arg index -> binder
};

struct GuardInfo {
  const EntityBranch* branch = nullptr;
  const Guard* receive = nullptr;
  std::vector<const Guard*> checks;  // every non-receive conjunct
  std::vector<std::string> binders;  // first-occurrence order in the pattern
  std::vector<FactSlot> fact_slots;
  std::vector<std::string> free_binders;
};

void collect_binders(const TermPtr& t, std::vector<std::string>& out) {
  if (t->kind == term_kind::variable) {
    if (!t->name.empty() && t->name != "*" &&
        std::find(out.begin(), out.end(), t->name) == out.end())
      out.push_back(t->name);
    return;
  }
  for (const TermPtr& p : t->parts) collect_binders(p, out);
}

GuardInfo guard_info_for(const EntityBranch& branch) {
  GuardInfo info;
  info.branch = &branch;
  for (const Guard& g : branch.guard) {
    if (g.k == Guard::kind::receive)
      info.receive = &g;
    else
      info.checks.push_back(&g);
  }
  collect_binders(info.receive->pattern, info.binders);
  std::set<std::string> claimed;
  for (const Guard* g : info.checks) {
    if (g->k != Guard::kind::fact) continue;
    FactSlot slot;
    slot.guard = g;
    for (size_t i = 0; i < g->fact.args.size(); ++i) {
      const TermPtr& arg = g->fact.args[i];
      if (arg->kind != term_kind::variable || arg->name.empty() || arg->name == "*") continue;
      if (std::find(info.binders.begin(), info.binders.end(), arg->name) == info.binders.end())
        continue;
      if (!claimed.insert(arg->name).second) continue;
      slot.binder_args.emplace_back(i, arg->name);
    }
    if (!slot.binder_args.empty()) info.fact_slots.push_back(std::move(slot));
  }
  for (const std::string& b : info.binders)
    if (!claimed.count(b)) info.free_binders.push_back(b);
  return info;
}

struct SearchCtx {
  const ModelSpec* model = nullptr;
  SearchBounds bounds;
  const std::set<std::string>* disabled = nullptr;
  const GoalSpec* goal = nullptr;
  // exhaustive enumeration keys dedup on class plus branch lineage, so one
  // behavioral class can surface once per distinct firing history
  bool lineage_keyed = false;
  LiveFacts live;
  std::vector<GuardInfo> guards;
  std::vector<TermPtr> pool;
  std::map<int, std::vector<Assignment>> assignment_cache;

  const std::vector<Assignment>& assignments(int binder_count) {
    auto it = assignment_cache.find(binder_count);
    if (it != assignment_cache.end()) return it->second;
    int max_run = std::min(bounds.run_slack + 1, bounds.synthesis.max_concat_len);
    int nf_cap = std::max(1, bounds.max_payload_atoms);
    auto built = build_assignments(binder_count, bounds.run_slack, max_run, nf_cap, pool);
    return assignment_cache.emplace(binder_count, std::move(built)).first->second;
  }
};

SearchCtx make_ctx(const ModelSpec& model, const SearchBounds& bounds,
                   const std::set<std::string>& disabled, const GoalSpec* goal) {
  SearchCtx ctx;
  ctx.model = &model;
  ctx.bounds = bounds;
  ctx.disabled = &disabled;
  ctx.goal = goal;
  ctx.live = live_facts_for(model);
  for (const EntityBranch& b : model.branches) ctx.guards.push_back(guard_info_for(b));
  for (const std::string& name : pool_atom_names()) ctx.pool.push_back(make_const(name));
  return ctx;
}

// One in-progress interleaving of a branch body.
struct BodyAlt {
  Bindings env;
  FactStore facts;
  std::vector<TraceStep> steps;
  std::vector<std::string> branches;
  std::vector<TermPtr> out;  // messages handed to the attacker
  int fresh_counter = 0;
  std::map<std::string, std::string> fresh_names;
  bool has_pending = false;
  std::string pending_from;
  TermPtr pending;
};

bool eval_check(const Guard& g, Bindings& env, const FactStore& facts) {
  switch (g.k) {
    case Guard::kind::fact:
    case Guard::kind::negated_fact: {
      std::vector<TermPtr> args;
      for (const TermPtr& a : g.fact.args) args.push_back(substitute(a, env));
      bool holds = holds_fact(facts, g.fact.name, args);
      return g.k == Guard::kind::fact ? holds : !holds;
    }
    case Guard::kind::match: {
      TermPtr subject = substitute(g.subject, env);
      TermPtr pattern = substitute(g.pattern, env);
      auto m = match_pattern(pattern, subject);
      if (!m) return false;
      for (auto& [k, v] : *m) env[k] = v;
      return true;
    }
    case Guard::kind::receive:
      return false;  // receives are handled by the conditional walker
  }
  return false;
}

void run_body(SearchCtx& ctx, const std::string& entity, std::vector<const Stmt*> prog,
              size_t idx, BodyAlt cur, std::vector<BodyAlt>& done);

void run_conditional(SearchCtx& ctx, const std::string& entity, const std::vector<const Stmt*>& prog,
                     size_t idx, BodyAlt cur, const Conditional& cond,
                     std::vector<BodyAlt>& done) {
  auto continue_with = [&](const std::vector<Stmt>& body, BodyAlt next) {
    std::vector<const Stmt*> spliced;
    spliced.reserve(body.size() + prog.size() - idx - 1);
    for (const Stmt& s : body) spliced.push_back(&s);
    spliced.insert(spliced.end(), prog.begin() + idx + 1, prog.end());
    run_body(ctx, entity, std::move(spliced), 0, std::move(next), done);
  };
  for (const CondCase& c : cond.cases) {
    Bindings env = cur.env;
    const Guard* consumed = nullptr;
    bool ok = true;
    for (const Guard& g : c.guard) {
      if (g.k == Guard::kind::receive) {
        if (!cur.has_pending || g.from != cur.pending_from) {
          ok = false;
          break;
        }
        auto m = match_pattern(substitute(g.pattern, env), cur.pending);
        if (!m) {
          ok = false;
          break;
        }
        for (auto& [k, v] : *m) env[k] = v;
        consumed = &g;
      } else if (!eval_check(g, env, cur.facts)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    BodyAlt next = cur;
    next.env = std::move(env);
    if (consumed) {
      next.steps.push_back(TraceStep{cur.pending_from, entity, cur.pending, cur.pending, {},
                                     false, "", ""});
      next.has_pending = false;
      next.pending.reset();
    }
    continue_with(c.body, std::move(next));
    return;
  }
  if (cond.has_else) {
    continue_with(cond.else_body, std::move(cur));
    return;
  }
  done.push_back(std::move(cur));  // no case applies: the body is stuck
}

void run_body(SearchCtx& ctx, const std::string& entity, std::vector<const Stmt*> prog,
              size_t idx, BodyAlt cur, std::vector<BodyAlt>& done) {
  for (; idx < prog.size(); ++idx) {
    const Stmt& stmt = *prog[idx];
    switch (stmt.k) {
      case Stmt::kind::send: {
        TermPtr msg = substitute(stmt.term, cur.env);
        if (is_backend(stmt.to)) {
          cur.steps.push_back(TraceStep{entity, stmt.to, msg, stmt.term, cur.env, false, "", ""});
          auto outcomes = backend_call(stmt.to, msg, cur.facts, *ctx.disabled);
          if (outcomes.empty()) {  // nothing could fire: run to stuck
            done.push_back(std::move(cur));
            return;
          }
          for (BackendOutcome& o : outcomes) {
            BodyAlt next = cur;
            next.facts = std::move(o.store_after);
            next.branches.insert(next.branches.end(), o.branch_ids.begin(), o.branch_ids.end());
            for (auto& [from, to, m] : o.exchanges)
              next.steps.push_back(TraceStep{from, to, m, m, {}, false, "", ""});
            if (o.reply) {
              next.has_pending = true;
              next.pending_from = stmt.to;
              next.pending = *o.reply;
            } else {
              next.has_pending = false;
              next.pending.reset();
            }
            run_body(ctx, entity, prog, idx + 1, std::move(next), done);
          }
          return;
        }
        cur.steps.push_back(TraceStep{entity, "i", msg, stmt.term, cur.env, false, "", ""});
        cur.out.push_back(msg);
        break;
      }
      case Stmt::kind::receive_bind: {
        if (!cur.has_pending || stmt.from != cur.pending_from) {
          done.push_back(std::move(cur));
          return;
        }
        auto m = match_pattern(substitute(stmt.term, cur.env), cur.pending);
        if (!m) {
          done.push_back(std::move(cur));
          return;
        }
        for (auto& [k, v] : *m) cur.env[k] = v;
        cur.steps.push_back(TraceStep{cur.pending_from, entity, cur.pending, cur.pending, {},
                                      false, "", ""});
        cur.has_pending = false;
        cur.pending.reset();
        break;
      }
      case Stmt::kind::fresh: {
        std::string name = "fresh_" + std::to_string(++cur.fresh_counter);
        cur.env[stmt.var] = make_const(name);
        cur.fresh_names[name] = stmt.var;
        break;
      }
      case Stmt::kind::assert_fact: {
        std::vector<TermPtr> args;
        for (const TermPtr& a : stmt.fact.args) args.push_back(substitute(a, cur.env));
        cur.facts.assert_fact(stmt.fact.name, args);
        break;
      }
      case Stmt::kind::conditional:
        run_conditional(ctx, entity, prog, idx, std::move(cur), *stmt.cond, done);
        return;
    }
  }
  done.push_back(std::move(cur));
}

bool out_violates(const SearchCtx& ctx, const std::vector<TermPtr>& out, const FactStore& facts) {
  if (!ctx.goal) return false;
  if (ctx.goal->k == GoalSpec::kind::never_derives) {
    for (const TermPtr& t : out)
      if (contains_match(ctx.goal->pattern, t)) return true;
    return false;
  }
  std::vector<TermPtr> args = ctx.goal->fact.args;
  bool ground = true;
  for (const TermPtr& a : args) ground = ground && is_ground(a);
  if (ground) return holds_fact(facts, ctx.goal->fact.name, args);
  for (const auto& row : facts.instances(store_fact_name(ctx.goal->fact.name))) {
    if (row.size() != args.size()) continue;
    bool all = true;
    for (size_t i = 0; i < args.size() && all; ++i) all = matches(args[i], row[i]);
    if (all) return true;
  }
  return false;
}

struct Expanded {
  StatePtr state;
  bool violating = false;
  std::string key;  // dedup key: class signature, lineage-prefixed if keyed
};

std::string lineage_branch_key(const StatePtr& state);

// Successors of one state, behaviorally deduplicated against global_visited
// plus everything generated earlier in this call.
void expand_state(SearchCtx& ctx, const StatePtr& state,
                  const std::set<std::string>& global_visited, bool stop_on_violation,
                  std::vector<Expanded>& out) {
  std::set<std::string> local_seen;
  std::string parent_lineage;
  if (ctx.lineage_keyed) parent_lineage = lineage_branch_key(state);
  for (GuardInfo& info : ctx.guards) {
    if (ctx.disabled->count(info.branch->id)) continue;

    // rows feeding fact-constrained binders, attacker-known args only
    std::vector<std::vector<Bindings>> row_choices;
    bool feasible = true;
    for (const FactSlot& slot : info.fact_slots) {
      std::vector<Bindings> choices;
      for (const auto& row : state->facts.instances(store_fact_name(slot.guard->fact.name))) {
        if (row.size() != slot.guard->fact.args.size()) continue;
        Bindings b;
        bool ok = true;
        for (size_t i = 0; i < row.size() && ok; ++i) {
          const TermPtr& arg = slot.guard->fact.args[i];
          bool bound_here = false;
          for (const auto& [idx, name] : slot.binder_args)
            if (idx == i) {
              if (!state->kb.knows(row[i])) {
                ok = false;
              } else {
                b[name] = row[i];
              }
              bound_here = true;
              break;
            }
          if (!bound_here && arg->kind == term_kind::constant)
            ok = term_equal(arg, row[i]);
        }
        if (ok) choices.push_back(std::move(b));
      }
      if (choices.empty()) {
        feasible = false;
        break;
      }
      row_choices.push_back(std::move(choices));
    }
    if (!feasible) continue;

    const auto& free_assignments = ctx.assignments(static_cast<int>(info.free_binders.size()));

    std::vector<size_t> row_idx(row_choices.size(), 0);
    while (true) {
      Bindings base;
      for (size_t i = 0; i < row_choices.size(); ++i)
        for (const auto& [k, v] : row_choices[i][row_idx[i]]) base[k] = v;

      for (const Assignment& assign : free_assignments) {
        Bindings env = base;
        for (size_t i = 0; i < info.free_binders.size(); ++i)
          env[info.free_binders[i]] = assign.values[i];
        bool pass = true;
        for (const Guard* g : info.checks)
          if (!eval_check(*g, env, state->facts)) {
            pass = false;
            break;
          }
        if (!pass) continue;

        TermPtr message = substitute(info.receive->pattern, env);
        TraceStep request{"i", ctx.model->entity, message, info.receive->pattern, env, true,
                          info.branch->id, info.branch->tag};

        BodyAlt seed;
        seed.env = env;
        seed.facts = state->facts;
        seed.fresh_counter = state->fresh_counter;
        std::vector<const Stmt*> prog;
        for (const Stmt& s : info.branch->body) prog.push_back(&s);
        std::vector<BodyAlt> alts;
        run_body(ctx, ctx.model->entity, std::move(prog), 0, std::move(seed), alts);

        for (BodyAlt& alt : alts) {
          bool violating = out_violates(ctx, alt.out, alt.facts);
          if (!violating) {
            std::set<std::string> new_atoms;
            collect_new_atoms(state->kb, alt.out, new_atoms);
            std::set<std::string> merged = state->atoms;
            merged.insert(new_atoms.begin(), new_atoms.end());
            std::string key = class_signature(merged, alt.facts, ctx.live);
            if (ctx.lineage_keyed) {
              std::string lin = parent_lineage + info.branch->id + '\x1f';
              for (const std::string& b : alt.branches) {
                lin += b;
                lin += '\x1f';
              }
              key = lin + '\x1e' + key;
            }
            if (global_visited.count(key) || local_seen.count(key)) continue;
            local_seen.insert(key);
          }
          auto succ = std::make_shared<SystemState>();
          succ->kb = state->kb;
          for (const TermPtr& t : alt.out) succ->kb.learn(t);
          succ->facts = std::move(alt.facts);
          succ->fresh_counter = alt.fresh_counter;
          succ->depth = state->depth + 1;
          succ->parent = state;
          succ->step_steps.push_back(request);
          succ->step_steps.insert(succ->step_steps.end(), alt.steps.begin(), alt.steps.end());
          succ->step_branches.push_back(info.branch->id);
          succ->step_branches.insert(succ->step_branches.end(), alt.branches.begin(),
                                     alt.branches.end());
          succ->fresh_names = std::move(alt.fresh_names);
          for (const std::string& a : succ->kb.known_atoms()) succ->atoms.insert(a);
          std::string key = class_signature(succ->atoms, succ->facts, ctx.live);
          if (ctx.lineage_keyed) key = lineage_branch_key(succ) + '\x1e' + key;
          out.push_back(Expanded{std::move(succ), violating, key});
          if (violating && stop_on_violation) return;
        }
      }

      size_t i = 0;
      for (; i < row_idx.size(); ++i) {
        if (++row_idx[i] < row_choices[i].size()) break;
        row_idx[i] = 0;
      }
      if (row_choices.empty() || i == row_idx.size()) break;
    }
  }
}

std::string lineage_branch_key(const StatePtr& state) {
  std::vector<const SystemState*> chain;
  for (const SystemState* s = state.get(); s; s = s->parent.get()) chain.push_back(s);
  std::string key;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it)
    for (const std::string& b : (*it)->step_branches) {
      key += b;
      key += '\x1f';
    }
  return key;
}

// Expands one frontier, serially or in deterministic parallel chunks, and
// feeds results to the callbacks in generation order. on_result returns
// true to stop the whole sweep.
template <typename OnResult>
bool sweep_frontier(SearchCtx& ctx, const std::vector<StatePtr>& frontier,
                    std::set<std::string>& visited, bool stop_on_violation, bool parallel,
                    OnResult on_result) {
  unsigned hw = std::thread::hardware_concurrency();
  unsigned threads = parallel ? std::max(1u, std::min(4u, hw)) : 1;
  if (threads <= 1 || frontier.size() < 2) {
    for (const StatePtr& s : frontier) {
      std::vector<Expanded> results;
      expand_state(ctx, s, visited, stop_on_violation, results);
      for (Expanded& e : results) {
        if (!e.violating) {
          if (visited.count(e.key)) continue;
          visited.insert(e.key);
        }
        if (on_result(std::move(e))) return true;
      }
    }
    return false;
  }
  std::vector<std::vector<Expanded>> per_state(frontier.size());
  std::vector<std::thread> workers;
  const std::set<std::string> snapshot = visited;
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&, t]() {
      for (size_t i = t; i < frontier.size(); i += threads)
        expand_state(ctx, frontier[i], snapshot, stop_on_violation, per_state[i]);
    });
  }
  for (auto& w : workers) w.join();
  for (auto& results : per_state)
    for (Expanded& e : results) {
      if (!e.violating) {
        if (visited.count(e.key)) continue;
        visited.insert(e.key);
      }
      if (on_result(std::move(e))) return true;
    }
  return false;
}

}  // namespace

std::string state_signature(const SystemState& state) {
  return state.kb.signature() + "#" + state.facts.signature();
}

StatePtr initial_state(const ModelSpec& model) {
  auto st = std::make_shared<SystemState>();
  for (const std::string& c : builtin_constants()) st->kb.learn(make_const(c));
  for (const std::string& c : model.public_consts) st->kb.learn(make_const(c));
  st->kb.declare_public_fn("http_request", -1);
  st->kb.declare_public_fn("http_response", -1);
  for (const auto& [name, arity] : model.public_fn_decls) st->kb.declare_public_fn(name, arity);
  for (const FactAtom& f : model.init_facts) st->facts.assert_fact(f.name, f.args);
  for (const std::string& a : st->kb.known_atoms()) st->atoms.insert(a);
  return st;
}

std::vector<StatePtr> step_successors(const ModelSpec& model, const StatePtr& state,
                                      const SearchBounds& bounds,
                                      const std::set<std::string>& disabled_branches,
                                      const GoalSpec* goal) {
  SearchCtx ctx = make_ctx(model, bounds, disabled_branches, goal);
  std::set<std::string> visited;
  std::vector<Expanded> results;
  expand_state(ctx, state, visited, false, results);
  std::vector<StatePtr> out;
  for (Expanded& e : results) out.push_back(std::move(e.state));
  return out;
}

bool goal_violated(const SystemState& state, const GoalSpec& goal) {
  if (goal.k == GoalSpec::kind::never_derives) {
    for (const TermPtr& t : state.kb.known_terms())
      if (contains_match(goal.pattern, t)) return true;
    return false;
  }
  bool ground = true;
  for (const TermPtr& a : goal.fact.args) ground = ground && is_ground(a);
  if (ground) return holds_fact(state.facts, goal.fact.name, goal.fact.args);
  for (const auto& row : state.facts.instances(store_fact_name(goal.fact.name))) {
    if (row.size() != goal.fact.args.size()) continue;
    bool all = true;
    for (size_t i = 0; i < row.size() && all; ++i) all = matches(goal.fact.args[i], row[i]);
    if (all) return true;
  }
  return false;
}

AttackTrace build_trace(const StatePtr& state) {
  std::vector<const SystemState*> chain;
  for (const SystemState* s = state.get(); s; s = s->parent.get()) chain.push_back(s);
  std::reverse(chain.begin(), chain.end());
  AttackTrace trace;
  for (const SystemState* s : chain) {
    trace.steps.insert(trace.steps.end(), s->step_steps.begin(), s->step_steps.end());
    trace.branch_sequence.insert(trace.branch_sequence.end(), s->step_branches.begin(),
                                 s->step_branches.end());
    trace.fresh_names.insert(s->fresh_names.begin(), s->fresh_names.end());
    for (const TraceStep& step : s->step_steps) {
      if (!step.attacker_request) continue;
      for (const auto& [name, value] : step.env) {
        if (!trace.bindings.count(name)) {
          trace.bindings[name] = value;
          continue;
        }
        int k = 2;
        while (trace.bindings.count(name + "#" + std::to_string(k))) ++k;
        trace.bindings[name + "#" + std::to_string(k)] = value;
      }
    }
  }
  return trace;
}

std::optional<AttackTrace> explore(const ModelSpec& model, const GoalSpec& goal,
                                   const SearchBounds& bounds,
                                   const std::set<std::string>& disabled_branches,
                                   bool parallel) {
  SearchCtx ctx = make_ctx(model, bounds, disabled_branches, &goal);
  StatePtr init = initial_state(model);
  if (goal_violated(*init, goal)) return AttackTrace{};
  std::set<std::string> visited{class_signature(init->atoms, init->facts, ctx.live)};
  std::vector<StatePtr> frontier{init};
  std::optional<AttackTrace> found;
  for (int depth = 0; depth < bounds.max_attacker_steps && !frontier.empty(); ++depth) {
    std::vector<StatePtr> next;
    bool stopped = sweep_frontier(ctx, frontier, visited, true, parallel, [&](Expanded e) {
      if (e.violating) {
        found = build_trace(e.state);
        return true;
      }
      next.push_back(std::move(e.state));
      return false;
    });
    if (stopped) return found;
    frontier = std::move(next);
  }
  return std::nullopt;
}

std::vector<AttackTrace> enumerate_traces(const ModelSpec& model, const GoalSpec& goal,
                                          const SearchBounds& bounds, enumerate_strategy strategy,
                                          const std::set<std::string>& disabled_branches,
                                          bool parallel) {
  std::vector<AttackTrace> out;
  if (strategy == enumerate_strategy::branch_disable) {
    static const std::vector<std::string> priority = {"db.read", "db.write", "db.hit",
                                                      "fs.write", "fs.read"};
    std::set<std::string> disabled = disabled_branches;
    while (true) {
      auto trace = explore(model, goal, bounds, disabled, parallel);
      if (!trace || trace->steps.empty()) break;
      out.push_back(*trace);
      std::string next_disable;
      for (const std::string& id : priority) {
        if (disabled.count(id)) continue;
        if (std::find(trace->branch_sequence.begin(), trace->branch_sequence.end(), id) !=
            trace->branch_sequence.end()) {
          next_disable = id;
          break;
        }
      }
      if (next_disable.empty()) break;
      disabled.insert(next_disable);
    }
    return out;
  }

  SearchCtx ctx = make_ctx(model, bounds, disabled_branches, &goal);
  ctx.lineage_keyed = true;
  StatePtr init = initial_state(model);
  std::set<std::string> visited{lineage_branch_key(init) + '\x1e' +
                                class_signature(init->atoms, init->facts, ctx.live)};
  std::vector<StatePtr> frontier{init};
  std::set<std::string> seen_sequences;
  for (int depth = 0; depth < bounds.max_attacker_steps && !frontier.empty(); ++depth) {
    std::vector<StatePtr> next;
    sweep_frontier(ctx, frontier, visited, false, parallel, [&](Expanded e) {
      if (e.violating) {
        if (seen_sequences.insert(lineage_branch_key(e.state)).second)
          out.push_back(build_trace(e.state));
        return false;  // violating states are collected, never expanded
      }
      next.push_back(std::move(e.state));
      return false;
    });
    frontier = std::move(next);
  }
  return out;
}

bool replay_trace(const ModelSpec& model, const GoalSpec& goal, const AttackTrace& trace,
                  const SearchBounds& bounds, const std::set<std::string>& disabled_branches) {
  SearchCtx ctx = make_ctx(model, bounds, disabled_branches, &goal);
  StatePtr state = initial_state(model);

  // attacker steps: a request step plus everything up to the next request
  std::vector<std::pair<size_t, size_t>> groups;
  for (size_t i = 0; i < trace.steps.size(); ++i) {
    if (!trace.steps[i].attacker_request) return false;
    size_t j = i + 1;
    while (j < trace.steps.size() && !trace.steps[j].attacker_request) ++j;
    groups.emplace_back(i, j);
    i = j - 1;
  }

  size_t branch_offset = 0;
  for (const auto& [begin, end] : groups) {
    const TraceStep& request = trace.steps[begin];
    const EntityBranch* branch = model.branch_by_id(request.branch_id);
    if (!branch || ctx.disabled->count(branch->id)) return false;
    GuardInfo info = guard_info_for(*branch);

    std::vector<Bindings> candidates;
    if (!request.env.empty()) candidates.push_back(request.env);
    for (Bindings& m : match_all(info.receive->pattern, request.term))
      candidates.push_back(std::move(m));

    StatePtr advanced;
    for (Bindings& candidate : candidates) {
      Bindings env = candidate;
      bool pass = true;
      for (const Guard* g : info.checks)
        if (!eval_check(*g, env, state->facts)) {
          pass = false;
          break;
        }
      if (!pass || !term_equal(substitute(info.receive->pattern, env), request.term)) continue;

      BodyAlt seed;
      seed.env = env;
      seed.facts = state->facts;
      seed.fresh_counter = state->fresh_counter;
      std::vector<const Stmt*> prog;
      for (const Stmt& s : branch->body) prog.push_back(&s);
      std::vector<BodyAlt> alts;
      run_body(ctx, model.entity, std::move(prog), 0, std::move(seed), alts);

      for (BodyAlt& alt : alts) {
        if (alt.steps.size() != end - begin - 1) continue;
        bool same = true;
        for (size_t i = 0; i < alt.steps.size() && same; ++i) {
          const TraceStep& got = alt.steps[i];
          const TraceStep& want = trace.steps[begin + 1 + i];
          same = got.from == want.from && got.to == want.to && term_equal(got.term, want.term);
        }
        if (!same) continue;
        size_t count = 1 + alt.branches.size();
        if (branch_offset + count > trace.branch_sequence.size()) continue;
        if (trace.branch_sequence[branch_offset] != branch->id) continue;
        bool branches_match = true;
        for (size_t i = 0; i < alt.branches.size() && branches_match; ++i)
          branches_match = alt.branches[i] == trace.branch_sequence[branch_offset + 1 + i];
        if (!branches_match) continue;

        auto succ = std::make_shared<SystemState>();
        succ->kb = state->kb;
        for (const TermPtr& t : alt.out) succ->kb.learn(t);
        succ->facts = std::move(alt.facts);
        succ->fresh_counter = alt.fresh_counter;
        succ->depth = state->depth + 1;
        succ->parent = state;
        for (const std::string& a : succ->kb.known_atoms()) succ->atoms.insert(a);
        branch_offset += count;
        advanced = std::move(succ);
        break;
      }
      if (advanced) break;
    }
    if (!advanced) return false;
    state = advanced;
  }
  return branch_offset == trace.branch_sequence.size() && goal_violated(*state, goal);
}

}  // namespace dywa
