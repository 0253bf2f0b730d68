#include "dywa/knowledge.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <sstream>

namespace dywa {

int term_weight(const TermPtr& t) {
  switch (t->kind) {
    case term_kind::constant:
    case term_kind::variable:
      return 1;
    case term_kind::concat: {
      int w = 0;
      for (const auto& p : t->parts) w += term_weight(p);
      return w;
    }
    case term_kind::apply:
    case term_kind::enc: {
      int w = 1;
      for (const auto& p : t->parts) w += term_weight(p);
      return w;
    }
  }
  return 1;
}

void Knowledge::declare_public_fn(const std::string& name, int arity) { fns_[name] = arity; }

bool Knowledge::is_public_fn(const std::string& name) const { return fns_.count(name) > 0; }

bool Knowledge::knows(const TermPtr& t) const { return terms_.count(to_text(t)) > 0; }

bool Knowledge::knows_atom(const std::string& name) const {
  auto it = terms_.find(name);
  return it != terms_.end() && it->second->kind == term_kind::constant;
}

void Knowledge::decompose(const TermPtr& t) {
  std::deque<TermPtr> work{t};
  while (!work.empty()) {
    TermPtr cur = work.front();
    work.pop_front();
    if (!terms_.emplace(to_text(cur), cur).second) continue;
    switch (cur->kind) {
      case term_kind::concat:
        for (const auto& p : cur->parts) work.push_back(p);
        break;
      case term_kind::apply:
        if (is_public_fn(cur->name)) {
          for (const auto& p : cur->parts) work.push_back(p);
        }
        break;
      default:
        break;
    }
  }
  // encryption payloads open up once their key becomes known
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<TermPtr> opened;
    for (const auto& [text, known] : terms_) {
      if (known->kind == term_kind::enc && knows(known->parts[1]) && !knows(known->parts[0])) {
        opened.push_back(known->parts[0]);
      }
    }
    for (const auto& payload : opened) {
      decompose(payload);
      changed = true;
    }
  }
}

void Knowledge::learn(const TermPtr& t) {
  derive_memo_.clear();
  decompose(t);
}

std::vector<TermPtr> Knowledge::known_terms() const {
  std::vector<TermPtr> out;
  for (const auto& [text, term] : terms_) out.push_back(term);
  return out;
}

std::vector<std::string> Knowledge::known_atoms() const {
  std::vector<std::string> out;
  for (const auto& [text, term] : terms_) {
    if (term->kind == term_kind::constant) out.push_back(text);
  }
  return out;
}

std::string Knowledge::signature() const {
  std::ostringstream out;
  for (const auto& [text, term] : terms_) out << text << '\x1f';
  return out.str();
}

namespace {

// Minimal synthesis depth of t, -1 when underivable. Known terms cost 0;
// a concat is covered left to right by chunks that are either known
// multi-part runs or derivable single parts; applications and encryptions
// add one nesting level.
int derive_depth(const Knowledge& kb, const TermPtr& t, const SynthesisBounds& bounds,
                 std::map<std::string, int>& memo);

int concat_cover_depth(const Knowledge& kb, const TermPtr& t, const SynthesisBounds& bounds,
                       std::map<std::string, int>& memo) {
  const auto& parts = t->parts;
  size_t n = parts.size();
  if (static_cast<int>(n) > bounds.max_concat_len) return -1;
  std::vector<int> best(n + 1, -1);
  best[0] = 0;
  for (size_t j = 1; j <= n; ++j) {
    for (size_t i = 0; i < j; ++i) {
      if (best[i] < 0) continue;
      int chunk;
      if (j - i == 1) {
        chunk = derive_depth(kb, parts[i], bounds, memo);
      } else {
        std::vector<TermPtr> run(parts.begin() + i, parts.begin() + j);
        chunk = kb.knows(make_concat(std::move(run))) ? 0 : -1;
      }
      if (chunk < 0) continue;
      int cost = std::max(best[i], chunk);
      if (best[j] < 0 || cost < best[j]) best[j] = cost;
    }
  }
  return best[n];
}

int derive_depth(const Knowledge& kb, const TermPtr& t, const SynthesisBounds& bounds,
                 std::map<std::string, int>& memo) {
  std::string key = to_text(t);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  int result = -1;
  if (kb.knows(t)) {
    result = 0;
  } else {
    switch (t->kind) {
      case term_kind::constant:
      case term_kind::variable:
        result = -1;
        break;
      case term_kind::concat:
        result = concat_cover_depth(kb, t, bounds, memo);
        break;
      case term_kind::apply: {
        if (!kb.is_public_fn(t->name)) {
          result = -1;
          break;
        }
        int worst = 0;
        for (const auto& arg : t->parts) {
          int d = derive_depth(kb, arg, bounds, memo);
          if (d < 0) {
            worst = -1;
            break;
          }
          worst = std::max(worst, d);
        }
        result = worst < 0 ? -1 : worst + 1;
        break;
      }
      case term_kind::enc: {
        int dp = derive_depth(kb, t->parts[0], bounds, memo);
        int dk = derive_depth(kb, t->parts[1], bounds, memo);
        result = (dp < 0 || dk < 0) ? -1 : std::max(dp, dk) + 1;
        break;
      }
    }
  }
  memo[key] = result;
  return result;
}

}  // namespace

bool can_derive(const Knowledge& kb, const TermPtr& t, const SynthesisBounds& bounds) {
  if (!is_ground(t)) return false;
  std::ostringstream prefix;
  prefix << bounds.max_concat_len << ':' << bounds.max_depth << '#';
  // the memo lives on the knowledge object and is cleared by learn()
  std::map<std::string, int>& memo = kb.derive_memo_;
  std::string key = prefix.str() + to_text(t);
  if (auto it = memo.find(key); it != memo.end()) return it->second >= 0;
  std::map<std::string, int> local;
  int d = derive_depth(kb, t, bounds, local);
  memo[key] = (d >= 0 && d <= bounds.max_depth) ? d : -1;
  return memo[key] >= 0;
}

std::vector<TermPtr> synthesis_universe(const Knowledge& kb, const SynthesisBounds& bounds) {
  // binary composition closure: grow from known terms by pairwise concat and
  // public function application until nothing new fits the bounds; elements
  // are bucketed by flattened length so only compatible pairs are formed
  auto flat_len = [](const TermPtr& t) {
    return t->kind == term_kind::concat ? static_cast<int>(t->parts.size()) : 1;
  };
  std::map<std::string, std::pair<TermPtr, int>> items;
  for (const auto& t : kb.known_terms()) items[to_text(t)] = {t, 0};
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::vector<std::pair<TermPtr, int>>> by_len(bounds.max_concat_len + 1);
    std::vector<std::pair<TermPtr, int>> arg_pool;
    for (const auto& [text, entry] : items) {
      int l = flat_len(entry.first);
      if (l <= bounds.max_concat_len) by_len[l].push_back(entry);
      if (entry.second < bounds.max_depth) arg_pool.push_back(entry);
    }
    auto add = [&](const TermPtr& t, int depth) {
      if (depth > bounds.max_depth) return;
      auto [it, fresh] = items.emplace(to_text(t), std::make_pair(t, depth));
      if (fresh) {
        changed = true;
      } else if (depth < it->second.second) {
        it->second.second = depth;
        changed = true;
      }
    };
    for (int lu = 1; lu < bounds.max_concat_len; ++lu) {
      for (int lv = 1; lu + lv <= bounds.max_concat_len; ++lv) {
        for (const auto& [u, du] : by_len[lu]) {
          for (const auto& [v, dv] : by_len[lv]) {
            add(make_concat({u, v}), std::max(du, dv));
          }
        }
      }
    }
    for (const auto& [fn, arity] : kb.public_fns()) {
      std::vector<TermPtr> args;
      std::function<void(int, int)> build = [&](int slot, int depth_so_far) {
        if (slot == arity) {
          add(make_apply(fn, args), depth_so_far + 1);
          return;
        }
        for (const auto& [arg, da] : arg_pool) {
          args.push_back(arg);
          build(slot + 1, std::max(depth_so_far, da));
          args.pop_back();
        }
      };
      build(0, 0);
    }
  }
  std::vector<TermPtr> out;
  for (const auto& [text, entry] : items) out.push_back(entry.first);
  std::stable_sort(out.begin(), out.end(), [](const TermPtr& a, const TermPtr& b) {
    int wa = term_weight(a), wb = term_weight(b);
    if (wa != wb) return wa < wb;
    return to_text(a) < to_text(b);
  });
  return out;
}

std::vector<std::pair<TermPtr, Bindings>> synthesize_matching(const Knowledge& kb,
                                                              const TermPtr& pattern,
                                                              const SynthesisBounds& bounds) {
  std::vector<std::pair<TermPtr, Bindings>> out;
  std::set<std::string> seen;
  for (const auto& t : synthesis_universe(kb, bounds)) {
    for (const auto& b : match_all(pattern, t)) {
      std::ostringstream key;
      key << to_text(t) << '|';
      for (const auto& [name, value] : b) key << name << '=' << to_text(value) << ';';
      if (seen.insert(key.str()).second) out.emplace_back(t, b);
    }
  }
  return out;
}

}  // namespace dywa
