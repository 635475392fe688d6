#include "setrw/set_automaton.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>

#include "setrw/errors.hpp"

namespace setrw {

bool match_goal::fresh() const {
  return init_distance == 0 && obligation.size() == 1 && obligation[0].pos == announce;
}

namespace {

bool pair_less(const obligation_pair& a, const obligation_pair& b) {
  if (a.pos != b.pos) return position::lex_less(a.pos, b.pos);
  return a.pattern < b.pattern;
}

int compare_positions(const position& a, const position& b) {
  if (a == b) return 0;
  return position::lex_less(a, b) ? -1 : 1;
}

int compare_goals(const match_goal& a, const match_goal& b) {
  if (a.rule != b.rule) return a.rule < b.rule ? -1 : 1;
  if (int c = compare_positions(a.announce, b.announce)) return c;
  for (std::size_t i = 0; i < std::min(a.obligation.size(), b.obligation.size()); ++i) {
    if (a.obligation[i] == b.obligation[i]) continue;
    return pair_less(a.obligation[i], b.obligation[i]) ? -1 : 1;
  }
  if (a.obligation.size() != b.obligation.size())
    return a.obligation.size() < b.obligation.size() ? -1 : 1;
  if (a.init_distance != b.init_distance) return a.init_distance < b.init_distance ? -1 : 1;
  return 0;
}

void canonicalize(std::vector<match_goal>& goals) {
  for (match_goal& g : goals) std::sort(g.obligation.begin(), g.obligation.end(), pair_less);
  std::sort(goals.begin(), goals.end(), goal_less);
  goals.erase(std::unique(goals.begin(), goals.end()), goals.end());
}

std::uint64_t hash_goals(const std::vector<match_goal>& goals) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h *= 0x100000001b3ull;
  };
  for (const match_goal& g : goals) {
    mix(g.rule);
    mix(g.init_distance);
    mix(g.announce.length());
    for (std::uint32_t i : g.announce.indices()) mix(i);
    for (const obligation_pair& p : g.obligation) {
      mix(p.pattern);
      mix(p.pos.length());
      for (std::uint32_t i : p.pos.indices()) mix(i);
    }
    mix(0x51);
  }
  return h;
}

// L(s) must come from the obligation positions of a root goal; among those we
// take the shortlex-largest, which reproduces the reference automata.
position choose_label(const std::vector<match_goal>& goals) {
  const position* best = nullptr;
  for (const match_goal& g : goals) {
    if (!g.root()) continue;
    for (const obligation_pair& p : g.obligation)
      if (!best || position::shortlex_less(*best, p.pos)) best = &p.pos;
  }
  if (!best) throw internal_error("constructed state has no root goal");
  return *best;
}

struct union_find {
  std::vector<std::size_t> parent;
  explicit union_find(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

bool goal_less(const match_goal& a, const match_goal& b) { return compare_goals(a, b) < 0; }

std::vector<obligation_pair> reduce_obligation(const term_pool& pool,
                                               std::span<const obligation_pair> mo, symbol_id f,
                                               const position& p) {
  (void)f;
  std::vector<obligation_pair> out;
  for (const obligation_pair& pr : mo) {
    if (pr.pos != p) {
      out.push_back(pr);
      continue;
    }
    std::span<const term_id> cs = pool.children(pr.pattern);
    for (std::size_t i = 0; i < cs.size(); ++i)
      if (!pool.is_variable(cs[i]))
        out.push_back({cs[i], p.child(static_cast<std::uint32_t>(i + 1))});
  }
  std::sort(out.begin(), out.end(), pair_less);
  return out;
}

derivative_result derivative(const term_pool& pool, const automaton_state& s, symbol_id f,
                             const rewrite_system& trs) {
  derivative_result result;
  const position& label = s.label;
  for (const match_goal& g : s.goals) {
    auto at_label = std::find_if(g.obligation.begin(), g.obligation.end(),
                                 [&](const obligation_pair& p) { return p.pos == label; });
    if (at_label == g.obligation.end()) {
      match_goal kept = g;
      if (kept.init_distance > 0) ++kept.init_distance;
      result.goals.push_back(std::move(kept));
      continue;
    }
    if (pool.head(at_label->pattern) != f) continue;  // this pattern cannot match here
    std::vector<obligation_pair> reduced = reduce_obligation(pool, g.obligation, f, label);
    if (reduced.empty()) {
      result.completed.push_back({g.rule, g.announce, g.init_distance});
    } else {
      result.goals.push_back({std::move(reduced), g.rule, g.announce, g.init_distance + 1});
    }
  }
  std::uint32_t arity = pool.symbols[f].arity;
  for (const rewrite_rule& r : trs.rules) {
    for (std::uint32_t i = 1; i <= arity; ++i) {
      position p = label.child(i);
      result.goals.push_back({{{r.lhs, p}}, r.id, p, 0});
    }
  }
  canonicalize(result.goals);
  std::sort(result.completed.begin(), result.completed.end(), [](const out_entry& a, const out_entry& b) {
    if (a.rule != b.rule) return a.rule < b.rule;
    if (a.pos != b.pos) return position::lex_less(a.pos, b.pos);
    return a.init_distance < b.init_distance;
  });
  for (std::size_t i = 1; i < result.completed.size(); ++i) {
    const out_entry& prev = result.completed[i - 1];
    const out_entry& cur = result.completed[i];
    if (prev.rule == cur.rule && prev.pos == cur.pos && prev.init_distance != cur.init_distance)
      throw internal_error("ambiguous initialization distance for a completed announcement");
  }
  result.completed.erase(std::unique(result.completed.begin(), result.completed.end()),
                         result.completed.end());
  return result;
}

std::vector<std::vector<match_goal>> partition_goals(std::span<const match_goal> goals,
                                                     dependency_kind kind) {
  union_find uf(goals.size());
  if (kind == dependency_kind::standard) {
    std::map<position, std::size_t, position_lex_less> first_seen;
    for (std::size_t i = 0; i < goals.size(); ++i) {
      for (const obligation_pair& p : goals[i].obligation) {
        auto [it, inserted] = first_seen.emplace(p.pos, i);
        if (!inserted) uf.unite(i, it->second);
      }
    }
  } else {
    for (std::size_t i = 0; i < goals.size(); ++i)
      for (std::size_t j = 0; j < i; ++j) {
        const position& a = goals[i].announce;
        const position& b = goals[j].announce;
        if (a.is_prefix_of(b) || b.is_prefix_of(a)) uf.unite(i, j);
      }
  }
  std::map<std::size_t, std::vector<match_goal>> classes;
  for (std::size_t i = 0; i < goals.size(); ++i) classes[uf.find(i)].push_back(goals[i]);
  std::vector<std::vector<match_goal>> out;
  for (auto& [root, cls] : classes) out.push_back(std::move(cls));
  for (auto& cls : out) std::sort(cls.begin(), cls.end(), goal_less);
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return goal_less(a.front(), b.front()); });
  return out;
}

lifted_class lift(std::span<const match_goal> cls) {
  std::vector<position> announces;
  announces.reserve(cls.size());
  for (const match_goal& g : cls) announces.push_back(g.announce);
  position gcp = greatest_common_prefix(announces);
  lifted_class out;
  out.offset = gcp;
  for (const match_goal& g : cls) {
    match_goal lifted = g;
    lifted.announce = g.announce.suffix_after(gcp);
    for (obligation_pair& p : lifted.obligation) p.pos = p.pos.suffix_after(gcp);
    out.goals.push_back(std::move(lifted));
  }
  canonicalize(out.goals);
  return out;
}

const automaton_cell& set_automaton::cell(std::uint32_t s, symbol_id f) const {
  if (f >= symbol_slot_.size() || symbol_slot_[f] == 0xffffffffu)
    throw internal_error("symbol outside the automaton's alphabet");
  return cells_[s * alphabet_.size() + symbol_slot_[f]];
}

bool set_automaton::in_alphabet(symbol_id f) const {
  return f < symbol_slot_.size() && symbol_slot_[f] != 0xffffffffu;
}

set_automaton::statistics_record set_automaton::statistics() const {
  statistics_record st;
  st.states = states_.size();
  st.symbols = alphabet_.size();
  st.rules = trs_.rules.size();
  st.transition_cells = cells_.size();
  st.branch_count = 0;
  for (const automaton_cell& c : cells_) st.branch_count += c.branches.size();
  return st;
}

set_automaton construct(const term_pool& pool, const rewrite_system& trs, dependency_kind kind,
                        std::size_t state_cap) {
  if (trs.rules.empty()) throw error("cannot build an automaton for an empty rule set");
  set_automaton a;
  a.trs_ = trs;
  a.alphabet_ = trs.alphabet;
  a.symbol_slot_.assign(pool.symbols.size(), 0xffffffffu);
  for (std::size_t i = 0; i < a.alphabet_.size(); ++i)
    a.symbol_slot_[a.alphabet_[i]] = static_cast<std::uint32_t>(i);

  std::unordered_multimap<std::uint64_t, std::uint32_t> intern;
  auto intern_state = [&](std::vector<match_goal> goals) -> std::uint32_t {
    std::uint64_t h = hash_goals(goals);
    auto [lo, hi] = intern.equal_range(h);
    for (auto it = lo; it != hi; ++it)
      if (a.states_[it->second].goals == goals) return it->second;
    if (a.states_.size() >= state_cap)
      throw state_cap_error("set automaton exceeded the state cap of " +
                            std::to_string(state_cap) +
                            "; the pattern set is too entangled for this budget");
    std::uint32_t id = static_cast<std::uint32_t>(a.states_.size());
    position label = choose_label(goals);
    a.states_.push_back({std::move(goals), std::move(label)});
    intern.emplace(h, id);
    return id;
  };

  std::vector<match_goal> init;
  for (const rewrite_rule& r : trs.rules) init.push_back({{{r.lhs, position{}}}, r.id, position{}, 0});
  canonicalize(init);
  intern_state(std::move(init));

  for (std::uint32_t s = 0; s < a.states_.size(); ++s) {
    for (symbol_id f : a.alphabet_) {
      derivative_result d = derivative(pool, a.states_[s], f, trs);
      automaton_cell cell;
      for (const out_entry& e : d.completed) {
        if (trs.rules[e.rule].linear)
          cell.out_linear.push_back(e);
        else
          cell.out_nonlinear.push_back(e);
      }
      for (const std::vector<match_goal>& cls : partition_goals(d.goals, kind)) {
        lifted_class lc = lift(cls);
        std::uint32_t target = intern_state(std::move(lc.goals));
        cell.branches.push_back({target, std::move(lc.offset)});
      }
      std::sort(cell.branches.begin(), cell.branches.end(), [](const branch& x, const branch& y) {
        if (x.offset != y.offset) return position::lex_less(x.offset, y.offset);
        return x.target < y.target;
      });
      a.cells_.push_back(std::move(cell));
    }
  }
  return a;
}

namespace {

std::string render_goal(const term_pool& pool, const match_goal& g) {
  std::string out;
  for (std::size_t i = 0; i < g.obligation.size(); ++i) {
    if (i) out += ", ";
    out += pool.to_string(g.obligation[i].pattern) + "@" + g.obligation[i].pos.str();
  }
  out += " -> " + rule_name(g.rule) + "@" + g.announce.str();
  return out;
}

}  // namespace

std::string export_dot(const set_automaton& a, const term_pool& pool) {
  std::string out = "digraph setautomaton {\n  rankdir=LR;\n  node [shape=box, fontname=\"monospace\"];\n";
  for (std::uint32_t s = 0; s < a.state_count(); ++s) {
    const automaton_state& st = a.state(s);
    out += "  s" + std::to_string(s) + " [label=\"s" + std::to_string(s) + "  L=" + st.label.str() + "\\l";
    for (const match_goal& g : st.goals) out += render_goal(pool, g) + "\\l";
    out += "\"];\n";
  }
  std::size_t hyper = 0;
  for (std::uint32_t s = 0; s < a.state_count(); ++s) {
    for (symbol_id f : a.alphabet()) {
      const automaton_cell& c = a.cell(s, f);
      if (c.branches.empty() && c.out_linear.empty() && c.out_nonlinear.empty()) continue;
      std::string joint = "h" + std::to_string(hyper++);
      std::string label = pool.symbols[f].name;
      auto add_outs = [&](const std::vector<out_entry>& outs) {
        for (const out_entry& e : outs) label += " / " + rule_name(e.rule) + "@" + e.pos.str();
      };
      add_outs(c.out_linear);
      add_outs(c.out_nonlinear);
      out += "  " + joint + " [shape=point];\n";
      out += "  s" + std::to_string(s) + " -> " + joint + " [label=\"" + label + "\"];\n";
      for (const branch& b : c.branches)
        out += "  " + joint + " -> s" + std::to_string(b.target) + " [label=\"" + b.offset.str() +
               "\"];\n";
    }
  }
  out += "}\n";
  return out;
}

prune_support constant_time_prune_support(const set_automaton& a) {
  prune_support table;
  table.goals_per_state.resize(a.state_count());
  table.outs_per_state.resize(a.state_count());
  for (std::uint32_t s = 0; s < a.state_count(); ++s) {
    for (const match_goal& g : a.state(s).goals)
      table.goals_per_state[s].push_back({g.rule, g.announce, g.init_distance});
    for (symbol_id f : a.alphabet()) {
      const automaton_cell& c = a.cell(s, f);
      for (const out_entry& e : c.out_linear)
        table.outs_per_state[s].push_back({f, e.rule, e.pos, e.init_distance + 1});
      for (const out_entry& e : c.out_nonlinear)
        table.outs_per_state[s].push_back({f, e.rule, e.pos, e.init_distance + 1});
    }
  }
  return table;
}

}  // namespace setrw
