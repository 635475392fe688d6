#include "setrw/matcher.hpp"

#include <algorithm>
#include <deque>

#include "setrw/errors.hpp"

namespace setrw {

namespace {

void walk(const config_tree& ct, bool want_explored, std::vector<const config_tree*>& out) {
  if (ct.explored == want_explored) out.push_back(&ct);
  for (const config_tree& c : ct.children) walk(c, want_explored, out);
}

position observed_position(const set_automaton& a, const config_tree& ct) {
  return ct.pos.concat(a.state(ct.state).label);
}

symbol_id observe(const set_automaton& a, const term_pool& pool, term_id t, std::uint32_t state,
                  const position& pos) {
  position at = pos.concat(a.state(state).label);
  term_id sub;
  try {
    sub = pool.subterm_at(t, at);
  } catch (const position_error&) {
    throw internal_error("configuration (" + std::to_string(state) + ", " + pos.str() +
                         ") observes " + at.str() + " outside the term domain");
  }
  symbol_id f = pool.head(sub);
  if (!a.in_alphabet(f))
    throw error("symbol '" + pool.symbols[f].name + "' is not in the automaton's alphabet");
  return f;
}

void sort_children(std::vector<config_tree>& cs) {
  std::sort(cs.begin(), cs.end(), [](const config_tree& x, const config_tree& y) {
    if (x.state != y.state) return x.state < y.state;
    return position::lex_less(x.pos, y.pos);
  });
}

}  // namespace

std::vector<const config_tree*> buds_of(const config_tree& ct) {
  std::vector<const config_tree*> out;
  walk(ct, false, out);
  return out;
}

std::vector<const config_tree*> nodes_of(const config_tree& ct) {
  std::vector<const config_tree*> out;
  walk(ct, true, out);
  return out;
}

std::pair<std::vector<redex>, std::vector<redex>> matches(const set_automaton& a,
                                                          const term_pool& pool,
                                                          std::uint32_t state, const position& pos,
                                                          term_id t) {
  symbol_id f = observe(a, pool, t, state, pos);
  const automaton_cell& cell = a.cell(state, f);
  std::pair<std::vector<redex>, std::vector<redex>> out;
  for (const out_entry& e : cell.out_linear) out.first.push_back({e.rule, pos.concat(e.pos)});
  for (const out_entry& e : cell.out_nonlinear) out.second.push_back({e.rule, pos.concat(e.pos)});
  return out;
}

eval_result eval(const set_automaton& a, const term_pool& pool, term_id t, eval_trace* trace) {
  eval_result result;
  std::deque<std::pair<std::uint32_t, position>> pending;
  pending.emplace_back(0, position{});
  while (!pending.empty()) {
    auto [state, pos] = std::move(pending.front());
    pending.pop_front();
    symbol_id f = observe(a, pool, t, state, pos);
    ++result.inspections;
    const automaton_cell& cell = a.cell(state, f);
    observation row;
    if (trace) {
      row.state = state;
      row.abs_pos = pos.concat(a.state(state).label);
      row.symbol = f;
    }
    for (const out_entry& e : cell.out_linear) {
      redex r{e.rule, pos.concat(e.pos)};
      if (trace) row.outputs.push_back(r);
      result.linear.insert(std::move(r));
    }
    for (const out_entry& e : cell.out_nonlinear) {
      redex r{e.rule, pos.concat(e.pos)};
      if (trace) row.outputs.push_back(r);
      result.nonlinear.insert(std::move(r));
    }
    for (const branch& b : cell.branches) {
      position next = pos.concat(b.offset);
      if (trace) row.new_configs.emplace_back(b.target, next);
      pending.emplace_back(b.target, std::move(next));
    }
    if (trace) trace->push_back(std::move(row));
  }
  return result;
}

redex_set all_redexes(const set_automaton& a, const term_pool& pool, term_id t) {
  eval_result r = eval(a, pool, t);
  redex_set out = std::move(r.linear);
  for (const redex& rx : r.nonlinear) {
    const rewrite_rule& rule = a.rules().rules[rx.rule];
    if (is_consistent(pool, pool.subterm_at(t, rx.pos), rule.lhs_partition)) out.insert(rx);
  }
  return out;
}

config_tree completed(const set_automaton& a, const term_pool& pool, term_id t) {
  // Iterative: completed trees have one node per position of t.
  config_tree root = config_tree::bud(0, position{});
  std::vector<config_tree*> stack{&root};
  while (!stack.empty()) {
    config_tree* cur = stack.back();
    stack.pop_back();
    symbol_id f = observe(a, pool, t, cur->state, cur->pos);
    cur->explored = true;
    const automaton_cell& cell = a.cell(cur->state, f);
    cur->children.reserve(cell.branches.size());
    for (const branch& b : cell.branches)
      cur->children.push_back(config_tree::bud(b.target, cur->pos.concat(b.offset)));
    sort_children(cur->children);
    for (config_tree& c : cur->children) stack.push_back(&c);
  }
  return root;
}

config_tree grow(const config_tree& ct, std::uint32_t state, const position& pos,
                 const set_automaton& a, const term_pool& pool, term_id t) {
  bool grown = false;
  auto rec = [&](auto&& self, const config_tree& cur) -> config_tree {
    if (!cur.explored) {
      if (cur.state != state || cur.pos != pos) return cur;
      grown = true;
      symbol_id f = observe(a, pool, t, state, pos);
      config_tree node{state, pos, true, {}};
      for (const branch& b : a.cell(state, f).branches)
        node.children.push_back(config_tree::bud(b.target, pos.concat(b.offset)));
      sort_children(node.children);
      return node;
    }
    config_tree node{cur.state, cur.pos, true, {}};
    node.children.reserve(cur.children.size());
    for (const config_tree& c : cur.children) node.children.push_back(self(self, c));
    return node;
  };
  config_tree out = rec(rec, ct);
  if (!grown)
    throw no_such_bud_error("no bud (" + std::to_string(state) + ", " + pos.str() +
                            ") in the configuration tree");
  return out;
}

config_tree prune(const config_tree& ct, const set_automaton& a, const position& q) {
  if (!ct.explored) return ct;
  if (observed_position(a, ct) == q) return config_tree::bud(ct.state, ct.pos);
  config_tree node{ct.state, ct.pos, true, {}};
  node.children.reserve(ct.children.size());
  for (const config_tree& c : ct.children) node.children.push_back(prune(c, a, q));
  return node;
}

const config_tree* subtree_at(const config_tree& ct, const set_automaton& a, const position& p) {
  if (ct.explored && observed_position(a, ct) == p) return &ct;
  for (const config_tree& c : ct.children)
    if (const config_tree* hit = subtree_at(c, a, p)) return hit;
  return nullptr;
}

bool is_fragment(const config_tree& ct1, const config_tree& ct2) {
  if (ct1.state != ct2.state || ct1.pos != ct2.pos) return false;
  if (!ct1.explored) return true;  // a bud matches a bud or a node at the same configuration
  if (!ct2.explored) return false;
  if (ct1.children.size() != ct2.children.size()) return false;
  // Children are canonically sorted and configurations within one node are
  // distinct, so the bijection is positional.
  for (std::size_t i = 0; i < ct1.children.size(); ++i)
    if (!is_fragment(ct1.children[i], ct2.children[i])) return false;
  return true;
}

}  // namespace setrw
