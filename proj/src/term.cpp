#include "setrw/term.hpp"

#include <algorithm>
#include <limits>

#include "setrw/errors.hpp"
#include "term_text.hpp"

namespace setrw {

namespace {

constexpr term_id no_entry = 0xffffffffu;

std::uint64_t hash_node(symbol_id head, std::span<const term_id> children) {
  std::uint64_t h = 1469598103934665603ull ^ head;
  for (term_id c : children) {
    h ^= c + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = a + b;
  return r < a ? std::numeric_limits<std::uint64_t>::max() : r;
}

}  // namespace

symbol_id symbol_table::declare_function(std::string_view name, std::uint32_t arity) {
  auto it = index_.find(std::string(name));
  if (it != index_.end()) {
    const symbol_info& si = infos_[it->second];
    if (si.variable) throw error("'" + std::string(name) + "' is already declared as a variable");
    if (si.arity != arity)
      throw arity_error("symbol '" + std::string(name) + "' redeclared with arity " +
                        std::to_string(arity) + ", was " + std::to_string(si.arity));
    return it->second;
  }
  symbol_id id = static_cast<symbol_id>(infos_.size());
  infos_.push_back({std::string(name), arity, false});
  index_.emplace(std::string(name), id);
  return id;
}

symbol_id symbol_table::declare_variable(std::string_view name) {
  auto it = index_.find(std::string(name));
  if (it != index_.end()) {
    if (!infos_[it->second].variable)
      throw error("'" + std::string(name) + "' is already declared as a function symbol");
    return it->second;
  }
  symbol_id id = static_cast<symbol_id>(infos_.size());
  infos_.push_back({std::string(name), 0, true});
  index_.emplace(std::string(name), id);
  return id;
}

std::optional<symbol_id> symbol_table::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void term_pool::grow_buckets() {
  std::size_t n = buckets_.empty() ? 1024 : buckets_.size() * 2;
  buckets_.assign(n, no_entry);
  bucket_mask_ = n - 1;
  for (term_id id = 0; id < nodes_.size(); ++id) {
    std::size_t slot = nodes_[id].hash & bucket_mask_;
    while (buckets_[slot] != no_entry) slot = (slot + 1) & bucket_mask_;
    buckets_[slot] = id;
  }
}

term_id term_pool::make(symbol_id head, std::span<const term_id> children) {
  if (head >= symbols.size()) throw internal_error("make: unknown symbol id");
  const symbol_info& si = symbols[head];
  if (children.size() != si.arity)
    throw arity_error("'" + si.name + "' takes " + std::to_string(si.arity) + " arguments, got " +
                      std::to_string(children.size()));
  for (term_id c : children)
    if (c >= nodes_.size()) throw internal_error("make: child id outside this pool");

  if (buckets_.empty() || (used_ + 1) * 10 >= buckets_.size() * 7) grow_buckets();

  std::uint64_t h = hash_node(head, children);
  std::size_t slot = h & bucket_mask_;
  while (buckets_[slot] != no_entry) {
    term_id cand = buckets_[slot];
    const node& n = nodes_[cand];
    if (n.hash == h && n.head == head && n.child_count == children.size() &&
        std::equal(children.begin(), children.end(), child_ids_.begin() + n.child_begin))
      return cand;
    slot = (slot + 1) & bucket_mask_;
  }

  node n;
  n.head = head;
  n.child_begin = static_cast<std::uint32_t>(child_ids_.size());
  n.child_count = static_cast<std::uint32_t>(children.size());
  n.ground = !si.variable;
  n.size = 1;
  n.hash = h;
  for (term_id c : children) {
    n.ground = n.ground && nodes_[c].ground;
    n.size = saturating_add(n.size, nodes_[c].size);
  }
  term_id id = static_cast<term_id>(nodes_.size());
  child_ids_.insert(child_ids_.end(), children.begin(), children.end());
  nodes_.push_back(n);
  buckets_[slot] = id;
  ++used_;
  return id;
}

term_id term_pool::subterm_at(term_id t, const position& p) const {
  term_id cur = t;
  for (std::size_t k = 0; k < p.length(); ++k) {
    std::span<const term_id> cs = children(cur);
    std::uint32_t i = p[k];
    if (i == 0 || i > cs.size())
      throw position_error("position " + p.str() + " outside the domain of " + to_string(t));
    cur = cs[i - 1];
  }
  return cur;
}

term_id term_pool::replace_at(term_id t, const position& p, term_id u) {
  if (p.is_root()) return u;
  std::span<const term_id> cs = children(t);
  std::uint32_t i = p[0];
  if (i == 0 || i > cs.size())
    throw position_error("position " + p.str() + " outside the domain of " + to_string(t));
  std::vector<term_id> copy(cs.begin(), cs.end());
  copy[i - 1] = replace_at(cs[i - 1], position{std::vector<std::uint32_t>(
                                          p.indices().begin() + 1, p.indices().end())},
                           u);
  return make(head(t), copy);
}

std::vector<position> term_pool::domain(term_id t) const {
  std::vector<position> out;
  std::vector<std::pair<term_id, position>> stack;
  stack.emplace_back(t, position{});
  while (!stack.empty()) {
    auto [cur, pos] = std::move(stack.back());
    stack.pop_back();
    std::span<const term_id> cs = children(cur);
    for (std::size_t i = cs.size(); i > 0; --i)
      stack.emplace_back(cs[i - 1], pos.child(static_cast<std::uint32_t>(i)));
    out.push_back(std::move(pos));
  }
  return out;
}

std::vector<position> term_pool::variable_positions(term_id t) const {
  std::vector<position> out;
  for (position& p : domain(t)) {
    if (is_variable(subterm_at(t, p))) out.push_back(std::move(p));
  }
  return out;
}

std::string term_pool::to_string(term_id t) const {
  std::string out;
  // Explicit stack; normal forms can nest thousands of levels deep.
  struct frame {
    term_id t;
    std::size_t next = 0;
  };
  std::vector<frame> stack{{t, 0}};
  while (!stack.empty()) {
    frame& f = stack.back();
    std::span<const term_id> cs = children(f.t);
    if (f.next == 0) {
      out += head_name(f.t);
      if (!cs.empty()) out += '(';
    }
    if (f.next < cs.size()) {
      if (f.next > 0) out += ',';
      term_id c = cs[f.next++];
      stack.push_back({c, 0});
      continue;
    }
    if (!cs.empty()) out += ')';
    stack.pop_back();
  }
  return out;
}

term_id apply_substitution(term_pool& pool, term_id t, const substitution& s) {
  std::unordered_map<term_id, term_id> memo;
  auto rec = [&](auto&& self, term_id cur) -> term_id {
    if (pool.ground(cur)) return cur;
    if (auto it = memo.find(cur); it != memo.end()) return it->second;
    term_id result;
    if (pool.is_variable(cur)) {
      auto it = s.find(pool.head(cur));
      if (it == s.end())
        throw substitution_error("unbound variable '" + pool.head_name(cur) + "'");
      result = it->second;
    } else {
      std::span<const term_id> cs = pool.children(cur);
      std::vector<term_id> mapped(cs.begin(), cs.end());
      for (term_id& c : mapped) c = self(self, c);
      result = pool.make(pool.head(cur), mapped);
    }
    memo.emplace(cur, result);
    return result;
  };
  return rec(rec, t);
}

std::optional<substitution> match_root(const term_pool& pool, term_id pattern, term_id subject) {
  substitution s;
  auto walk = [&](auto&& self, term_id pat, term_id sub) -> bool {
    if (pool.is_variable(pat)) {
      auto [it, inserted] = s.emplace(pool.head(pat), sub);
      return inserted || it->second == sub;  // repeated variables need id-equal subterms
    }
    if (pool.head(pat) != pool.head(sub)) return false;
    std::span<const term_id> pc = pool.children(pat);
    std::span<const term_id> sc = pool.children(sub);
    for (std::size_t i = 0; i < pc.size(); ++i)
      if (!self(self, pc[i], sc[i])) return false;
    return true;
  };
  if (!walk(walk, pattern, subject)) return std::nullopt;
  return s;
}

namespace detail {

term_id parse_term_prefix(term_pool& pool, cursor& cur) {
  cur.skip_ws();
  std::size_t at_line = cur.line, at_col = cur.col;
  std::string name = cur.read_ident();
  std::optional<symbol_id> sym = pool.symbols.find(name);
  if (!sym) throw parse_error(at_line, at_col, "unknown symbol '" + name + "'");
  std::vector<term_id> args;
  cur.skip_ws();
  if (!cur.eof() && cur.peek() == '(') {
    cur.advance();
    cur.skip_ws();
    if (!cur.eof() && cur.peek() == ')') throw parse_error(cur.line, cur.col, "empty argument list");
    while (true) {
      args.push_back(parse_term_prefix(pool, cur));
      cur.skip_ws();
      if (cur.eof()) cur.fail("expected ',' or ')'");
      if (cur.peek() == ',') {
        cur.advance();
        continue;
      }
      if (cur.peek() == ')') {
        cur.advance();
        break;
      }
      cur.fail("expected ',' or ')'");
    }
  }
  const symbol_info& si = pool.symbols[*sym];
  if (args.size() != si.arity)
    throw parse_error(at_line, at_col,
                      "'" + name + "' takes " + std::to_string(si.arity) + " arguments, got " +
                          std::to_string(args.size()));
  return pool.make(*sym, args);
}

}  // namespace detail

term_id parse_term(term_pool& pool, std::string_view text) {
  detail::cursor cur(text);
  term_id t = detail::parse_term_prefix(pool, cur);
  cur.skip_ws();
  if (!cur.eof()) cur.fail("unexpected trailing input");
  return t;
}

}  // namespace setrw
