#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "setrw/position.hpp"

namespace setrw {

using symbol_id = std::uint32_t;
using term_id = std::uint32_t;

struct symbol_info {
  std::string name;
  std::uint32_t arity = 0;
  bool variable = false;
};

class symbol_table {
 public:
  // Declaring an existing name again is fine if kind and arity agree.
  symbol_id declare_function(std::string_view name, std::uint32_t arity);
  symbol_id declare_variable(std::string_view name);
  std::optional<symbol_id> find(std::string_view name) const;
  const symbol_info& operator[](symbol_id s) const { return infos_[s]; }
  std::size_t size() const { return infos_.size(); }

 private:
  std::vector<symbol_info> infos_;
  std::unordered_map<std::string, symbol_id> index_;
};

// Maximally shared term storage: structurally equal terms have equal ids,
// so term equality is an id comparison. Append-only for the life of the pool.
class term_pool {
 public:
  symbol_table symbols;

  term_id make(symbol_id head, std::span<const term_id> children);
  term_id make(symbol_id head, std::initializer_list<term_id> children) {
    return make(head, std::span<const term_id>(children.begin(), children.size()));
  }
  term_id make_leaf(symbol_id head) { return make(head, std::span<const term_id>{}); }

  symbol_id head(term_id t) const { return nodes_[t].head; }
  const std::string& head_name(term_id t) const { return symbols[nodes_[t].head].name; }
  bool is_variable(term_id t) const { return symbols[nodes_[t].head].variable; }
  bool ground(term_id t) const { return nodes_[t].ground; }
  std::span<const term_id> children(term_id t) const {
    const node& n = nodes_[t];
    return {child_ids_.data() + n.child_begin, n.child_count};
  }
  // Number of positions in the unfolded tree, saturating at uint64 max.
  std::uint64_t tree_size(term_id t) const { return nodes_[t].size; }
  std::size_t node_count() const { return nodes_.size(); }

  term_id subterm_at(term_id t, const position& p) const;
  // Persistent update: rebuilds the spine above p, t itself is unchanged.
  term_id replace_at(term_id t, const position& p, term_id u);
  std::vector<position> domain(term_id t) const;
  std::vector<position> variable_positions(term_id t) const;

  std::string to_string(term_id t) const;

 private:
  struct node {
    symbol_id head;
    std::uint32_t child_begin;
    std::uint32_t child_count;
    bool ground;
    std::uint64_t size;
    std::uint64_t hash;
  };
  std::vector<node> nodes_;
  std::vector<term_id> child_ids_;
  std::vector<term_id> buckets_;
  std::size_t bucket_mask_ = 0;
  std::size_t used_ = 0;

  void grow_buckets();
};

// Variable bindings for matching and rewriting.
using substitution = std::unordered_map<symbol_id, term_id>;

// t with every variable replaced by its binding; substitution_error on an
// unbound variable of t. Memoized over shared subterms.
term_id apply_substitution(term_pool& pool, term_id t, const substitution& s);

// The unique s with subject = pattern^s, if any. Repeated pattern variables
// require id-equal bound subterms.
std::optional<substitution> match_root(const term_pool& pool, term_id pattern, term_id subject);

// Term text: `name` or `name(t1,...,tn)`; identifiers [A-Za-z0-9_+*-]+;
// whitespace insignificant. Every identifier must already be declared.
term_id parse_term(term_pool& pool, std::string_view text);

}  // namespace setrw
