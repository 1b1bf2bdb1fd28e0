#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace modalpf {

/// Non-decreasing tuple of 0-based indices identifying a symmetric monomial
/// (state indices in a tensor, or mode indices in a normal-form table).
using MultiIndex = std::vector<int>;

/// Sorts in place and returns the canonical (non-decreasing) form.
MultiIndex canonical(MultiIndex idx);

bool is_canonical(const MultiIndex& idx);

/// Number of distinct orderings of the tuple (multinomial coefficient).
std::size_t ordering_count(const MultiIndex& idx);

/// Calls fn(tuple) for every canonical tuple of `order` indices drawn from
/// 0..n-1, in lexicographic order.
void for_each_canonical(int n, int order, const std::function<void(const MultiIndex&)>& fn);

/// Number of canonical tuples: C(n + order - 1, order).
std::size_t canonical_count(int n, int order);

/// Keys a coefficient by its output row (state or target mode) and monomial.
struct TermKey {
  int row = 0;
  MultiIndex index;

  auto operator<=>(const TermKey&) const = default;
  bool operator==(const TermKey&) const = default;
};

/// 1-based textual form joined by `sep`, e.g. {0,2} -> "1+3".
std::string format_one_based(const MultiIndex& idx, char sep = '+');

}  // namespace modalpf
