#include "modalpf/multi_index.hpp"

#include <algorithm>
#include <map>

namespace modalpf {

MultiIndex canonical(MultiIndex idx) {
  std::sort(idx.begin(), idx.end());
  return idx;
}

bool is_canonical(const MultiIndex& idx) { return std::is_sorted(idx.begin(), idx.end()); }

std::size_t ordering_count(const MultiIndex& idx) {
  std::map<int, int> counts;
  for (int v : idx) ++counts[v];
  // d! / prod(c!) built incrementally to stay exact for small d.
  std::size_t result = 1;
  std::size_t placed = 0;
  for (const auto& [value, c] : counts) {
    for (int j = 1; j <= c; ++j) {
      ++placed;
      result = result * placed / static_cast<std::size_t>(j);
    }
  }
  return result;
}

namespace {

void recurse(int n, int order, MultiIndex& current, int start,
             const std::function<void(const MultiIndex&)>& fn) {
  if (static_cast<int>(current.size()) == order) {
    fn(current);
    return;
  }
  for (int v = start; v < n; ++v) {
    current.push_back(v);
    recurse(n, order, current, v, fn);
    current.pop_back();
  }
}

}  // namespace

void for_each_canonical(int n, int order, const std::function<void(const MultiIndex&)>& fn) {
  if (order <= 0 || n <= 0) return;
  MultiIndex current;
  current.reserve(static_cast<std::size_t>(order));
  recurse(n, order, current, 0, fn);
}

std::size_t canonical_count(int n, int order) {
  // C(n + order - 1, order)
  std::size_t r = 1;
  for (int j = 1; j <= order; ++j) {
    r = r * static_cast<std::size_t>(n + j - 1) / static_cast<std::size_t>(j);
  }
  return r;
}

std::string format_one_based(const MultiIndex& idx, char sep) {
  std::string out;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    if (j) out.push_back(sep);
    out += std::to_string(idx[j] + 1);
  }
  return out;
}

}  // namespace modalpf
