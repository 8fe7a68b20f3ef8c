#include "scgl/edge_index.hpp"

#include "scgl/errors.hpp"

#include <string>

namespace scgl {

std::size_t edge_index(std::size_t i, std::size_t j, std::size_t v) {
  if (j < 1 || i <= j || i > v) {
    throw ArgumentError("edge_index: need 1 <= j < i <= v, got (i=" + std::to_string(i) +
                        ", j=" + std::to_string(j) + ", v=" + std::to_string(v) + ")");
  }
  return i - j + (j - 1) * (2 * v - j) / 2;
}

std::pair<std::size_t, std::size_t> edge_pair(std::size_t k, std::size_t v) {
  if (v < 2 || k < 1 || k > v * (v - 1) / 2) {
    throw ArgumentError("edge_pair: slot " + std::to_string(k) + " out of range for v=" +
                        std::to_string(v));
  }
  // Column j holds v - j slots.
  std::size_t j = 1;
  std::size_t offset = 0;
  while (offset + (v - j) < k) {
    offset += v - j;
    ++j;
  }
  return {j + (k - offset), j};
}

EdgeIndexMap::EdgeIndexMap(Index nodes) : nodes_(nodes) {
  if (nodes < 1) throw ArgumentError("EdgeIndexMap: node count must be positive");
  const auto m = static_cast<std::size_t>(pair_count(nodes));
  first_.reserve(m);
  second_.reserve(m);
  for (Index j = 0; j < nodes; ++j) {
    for (Index i = j + 1; i < nodes; ++i) {
      first_.push_back(i);
      second_.push_back(j);
    }
  }
}

Index EdgeIndexMap::slot(Index i, Index j) const {
  if (i < j) std::swap(i, j);
  if (j < 0 || i == j || i >= nodes_) {
    throw ArgumentError("EdgeIndexMap::slot: invalid pair (" + std::to_string(i) + ", " +
                        std::to_string(j) + ") for v=" + std::to_string(nodes_));
  }
  return j * (2 * nodes_ - j - 1) / 2 + (i - j - 1);
}

}  // namespace scgl
