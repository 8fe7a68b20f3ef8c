#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <utility>
#include <vector>

namespace scgl {

using Index = Eigen::Index;

/// Linear index of the unordered pair {i, j}, i > j, in column-major
/// lower-triangular order: k = i - j + (j - 1)(2v - j)/2.
///
/// Uses 1-based nodes and returns a 1-based k in [1, v(v-1)/2], matching the
/// textbook form of the formula. Library code uses EdgeIndexMap (0-based).
std::size_t edge_index(std::size_t i, std::size_t j, std::size_t v);

/// Inverse of edge_index: 1-based k -> 1-based (i, j) with i > j.
std::pair<std::size_t, std::size_t> edge_pair(std::size_t k, std::size_t v);

/// Bijection between node pairs (i, j), i > j, and the weight-vector slot k.
///
/// All indices are 0-based. Slot ordering is the same column-major
/// lower-triangular ordering as edge_index: pairs (1,0), (2,0), ..., (v-1,0),
/// (2,1), ... This is the only place in the library that encodes the ordering.
class EdgeIndexMap {
 public:
  explicit EdgeIndexMap(Index nodes);

  Index nodes() const noexcept { return nodes_; }
  /// Number of slots, v(v-1)/2.
  Index size() const noexcept { return static_cast<Index>(first_.size()); }

  /// Slot of the pair {i, j}; the order of the arguments does not matter.
  Index slot(Index i, Index j) const;

  /// First (larger) node of slot k.
  Index first(Index k) const { return first_[static_cast<std::size_t>(k)]; }
  /// Second (smaller) node of slot k.
  Index second(Index k) const { return second_[static_cast<std::size_t>(k)]; }

 private:
  Index nodes_;
  std::vector<Index> first_;
  std::vector<Index> second_;
};

inline Index pair_count(Index nodes) { return nodes * (nodes - 1) / 2; }

}  // namespace scgl
