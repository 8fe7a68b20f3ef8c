#pragma once

#include "scgl/connection_graph.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <filesystem>
#include <iosfwd>

namespace scgl::io {

/// A matrix plus the v, n block bookkeeping carried in every file header.
struct BlockMatrix {
  Eigen::MatrixXd matrix;
  Index nodes = 0;
  Index stalk_dim = 1;
};

enum class MatrixMarketLayout { kDense, kCoordinate };

// MatrixMarket text:
//   %%MatrixMarket matrix array real general      (or "coordinate")
//   % v,n: <v>,<n>
//   <rows> <cols> [<nnz>]
//   values (column-major for array; "row col value", 1-based, for coordinate)
void write_matrix_market(std::ostream& out, const BlockMatrix& m,
                         MatrixMarketLayout layout = MatrixMarketLayout::kDense);
BlockMatrix read_matrix_market(std::istream& in);

// CSV: first line "<v>,<n>", then one comma-separated line per matrix row.
void write_csv(std::ostream& out, const BlockMatrix& m);
BlockMatrix read_csv(std::istream& in);

/// Dispatches on extension: ".mtx" -> MatrixMarket, anything else -> CSV.
void save_matrix(const std::filesystem::path& path, const BlockMatrix& m);
BlockMatrix load_matrix(const std::filesystem::path& path);

/// {"v", "n", "edges": [{"i", "j", "w", "O": row-major n*n}]} with 1-based
/// nodes and i > j.
nlohmann::json graph_to_json(const ConnectionGraph& graph);
ConnectionGraph graph_from_json(const nlohmann::json& j);

/// List of row-major n*n arrays, one per node.
nlohmann::json bases_to_json(const NodeBases& bases);
NodeBases bases_from_json(const nlohmann::json& j, Index stalk_dim);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace scgl::io
