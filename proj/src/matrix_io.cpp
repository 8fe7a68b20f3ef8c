#include "scgl/matrix_io.hpp"

#include "scgl/errors.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace scgl::io {

namespace {

constexpr int kDigits = std::numeric_limits<double>::max_digits10;

std::vector<double> row_major(const Eigen::MatrixXd& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  return out;
}

Eigen::MatrixXd from_row_major(const std::vector<double>& values, Index n, const std::string& what) {
  if (static_cast<Index>(values.size()) != n * n) {
    throw InputError(what + ": expected " + std::to_string(n * n) + " entries, got " +
                     std::to_string(values.size()));
  }
  Eigen::MatrixXd m(n, n);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) m(r, c) = values[static_cast<std::size_t>(r * n + c)];
  return m;
}

bool parse_block_header(const std::string& text, Index& v, Index& n) {
  std::istringstream ss(text);
  char comma = 0;
  long a = 0;
  long b = 0;
  if (!(ss >> a >> comma >> b) || comma != ',') return false;
  v = a;
  n = b;
  return v > 0 && n > 0;
}

}  // namespace

void write_matrix_market(std::ostream& out, const BlockMatrix& m, MatrixMarketLayout layout) {
  const auto& a = m.matrix;
  out << std::setprecision(kDigits);
  if (layout == MatrixMarketLayout::kDense) {
    out << "%%MatrixMarket matrix array real general\n";
    out << "% v,n: " << m.nodes << ',' << m.stalk_dim << '\n';
    out << a.rows() << ' ' << a.cols() << '\n';
    for (Index c = 0; c < a.cols(); ++c)
      for (Index r = 0; r < a.rows(); ++r) out << a(r, c) << '\n';
    return;
  }
  Index nnz = 0;
  for (Index c = 0; c < a.cols(); ++c)
    for (Index r = 0; r < a.rows(); ++r) nnz += a(r, c) != 0.0;
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << "% v,n: " << m.nodes << ',' << m.stalk_dim << '\n';
  out << a.rows() << ' ' << a.cols() << ' ' << nnz << '\n';
  for (Index c = 0; c < a.cols(); ++c)
    for (Index r = 0; r < a.rows(); ++r)
      if (a(r, c) != 0.0) out << r + 1 << ' ' << c + 1 << ' ' << a(r, c) << '\n';
}

BlockMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0) {
    throw InputError("MatrixMarket: missing banner");
  }
  const bool coordinate = line.find("coordinate") != std::string::npos;
  if (!coordinate && line.find("array") == std::string::npos) {
    throw InputError("MatrixMarket: unsupported layout in banner '" + line + "'");
  }
  BlockMatrix out;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] != '%') break;
    const auto pos = line.find("v,n:");
    if (pos != std::string::npos) have_header = parse_block_header(line.substr(pos + 4), out.nodes, out.stalk_dim);
  }
  std::istringstream dims(line);
  long rows = 0;
  long cols = 0;
  long nnz = 0;
  if (!(dims >> rows >> cols) || rows < 0 || cols < 0) throw InputError("MatrixMarket: bad size line");
  if (coordinate && !(dims >> nnz)) throw InputError("MatrixMarket: missing entry count");
  out.matrix = Eigen::MatrixXd::Zero(rows, cols);
  if (coordinate) {
    for (long t = 0; t < nnz; ++t) {
      long r = 0;
      long c = 0;
      double value = 0.0;
      if (!(in >> r >> c >> value) || r < 1 || c < 1 || r > rows || c > cols) {
        throw InputError("MatrixMarket: bad entry " + std::to_string(t + 1));
      }
      out.matrix(r - 1, c - 1) = value;
    }
  } else {
    for (long c = 0; c < cols; ++c)
      for (long r = 0; r < rows; ++r)
        if (!(in >> out.matrix(r, c))) throw InputError("MatrixMarket: truncated value list");
  }
  if (!have_header) {
    out.nodes = rows;
    out.stalk_dim = 1;
  }
  return out;
}

void write_csv(std::ostream& out, const BlockMatrix& m) {
  out << std::setprecision(kDigits);
  out << m.nodes << ',' << m.stalk_dim << '\n';
  for (Index r = 0; r < m.matrix.rows(); ++r) {
    for (Index c = 0; c < m.matrix.cols(); ++c) out << (c ? "," : "") << m.matrix(r, c);
    out << '\n';
  }
}

BlockMatrix read_csv(std::istream& in) {
  BlockMatrix out;
  std::string line;
  if (!std::getline(in, line) || !parse_block_header(line, out.nodes, out.stalk_dim)) {
    throw InputError("CSV: first line must be the block header 'v,n'");
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw InputError("CSV: cannot parse '" + cell + "' on data row " + std::to_string(rows.size() + 1));
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InputError("CSV: ragged row " + std::to_string(rows.size() + 1));
    }
    rows.push_back(std::move(row));
  }
  const auto cols = rows.empty() ? 0 : rows.front().size();
  out.matrix.resize(static_cast<Index>(rows.size()), static_cast<Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c) out.matrix(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  return out;
}

void save_matrix(const std::filesystem::path& path, const BlockMatrix& m) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  if (path.extension() == ".mtx") {
    write_matrix_market(out, m);
  } else {
    write_csv(out, m);
  }
  if (!out) throw InputError("write failed for '" + path.string() + "'");
}

BlockMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  try {
    return path.extension() == ".mtx" ? read_matrix_market(in) : read_csv(in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

nlohmann::json graph_to_json(const ConnectionGraph& graph) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : graph.edges()) {
    edges.push_back({{"i", e.i + 1}, {"j", e.j + 1}, {"w", e.weight}, {"O", row_major(e.map)}});
  }
  return {{"v", graph.nodes()}, {"n", graph.stalk_dim()}, {"edges", std::move(edges)}};
}

ConnectionGraph graph_from_json(const nlohmann::json& j) {
  try {
    const Index v = j.at("v").get<Index>();
    const Index n = j.at("n").get<Index>();
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      const Index i = e.at("i").get<Index>() - 1;
      const Index jj = e.at("j").get<Index>() - 1;
      edges.push_back({i, jj, e.at("w").get<double>(),
                       from_row_major(e.at("O").get<std::vector<double>>(), n,
                                      "edge (" + std::to_string(i + 1) + "," + std::to_string(jj + 1) + ")")});
    }
    return ConnectionGraph(v, n, std::move(edges));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("graph JSON: ") + e.what());
  }
}

nlohmann::json bases_to_json(const NodeBases& bases) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& b : bases.blocks()) out.push_back(row_major(b));
  return out;
}

NodeBases bases_from_json(const nlohmann::json& j, Index stalk_dim) {
  std::vector<Eigen::MatrixXd> blocks;
  try {
    for (const auto& b : j) blocks.push_back(from_row_major(b.get<std::vector<double>>(), stalk_dim, "basis"));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bases JSON: ") + e.what());
  }
  return NodeBases(std::move(blocks));
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
}

}  // namespace scgl::io
