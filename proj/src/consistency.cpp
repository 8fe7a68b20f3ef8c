#include "scgl/consistency.hpp"

#include "scgl/errors.hpp"
#include "scgl/kron_operator.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

namespace scgl {

namespace {

struct Neighbor {
  Index node;
  const Edge* edge;
};

std::vector<std::vector<Neighbor>> weighted_adjacency(const ConnectionGraph& graph) {
  std::vector<std::vector<Neighbor>> adj(static_cast<std::size_t>(graph.nodes()));
  for (const auto& e : graph.edges()) {
    if (e.weight <= 0.0) continue;
    adj[static_cast<std::size_t>(e.i)].push_back({e.j, &e});
    adj[static_cast<std::size_t>(e.j)].push_back({e.i, &e});
  }
  return adj;
}

// Map carrying coordinates at `to` into coordinates at `from` along an edge:
// O_ij when walking from i to j, its transpose the other way.
Eigen::MatrixXd oriented_map(const Edge& e, Index from) {
  return from == e.i ? e.map : Eigen::MatrixXd(e.map.transpose());
}

}  // namespace

std::vector<std::vector<Index>> connected_components(const ConnectionGraph& graph) {
  const auto adj = weighted_adjacency(graph);
  std::vector<int> seen(static_cast<std::size_t>(graph.nodes()), 0);
  std::vector<std::vector<Index>> components;
  for (Index root = 0; root < graph.nodes(); ++root) {
    if (seen[static_cast<std::size_t>(root)]) continue;
    std::vector<Index> comp;
    std::queue<Index> q;
    q.push(root);
    seen[static_cast<std::size_t>(root)] = 1;
    while (!q.empty()) {
      const Index u = q.front();
      q.pop();
      comp.push_back(u);
      for (const auto& nb : adj[static_cast<std::size_t>(u)]) {
        if (!seen[static_cast<std::size_t>(nb.node)]) {
          seen[static_cast<std::size_t>(nb.node)] = 1;
          q.push(nb.node);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    components.push_back(std::move(comp));
  }
  return components;
}

ConsistencyReport check_consistency(const ConnectionGraph& graph, double tol) {
  const Index v = graph.nodes();
  const Index n = graph.stalk_dim();
  auto components = connected_components(graph);
  if (components.size() > 1) {
    std::string names;
    std::vector<std::vector<long>> listed;
    for (const auto& comp : components) {
      names += names.empty() ? "{" : " {";
      std::vector<long> ids;
      for (std::size_t t = 0; t < comp.size(); ++t) {
        names += (t ? "," : "") + std::to_string(comp[t]);
        ids.push_back(static_cast<long>(comp[t]));
      }
      names += "}";
      listed.push_back(std::move(ids));
    }
    throw DisconnectedGraphError("check_consistency: graph has " + std::to_string(components.size()) +
                                     " components: " + names,
                                 std::move(listed));
  }

  // Potentials G_u along a BFS tree with G_root = I and G_child = G_parent O_{parent,child};
  // every non-tree edge closes one fundamental cycle, whose defect is ||G_i^T G_j - O_ij||_F.
  const auto adj = weighted_adjacency(graph);
  std::vector<Eigen::MatrixXd> potential(static_cast<std::size_t>(v));
  std::vector<const Edge*> tree_edge(static_cast<std::size_t>(v), nullptr);
  std::queue<Index> q;
  potential[0] = Eigen::MatrixXd::Identity(n, n);
  q.push(0);
  while (!q.empty()) {
    const Index u = q.front();
    q.pop();
    for (const auto& nb : adj[static_cast<std::size_t>(u)]) {
      auto& pot = potential[static_cast<std::size_t>(nb.node)];
      if (pot.size() != 0) continue;
      pot = potential[static_cast<std::size_t>(u)] * oriented_map(*nb.edge, u);
      tree_edge[static_cast<std::size_t>(nb.node)] = nb.edge;
      q.push(nb.node);
    }
  }
  ConsistencyReport report;
  for (const auto& e : graph.edges()) {
    if (e.weight <= 0.0) continue;
    if (tree_edge[static_cast<std::size_t>(e.i)] == &e || tree_edge[static_cast<std::size_t>(e.j)] == &e)
      continue;
    const Eigen::MatrixXd around = potential[static_cast<std::size_t>(e.i)].transpose() *
                                   potential[static_cast<std::size_t>(e.j)];
    report.max_cycle_defect = std::max(report.max_cycle_defect, (around - e.map).norm());
  }

  const Eigen::VectorXd conn =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(build_connection_laplacian(graph).matrix(),
                                                     Eigen::EigenvaluesOnly)
          .eigenvalues();
  const Eigen::VectorXd comb =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(combinatorial_laplacian(graph.weights(), v),
                                                     Eigen::EigenvaluesOnly)
          .eigenvalues();
  for (Index k = 0; k < v; ++k)
    for (Index r = 0; r < n; ++r)
      report.spectral_defect = std::max(report.spectral_defect, std::abs(conn(k * n + r) - comb(k)));

  report.consistent = report.max_cycle_defect < tol && report.spectral_defect < tol;
  return report;
}

NodeBases synchronize(const ConnectionLaplacian& laplacian, double tol) {
  const Index v = laplacian.nodes();
  const Index n = laplacian.stalk_dim();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(laplacian.matrix());
  if (eig.info() != Eigen::Success) throw SynchronizationError("synchronize: eigensolver failed");
  const Eigen::VectorXd& values = eig.eigenvalues();
  const double top = std::max(values(values.size() - 1), std::numeric_limits<double>::min());
  if (values(n - 1) > tol * top) {
    throw SynchronizationError("synchronize: kernel dimension below n=" + std::to_string(n) +
                               " (eigenvalue " + std::to_string(n) + " is " +
                               std::to_string(values(n - 1)) + ", threshold " +
                               std::to_string(tol * top) + ")");
  }
  return bases_from_sections(eig.eigenvectors().leftCols(n), v);
}

NodeBases bases_from_sections(Eigen::MatrixXd sections, Index nodes) {
  const Index n = sections.cols();
  if (sections.rows() != nodes * n) {
    throw ArgumentError("bases_from_sections: expected " + std::to_string(nodes * n) + " rows");
  }
  // A reflection inside the section basis would make every block det -1.
  double det_sum = 0.0;
  for (Index i = 0; i < nodes; ++i) det_sum += sections.block(i * n, 0, n, n).determinant();
  if (det_sum < 0.0) sections.col(n - 1) *= -1.0;

  std::vector<Eigen::MatrixXd> blocks(static_cast<std::size_t>(nodes));
  for (Index i = 0; i < nodes; ++i) {
    blocks[static_cast<std::size_t>(i)] =
        nearest_special_orthogonal(sections.block(i * n, 0, n, n)).transpose();
  }
  return NodeBases(std::move(blocks));
}

double log_gdet(const Eigen::VectorXd& eigenvalues, double zero_tol) {
  double total = 0.0;
  bool any = false;
  for (Index k = 0; k < eigenvalues.size(); ++k) {
    const double lam = eigenvalues(k);
    if (lam < -zero_tol) throw DomainError("log_gdet: negative eigenvalue " + std::to_string(lam));
    if (lam > zero_tol) {
      total += std::log(lam);
      any = true;
    }
  }
  return any ? total : -std::numeric_limits<double>::infinity();
}

double default_zero_tol(const Eigen::VectorXd& eigenvalues) {
  return eigenvalues.size() == 0 ? 0.0 : 1e-8 * eigenvalues.maxCoeff();
}

}  // namespace scgl
