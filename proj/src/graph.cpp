#include "siu/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "siu/rng.hpp"

namespace siu {

Graph::Graph(int n, std::vector<Edge> edges) : n_(n) {
  if (n < 0) throw std::invalid_argument("graph: negative vertex count");
  for (auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n) {
      throw std::invalid_argument("graph: edge (" + std::to_string(u) + "," + std::to_string(v) +
                                  ") out of range for n=" + std::to_string(n));
    }
    if (u == v) throw std::invalid_argument("graph: self-loop at vertex " + std::to_string(u));
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  if (auto dup = std::adjacent_find(edges.begin(), edges.end()); dup != edges.end()) {
    throw std::invalid_argument("graph: duplicate edge (" + std::to_string(dup->first) + "," +
                                std::to_string(dup->second) + ")");
  }
  edges_ = std::move(edges);
  adjacency_.assign(static_cast<std::size_t>(n), {});
  for (const auto& [u, v] : edges_) {
    adjacency_[static_cast<std::size_t>(u)].push_back(v);
    adjacency_[static_cast<std::size_t>(v)].push_back(u);
  }
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

int Graph::max_degree() const noexcept {
  int d = 0;
  for (const auto& nbrs : adjacency_) d = std::max(d, static_cast<int>(nbrs.size()));
  return d;
}

bool Graph::has_edge(int u, int v) const {
  if (u < 0 || v < 0 || u >= n_ || v >= n_) return false;
  const auto& nbrs = adjacency_[static_cast<std::size_t>(u)];
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

Graph random_geometric(int n, double radius, std::uint64_t seed) {
  return random_geometric(n, radius, seed, nullptr);
}

Graph random_geometric(int n, double radius, std::uint64_t seed,
                       std::vector<std::pair<double, double>>* points) {
  if (n < 1) throw std::invalid_argument("random_geometric: n must be >= 1");
  if (!(radius > 0.0) || radius > std::sqrt(2.0)) {
    throw std::invalid_argument("random_geometric: radius must lie in (0, sqrt(2)]");
  }
  Rng rng = make_rng({seed});
  std::vector<std::pair<double, double>> pts(static_cast<std::size_t>(n));
  for (auto& p : pts) {
    p.first = uniform01(rng);
    p.second = uniform01(rng);
  }
  const double r2 = radius * radius;
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      const double dx = pts[u].first - pts[v].first;
      const double dy = pts[u].second - pts[v].second;
      if (dx * dx + dy * dy <= r2) edges.emplace_back(u, v);
    }
  }
  if (points) *points = std::move(pts);
  return Graph(n, std::move(edges));
}

bool is_connected(const Graph& g) {
  const int n = g.num_vertices();
  if (n == 0) return true;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : g.neighbors(v)) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == n;
}

Eigen::MatrixXd laplacian(const Graph& g) {
  const int n = g.num_vertices();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [u, v] : g.edges()) {
    L(u, v) = -1.0;
    L(v, u) = -1.0;
    L(u, u) += 1.0;
    L(v, v) += 1.0;
  }
  return L;
}

SpectralSummary spectral_bounds(const Eigen::MatrixXd& L, double tol) {
  if (L.rows() != L.cols()) throw std::invalid_argument("spectral_bounds: matrix is not square");
  const Eigen::Index n = L.rows();
  if (n == 0) throw std::invalid_argument("spectral_bounds: empty matrix");
  const double scale = std::max(1.0, L.cwiseAbs().maxCoeff());
  const double asym = (L - L.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol * scale) {
    std::ostringstream msg;
    msg << "spectral_bounds: matrix not symmetric (max |L - L^T| = " << asym << " > " << tol * scale << ")";
    throw std::invalid_argument(msg.str());
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(L);
  if (solver.info() != Eigen::Success) throw std::runtime_error("spectral_bounds: eigensolver did not converge");
  const Eigen::VectorXd& evals = solver.eigenvalues();  // ascending
  const Eigen::MatrixXd& evecs = solver.eigenvectors();
  const double norm2 = std::max(std::abs(evals(0)), std::abs(evals(n - 1)));

  if (evals(0) < -tol * scale) {
    std::ostringstream msg;
    msg << "spectral_bounds: matrix is not PSD (smallest eigenvalue " << evals(0) << ")";
    throw std::invalid_argument(msg.str());
  }

  auto residual = [&](Eigen::Index k) {
    return (L * evecs.col(k) - evals(k) * evecs.col(k)).norm();
  };

  SpectralSummary out;
  out.lambda2 = n >= 2 ? std::max(0.0, evals(1)) : 0.0;
  out.lambdaN = std::max(0.0, evals(n - 1));
  out.residual = residual(n - 1);
  if (n >= 2) out.residual = std::max(out.residual, residual(1));
  if (out.residual > tol * std::max(1.0, norm2)) {
    std::ostringstream msg;
    msg << "spectral_bounds: eigenpair residual " << out.residual << " exceeds tolerance";
    throw std::runtime_error(msg.str());
  }
  return out;
}

void write_edge_list(std::ostream& os, const Graph& g) {
  os << "n " << g.num_vertices() << '\n';
  for (const auto& [u, v] : g.edges()) os << u << ' ' << v << '\n';
}

std::string to_edge_list(const Graph& g) {
  std::ostringstream os;
  write_edge_list(os, g);
  return os.str();
}

Graph read_edge_list(std::istream& is) {
  std::string tag;
  long long n = -1;
  if (!(is >> tag >> n) || tag != "n" || n < 0) {
    throw std::invalid_argument("edge list: expected header line 'n <count>'");
  }
  std::vector<Edge> edges;
  long long u = 0;
  long long v = 0;
  while (is >> u) {
    if (!(is >> v)) throw std::invalid_argument("edge list: dangling vertex index");
    edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
  }
  if (!is.eof()) throw std::invalid_argument("edge list: malformed entry");
  return Graph(static_cast<int>(n), std::move(edges));
}

Graph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("edge list: cannot open " + path);
  return read_edge_list(in);
}

}  // namespace siu
