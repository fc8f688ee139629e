#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace siu {

using Edge = std::pair<int, int>;

/// Simple undirected graph on vertices 0..n-1.
///
/// Edges are stored normalized (u < v) and sorted; neighbor lists are sorted
/// ascending. Immutable after construction.
class Graph {
 public:
  Graph() = default;

  /// Throws std::invalid_argument on self-loops, out-of-range endpoints or
  /// duplicate edges (in either orientation).
  Graph(int n, std::vector<Edge> edges);

  int num_vertices() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::span<const int> neighbors(int v) const { return adjacency_[static_cast<std::size_t>(v)]; }
  int degree(int v) const { return static_cast<int>(adjacency_[static_cast<std::size_t>(v)].size()); }
  int max_degree() const noexcept;
  bool has_edge(int u, int v) const;

  friend bool operator==(const Graph& a, const Graph& b) { return a.n_ == b.n_ && a.edges_ == b.edges_; }

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;
};

struct SpectralSummary {
  double lambda2 = 0.0;
  double lambdaN = 0.0;
  double residual = 0.0;  // max ||Lv - lambda v||_2 over the reported eigenpairs
};

inline constexpr double kDefaultSpectralTol = 1e-9;

/// n points uniform in the unit square; edge iff Euclidean distance <= radius.
Graph random_geometric(int n, double radius, std::uint64_t seed);

/// Same, also returning the sampled point coordinates (row i = vertex i).
Graph random_geometric(int n, double radius, std::uint64_t seed, std::vector<std::pair<double, double>>* points);

bool is_connected(const Graph& g);

/// L = D - A.
Eigen::MatrixXd laplacian(const Graph& g);

/// lambda2 and lambdaN of a symmetric PSD matrix. `tol` is relative to the
/// largest absolute entry. Throws std::invalid_argument if L is not symmetric
/// within tol, or std::runtime_error if the eigenpair residual check fails.
SpectralSummary spectral_bounds(const Eigen::MatrixXd& L, double tol = kDefaultSpectralTol);

/// Edge-list text: "n <count>" then one "u v" line per edge, ascending.
void write_edge_list(std::ostream& os, const Graph& g);
std::string to_edge_list(const Graph& g);
Graph read_edge_list(std::istream& is);
Graph read_edge_list_file(const std::string& path);

}  // namespace siu
