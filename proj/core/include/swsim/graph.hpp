#pragma once

#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace swsim {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Index into the finite mode set of a graph family.
using Mode = int;

struct Edge {
  int i = 0;
  int j = 0;
  double w = 1.0;

  bool operator==(const Edge&) const = default;
};

// Undirected weighted graph on n >= 2 agents, stored as a dense symmetric
// adjacency matrix with zero diagonal and nonnegative entries.
class WeightedGraph {
 public:
  explicit WeightedGraph(int n);
  explicit WeightedGraph(Matrix weights);

  // Edges use 0-based vertex indices. Repeated edges accumulate.
  static WeightedGraph from_edges(int n, std::span<const Edge> edges);

  int size() const { return static_cast<int>(weights_.rows()); }
  double weight(int i, int j) const { return weights_(i, j); }
  const Matrix& weights() const { return weights_; }

  // Positive-weight edges with i < j.
  std::vector<Edge> edges() const;
  bool empty() const;

  WeightedGraph scaled(double factor) const;

  // Edge union with weights summed.
  friend WeightedGraph operator+(const WeightedGraph& a, const WeightedGraph& b);

 private:
  Matrix weights_;
};

// Graphs indexed by a finite, nonempty mode set; all share one vertex count.
class GraphFamily {
 public:
  explicit GraphFamily(std::map<Mode, WeightedGraph> graphs);

  int size() const { return n_; }
  std::size_t mode_count() const { return graphs_.size(); }
  bool contains(Mode mode) const { return graphs_.count(mode) != 0; }

  // Throws ValidationError for an unknown mode.
  const WeightedGraph& at(Mode mode) const;

  std::vector<Mode> modes() const;
  const std::map<Mode, WeightedGraph>& graphs() const { return graphs_; }

  // max over modes of the spectral norm of the mode Laplacian.
  double max_laplacian_norm() const;

 private:
  std::map<Mode, WeightedGraph> graphs_;
  int n_ = 0;
};

// L_ij = -a_ij (i != j), L_ii = sum_j a_ij.
Matrix laplacian(const WeightedGraph& g);

// Diagonal sum_j a_ij b_ij, off-diagonal -a_ij b_ij. B = 1 1^T recovers laplacian(g).
Matrix generalized_laplacian(const WeightedGraph& g, const Matrix& b);

// I - (1/n) 1 1^T.
Matrix centering_matrix(int n);

// Frobenius norm of the off-diagonal part of a square matrix.
double rho(const Matrix& b);

Matrix union_laplacian(const GraphFamily& family, std::span<const Mode> subset);

// Connectivity of the graph on positive-weight edges (union-find).
bool is_connected(const WeightedGraph& g);

// Largest singular value.
double spectral_norm(const Matrix& m);

// Smallest eigenvalue above the rank tolerance 1e-9 * max(1, ||m||) of a
// symmetric positive semi-definite matrix. Throws ValidationError when m is
// asymmetric beyond 1e-9 or has no positive eigenvalue.
double sigma_min_positive(const Matrix& m);

}  // namespace swsim
