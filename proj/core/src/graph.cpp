#include "swsim/graph.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "swsim/errors.hpp"

namespace swsim {
namespace {

constexpr double kSymmetryTol = 1e-9;
constexpr double kRankTol = 1e-9;

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw ValidationError(std::string(what) + ": matrix is " + std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()) + ", expected square");
  }
}

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n), rank_(n, 0), components_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    --components_;
  }

  int components() const { return components_; }

 private:
  std::vector<int> parent_;
  std::vector<int> rank_;
  int components_;
};

}  // namespace

WeightedGraph::WeightedGraph(int n) {
  if (n < 2) throw ValidationError("graph needs at least 2 agents, got " + std::to_string(n));
  weights_ = Matrix::Zero(n, n);
}

WeightedGraph::WeightedGraph(Matrix weights) : weights_(std::move(weights)) {
  require_square(weights_, "WeightedGraph");
  const auto n = weights_.rows();
  if (n < 2) throw ValidationError("graph needs at least 2 agents");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (weights_(i, i) != 0.0) throw ValidationError("graph weights must have a zero diagonal");
    for (Eigen::Index j = 0; j < n; ++j) {
      const double w = weights_(i, j);
      if (!std::isfinite(w) || w < 0.0) {
        throw ValidationError("graph weights must be finite and nonnegative");
      }
      if (w != weights_(j, i)) throw ValidationError("graph weights must be symmetric");
    }
  }
}

WeightedGraph WeightedGraph::from_edges(int n, std::span<const Edge> edges) {
  WeightedGraph g(n);
  for (const auto& e : edges) {
    if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n) {
      throw ValidationError("edge (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                            ") out of range for n=" + std::to_string(n));
    }
    if (e.i == e.j) throw ValidationError("self-loop on vertex " + std::to_string(e.i));
    if (!std::isfinite(e.w) || e.w <= 0.0) throw ValidationError("edge weight must be positive");
    g.weights_(e.i, e.j) += e.w;
    g.weights_(e.j, e.i) += e.w;
  }
  return g;
}

std::vector<Edge> WeightedGraph::edges() const {
  std::vector<Edge> out;
  for (int i = 0; i < size(); ++i) {
    for (int j = i + 1; j < size(); ++j) {
      if (weights_(i, j) > 0.0) out.push_back({i, j, weights_(i, j)});
    }
  }
  return out;
}

bool WeightedGraph::empty() const { return (weights_.array() == 0.0).all(); }

WeightedGraph WeightedGraph::scaled(double factor) const {
  if (!(factor >= 0.0)) throw ValidationError("scale factor must be nonnegative");
  return WeightedGraph(Matrix(weights_ * factor));
}

WeightedGraph operator+(const WeightedGraph& a, const WeightedGraph& b) {
  if (a.size() != b.size()) throw ValidationError("graph union: vertex counts differ");
  return WeightedGraph(Matrix(a.weights_ + b.weights_));
}

GraphFamily::GraphFamily(std::map<Mode, WeightedGraph> graphs) : graphs_(std::move(graphs)) {
  if (graphs_.empty()) throw ValidationError("graph family must contain at least one mode");
  n_ = graphs_.begin()->second.size();
  for (const auto& [mode, g] : graphs_) {
    if (g.size() != n_) {
      throw ValidationError("graph for mode " + std::to_string(mode) + " has " +
                            std::to_string(g.size()) + " vertices, expected " +
                            std::to_string(n_));
    }
  }
}

const WeightedGraph& GraphFamily::at(Mode mode) const {
  auto it = graphs_.find(mode);
  if (it == graphs_.end()) throw ValidationError("unknown mode " + std::to_string(mode));
  return it->second;
}

std::vector<Mode> GraphFamily::modes() const {
  std::vector<Mode> out;
  out.reserve(graphs_.size());
  for (const auto& kv : graphs_) out.push_back(kv.first);
  return out;
}

double GraphFamily::max_laplacian_norm() const {
  double best = 0.0;
  for (const auto& kv : graphs_) best = std::max(best, spectral_norm(laplacian(kv.second)));
  return best;
}

Matrix laplacian(const WeightedGraph& g) {
  const Matrix& a = g.weights();
  Matrix l = -a;
  l.diagonal() = a.rowwise().sum();
  return l;
}

Matrix generalized_laplacian(const WeightedGraph& g, const Matrix& b) {
  if (b.rows() != g.size() || b.cols() != g.size()) {
    throw ValidationError("generalized_laplacian: B is " + std::to_string(b.rows()) + "x" +
                          std::to_string(b.cols()) + ", graph has n=" + std::to_string(g.size()));
  }
  Matrix ab = g.weights().cwiseProduct(b);
  Matrix l = -ab;
  l.diagonal() = ab.rowwise().sum();
  return l;
}

Matrix centering_matrix(int n) {
  if (n < 1) throw ValidationError("centering_matrix: n must be positive");
  return Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n);
}

double rho(const Matrix& b) {
  require_square(b, "rho");
  return std::sqrt(b.squaredNorm() - b.diagonal().squaredNorm());
}

Matrix union_laplacian(const GraphFamily& family, std::span<const Mode> subset) {
  if (subset.empty()) throw ValidationError("union_laplacian: empty mode subset");
  Matrix sum = Matrix::Zero(family.size(), family.size());
  for (Mode m : subset) sum += laplacian(family.at(m));
  return sum;
}

bool is_connected(const WeightedGraph& g) {
  DisjointSets sets(g.size());
  for (const auto& e : g.edges()) sets.unite(e.i, e.j);
  return sets.components() == 1;
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double sigma_min_positive(const Matrix& m) {
  require_square(m, "sigma_min_positive");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
    throw ValidationError("sigma_min_positive: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  const Vector& ev = solver.eigenvalues();
  const double norm = ev.cwiseAbs().maxCoeff();
  const double tol = kRankTol * std::max(1.0, norm);
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (ev(k) > tol) return ev(k);
  }
  throw ValidationError("sigma_min_positive: matrix has no positive eigenvalue");
}

}  // namespace swsim
