#include "swsim/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "swsim/gronwall.hpp"
#include "swsim/graph.hpp"
#include "swsim/switching.hpp"

namespace swsim {
namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1p-53;
}

WeightedGraph random_graph(std::mt19937_64& rng, int n) {
  Matrix w = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (uniform(rng, 0.0, 1.0) < 0.5) w(i, j) = w(j, i) = uniform(rng, 0.1, 2.0);
    }
  }
  return WeightedGraph(std::move(w));
}

Matrix random_matrix(std::mt19937_64& rng, int rows, int cols) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = uniform(rng, -1.0, 1.0);
  }
  return m;
}

std::string worst(const char* label, double value) {
  std::ostringstream s;
  s.precision(3);
  s << label << "=" << value;
  return s.str();
}

}  // namespace

std::vector<SelftestLine> lemma_selftest(std::uint64_t seed, std::size_t trials) {
  std::mt19937_64 rng(seed);
  std::vector<SelftestLine> out;

  double worst1 = 0.0;
  double worst2 = 0.0;
  double worst3 = 0.0;
  double worst4 = -std::numeric_limits<double>::infinity();
  bool ok1 = true, ok2 = true, ok3 = true, ok4 = true;
  for (std::size_t k = 0; k < trials; ++k) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const WeightedGraph g = random_graph(rng, n);
    const Matrix L = laplacian(g);
    const Matrix L0 = centering_matrix(n);
    const Matrix B = random_matrix(rng, n, n);
    const Matrix LB = generalized_laplacian(g, B);
    const double scale = std::max(1.0, spectral_norm(L));

    const double n0 = spectral_norm(L0);
    worst1 = std::max(worst1, n0 - 1.0);
    ok1 = ok1 && n0 <= 1.0 + 1e-12;

    const double e2 = std::max({(L0 * L - L).cwiseAbs().maxCoeff(),
                                (LB * L0 - LB).cwiseAbs().maxCoeff(),
                                (L0 * L0 - L0).cwiseAbs().maxCoeff()});
    const double tol2 = 1e-12 * std::max(scale, std::max(1.0, spectral_norm(LB)));
    worst2 = std::max(worst2, e2);
    ok2 = ok2 && e2 <= tol2;

    const Vector u = random_matrix(rng, n, 1);
    const Vector v = random_matrix(rng, n, 1);
    const Vector ones = Vector::Ones(n);
    const Vector lhs = (u.transpose() * generalized_laplacian(g, v * ones.transpose())).transpose();
    const Vector rhs = (v.transpose() * generalized_laplacian(g, u * ones.transpose())).transpose();
    const double e3 = (lhs - rhs).cwiseAbs().maxCoeff();
    worst3 = std::max(worst3, e3);
    ok3 = ok3 && e3 <= 1e-12 * scale;

    const double bound = std::sqrt(static_cast<double>(n)) * spectral_norm(L) * rho(B);
    const double gap = spectral_norm(LB) - bound;
    worst4 = std::max(worst4, gap);
    ok4 = ok4 && gap <= 1e-12 * std::max(1.0, bound);
  }
  out.push_back({"centering matrix norm at most 1", ok1, worst("max(norm-1)", worst1)});
  out.push_back({"centering leaves Laplacians unchanged", ok2, worst("max error", worst2)});
  out.push_back({"generalized Laplacian symmetry in u, v", ok3, worst("max error", worst3)});
  out.push_back({"generalized Laplacian norm bound", ok4, worst("max(norm-bound)", worst4)});

  const GraphFamily chain({{1, WeightedGraph::from_edges(4, std::vector<Edge>{{0, 1, 1.0}})},
                           {2, WeightedGraph::from_edges(4, std::vector<Edge>{{1, 2, 1.0}})},
                           {3, WeightedGraph::from_edges(4, std::vector<Edge>{{2, 3, 1.0}})}});
  const double pi = std::numbers::pi;
  const double tau_a = pi / 6.0;
  const EpsilonBound eps = epsilon_bound(chain, tau_a);
  const double expected = tau_a * (2.0 - std::numbers::sqrt2);
  out.push_back({"chain family epsilon", std::abs(eps.epsilon - expected) <= 1e-9,
                 worst("error", eps.epsilon - expected)});

  const SwitchSchedule sched = SwitchSchedule::section4d(pi);
  const int unit_trials = 1000;
  double min_quad = std::numeric_limits<double>::infinity();
  for (int k = 0; k < unit_trials; ++k) {
    Vector u = random_matrix(rng, 4, 1);
    u.array() -= u.mean();
    u.normalize();
    const double t = uniform(rng, 0.0, 20.0 * pi);
    Matrix integral = Matrix::Zero(4, 4);
    for (const auto& [mode, time] : occupancies(sched, t, t + pi)) {
      integral += time * laplacian(chain.at(mode));
    }
    min_quad = std::min(min_quad, u.dot(integral * u));
  }
  out.push_back({"windowed Laplacian integral bounded below by epsilon",
                 min_quad >= eps.epsilon - 1e-12, worst("min(quad-eps)", min_quad - eps.epsilon)});
  return out;
}

std::vector<SelftestLine> gronwall_selftest(std::uint64_t seed, std::size_t trials) {
  std::vector<SelftestLine> out;
  bool growth = true;
  bool energy = true;
  double growth_margin = std::numeric_limits<double>::infinity();
  double energy_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < trials; ++k) {
    const GronwallResult r = gronwall_check(gronwall_forward_instance(seed + k));
    growth = growth && r.growth_ok;
    energy = energy && r.energy_ok;
    growth_margin = std::min(growth_margin, r.growth_margin);
    energy_margin = std::min(energy_margin, r.energy_margin);
  }
  out.push_back({"growth bound on random instances", growth, worst("min margin", growth_margin)});
  out.push_back({"energy bound on random instances", energy, worst("min margin", energy_margin)});

  const GronwallResult closed = gronwall_check(gronwall_closed_form(0.3, 0.5, 10.0, 1001));
  out.push_back({"constant rate closed form equality", closed.growth_ok && closed.growth_max_gap <= 1e-8,
                 worst("max gap", closed.growth_max_gap)});
  return out;
}

bool all_passed(const std::vector<SelftestLine>& lines) {
  return std::all_of(lines.begin(), lines.end(), [](const SelftestLine& l) { return l.pass; });
}

}  // namespace swsim
