#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace swsim {

// Sampled functions on a grid with
//   alpha1' <= -alpha2 + alpha3 (1 + alpha1),  alpha1, alpha2, alpha3 >= 0.
// The integral of alpha3 beyond the last sample is taken to be zero.
struct GronwallInstance {
  std::vector<double> times;
  std::vector<double> alpha1;
  std::vector<double> alpha2;
  std::vector<double> alpha3;

  // Throws ValidationError if the arrays are ragged, the grid is not strictly
  // increasing, a function is negative, or the differential inequality fails
  // on some interval beyond quadrature tolerance.
  void validate() const;
};

struct GronwallResult {
  // alpha1(t) <= e^{int_s^t alpha3} (1 + alpha1(s)) - 1 for all grid s <= t.
  bool growth_ok = false;
  // int_s^end alpha2 <= beta e^beta + (1 + beta e^beta) alpha1(s), beta = int_s^end alpha3.
  bool energy_ok = false;
  double growth_margin = 0.0;   // min over pairs of rhs - lhs
  double growth_max_gap = 0.0;  // max over pairs of |rhs - lhs|
  double energy_margin = 0.0;   // min over s of rhs - lhs
};

// Both Grönwall-type conclusions at every grid point, trapezoid quadrature,
// tolerance 1e-8 * max(1, |rhs|).
GronwallResult gronwall_check(const GronwallInstance& inst);

// alpha3 = rate, alpha2 = 0, alpha1(t) = (1 + alpha1_start) e^{rate t} - 1:
// the growth bound holds with equality.
GronwallInstance gronwall_closed_form(double rate, double alpha1_start, double horizon,
                                      std::size_t samples);

// Random instance: alpha3 samples a decaying modulated exponential, alpha2
// samples about kappa(t) alpha1(t) / 2 with kappa >= 0.05; both are linear
// between samples and alpha1 is forward-integrated by RK4 against them, so the
// differential inequality holds with equality.
GronwallInstance gronwall_forward_instance(std::uint64_t seed, double horizon = 20.0,
                                           std::size_t samples = 801);

}  // namespace swsim
