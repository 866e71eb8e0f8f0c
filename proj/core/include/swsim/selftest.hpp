#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace swsim {

struct SelftestLine {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Laplacian identities on random weighted graphs and matrices, plus the
// connectivity bound of the chain family under the dwell-time-free schedule.
std::vector<SelftestLine> lemma_selftest(std::uint64_t seed = 7, std::size_t trials = 100);

// Grönwall inequalities on forward-integrated random instances and the
// constant-rate closed form.
std::vector<SelftestLine> gronwall_selftest(std::uint64_t seed = 11, std::size_t trials = 100);

bool all_passed(const std::vector<SelftestLine>& lines);

}  // namespace swsim
