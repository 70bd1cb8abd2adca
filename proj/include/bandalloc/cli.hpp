#pragma once

#include <cstddef>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "bandalloc/matrix.hpp"

namespace bandalloc::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit statuses of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitContainment = 3;

// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// "start:stop:step" (inclusive), a comma list, or a single number.
std::vector<double> parse_grid(const std::string& spec);

// "k=rate,..." with 1-based users; keys in the result are 0-based.
std::map<std::size_t, double> parse_fixed(const std::string& spec, std::size_t users);

// Rows separated by ';', entries by ','.
Matrix parse_matrix(const std::string& spec);

}  // namespace bandalloc::cli
