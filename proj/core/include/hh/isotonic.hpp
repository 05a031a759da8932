#pragma once

#include <span>
#include <vector>

namespace hh {

// Weighted least-squares projection onto non-increasing sequences (pool adjacent violators).
// Weights must be positive; zero weights are treated as 1e-300.
std::vector<double> isotonic_nonincreasing(std::span<const double> y, std::span<const double> w);
void isotonic_nonincreasing_inplace(std::span<double> y, std::span<const double> w);

}  // namespace hh
