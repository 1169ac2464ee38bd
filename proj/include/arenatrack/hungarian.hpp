#pragma once

#include <vector>

namespace arenatrack {

// Minimum-cost assignment for a rows x cols matrix (row-major). Returns, per
// row, the assigned column or -1. Rectangular inputs are padded with zeros.
std::vector<int> hungarian_assign(const std::vector<double>& cost, int rows, int cols);

double assignment_cost(const std::vector<double>& cost, int cols, const std::vector<int>& assignment);

}  // namespace arenatrack
