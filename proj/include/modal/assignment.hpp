// assignment.hpp — optimal assignment on a dense benefit matrix (Kuhn–Munkres
// via shortest augmenting paths). Used for label matching across time steps
// and for composite-to-product pairing; sizes here are tiny (<= 64).
#pragma once

#include <Eigen/Dense>

#include <vector>

namespace modal {

// Maximize sum_i benefit(i, assign[i]) over injective assignments of rows to
// columns. Rectangular inputs are padded internally; rows left unmatched (only
// possible when rows > cols) get -1.
std::vector<int> max_benefit_assignment(const Eigen::MatrixXd& benefit);

}  // namespace modal
