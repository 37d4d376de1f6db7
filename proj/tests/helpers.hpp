#pragma once

#include <algorithm>
#include <cmath>

#include "prlab/grid.hpp"

namespace testing_util {

template <int C>
double max_diff(const prlab::Field<C>& a, const prlab::Field<C>& b) {
  return (a.values() - b.values()).abs().maxCoeff();
}

/// max|a − b| / max(max|b|, floor)
template <int C>
double rel_diff(const prlab::Field<C>& a, const prlab::Field<C>& b, double floor = 1e-300) {
  return max_diff(a, b) / std::max(b.max_abs(), floor);
}

}  // namespace testing_util
