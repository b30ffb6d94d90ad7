#pragma once

#include <utility>

#include "qmetro/types.hpp"

namespace qm {

// n equally spaced points including both ends (Matlab linspace semantics).
RVector linspace(double a, double b, Index n);

// Trapezoidal rule on samples y(x).
double trapz(const RVector& x, const RVector& y);
double trapz_uniform(double h, const Eigen::Ref<const RVector>& y);

// Composite Simpson rule on a uniform grid. An even number of points is
// handled by closing the last three intervals with the 3/8 rule.
double simpson(const RVector& x, const RVector& y);

// Gauss-Legendre nodes and weights on [a, b].
std::pair<RVector, RVector> gauss_legendre(int n, double a = -1.0, double b = 1.0);

}  // namespace qm
