#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hb {

// n-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(std::size_t n);

// Composite trapezoid of uniformly spaced samples.
double trapezoid(std::span<const double> f, double h);

// Composite trapezoid over arbitrary (sorted) abscissae.
double trapezoid(std::span<const double> x, std::span<const double> f);

}  // namespace hb
