#pragma once

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

namespace filtlab {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;
inline constexpr double kInvSqrt2 = 0.7071067811865475244008444;

inline double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

// Standard normal CDF via erfc: accurate in both tails.
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

// Fixed 128-point Gauss-Legendre rule on [a, b]. Deterministic; accuracy far
// below 1e-6 for the smooth integrands used here.
template <typename F>
double gauss_legendre(const F& f, double a, double b) {
  return boost::math::quadrature::gauss<double, 128>::integrate(f, a, b);
}

}  // namespace filtlab
