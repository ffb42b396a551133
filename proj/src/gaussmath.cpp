#include "eims/gaussmath.hpp"

#include <cmath>
#include <stdexcept>

namespace eims::gaussmath {

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;
constexpr double kInvSqrt2 = 0.7071067811865475244008444;
constexpr double kSqrtPiOver2 = 1.2533141373155002512078826;
}  // namespace

double std_normal_pdf(double c) { return kInvSqrt2Pi * std::exp(-0.5 * c * c); }

double std_normal_cdf(double c) { return 0.5 * std::erfc(-c * kInvSqrt2); }

double std_normal_sf(double c) { return 0.5 * std::erfc(c * kInvSqrt2); }

double tau(double c) {
  if (c >= 0.0) return c * std_normal_cdf(c) + std_normal_pdf(c);
  // tau(-x) = phi(x) - x * (1 - Phi(x)) for x > 0; erfc keeps the tail exact.
  const double x = -c;
  return std_normal_pdf(x) - x * std_normal_sf(x);
}

double q_upper_bound(double c) {
  if (c <= 0.0) throw std::domain_error("q_upper_bound requires c > 0");
  return (1.0 / c) * (1.0 - std::exp(-kSqrtPiOver2 * c)) * std_normal_pdf(c);
}

}  // namespace eims::gaussmath
