#pragma once

namespace eims::gaussmath {

/// Standard normal density.
double std_normal_pdf(double c);

/// Standard normal CDF, evaluated through erfc so the lower tail keeps
/// relative accuracy (needed down to ~1e-16 at c = -8).
double std_normal_cdf(double c);

/// Upper tail 1 - Phi(c), without the cancellation of 1 - cdf.
double std_normal_sf(double c);

/// tau(c) = c * Phi(c) + phi(c). For c < 0 the complementary form
/// phi(|c|) - |c| * (1 - Phi(|c|)) is used to avoid catastrophic
/// cancellation near the tail.
double tau(double c);

/// Upper bound on the Q-function 1 - Phi(c) for c > 0:
///   (1/c) * (1 - exp(-sqrt(pi/2) c)) * phi(c).
/// Throws std::domain_error for c <= 0.
double q_upper_bound(double c);

}  // namespace eims::gaussmath
