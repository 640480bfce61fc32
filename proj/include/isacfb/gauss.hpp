#pragma once

namespace isacfb {

// Standard Gaussian upper-tail probability Q(x) = P[N(0,1) > x].
double q_func(double x);

// Inverse of q_func on (0,1): bracketed Newton refinement of a rational
// first guess, absolute error well below 1e-10 over the whole domain.
// Throws std::domain_error for p outside (0,1).
double q_inv(double p);

}  // namespace isacfb
