#pragma once

#include <optional>

#include "isacfb/dmc.hpp"

namespace isacfb {

// Parameters of a finite-blocklength bound evaluation. All rates are in
// bits per channel use and every logarithm in the bound formulas is base-2.
struct BoundParams {
  long long n = 0;                // blocklength, >= 1
  double eps = 0.0;               // target error, in (0,1)
  std::optional<double> k_coeff;  // K > 0 in the achievability bound
  std::optional<double> delta;    // delta > 0 in the converse bound
};

struct BoundResult {
  double rate = 0.0;      // meaningful only when feasible; may be negative
  double beta = 0.0;      // the beta_u or beta_l actually used
  bool feasible = false;  // false exactly when the Q^{-1} argument left (0,1)
  BoundParams params_used;
};

// Achievability: rate <= I - sqrt(V/n) Q^{-1}(eps - beta_u) - K log2(n)/n
// with beta_u = n^{-K} + 0.7975 T / sqrt(n V^3). Requires k_coeff.
// Degenerate V=0 with T=0 drops both the dispersion and the Berry-Esseen
// terms; V=0 with T>0 cannot arise from a real pmf and reports infeasible.
BoundResult achievability_rate(const InfoMoments& m, const BoundParams& p);

// Maximizes achievability_rate over K > 0: 40-point log-spaced scan of
// [0.01, 20] followed by golden-section refinement around the best point.
BoundResult optimize_k(const InfoMoments& m, long long n, double eps);

// Converse: rate >= I - sqrt(V/n) Q^{-1}(eps + beta_l) + log2(n)/(2n)
//           - log2(delta)/n
// with beta_l = 0.7975 T / sqrt(n V^3) + delta/sqrt(n). Requires delta.
BoundResult converse_rate(const InfoMoments& m, const BoundParams& p);

// Tightest converse over delta > 0. The bound above is valid for every
// delta, so the binding value is the minimum; it is found by a 40-point
// scan of log(delta) in [-40, 5] plus golden-section on the exponent. Only
// interior minima in the dispersed regime (eps + beta_l well below 1/2)
// count: when the Berry-Esseen term eats the regime, the delta window
// pinches and the bound degenerates, which is reported as infeasible.
BoundResult optimize_delta(const InfoMoments& m, long long n, double eps);

// Second-order approximation I - sqrt(V/n) Q^{-1}(eps); the O(log n / n)
// residual between this and the two bounds above is deliberately dropped.
double second_order_rate(const InfoMoments& m, long long n, double eps);

}  // namespace isacfb
