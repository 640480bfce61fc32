#pragma once

#include <span>
#include <vector>

#include "isacfb/bounds.hpp"
#include "isacfb/estimator.hpp"

namespace isacfb {

// The multiplicative-Bernoulli binary channel Y = S*X with perfect feedback
// Z = Y, state prior Bernoulli(q) and Hamming distortion. Equivalent to a
// Z-channel: input 0 always yields 0, input 1 yields 1 with probability q.
StateDMC make_binary_channel(double q);
InputDist make_binary_input(double alpha);

// Closed forms for the binary channel at input parameter alpha = Pr[X=1].
// third_abs follows the definitional third absolute central moment of the
// information density evaluated on the Z-channel joint pmf.
struct BinaryClosedForms {
  double mutual_info = 0.0;  // H_b(q a) - a H_b(q), bits
  double var = 0.0;          // bits^2
  double third_abs = 0.0;    // bits^3
  double distortion = 0.0;   // (1-a) min(q, 1-q)
  double capacity = 0.0;     // log2(1 + q (1-q)^{(1-q)/q})
  double alpha_star = 0.0;   // 1 / (q (1 + 2^{H_b(q)/q}))
};
BinaryClosedForms binary_closed_forms(double q, double alpha);

// smallest feasible alpha under distortion budget d: max(0, 1 - d/min(q,1-q))
double binary_alpha_min(double q, double distortion_budget);

// whether an input meets the distortion budget (within 1e-12)
bool input_feasible(const StateDMC& dmc, const InputDist& px, double distortion_budget);

enum class BoundSide { achievability, converse, second_order };

struct MaxRateResult {
  bool request_feasible = false;  // budget >= d_min
  bool bound_feasible = false;    // some feasible input produced a finite value
  double rate = 0.0;              // raw optimum, may be negative
  InputDist input;
  BoundResult inner;  // K or delta actually used (second_order carries none)
};

// Maximizes the chosen bound over inputs meeting the distortion budget.
// Two-letter inputs use golden-section over the feasible alpha interval
// seeded by a 200-point grid; larger alphabets use a simplex grid of
// resolution 1/40 plus projected coordinate ascent from 50 seeded random
// starts, keeping the best. Inner K/delta optimization is delegated to the
// bounds module.
MaxRateResult max_rate(const StateDMC& dmc, long long n, double eps, double budget,
                       BoundSide side);

// One point of the rate-distortion-error tradeoff. Rates are clamped to
// >= 0 for presentation; infeasibility is carried by the flags.
struct TradeoffPoint {
  double distortion_budget = 0.0;
  long long n = 0;
  double eps = 0.0;
  double rate_ach = 0.0;
  double rate_conv = 0.0;
  double rate_second_order = 0.0;
  bool ach_feasible = false;
  bool conv_feasible = false;
  InputDist best_input_ach;
  InputDist best_input_conv;
  double k_used = 0.0;
  double delta_used = 0.0;
};

TradeoffPoint tradeoff_point(const StateDMC& dmc, long long n, double eps, double budget);

// One point per budget; the grid must be sorted ascending. Certified points
// carry forward across budgets (feasible sets are nested), so every rate
// column is nondecreasing in the budget.
std::vector<TradeoffPoint> sweep(const StateDMC& dmc, long long n, double eps,
                                 std::span<const double> d_grid);

// 60 budgets between d_min and d_trivial, denser near d_min where the
// curves bend sharply
std::vector<double> default_distortion_grid(const StateDMC& dmc);

// Precomputed ingredients of the two resource-sharing baselines. Rates are
// clamped to >= 0 (the sensing-input bound value can dip below zero at
// finite n because the K log2(n)/n penalty never vanishes).
struct SharingSummary {
  long long n = 0;
  double eps = 0.0;
  double r_max = 0.0;  // best bound value over all inputs, no distortion cap
  InputDist rmax_input;
  double d_comm = 0.0;   // expected distortion at the rate-maximizing input
  double r_sense = 0.0;  // bound value at the distortion-minimizing input
  InputDist dmin_input;
  double d_min_value = 0.0;
  double d_trivial_value = 0.0;
};
SharingSummary resource_sharing_summary(const StateDMC& dmc, long long n, double eps);

struct BaselinePoint {
  double gamma = 0.0;
  double rate = 0.0;
  double distortion = 0.0;
};

// rate (1-g) R_max, distortion g d_min + (1-g) d_trivial
BaselinePoint basic_resource_sharing(const SharingSummary& s, double gamma);
// rate g R_sense + (1-g) R_max, distortion g d_min + (1-g) D_comm
BaselinePoint improved_resource_sharing(const SharingSummary& s, double gamma);

}  // namespace isacfb
