#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "isacfb/dmc.hpp"

namespace isacfb {

// Bayes-optimal symbolwise estimator: for every transmitter observation
// (x,z) the posterior over states and the estimate minimizing the
// posterior-expected distortion. Pairs (x,z) with zero likelihood under
// every state cannot occur; they are flagged unreachable and fall back to
// the prior and the trivial estimate. Built once, shared read-only.
struct EstimatorTable {
  int x_size = 0, z_size = 0, s_size = 0;
  std::vector<int> best;          // [x][z]
  std::vector<double> posterior;  // [x][z][s]
  std::vector<char> reachable;    // [x][z]

  int estimate(int x, int z) const { return best[static_cast<std::size_t>(x) * z_size + z]; }
  bool is_reachable(int x, int z) const {
    return reachable[static_cast<std::size_t>(x) * z_size + z] != 0;
  }
  std::span<const double> posterior_at(int x, int z) const {
    return {posterior.data() + (static_cast<std::size_t>(x) * z_size + z) * s_size,
            static_cast<std::size_t>(s_size)};
  }
  std::string dump_json() const;
};

EstimatorTable build_estimator(const StateDMC& dmc);

// P_{S|XZ}(.|x,z); returns the prior when (x,z) is unreachable
std::vector<double> posterior(const StateDMC& dmc, int x, int z);

// distortion-minimizing estimate for (x,z); ties broken by smallest index
int optimal_estimate(const StateDMC& dmc, int x, int z);

// Per-vertex expected distortion c(x) of the symbolwise estimator under the
// point-mass input at x. The estimator does not depend on P_X, so the
// expected distortion is linear in P_X with these coefficients.
std::vector<double> vertex_distortions(const StateDMC& dmc);

// sum_{x,s,z} d(s, s*(x,z)) P_X(x) P_S(s) P_{Z|XS}(z|x,s)
double expected_distortion(const StateDMC& dmc, const InputDist& px);

// best distortion achievable while ignoring the feedback entirely
double d_trivial(const StateDMC& dmc);

// Minimum of expected_distortion over all input pmfs. Linearity puts the
// minimum at a vertex, so this is exact: evaluate every point mass and keep
// the best (smallest input index on ties).
std::pair<double, InputDist> d_min(const StateDMC& dmc);

}  // namespace isacfb
