#pragma once

#include <string>
#include <vector>

namespace isacfb {

// pmf validity tolerance on inputs; computed results are reported to 1e-9
inline constexpr double kPmfTol = 1e-12;

// pmf over the input alphabet (the optimization variable P_X)
struct InputDist {
  std::vector<double> probs;

  // validates nonnegativity and unit sum within kPmfTol
  static InputDist make(std::vector<double> probs);
  int size() const { return static_cast<int>(probs.size()); }
};

// First three moments of the information density, all in bits:
// the mean (mutual information), the variance (dispersion) and the third
// absolute central moment that drives the Berry-Esseen correction.
struct InfoMoments {
  double mutual_info = 0.0;  // bits
  double var = 0.0;          // bits^2
  double third_abs = 0.0;    // bits^3
};

// Discrete memoryless state-dependent channel: alphabets are index sets
// {0..size-1}, the state is i.i.d. with prior P_S, the per-symbol law is
// W(y,z|x,s) and d(s,s_hat) is a bounded nonnegative distortion matrix.
// The estimate alphabet is taken equal to the state alphabet.
//
// All fields are immutable after construction; every operation on the
// channel is a pure function, safe to call concurrently.
class StateDMC {
 public:
  StateDMC(int x_size, int s_size, int z_size, int y_size,
           std::vector<double> state_prior,
           std::vector<double> kernel,       // [x][s][y][z] row-major
           std::vector<double> distortion);  // [s][s_hat] row-major

  int x_size() const { return x_size_; }
  int s_size() const { return s_size_; }
  int z_size() const { return z_size_; }
  int y_size() const { return y_size_; }

  double w(int x, int s, int y, int z) const {
    return kernel_[((static_cast<std::size_t>(x) * s_size_ + s) * y_size_ + y) * z_size_ + z];
  }
  double prior(int s) const { return state_prior_[s]; }
  double dist(int s, int s_hat) const {
    return distortion_[static_cast<std::size_t>(s) * s_size_ + s_hat];
  }

  // P_{Z|SX}(z|s,x) = sum_y W(y,z|x,s); the transmitter-side feedback law
  double feedback_prob(int x, int s, int z) const;

  // JSON channel specification: alphabet sizes, state_prior, kernel nested
  // as [x][s][y][z], distortion matrix. The loader reports the first
  // violated constraint with its indices.
  static StateDMC parse_json(const std::string& text);
  static StateDMC load_json(const std::string& path);
  std::string dump_json() const;

 private:
  int x_size_, s_size_, z_size_, y_size_;
  std::vector<double> state_prior_;
  std::vector<double> kernel_;
  std::vector<double> distortion_;

  void validate() const;
};

// conditional pmf P(y|x); column x is a pmf over y
struct MarginalChannel {
  int y_size = 0;
  int x_size = 0;
  std::vector<double> p;  // [y][x] row-major

  double operator()(int y, int x) const {
    return p[static_cast<std::size_t>(y) * x_size + x];
  }
};

// P(y|x) = sum_s P_S(s) sum_z W(y,z|x,s)
MarginalChannel marginal_channel(const StateDMC& dmc);

// P_Y(y) = sum_x P_X(x) P(y|x)
std::vector<double> output_dist(const InputDist& px, const MarginalChannel& pyx);

// log2(P(y|x)/P_Y(y)); -inf when P(y|x)=0 with P_Y(y)>0. Pairs with
// P_Y(y)=0 never occur under the joint law and are rejected.
double info_density(int x, int y, const InputDist& px, const MarginalChannel& pyx);

// Exact sums over the joint support; zero-probability terms contribute 0.
InfoMoments info_moments(const InputDist& px, const MarginalChannel& pyx);

}  // namespace isacfb
