#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "isacfb/dmc.hpp"
#include "isacfb/estimator.hpp"
#include "isacfb/rng.hpp"

namespace isacfb {

// Random-coding experiment configuration. The operating rate is
// log2(msg_count)/n bits per use.
struct CodeParams {
  int n = 0;
  std::uint64_t msg_count = 0;
  InputDist input_dist;
  std::optional<double> threshold_gamma;  // bits; required by the threshold decoder
  std::uint64_t seed = 0;
  std::uint64_t symbol_cap = std::uint64_t{1} << 28;  // codebook memory cap, in symbols
};

enum class Decoder { maxinfo, threshold };

inline constexpr std::uint64_t kErasure = ~std::uint64_t{0};

struct Codebook {
  int n = 0;
  std::uint64_t msg_count = 0;
  std::vector<int> symbols;  // [m][i] row-major

  std::span<const int> row(std::uint64_t m) const {
    return {symbols.data() + m * static_cast<std::uint64_t>(n), static_cast<std::size_t>(n)};
  }
};

// msg_count * n i.i.d. symbols from the input pmf; deterministic given the
// generator state. Throws std::length_error above the symbol cap.
Codebook generate_codebook(const CodeParams& params, Rng& rng);

struct ChannelDraw {
  std::vector<int> s, y, z;
};

// per-symbol draws s_i ~ P_S, (y_i, z_i) ~ W(.,.|x_i, s_i)
ChannelDraw transmit(const StateDMC& dmc, std::span<const int> x_seq, Rng& rng);

// per-symbol decoding metric log2(P(y|x)/P_Y(y)); -inf where P(y|x)=0
struct DensityTable {
  int x_size = 0, y_size = 0;
  std::vector<double> bits;  // [x][y]

  double operator()(int x, int y) const {
    return bits[static_cast<std::size_t>(x) * y_size + y];
  }
};
DensityTable make_density_table(const InputDist& px, const MarginalChannel& pyx);

// argmax over codewords of the accumulated information density; ties break
// to the smallest message index
std::uint64_t decode_maxinfo(const Codebook& cb, std::span<const int> y_seq,
                             const DensityTable& table);

// smallest message whose accumulated density exceeds gamma, or kErasure
std::uint64_t decode_threshold(const Codebook& cb, std::span<const int> y_seq,
                               const DensityTable& table, double gamma);

// symbolwise estimate via the precomputed table
std::vector<int> estimate_states(const EstimatorTable& table, std::span<const int> x_seq,
                                 std::span<const int> z_seq);

struct SimReport {
  std::uint64_t trials = 0;
  std::uint64_t errors = 0;  // threshold erasures count as errors
  double eps_hat = 0.0;
  double eps_lo = 0.0, eps_hi = 0.0;  // 95% Wilson interval
  double distortion_hat = 0.0;
  double dist_lo = 0.0, dist_hi = 0.0;  // 95% normal interval
  double dist_stderr = 0.0;
  Decoder decoder = Decoder::maxinfo;
  std::uint64_t seed = 0;
};

struct RunOptions {
  int threads = 1;
  bool fresh_codebook = true;  // one codebook per trial (ensemble average)
};

// Runs independent trials: fresh codebook, uniform message, transmit,
// decode, estimate. Per-trial seeds derive from the master seed and trial
// index and per-trial results are reduced in index order, so the report is
// bit-identical for any thread count or schedule.
SimReport run_experiment(const StateDMC& dmc, const CodeParams& params, std::uint64_t trials,
                         Decoder decoder, RunOptions options = {});

}  // namespace isacfb
