#include "isacfb/mc_sim.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "isacfb/gauss.hpp"

namespace isacfb {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_params(const CodeParams& p) {
  if (p.n < 1) throw std::invalid_argument("sim params: n must be >= 1");
  if (p.msg_count < 1) throw std::invalid_argument("sim params: msg_count must be >= 1");
  (void)InputDist::make(p.input_dist.probs);
}

// deterministic order-independent mean; trials are stored by index
double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

struct WilsonInterval {
  double lo, hi;
};

WilsonInterval wilson(std::uint64_t errors, std::uint64_t trials, double z) {
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(errors) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (phat + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace

Codebook generate_codebook(const CodeParams& params, Rng& rng) {
  check_params(params);
  const std::uint64_t total = params.msg_count * static_cast<std::uint64_t>(params.n);
  if (params.msg_count > params.symbol_cap / static_cast<std::uint64_t>(params.n)) {
    std::ostringstream os;
    os << "codebook of " << params.msg_count << " x " << params.n << " = " << total
       << " symbols exceeds the cap of " << params.symbol_cap
       << "; lower the rate, the blocklength or raise symbol_cap";
    throw std::length_error(os.str());
  }
  Codebook cb;
  cb.n = params.n;
  cb.msg_count = params.msg_count;
  cb.symbols.resize(total);
  const std::span<const double> pmf(params.input_dist.probs);
  for (auto& sym : cb.symbols) sym = rng.sample(pmf);
  return cb;
}

ChannelDraw transmit(const StateDMC& dmc, std::span<const int> x_seq, Rng& rng) {
  const int ys = dmc.y_size(), zs = dmc.z_size();
  ChannelDraw d;
  d.s.resize(x_seq.size());
  d.y.resize(x_seq.size());
  d.z.resize(x_seq.size());
  std::vector<double> prior(dmc.s_size());
  for (int s = 0; s < dmc.s_size(); ++s) prior[s] = dmc.prior(s);
  // per-(x,s) joint pmf over (y,z), flattened y*zs+z
  std::vector<double> joint(static_cast<std::size_t>(ys) * zs);
  for (std::size_t i = 0; i < x_seq.size(); ++i) {
    const int x = x_seq[i];
    if (x < 0 || x >= dmc.x_size()) throw std::out_of_range("transmit: input symbol out of range");
    const int s = rng.sample(prior);
    for (int y = 0; y < ys; ++y) {
      for (int z = 0; z < zs; ++z) joint[static_cast<std::size_t>(y) * zs + z] = dmc.w(x, s, y, z);
    }
    const int yz = rng.sample(joint);
    d.s[i] = s;
    d.y[i] = yz / zs;
    d.z[i] = yz % zs;
  }
  return d;
}

DensityTable make_density_table(const InputDist& px, const MarginalChannel& pyx) {
  const std::vector<double> py = output_dist(px, pyx);
  DensityTable t;
  t.x_size = pyx.x_size;
  t.y_size = pyx.y_size;
  t.bits.assign(static_cast<std::size_t>(t.x_size) * t.y_size, kNegInf);
  for (int x = 0; x < t.x_size; ++x) {
    for (int y = 0; y < t.y_size; ++y) {
      const double cond = pyx(y, x);
      if (cond > 0.0 && py[y] > 0.0) {
        t.bits[static_cast<std::size_t>(x) * t.y_size + y] = std::log2(cond / py[y]);
      }
    }
  }
  return t;
}

std::uint64_t decode_maxinfo(const Codebook& cb, std::span<const int> y_seq,
                             const DensityTable& table) {
  std::uint64_t best = 0;
  double best_score = kNegInf;
  for (std::uint64_t m = 0; m < cb.msg_count; ++m) {
    const int* xw = cb.symbols.data() + m * static_cast<std::uint64_t>(cb.n);
    double score = 0.0;
    for (int i = 0; i < cb.n; ++i) score += table(xw[i], y_seq[i]);
    if (score > best_score) {
      best_score = score;
      best = m;
    }
  }
  return best;
}

std::uint64_t decode_threshold(const Codebook& cb, std::span<const int> y_seq,
                               const DensityTable& table, double gamma) {
  for (std::uint64_t m = 0; m < cb.msg_count; ++m) {
    const int* xw = cb.symbols.data() + m * static_cast<std::uint64_t>(cb.n);
    double score = 0.0;
    for (int i = 0; i < cb.n; ++i) score += table(xw[i], y_seq[i]);
    if (score > gamma) return m;
  }
  return kErasure;
}

std::vector<int> estimate_states(const EstimatorTable& table, std::span<const int> x_seq,
                                 std::span<const int> z_seq) {
  if (x_seq.size() != z_seq.size()) {
    throw std::invalid_argument("estimate_states: sequence lengths differ");
  }
  std::vector<int> out(x_seq.size());
  for (std::size_t i = 0; i < x_seq.size(); ++i) out[i] = table.estimate(x_seq[i], z_seq[i]);
  return out;
}

SimReport run_experiment(const StateDMC& dmc, const CodeParams& params, std::uint64_t trials,
                         Decoder decoder, RunOptions options) {
  check_params(params);
  if (trials < 1) throw std::invalid_argument("run_experiment: trials must be >= 1");
  if (decoder == Decoder::threshold && !params.threshold_gamma) {
    throw std::invalid_argument("run_experiment: threshold decoder needs threshold_gamma");
  }
  // fail on the size cap before any work starts
  if (params.msg_count > params.symbol_cap / static_cast<std::uint64_t>(params.n)) {
    Rng probe(params.seed);
    (void)generate_codebook(params, probe);  // throws with the size message
  }

  const EstimatorTable est = build_estimator(dmc);
  const MarginalChannel pyx = marginal_channel(dmc);
  const DensityTable table = make_density_table(params.input_dist, pyx);
  const double gamma = params.threshold_gamma.value_or(0.0);

  std::optional<Codebook> fixed;
  if (!options.fresh_codebook) {
    std::uint64_t sm = params.seed ^ 0xc0debc0debc0deULL;
    Rng rng(splitmix64(sm));
    fixed = generate_codebook(params, rng);
  }

  std::vector<std::uint8_t> err(trials, 0);
  std::vector<double> dist(trials, 0.0);

  auto run_range = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t t = begin; t < end; ++t) {
      Rng rng = Rng::for_trial(params.seed, t);
      Codebook local;
      const Codebook* cb = fixed ? &*fixed : &local;
      if (!fixed) local = generate_codebook(params, rng);
      const std::uint64_t msg = rng.next_below(params.msg_count);
      const ChannelDraw draw = transmit(dmc, cb->row(msg), rng);
      std::uint64_t decoded;
      if (decoder == Decoder::maxinfo) {
        decoded = decode_maxinfo(*cb, draw.y, table);
      } else {
        decoded = decode_threshold(*cb, draw.y, table, gamma);
      }
      err[t] = decoded != msg ? 1 : 0;
      const std::vector<int> s_hat = estimate_states(est, cb->row(msg), draw.z);
      double acc = 0.0;
      for (int i = 0; i < params.n; ++i) acc += dmc.dist(draw.s[i], s_hat[i]);
      dist[t] = acc / params.n;
    }
  };

  const int threads = std::max(1, options.threads);
  if (threads == 1 || trials < 2 * static_cast<std::uint64_t>(threads)) {
    run_range(0, trials);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (trials + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
      const std::uint64_t begin = chunk * w;
      const std::uint64_t end = std::min(trials, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(run_range, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  SimReport rep;
  rep.trials = trials;
  rep.decoder = decoder;
  rep.seed = params.seed;
  std::uint64_t errors = 0;
  for (auto e : err) errors += e;
  rep.errors = errors;
  rep.eps_hat = static_cast<double>(errors) / static_cast<double>(trials);

  const double z95 = q_inv(0.025);
  const WilsonInterval wi = wilson(errors, trials, z95);
  rep.eps_lo = wi.lo;
  rep.eps_hi = wi.hi;

  rep.distortion_hat = pairwise_sum(dist) / static_cast<double>(trials);
  double ss = 0.0;
  if (trials > 1) {
    std::vector<double> sq(trials);
    for (std::uint64_t t = 0; t < trials; ++t) {
      const double c = dist[t] - rep.distortion_hat;
      sq[t] = c * c;
    }
    ss = pairwise_sum(sq) / static_cast<double>(trials - 1);
  }
  rep.dist_stderr = std::sqrt(ss / static_cast<double>(trials));
  rep.dist_lo = rep.distortion_hat - z95 * rep.dist_stderr;
  rep.dist_hi = rep.distortion_hat + z95 * rep.dist_stderr;
  return rep;
}

}  // namespace isacfb
