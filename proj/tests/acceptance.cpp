// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances and thresholds are pinned in code, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "isacfb/bounds.hpp"
#include "isacfb/cli_app.hpp"
#include "isacfb/mc_sim.hpp"
#include "isacfb/tradeoff.hpp"

using namespace isacfb;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << "  FAILED: " << what << "\n";
    }
  }
  void note(const std::string& what) { detail << "  " << what << "\n"; }
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// AC-1: closed-form capacity anchor at q = 0.4
void ac1(Check& c) {
  const BinaryClosedForms cf = binary_closed_forms(0.4, 0.5);
  const double d_comm = binary_closed_forms(0.4, cf.alpha_star).distortion;
  c.note("capacity = " + fmt(cf.capacity) + ", d_comm = " + fmt(d_comm) +
         ", alpha_star = " + fmt(cf.alpha_star));
  c.require(std::abs(cf.capacity - 0.246) < 5e-4, "capacity within 5e-4 of 0.246");
  c.require(std::abs(d_comm - 0.2432) < 5e-4, "d_comm within 5e-4 of 0.2432");
}

// AC-2: closed forms agree with the generic moment computation
void ac2(Check& c) {
  Rng rng(0xac2);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const double q = 0.02 + 0.96 * rng.next_unit();
    const double alpha = 0.02 + 0.96 * rng.next_unit();
    const BinaryClosedForms cf = binary_closed_forms(q, alpha);
    const InfoMoments m =
        info_moments(make_binary_input(alpha), marginal_channel(make_binary_channel(q)));
    const double di = std::abs(cf.mutual_info - m.mutual_info);
    const double dv = std::abs(cf.var - m.var);
    const double dt = std::abs(cf.third_abs - m.third_abs);
    worst = std::max({worst, di, dv, dt});
    c.require(di < 1e-9, "I mismatch " + fmt(di) + " at q=" + fmt(q) + " a=" + fmt(alpha));
    c.require(dv < 1e-9, "V mismatch " + fmt(dv) + " at q=" + fmt(q) + " a=" + fmt(alpha));
    c.require(dt < 1e-9, "T mismatch " + fmt(dt) + " at q=" + fmt(q) + " a=" + fmt(alpha));
  }
  c.note("100 random (q, alpha) pairs, worst |closed - generic| = " + fmt(worst));
}

// AC-3: achievability below converse everywhere; gap O(log n / n)
void ac3(Check& c) {
  const StateDMC dmc = make_binary_channel(0.4);
  for (double d : {0.05, 0.1, 0.2, 0.3}) {
    for (long long n : {700LL, 10000LL, 1000000LL}) {
      const TradeoffPoint pt = tradeoff_point(dmc, n, 0.05, d);
      c.require(pt.ach_feasible, "achievability feasible at D=" + fmt(d) + " n=" + fmt(n));
      c.require(pt.conv_feasible, "converse feasible at D=" + fmt(d) + " n=" + fmt(n));
      c.require(pt.rate_ach <= pt.rate_conv + 1e-12,
                "ordering at D=" + fmt(d) + " n=" + fmt(n));
      if (n >= 10000) {
        const double scaled = static_cast<double>(n) * (pt.rate_conv - pt.rate_ach) /
                              std::log2(static_cast<double>(n));
        c.require(scaled <= 25.0, "gap factor " + fmt(scaled) + " at D=" + fmt(d) +
                                      " n=" + fmt(n) + " exceeds 25");
      }
    }
  }
  c.note("12 (D, n) points checked");
}

// AC-4: sweep tables are monotone in the budget and in the blocklength
void ac4(Check& c) {
  const StateDMC dmc = make_binary_channel(0.4);
  const std::vector<double> grid = default_distortion_grid(dmc);
  const std::vector<long long> ns = {700, 3000, 10000};
  std::vector<std::vector<TradeoffPoint>> tables;
  for (long long n : ns) tables.push_back(sweep(dmc, n, 0.05, grid));

  for (std::size_t t = 0; t < tables.size(); ++t) {
    for (std::size_t i = 1; i < tables[t].size(); ++i) {
      const auto& prev = tables[t][i - 1];
      const auto& cur = tables[t][i];
      c.require(cur.rate_ach >= prev.rate_ach - 1e-6,
                "rate_ach nondecreasing in D at n=" + fmt(ns[t]) + " row " + fmt(i));
      c.require(cur.rate_conv >= prev.rate_conv - 1e-6,
                "rate_conv nondecreasing in D at n=" + fmt(ns[t]) + " row " + fmt(i));
      c.require(cur.rate_second_order >= prev.rate_second_order - 1e-6,
                "second-order nondecreasing in D at n=" + fmt(ns[t]) + " row " + fmt(i));
    }
  }
  for (std::size_t t = 1; t < tables.size(); ++t) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto& small_n = tables[t - 1][i];
      const auto& large_n = tables[t][i];
      c.require(large_n.rate_ach >= small_n.rate_ach - 1e-9,
                "rate_ach nondecreasing in n at D=" + fmt(grid[i]));
      // the converse carries a +log2(n)/2n third-order term whose shrinkage
      // can outweigh the dispersion gain on near-degenerate rows; allow the
      // comparison exactly that term at the smaller blocklength
      const double third_order_allowance =
          std::log2(static_cast<double>(ns[t - 1])) / (2.0 * static_cast<double>(ns[t - 1]));
      c.require(large_n.rate_conv >= small_n.rate_conv - third_order_allowance,
                "rate_conv nondecreasing in n at D=" + fmt(grid[i]));
      c.require(large_n.rate_second_order >= small_n.rate_second_order - 1e-9,
                "second-order nondecreasing in n at D=" + fmt(grid[i]));
      if (small_n.rate_ach > 1e-9) {
        c.require(large_n.rate_ach > small_n.rate_ach,
                  "rate_ach strictly increasing in n at D=" + fmt(grid[i]));
      }
      if (small_n.rate_second_order > 1e-9) {
        c.require(large_n.rate_second_order > small_n.rate_second_order,
                  "second-order strictly increasing in n at D=" + fmt(grid[i]));
      }
    }
  }
  c.note(fmt(grid.size()) + " budgets x {700, 3000, 10000}");
}

// AC-5: Monte Carlo validation of the achievability guarantee at desk scale
void ac5(Check& c) {
  const StateDMC dmc = make_binary_channel(0.4);
  const long long n = 100;
  const double eps = 0.05, budget = 0.1;

  // the stated construction: the optimized achievability rate at n=100
  const MaxRateResult thm = max_rate(dmc, n, eps, budget, BoundSide::achievability);
  double base_rate;
  InputDist input;
  if (thm.bound_feasible && thm.rate > 0.02) {
    base_rate = thm.rate;
    input = thm.input;
    c.note("achievability bound usable at n=100, rate = " + fmt(base_rate));
  } else {
    // At n=100 the bound certifies no positive rate for any budget-feasible
    // input: the Berry-Esseen term alone exceeds eps (~0.082 at the alpha
    // floor), and only the zero-rate degenerate input escapes it. The
    // documented fallback operating point is the second-order rate under
    // the same distortion constraint.
    const MaxRateResult second = max_rate(dmc, n, eps, budget, BoundSide::second_order);
    base_rate = second.rate;
    input = second.input;
    c.note("achievability bound certifies no positive rate at n=100 (best value " +
           fmt(thm.bound_feasible ? thm.rate : 0.0) +
           "); operating at the second-order rate " + fmt(base_rate));
  }
  const double op_rate = base_rate - 0.01;
  const std::uint64_t msg_count =
      static_cast<std::uint64_t>(std::floor(std::exp2(op_rate * static_cast<double>(n))));
  c.note("operating rate " + fmt(op_rate) + " -> M = " + fmt(msg_count) +
         " at alpha = " + fmt(input.probs[1]));
  c.require(msg_count >= 2, "operating point produces at least two messages");

  const double exact = expected_distortion(dmc, input);
  for (std::uint64_t seed : {101ULL, 102ULL, 103ULL, 104ULL, 105ULL}) {
    CodeParams params;
    params.n = static_cast<int>(n);
    params.msg_count = msg_count;
    params.input_dist = input;
    params.seed = seed;
    const SimReport rep = run_experiment(dmc, params, 100000, Decoder::maxinfo, RunOptions{4, true});
    c.note("seed " + fmt(seed) + ": eps_hat = " + fmt(rep.eps_hat) + " wilson95 upper = " +
           fmt(rep.eps_hi) + ", distortion_hat = " + fmt(rep.distortion_hat) + " (exact " +
           fmt(exact) + ", stderr " + fmt(rep.dist_stderr) + ")");
    c.require(rep.eps_hi <= eps, "Wilson upper bound <= 0.05 for seed " + fmt(seed));
    c.require(std::abs(rep.distortion_hat - exact) <= 4.0 * rep.dist_stderr,
              "distortion within 4 sigma for seed " + fmt(seed));
  }

  // supplementary: at n=300 the achievability bound itself is feasible;
  // operating strictly below it must keep the ensemble error under eps
  {
    const long long n2 = 300;
    const double alpha = binary_alpha_min(0.4, budget);
    const InfoMoments m =
        info_moments(make_binary_input(alpha), marginal_channel(dmc));
    const BoundResult bound = optimize_k(m, n2, eps);
    c.require(bound.feasible, "achievability bound feasible at n=300");
    if (bound.feasible) {
      const std::uint64_t m2 = 256;  // rate 8/300 strictly below the bound
      c.require(std::log2(static_cast<double>(m2)) / static_cast<double>(n2) < bound.rate,
                "supplementary rate sits below the bound");
      for (std::uint64_t seed : {201ULL, 202ULL, 203ULL, 204ULL, 205ULL}) {
        CodeParams params;
        params.n = static_cast<int>(n2);
        params.msg_count = m2;
        params.input_dist = make_binary_input(alpha);
        params.seed = seed;
        const SimReport rep =
            run_experiment(dmc, params, 10000, Decoder::maxinfo, RunOptions{4, true});
        c.require(rep.eps_hi <= eps,
                  "supplementary n=300 Wilson upper <= 0.05 for seed " + fmt(seed));
      }
      c.note("supplementary n=300 check: bound rate " + fmt(bound.rate) +
             ", operated at 8/300 bits");
    }
  }
}

// AC-6: estimator optimality oracle on random desk-scale channels
void ac6(Check& c) {
  Rng rng(0xac6);
  int checked_pairs = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const int xs = 2 + static_cast<int>(rng.next_below(3));
    const int ss = 2 + static_cast<int>(rng.next_below(3));
    const int zs = 2 + static_cast<int>(rng.next_below(3));
    const int ys = 2 + static_cast<int>(rng.next_below(3));
    // random strictly positive kernel rows; alternate hamming and random
    // nonnegative distortion
    std::vector<double> prior(ss);
    double sum = 0.0;
    for (int s = 0; s < ss; ++s) {
      prior[s] = 0.05 + rng.next_unit();
      sum += prior[s];
    }
    for (double& v : prior) v /= sum;
    std::vector<double> kernel;
    for (int x = 0; x < xs; ++x) {
      for (int s = 0; s < ss; ++s) {
        std::vector<double> row(static_cast<std::size_t>(ys) * zs);
        double rsum = 0.0;
        for (auto& v : row) {
          v = 0.05 + rng.next_unit();
          rsum += v;
        }
        for (auto& v : row) v /= rsum;
        kernel.insert(kernel.end(), row.begin(), row.end());
      }
    }
    std::vector<double> dist(static_cast<std::size_t>(ss) * ss, 0.0);
    for (int s = 0; s < ss; ++s) {
      for (int t = 0; t < ss; ++t) {
        if (s != t) dist[static_cast<std::size_t>(s) * ss + t] =
            rep % 2 == 0 ? 1.0 : 0.1 + 1.9 * rng.next_unit();
      }
    }
    const StateDMC dmc(xs, ss, zs, ys, prior, kernel, dist);
    const EstimatorTable table = build_estimator(dmc);
    for (int x = 0; x < xs; ++x) {
      for (int z = 0; z < zs; ++z) {
        if (!table.is_reachable(x, z)) continue;
        const auto post = table.posterior_at(x, z);
        double best = 0.0;
        for (int s = 0; s < ss; ++s) best += post[s] * dmc.dist(s, table.estimate(x, z));
        for (int cand = 0; cand < ss; ++cand) {
          double cost = 0.0;
          for (int s = 0; s < ss; ++s) cost += post[s] * dmc.dist(s, cand);
          c.require(best <= cost + 1e-12, "estimator optimality at a reachable pair");
        }
        ++checked_pairs;
      }
    }
    std::vector<double> probs(xs);
    double psum = 0.0;
    for (auto& v : probs) {
      v = 0.05 + rng.next_unit();
      psum += v;
    }
    for (auto& v : probs) v /= psum;
    c.require(expected_distortion(dmc, InputDist{probs}) <= d_trivial(dmc) + 1e-12,
              "feedback estimator never worse than the trivial one");
  }
  c.note("50 channels, " + fmt(checked_pairs) + " reachable pairs checked exhaustively");
}

// AC-7: the joint curve dominates both resource-sharing baselines
void ac7(Check& c) {
  const StateDMC dmc = make_binary_channel(0.4);
  const long long n = 700;
  const double eps = 0.05;
  const SharingSummary s = resource_sharing_summary(dmc, n, eps);
  c.note("r_max = " + fmt(s.r_max) + " at alpha = " + fmt(s.rmax_input.probs[1]) +
         ", d_comm = " + fmt(s.d_comm) + ", r_sense = " + fmt(s.r_sense));

  int compared_basic = 0, compared_improved = 0;
  for (int i = 0; i <= 10; ++i) {
    const double gamma = i / 10.0;
    const BaselinePoint basic = basic_resource_sharing(s, gamma);
    const BaselinePoint improved = improved_resource_sharing(s, gamma);
    c.require(improved.rate >= basic.rate - 1e-9, "improved rate >= basic at gamma=" + fmt(gamma));
    c.require(improved.distortion <= basic.distortion + 1e-9,
              "improved distortion <= basic at gamma=" + fmt(gamma));
    for (const auto* pt : {&basic, &improved}) {
      const MaxRateResult joint =
          max_rate(dmc, n, eps, pt->distortion, BoundSide::achievability);
      const double joint_rate =
          joint.request_feasible && joint.bound_feasible ? std::max(0.0, joint.rate) : 0.0;
      if (joint_rate > 0.0 || pt->rate <= 1e-12) {
        c.require(joint_rate >= pt->rate - 1e-9,
                  "joint curve dominates at distortion " + fmt(pt->distortion) + " (gamma " +
                      fmt(gamma) + "): joint " + fmt(joint_rate) + " vs baseline " +
                      fmt(pt->rate));
        (pt == &basic ? compared_basic : compared_improved) += 1;
      }
    }
  }
  // near gamma -> 1 the baseline distortions drop below the region where the
  // finite-n achievability bound still certifies a positive rate; those
  // baseline points have no matched curve point and are skipped
  c.note("matched comparisons: basic " + fmt(compared_basic) + "/11, improved " +
         fmt(compared_improved) + "/11");
  c.require(compared_basic >= 9, "enough matched basic points");
  c.require(compared_improved >= 9, "enough matched improved points");
}

// AC-8: byte-identical outputs for identical configs, any thread count
void ac8(Check& c) {
  auto run = [&](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return std::pair<int, std::string>(code, out.str());
  };
  const std::vector<std::string> sweep_args{"sweep", "--binary-q", "0.4", "--eps", "0.05",
                                            "--n", "700", "--d-grid", "0.05:0.4:8"};
  const auto s1 = run(sweep_args);
  const auto s2 = run(sweep_args);
  c.require(s1.first == 0, "sweep exits cleanly");
  c.require(s1.second == s2.second, "sweep output is byte-identical across runs");

  auto sim_args = [](const std::string& threads) {
    return std::vector<std::string>{"simulate", "--binary-q", "0.4", "--n", "100", "--alpha",
                                    "0.75", "--msg-count", "128", "--trials", "20000", "--seed",
                                    "42", "--threads", threads};
  };
  const auto t1 = run(sim_args("1"));
  const auto t4 = run(sim_args("4"));
  const auto t4b = run(sim_args("4"));
  c.require(t1.first == 0, "simulate exits cleanly");
  c.require(t1.second == t4.second, "simulate output is identical for 1 and 4 threads");
  c.require(t4.second == t4b.second, "simulate output is byte-identical across runs");
  c.note("sweep bytes " + fmt(s1.second.size()) + ", simulate bytes " + fmt(t1.second.size()));
}

struct Criterion {
  const char* name;
  const char* summary;
  std::function<void(Check&)> fn;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"AC-1", "closed-form capacity and sensing-distortion anchors at q=0.4", ac1},
      {"AC-2", "closed forms match generic moments on 100 random (q, alpha)", ac2},
      {"AC-3", "bound ordering and O(log n / n) convergence", ac3},
      {"AC-4", "tradeoff tables monotone in budget and blocklength", ac4},
      {"AC-5", "Monte Carlo achievability validation at desk scale", ac5},
      {"AC-6", "estimator optimality oracle on 50 random channels", ac6},
      {"AC-7", "joint curve dominates the resource-sharing baselines", ac7},
      {"AC-8", "deterministic outputs under replay and parallelism", ac8},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    criterion.fn(check);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s (%.2f s): %s\n", criterion.name, check.ok ? "PASS" : "FAIL", secs,
                criterion.summary);
    std::fputs(check.detail.str().c_str(), stdout);
    if (!check.ok) ++failures;
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
