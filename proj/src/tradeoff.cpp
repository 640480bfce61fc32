#include "isacfb/tradeoff.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "isacfb/rng.hpp"

namespace isacfb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBudgetTol = 1e-12;

double binary_entropy(double x) {
  double h = 0.0;
  if (x > 0.0) h -= x * std::log2(x);
  if (x < 1.0) h -= (1.0 - x) * std::log2(1.0 - x);
  return h;
}

double golden_max(double a, double b, const std::function<double(double)>& f, int iters,
                  double* best_x = nullptr) {
  const double ratio = 0.6180339887498949;
  double x1 = b - ratio * (b - a);
  double x2 = a + ratio * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + ratio * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - ratio * (b - a);
      f1 = f(x1);
    }
  }
  if (best_x) *best_x = f1 >= f2 ? x1 : x2;
  return std::max(f1, f2);
}

struct Objective {
  const MarginalChannel& pyx;
  long long n;
  double eps;
  BoundSide side;

  // returns the bound value for one input, -inf when infeasible
  double operator()(const InputDist& px, BoundResult* inner = nullptr) const {
    const InfoMoments m = info_moments(px, pyx);
    switch (side) {
      case BoundSide::achievability: {
        BoundResult r = optimize_k(m, n, eps);
        if (inner) *inner = r;
        return r.feasible ? r.rate : -kInf;
      }
      case BoundSide::converse: {
        BoundResult r = optimize_delta(m, n, eps);
        if (inner) *inner = r;
        return r.feasible ? r.rate : -kInf;
      }
      case BoundSide::second_order: {
        const double v = second_order_rate(m, n, eps);
        if (inner) {
          *inner = BoundResult{v, 0.0, true, BoundParams{n, eps, std::nullopt, std::nullopt}};
        }
        return v;
      }
    }
    return -kInf;
  }
};

// ---- two-letter input search -------------------------------------------

MaxRateResult max_rate_binary(const Objective& obj, const std::vector<double>& cost,
                              double budget) {
  // expected distortion (1-a) c0 + a c1 <= budget is one linear constraint,
  // so the feasible alphas form an interval
  const double c0 = cost[0], c1 = cost[1];
  double lo = 0.0, hi = 1.0;
  const double cap = budget + kBudgetTol;
  if (c1 < c0) {
    lo = std::clamp((c0 - cap) / (c0 - c1), 0.0, 1.0);
  } else if (c1 > c0) {
    hi = std::clamp((cap - c0) / (c1 - c0), 0.0, 1.0);
  }

  auto value = [&](double alpha) {
    return obj(InputDist{{1.0 - alpha, alpha}});
  };

  const int grid = 200;
  double best_a = lo;
  double best_v = -kInf;
  int best_i = 0;
  for (int i = 0; i < grid; ++i) {
    const double a = lo + (hi - lo) * static_cast<double>(i) / (grid - 1);
    const double v = value(a);
    if (v > best_v) {
      best_v = v;
      best_a = a;
      best_i = i;
    }
  }
  if (best_v > -kInf && hi > lo) {
    const double step = (hi - lo) / (grid - 1);
    const double a = best_i > 0 ? best_a - step : lo;
    const double b = best_i < grid - 1 ? best_a + step : hi;
    double refined = best_a;
    const double v = golden_max(a, b, value, 80, &refined);
    if (v >= best_v) {
      best_v = v;
      best_a = refined;
    }
  }

  MaxRateResult res;
  res.request_feasible = true;
  res.input = InputDist{{1.0 - best_a, best_a}};
  res.rate = obj(res.input, &res.inner);
  res.bound_feasible = res.rate > -kInf;
  if (!res.bound_feasible) res.rate = 0.0;
  return res;
}

// ---- general simplex search ----------------------------------------------

void enumerate_compositions(int total, int parts, std::vector<int>& cur,
                            const std::function<void(const std::vector<int>&)>& emit) {
  if (parts == 1) {
    cur.push_back(total);
    emit(cur);
    cur.pop_back();
    return;
  }
  for (int i = 0; i <= total; ++i) {
    cur.push_back(i);
    enumerate_compositions(total - i, parts - 1, cur, emit);
    cur.pop_back();
  }
}

std::size_t composition_count(int total, int parts) {
  // C(total + parts - 1, parts - 1), saturating
  std::size_t c = 1;
  for (int i = 1; i < parts; ++i) {
    c = c * (total + i) / i;
    if (c > (std::size_t{1} << 40)) return c;
  }
  return c;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// moves an infeasible start toward the cheapest vertex until the distortion
// budget holds; the constraint is linear so the blend factor is exact
bool project_feasible(std::vector<double>& p, const std::vector<double>& cost, double budget) {
  const double cap = budget + kBudgetTol;
  double ed = dot(p, cost);
  if (ed <= cap) return true;
  const int vmin =
      static_cast<int>(std::min_element(cost.begin(), cost.end()) - cost.begin());
  const double cmin = cost[vmin];
  if (cmin > cap) return false;
  const double t = (ed - cap) / (ed - cmin);  // in (0,1]
  for (std::size_t i = 0; i < p.size(); ++i) p[i] *= (1.0 - t);
  p[vmin] += t;
  return true;
}

MaxRateResult max_rate_simplex(const StateDMC& dmc, const Objective& obj,
                               const std::vector<double>& cost, double budget) {
  const int xs = dmc.x_size();
  const double cap = budget + kBudgetTol;

  double best_v = -kInf;
  std::vector<double> best_p(xs, 0.0);
  auto consider = [&](const std::vector<double>& p) {
    if (dot(p, cost) > cap) return;
    const double v = obj(InputDist{p});
    if (v > best_v) {
      best_v = v;
      best_p = p;
    }
  };

  // the cheapest vertex is always feasible for budgets >= d_min
  {
    std::vector<double> p(xs, 0.0);
    p[static_cast<int>(std::min_element(cost.begin(), cost.end()) - cost.begin())] = 1.0;
    consider(p);
  }

  int resolution = 40;
  while (resolution > 4 && composition_count(resolution, xs) > 120000) resolution /= 2;
  std::vector<int> cur;
  enumerate_compositions(resolution, xs, cur, [&](const std::vector<int>& comp) {
    std::vector<double> p(xs);
    for (int i = 0; i < xs; ++i) p[i] = static_cast<double>(comp[i]) / resolution;
    consider(p);
  });

  // coordinate ascent: exchange mass between pairs of letters; both the
  // simplex and the distortion constraint are linear in the transfer
  auto ascend = [&](std::vector<double> p) {
    double cur_v = dot(p, cost) <= cap ? obj(InputDist{p}) : -kInf;
    if (cur_v == -kInf) return;
    for (int pass = 0; pass < 50; ++pass) {
      double gain = 0.0;
      for (int i = 0; i < xs; ++i) {
        for (int j = i + 1; j < xs; ++j) {
          double t_lo = -p[i], t_hi = p[j];  // move t from j to i
          const double slope = cost[i] - cost[j];
          const double slack = cap - dot(p, cost);
          if (slope > 0.0) {
            t_hi = std::min(t_hi, slack / slope);
          } else if (slope < 0.0) {
            t_lo = std::max(t_lo, slack / slope);
          }
          if (t_hi - t_lo < 1e-12) continue;
          auto line = [&](double t) {
            std::vector<double> q = p;
            q[i] += t;
            q[j] -= t;
            return obj(InputDist{q});
          };
          double t_best = 0.0;
          const double v = golden_max(t_lo, t_hi, line, 40, &t_best);
          if (v > cur_v + 1e-13) {
            gain += v - cur_v;
            cur_v = v;
            p[i] += t_best;
            p[j] -= t_best;
          }
        }
      }
      if (gain < 1e-11) break;
    }
    if (cur_v > best_v) {
      best_v = cur_v;
      best_p = p;
    }
  };

  ascend(best_p);
  Rng rng(0x15acfb9dULL);
  for (int s = 0; s < 50; ++s) {
    std::vector<double> p(xs);
    double sum = 0.0;
    for (int i = 0; i < xs; ++i) {
      p[i] = -std::log(1.0 - rng.next_unit());
      sum += p[i];
    }
    for (double& v : p) v /= sum;
    if (!project_feasible(p, cost, budget)) continue;
    ascend(p);
  }

  MaxRateResult res;
  res.request_feasible = true;
  res.input = InputDist{best_p};
  res.rate = obj(res.input, &res.inner);
  res.bound_feasible = res.rate > -kInf;
  if (!res.bound_feasible) res.rate = 0.0;
  return res;
}

}  // namespace

StateDMC make_binary_channel(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::domain_error("binary channel: q must lie in (0,1)");
  }
  std::vector<double> kernel(16, 0.0);
  for (int x = 0; x < 2; ++x) {
    for (int s = 0; s < 2; ++s) {
      const int y = x * s;  // Y = SX, deterministic given (x,s)
      const int z = y;      // perfect feedback
      kernel[((static_cast<std::size_t>(x) * 2 + s) * 2 + y) * 2 + z] = 1.0;
    }
  }
  return StateDMC(2, 2, 2, 2, {1.0 - q, q}, std::move(kernel), {0.0, 1.0, 1.0, 0.0});
}

InputDist make_binary_input(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::domain_error("binary input: alpha must lie in [0,1]");
  }
  return InputDist{{1.0 - alpha, alpha}};
}

BinaryClosedForms binary_closed_forms(double q, double alpha) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::domain_error("binary_closed_forms: q must lie in (0,1)");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::domain_error("binary_closed_forms: alpha must lie in [0,1]");
  }
  BinaryClosedForms f;
  const double hq = binary_entropy(q);
  f.capacity = std::log2(1.0 + q * std::pow(1.0 - q, (1.0 - q) / q));
  f.alpha_star = 1.0 / (q * (1.0 + std::exp2(hq / q)));
  f.distortion = (1.0 - alpha) * std::min(q, 1.0 - q);
  if (alpha <= 0.0 || alpha >= 1.0) {
    // the information density vanishes on the whole support
    return f;
  }
  f.mutual_info = binary_entropy(q * alpha) - alpha * hq;
  // density values of the three support atoms (x,y) = (1,1), (1,0), (0,0)
  const double i11 = std::log2(1.0 / alpha);
  const double i10 = std::log2((1.0 - q) / (1.0 - q * alpha));
  const double i00 = std::log2(1.0 / (1.0 - q * alpha));
  const double p11 = alpha * q;
  const double p10 = alpha * (1.0 - q);
  const double p00 = 1.0 - alpha;
  const double mi = f.mutual_info;
  f.var = p11 * i11 * i11 + p10 * i10 * i10 + p00 * i00 * i00 - mi * mi;
  auto cube = [](double v) { return std::abs(v * v * v); };
  f.third_abs = p11 * cube(i11 - mi) + p10 * cube(i10 - mi) + p00 * cube(i00 - mi);
  return f;
}

double binary_alpha_min(double q, double distortion_budget) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::domain_error("binary_alpha_min: q must lie in (0,1)");
  }
  if (distortion_budget < 0.0) {
    throw std::domain_error("binary_alpha_min: budget must be >= 0");
  }
  return std::clamp(1.0 - distortion_budget / std::min(q, 1.0 - q), 0.0, 1.0);
}

bool input_feasible(const StateDMC& dmc, const InputDist& px, double distortion_budget) {
  if (distortion_budget < 0.0) {
    throw std::domain_error("input_feasible: budget must be >= 0");
  }
  return expected_distortion(dmc, px) <= distortion_budget + kBudgetTol;
}

MaxRateResult max_rate(const StateDMC& dmc, long long n, double eps, double budget,
                       BoundSide side) {
  if (budget < 0.0) throw std::invalid_argument("max_rate: budget must be >= 0");
  const std::vector<double> cost = vertex_distortions(dmc);
  const double dmin = *std::min_element(cost.begin(), cost.end());
  if (budget + kBudgetTol < dmin) {
    MaxRateResult res;
    res.request_feasible = false;
    res.input = InputDist{std::vector<double>(dmc.x_size(), 0.0)};
    return res;
  }
  const MarginalChannel pyx = marginal_channel(dmc);
  const Objective obj{pyx, n, eps, side};
  if (dmc.x_size() == 2) return max_rate_binary(obj, cost, budget);
  return max_rate_simplex(dmc, obj, cost, budget);
}

TradeoffPoint tradeoff_point(const StateDMC& dmc, long long n, double eps, double budget) {
  TradeoffPoint pt;
  pt.distortion_budget = budget;
  pt.n = n;
  pt.eps = eps;

  const MaxRateResult ach = max_rate(dmc, n, eps, budget, BoundSide::achievability);
  const MaxRateResult conv = max_rate(dmc, n, eps, budget, BoundSide::converse);
  const MaxRateResult second = max_rate(dmc, n, eps, budget, BoundSide::second_order);

  pt.ach_feasible = ach.request_feasible && ach.bound_feasible;
  pt.conv_feasible = conv.request_feasible && conv.bound_feasible;
  pt.rate_ach = pt.ach_feasible ? std::max(0.0, ach.rate) : 0.0;
  pt.rate_conv = pt.conv_feasible ? std::max(0.0, conv.rate) : 0.0;
  pt.rate_second_order =
      second.request_feasible && second.bound_feasible ? std::max(0.0, second.rate) : 0.0;
  pt.best_input_ach = ach.input;
  pt.best_input_conv = conv.input;
  pt.k_used = pt.ach_feasible && ach.inner.params_used.k_coeff ? *ach.inner.params_used.k_coeff : 0.0;
  pt.delta_used =
      pt.conv_feasible && conv.inner.params_used.delta ? *conv.inner.params_used.delta : 0.0;
  return pt;
}

std::vector<TradeoffPoint> sweep(const StateDMC& dmc, long long n, double eps,
                                 std::span<const double> d_grid) {
  if (!std::is_sorted(d_grid.begin(), d_grid.end())) {
    throw std::invalid_argument("sweep: distortion grid must be sorted ascending");
  }
  std::vector<TradeoffPoint> out;
  out.reserve(d_grid.size());
  for (double d : d_grid) out.push_back(tradeoff_point(dmc, n, eps, d));
  // The feasible input sets are nested in the budget, so any certified point
  // remains valid at every larger budget. Carrying the best certificate
  // forward removes sampling wobble from the input search and makes each
  // curve exactly nondecreasing.
  for (std::size_t i = 1; i < out.size(); ++i) {
    TradeoffPoint& cur = out[i];
    const TradeoffPoint& prev = out[i - 1];
    if (prev.ach_feasible && (!cur.ach_feasible || prev.rate_ach > cur.rate_ach)) {
      cur.ach_feasible = true;
      cur.rate_ach = prev.rate_ach;
      cur.best_input_ach = prev.best_input_ach;
      cur.k_used = prev.k_used;
    }
    if (prev.conv_feasible && (!cur.conv_feasible || prev.rate_conv > cur.rate_conv)) {
      cur.conv_feasible = true;
      cur.rate_conv = prev.rate_conv;
      cur.best_input_conv = prev.best_input_conv;
      cur.delta_used = prev.delta_used;
    }
    cur.rate_second_order = std::max(cur.rate_second_order, prev.rate_second_order);
  }
  return out;
}

std::vector<double> default_distortion_grid(const StateDMC& dmc) {
  const double lo = d_min(dmc).first;
  const double hi = d_trivial(dmc);
  const double span = hi - lo;
  if (span <= kBudgetTol) return {hi};
  // 20 log-spaced offsets near d_min, then 40 linear points up to d_trivial
  std::vector<double> grid;
  const double knee = 0.1 * span;
  const double start = std::min(1e-3, knee * 0.5);
  for (int i = 0; i < 20; ++i) {
    const double t = static_cast<double>(i) / 19.0;
    grid.push_back(lo + start * std::pow(knee / start, t));
  }
  for (int i = 1; i <= 40; ++i) {
    grid.push_back(lo + knee + (span - knee) * static_cast<double>(i) / 40.0);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

SharingSummary resource_sharing_summary(const StateDMC& dmc, long long n, double eps) {
  SharingSummary s;
  s.n = n;
  s.eps = eps;
  auto [dmin_value, dmin_input] = d_min(dmc);
  s.d_min_value = dmin_value;
  s.dmin_input = dmin_input;
  s.d_trivial_value = d_trivial(dmc);

  // every input meets a budget of d_trivial, so this is the unconstrained max
  const MaxRateResult unconstrained =
      max_rate(dmc, n, eps, s.d_trivial_value, BoundSide::achievability);
  s.r_max = unconstrained.bound_feasible ? std::max(0.0, unconstrained.rate) : 0.0;
  s.rmax_input = unconstrained.input;
  s.d_comm = expected_distortion(dmc, s.rmax_input);

  const InfoMoments m = info_moments(dmin_input, marginal_channel(dmc));
  const BoundResult sense = optimize_k(m, n, eps);
  s.r_sense = sense.feasible ? std::max(0.0, sense.rate) : 0.0;
  return s;
}

BaselinePoint basic_resource_sharing(const SharingSummary& s, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("resource sharing: gamma must lie in [0,1]");
  }
  BaselinePoint p;
  p.gamma = gamma;
  p.rate = (1.0 - gamma) * s.r_max;
  p.distortion = gamma * s.d_min_value + (1.0 - gamma) * s.d_trivial_value;
  return p;
}

BaselinePoint improved_resource_sharing(const SharingSummary& s, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("resource sharing: gamma must lie in [0,1]");
  }
  BaselinePoint p;
  p.gamma = gamma;
  p.rate = gamma * s.r_sense + (1.0 - gamma) * s.r_max;
  p.distortion = gamma * s.d_min_value + (1.0 - gamma) * s.d_comm;
  return p;
}

}  // namespace isacfb
