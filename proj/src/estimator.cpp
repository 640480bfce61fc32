#include "isacfb/estimator.hpp"

#include <limits>

#include "json.hpp"

namespace isacfb {

namespace {

// argmin over s_hat of sum_s weight[s] d(s, s_hat), smallest index on ties
int best_estimate(const StateDMC& dmc, std::span<const double> weight) {
  int best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int cand = 0; cand < dmc.s_size(); ++cand) {
    double cost = 0.0;
    for (int s = 0; s < dmc.s_size(); ++s) cost += weight[s] * dmc.dist(s, cand);
    if (cost < best_cost) {
      best_cost = cost;
      best = cand;
    }
  }
  return best;
}

}  // namespace

EstimatorTable build_estimator(const StateDMC& dmc) {
  EstimatorTable t;
  t.x_size = dmc.x_size();
  t.z_size = dmc.z_size();
  t.s_size = dmc.s_size();
  const std::size_t pairs = static_cast<std::size_t>(t.x_size) * t.z_size;
  t.best.assign(pairs, 0);
  t.posterior.assign(pairs * t.s_size, 0.0);
  t.reachable.assign(pairs, 0);

  std::vector<double> post(t.s_size);
  for (int x = 0; x < t.x_size; ++x) {
    for (int z = 0; z < t.z_size; ++z) {
      double denom = 0.0;
      for (int s = 0; s < t.s_size; ++s) {
        post[s] = dmc.prior(s) * dmc.feedback_prob(x, s, z);
        denom += post[s];
      }
      const std::size_t idx = static_cast<std::size_t>(x) * t.z_size + z;
      if (denom > 0.0) {
        for (int s = 0; s < t.s_size; ++s) post[s] /= denom;
        t.reachable[idx] = 1;
      } else {
        // zero-probability observation: fall back to the prior
        for (int s = 0; s < t.s_size; ++s) post[s] = dmc.prior(s);
      }
      for (int s = 0; s < t.s_size; ++s) t.posterior[idx * t.s_size + s] = post[s];
      t.best[idx] = best_estimate(dmc, post);
    }
  }
  return t;
}

std::vector<double> posterior(const StateDMC& dmc, int x, int z) {
  std::vector<double> post(dmc.s_size());
  double denom = 0.0;
  for (int s = 0; s < dmc.s_size(); ++s) {
    post[s] = dmc.prior(s) * dmc.feedback_prob(x, s, z);
    denom += post[s];
  }
  if (denom > 0.0) {
    for (double& v : post) v /= denom;
  } else {
    for (int s = 0; s < dmc.s_size(); ++s) post[s] = dmc.prior(s);
  }
  return post;
}

int optimal_estimate(const StateDMC& dmc, int x, int z) {
  const std::vector<double> post = posterior(dmc, x, z);
  return best_estimate(dmc, post);
}

std::vector<double> vertex_distortions(const StateDMC& dmc) {
  const EstimatorTable t = build_estimator(dmc);
  std::vector<double> cost(dmc.x_size(), 0.0);
  for (int x = 0; x < dmc.x_size(); ++x) {
    double acc = 0.0;
    for (int s = 0; s < dmc.s_size(); ++s) {
      const double ps = dmc.prior(s);
      if (ps == 0.0) continue;
      for (int z = 0; z < dmc.z_size(); ++z) {
        acc += ps * dmc.feedback_prob(x, s, z) * dmc.dist(s, t.estimate(x, z));
      }
    }
    cost[x] = acc;
  }
  return cost;
}

double expected_distortion(const StateDMC& dmc, const InputDist& px) {
  if (px.size() != dmc.x_size()) {
    throw std::invalid_argument("expected_distortion: input dimension does not match channel");
  }
  const std::vector<double> cost = vertex_distortions(dmc);
  double acc = 0.0;
  for (int x = 0; x < dmc.x_size(); ++x) acc += px.probs[x] * cost[x];
  return acc;
}

double d_trivial(const StateDMC& dmc) {
  double best = std::numeric_limits<double>::infinity();
  for (int cand = 0; cand < dmc.s_size(); ++cand) {
    double cost = 0.0;
    for (int s = 0; s < dmc.s_size(); ++s) cost += dmc.prior(s) * dmc.dist(s, cand);
    if (cost < best) best = cost;
  }
  return best;
}

std::pair<double, InputDist> d_min(const StateDMC& dmc) {
  const std::vector<double> cost = vertex_distortions(dmc);
  int best = 0;
  for (int x = 1; x < dmc.x_size(); ++x) {
    if (cost[x] < cost[best]) best = x;
  }
  std::vector<double> probs(dmc.x_size(), 0.0);
  probs[best] = 1.0;
  return {cost[best], InputDist{std::move(probs)}};
}

std::string EstimatorTable::dump_json() const {
  nlohmann::ordered_json j;
  j["x_size"] = x_size;
  j["z_size"] = z_size;
  j["s_size"] = s_size;
  nlohmann::ordered_json jb = nlohmann::ordered_json::array();
  nlohmann::ordered_json jr = nlohmann::ordered_json::array();
  nlohmann::ordered_json jp = nlohmann::ordered_json::array();
  for (int x = 0; x < x_size; ++x) {
    nlohmann::ordered_json rb = nlohmann::ordered_json::array();
    nlohmann::ordered_json rr = nlohmann::ordered_json::array();
    nlohmann::ordered_json rp = nlohmann::ordered_json::array();
    for (int z = 0; z < z_size; ++z) {
      rb.push_back(estimate(x, z));
      rr.push_back(is_reachable(x, z));
      auto post = posterior_at(x, z);
      rp.push_back(std::vector<double>(post.begin(), post.end()));
    }
    jb.push_back(std::move(rb));
    jr.push_back(std::move(rr));
    jp.push_back(std::move(rp));
  }
  j["best"] = std::move(jb);
  j["reachable"] = std::move(jr);
  j["posterior"] = std::move(jp);
  return j.dump(2);
}

}  // namespace isacfb
