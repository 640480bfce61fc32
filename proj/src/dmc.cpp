#include "isacfb/dmc.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace isacfb {

namespace {

void check_pmf(const std::vector<double>& p, const std::string& name) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0)) {
      std::ostringstream os;
      os << name << "[" << i << "] = " << p[i] << " is negative or non-finite";
      throw std::invalid_argument(os.str());
    }
    sum += p[i];
  }
  if (std::abs(sum - 1.0) > kPmfTol) {
    std::ostringstream os;
    os << name << " sums to " << sum << ", expected 1 within " << kPmfTol;
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

InputDist InputDist::make(std::vector<double> probs) {
  check_pmf(probs, "input_dist");
  return InputDist{std::move(probs)};
}

StateDMC::StateDMC(int x_size, int s_size, int z_size, int y_size,
                   std::vector<double> state_prior, std::vector<double> kernel,
                   std::vector<double> distortion)
    : x_size_(x_size),
      s_size_(s_size),
      z_size_(z_size),
      y_size_(y_size),
      state_prior_(std::move(state_prior)),
      kernel_(std::move(kernel)),
      distortion_(std::move(distortion)) {
  validate();
}

void StateDMC::validate() const {
  if (x_size_ < 1 || s_size_ < 1 || z_size_ < 1 || y_size_ < 1) {
    throw std::invalid_argument("alphabet sizes must be positive");
  }
  if (state_prior_.size() != static_cast<std::size_t>(s_size_)) {
    throw std::invalid_argument("state_prior length does not match s_size");
  }
  const std::size_t want_kernel = static_cast<std::size_t>(x_size_) * s_size_ * y_size_ * z_size_;
  if (kernel_.size() != want_kernel) {
    throw std::invalid_argument("kernel size does not match x_size*s_size*y_size*z_size");
  }
  if (distortion_.size() != static_cast<std::size_t>(s_size_) * s_size_) {
    throw std::invalid_argument("distortion matrix must be s_size x s_size");
  }
  check_pmf(state_prior_, "state_prior");
  for (int x = 0; x < x_size_; ++x) {
    for (int s = 0; s < s_size_; ++s) {
      double sum = 0.0;
      for (int y = 0; y < y_size_; ++y) {
        for (int z = 0; z < z_size_; ++z) {
          double v = w(x, s, y, z);
          if (!(v >= 0.0)) {
            std::ostringstream os;
            os << "kernel[" << x << "][" << s << "][" << y << "][" << z << "] = " << v
               << " is negative or non-finite";
            throw std::invalid_argument(os.str());
          }
          sum += v;
        }
      }
      if (std::abs(sum - 1.0) > kPmfTol) {
        std::ostringstream os;
        os << "kernel[" << x << "][" << s << "] sums to " << sum << ", expected 1 within "
           << kPmfTol;
        throw std::invalid_argument(os.str());
      }
    }
  }
  for (int s = 0; s < s_size_; ++s) {
    for (int t = 0; t < s_size_; ++t) {
      double v = dist(s, t);
      if (!std::isfinite(v) || v < 0.0) {
        std::ostringstream os;
        os << "distortion[" << s << "][" << t << "] = " << v << " must be finite and >= 0";
        throw std::invalid_argument(os.str());
      }
    }
  }
}

double StateDMC::feedback_prob(int x, int s, int z) const {
  double sum = 0.0;
  for (int y = 0; y < y_size_; ++y) sum += w(x, s, y, z);
  return sum;
}

StateDMC StateDMC::parse_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  const int xs = j.at("x_size").get<int>();
  const int ss = j.at("s_size").get<int>();
  const int zs = j.at("z_size").get<int>();
  const int ys = j.at("y_size").get<int>();
  std::vector<double> prior = j.at("state_prior").get<std::vector<double>>();

  const auto& jk = j.at("kernel");
  std::vector<double> kernel;
  kernel.reserve(static_cast<std::size_t>(xs) * ss * ys * zs);
  if (static_cast<int>(jk.size()) != xs) throw std::invalid_argument("kernel outer size != x_size");
  for (int x = 0; x < xs; ++x) {
    if (static_cast<int>(jk[x].size()) != ss)
      throw std::invalid_argument("kernel[" + std::to_string(x) + "] size != s_size");
    for (int s = 0; s < ss; ++s) {
      if (static_cast<int>(jk[x][s].size()) != ys)
        throw std::invalid_argument("kernel[" + std::to_string(x) + "][" + std::to_string(s) +
                                    "] size != y_size");
      for (int y = 0; y < ys; ++y) {
        if (static_cast<int>(jk[x][s][y].size()) != zs)
          throw std::invalid_argument("kernel[" + std::to_string(x) + "][" + std::to_string(s) +
                                      "][" + std::to_string(y) + "] size != z_size");
        for (int z = 0; z < zs; ++z) kernel.push_back(jk[x][s][y][z].get<double>());
      }
    }
  }

  const auto& jd = j.at("distortion");
  std::vector<double> distortion;
  distortion.reserve(static_cast<std::size_t>(ss) * ss);
  if (static_cast<int>(jd.size()) != ss) throw std::invalid_argument("distortion rows != s_size");
  for (int s = 0; s < ss; ++s) {
    if (static_cast<int>(jd[s].size()) != ss)
      throw std::invalid_argument("distortion[" + std::to_string(s) + "] columns != s_size");
    for (int t = 0; t < ss; ++t) distortion.push_back(jd[s][t].get<double>());
  }

  return StateDMC(xs, ss, zs, ys, std::move(prior), std::move(kernel), std::move(distortion));
}

StateDMC StateDMC::load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open channel file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_json(os.str());
}

std::string StateDMC::dump_json() const {
  nlohmann::ordered_json j;
  j["x_size"] = x_size_;
  j["s_size"] = s_size_;
  j["z_size"] = z_size_;
  j["y_size"] = y_size_;
  j["state_prior"] = state_prior_;
  nlohmann::ordered_json jk = nlohmann::ordered_json::array();
  for (int x = 0; x < x_size_; ++x) {
    nlohmann::ordered_json js = nlohmann::ordered_json::array();
    for (int s = 0; s < s_size_; ++s) {
      nlohmann::ordered_json jy = nlohmann::ordered_json::array();
      for (int y = 0; y < y_size_; ++y) {
        nlohmann::ordered_json jz = nlohmann::ordered_json::array();
        for (int z = 0; z < z_size_; ++z) jz.push_back(w(x, s, y, z));
        jy.push_back(std::move(jz));
      }
      js.push_back(std::move(jy));
    }
    jk.push_back(std::move(js));
  }
  j["kernel"] = std::move(jk);
  nlohmann::ordered_json jd = nlohmann::ordered_json::array();
  for (int s = 0; s < s_size_; ++s) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (int t = 0; t < s_size_; ++t) row.push_back(dist(s, t));
    jd.push_back(std::move(row));
  }
  j["distortion"] = std::move(jd);
  return j.dump(2);
}

MarginalChannel marginal_channel(const StateDMC& dmc) {
  MarginalChannel m;
  m.y_size = dmc.y_size();
  m.x_size = dmc.x_size();
  m.p.assign(static_cast<std::size_t>(m.y_size) * m.x_size, 0.0);
  for (int x = 0; x < dmc.x_size(); ++x) {
    for (int s = 0; s < dmc.s_size(); ++s) {
      const double ps = dmc.prior(s);
      if (ps == 0.0) continue;
      for (int y = 0; y < dmc.y_size(); ++y) {
        double sum_z = 0.0;
        for (int z = 0; z < dmc.z_size(); ++z) sum_z += dmc.w(x, s, y, z);
        m.p[static_cast<std::size_t>(y) * m.x_size + x] += ps * sum_z;
      }
    }
  }
  return m;
}

std::vector<double> output_dist(const InputDist& px, const MarginalChannel& pyx) {
  if (px.size() != pyx.x_size) {
    throw std::invalid_argument("output_dist: input dimension does not match channel");
  }
  std::vector<double> py(pyx.y_size, 0.0);
  for (int y = 0; y < pyx.y_size; ++y) {
    double acc = 0.0;
    for (int x = 0; x < pyx.x_size; ++x) acc += px.probs[x] * pyx(y, x);
    py[y] = acc;
  }
  return py;
}

double info_density(int x, int y, const InputDist& px, const MarginalChannel& pyx) {
  const std::vector<double> py = output_dist(px, pyx);
  if (!(py[y] > 0.0)) {
    throw std::domain_error("info_density: output symbol has zero probability under P_Y");
  }
  const double cond = pyx(y, x);
  if (cond == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log2(cond / py[y]);
}

InfoMoments info_moments(const InputDist& px, const MarginalChannel& pyx) {
  const std::vector<double> py = output_dist(px, pyx);
  // joint support with its density values; two passes keep the central
  // moments numerically exact
  std::vector<std::pair<double, double>> support;  // (joint prob, density)
  support.reserve(static_cast<std::size_t>(pyx.x_size) * pyx.y_size);
  double mi = 0.0;
  for (int x = 0; x < pyx.x_size; ++x) {
    const double pxv = px.probs[x];
    if (pxv == 0.0) continue;
    for (int y = 0; y < pyx.y_size; ++y) {
      const double cond = pyx(y, x);
      if (cond == 0.0) continue;
      const double joint = pxv * cond;
      if (joint == 0.0) continue;
      const double dens = std::log2(cond / py[y]);  // py[y] >= joint > 0 here
      mi += joint * dens;
      support.emplace_back(joint, dens);
    }
  }
  InfoMoments m;
  m.mutual_info = mi;
  double var = 0.0, third = 0.0;
  for (const auto& [joint, dens] : support) {
    const double c = dens - mi;
    var += joint * c * c;
    third += joint * std::abs(c * c * c);
  }
  m.var = var;
  m.third_abs = third;
  return m;
}

}  // namespace isacfb
