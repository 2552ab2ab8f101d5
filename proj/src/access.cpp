#include "jccra/access.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace jccra {

PowerAllocation PowerAllocation::from_eta(std::vector<double> eta, double p_max) {
  require(p_max > 0.0, "PowerAllocation: p_max must be positive");
  PowerAllocation out;
  out.p_max.assign(eta.size(), p_max);
  out.p.resize(eta.size());
  for (std::size_t k = 0; k < eta.size(); ++k) {
    require(eta[k] >= 0.0 && eta[k] <= 1.0, "PowerAllocation: eta must lie in [0, 1]");
    out.p[k] = eta[k] * p_max;
  }
  out.eta = std::move(eta);
  return out;
}

ClusterAssignment form_clusters(const Eigen::MatrixXd& beta, int cluster_size) {
  const int M = static_cast<int>(beta.rows());
  require(cluster_size >= 1 && cluster_size <= M, "form_clusters: cluster size must be in [1, M]");
  ClusterAssignment out;
  out.clusters.resize(beta.cols());
  std::vector<int> order(M);
  for (Eigen::Index k = 0; k < beta.cols(); ++k) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return beta(a, k) > beta(b, k); });
    out.clusters[k].assign(order.begin(), order.begin() + cluster_size);
  }
  return out;
}

double sinr(int k, const NetworkRealization& net, const ClusterAssignment& clusters,
            std::span<const double> powers, double noise_w) {
  const int K = net.num_users();
  require(k >= 0 && k < K, "sinr: user index out of range");
  require(static_cast<int>(powers.size()) == K, "sinr: one power per user required");
  require(clusters.num_users() == K, "sinr: cluster assignment does not match user count");
  const auto& cluster = clusters.clusters[k];
  require(!cluster.empty(), "sinr: empty cluster");

  double signal = 0.0;
  double interference = 0.0;
  for (int j = 0; j < K; ++j) {
    cplx combined{0.0, 0.0};
    for (int m : cluster) combined += std::conj(net.g_hat(m, k)) * net.g(m, j);
    if (j == k) {
      signal = powers[j] * std::norm(combined);
    } else {
      interference += powers[j] * std::norm(combined);
    }
  }
  double estimate_energy = 0.0;
  for (int m : cluster) estimate_energy += std::norm(net.g_hat(m, k));
  const double denom = interference + noise_w * estimate_energy;
  if (signal == 0.0) return 0.0;
  return signal / denom;
}

std::vector<double> sinr_all(const NetworkRealization& net, const ClusterAssignment& clusters,
                             std::span<const double> powers, double noise_w) {
  std::vector<double> out(net.num_users());
  for (int k = 0; k < net.num_users(); ++k) out[k] = sinr(k, net, clusters, powers, noise_w);
  return out;
}

double uplink_rate(double gamma, double bandwidth_hz) {
  require(gamma >= 0.0, "uplink_rate: SINR must be non-negative");
  return bandwidth_hz * std::log2(1.0 + gamma);
}

double cluster_gain(const Eigen::MatrixXd& beta, const ClusterAssignment& clusters, int k) {
  double lambda = 0.0;
  for (int m : clusters.clusters.at(k)) lambda += beta(m, k);
  return lambda;
}

double fpc_power(double lambda, const FpcParams& fpc, double p_max) {
  require(lambda > 0.0, "fpc_power: cluster gain must be positive");
  return std::min(p_max, fpc.p0_w * std::pow(lambda, -fpc.nu));
}

}  // namespace jccra
