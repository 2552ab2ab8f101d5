#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "jccra/channel.hpp"

namespace jccra {

/// Per-user serving AP sets, strongest AP first.
struct ClusterAssignment {
  std::vector<std::vector<int>> clusters;

  int num_users() const { return static_cast<int>(clusters.size()); }
  int cluster_size(int k) const { return static_cast<int>(clusters.at(k).size()); }
};

struct PowerAllocation {
  std::vector<double> eta;
  std::vector<double> p_max;
  std::vector<double> p;

  static PowerAllocation from_eta(std::vector<double> eta, double p_max);
};

/// Fractional power control p = min(p_max, p0 * lambda^-nu).
struct FpcParams {
  double p0_w = 3.1622776601683794e-7;  // -35 dBm
  double nu = 0.5;
};

/// Greedy user-centric clustering: the `cluster_size` largest beta entries of
/// every column; ties go to the lower AP index.
ClusterAssignment form_clusters(const Eigen::MatrixXd& beta, int cluster_size);

/// Instantaneous uplink SINR of user `k` with MRC over its cluster. Every
/// other user interferes, whatever its own cluster.
double sinr(int k, const NetworkRealization& net, const ClusterAssignment& clusters,
            std::span<const double> powers, double noise_w);

std::vector<double> sinr_all(const NetworkRealization& net, const ClusterAssignment& clusters,
                             std::span<const double> powers, double noise_w);

/// Shannon rate W log2(1 + gamma) in bits/s.
double uplink_rate(double gamma, double bandwidth_hz);

/// Sum of beta over user k's serving cluster.
double cluster_gain(const Eigen::MatrixXd& beta, const ClusterAssignment& clusters, int k);

double fpc_power(double lambda, const FpcParams& fpc, double p_max);

}  // namespace jccra
