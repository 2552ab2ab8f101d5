#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "jccra/error.hpp"

namespace jccra {

using cplx = std::complex<double>;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Radio-environment parameters. Distances inside the path-loss model are in
/// km, the carrier in MHz and antenna heights in meters.
struct ChannelConfig {
  int num_aps = 100;
  int num_users = 10;
  double area_side_m = 1000.0;
  double carrier_mhz = 1900.0;
  double ap_height_m = 15.0;
  double user_height_m = 1.65;
  double shadow_std_db = 10.0;
  double d0_km = 0.01;
  double d1_km = 0.05;
  double bandwidth_hz = 5e6;
  double noise_temp_k = 290.0;
  double noise_figure_db = 9.0;
  double boltzmann = 1.381e-23;
  double pilot_power_w = 0.1;
  int coherence_steps = 1;

  void validate() const;
};

/// Radio state of one deployment. Matrices are indexed (AP, user).
struct NetworkRealization {
  std::vector<Point> ap_positions;
  std::vector<Point> user_positions;
  Eigen::MatrixXd distance_km;
  Eigen::MatrixXd shadow_z;
  Eigen::MatrixXd beta;
  Eigen::MatrixXcd h;
  Eigen::MatrixXcd g;
  Eigen::MatrixXcd g_hat;

  int num_aps() const { return static_cast<int>(beta.rows()); }
  int num_users() const { return static_cast<int>(beta.cols()); }
};

/// Orthonormal uplink pilot sequences, one column per user (tau_p = K).
class PilotBook {
 public:
  /// DFT pilots of length `num_users`.
  explicit PilotBook(int num_users);
  /// Arbitrary pilots; throws InvalidInput unless pairwise orthogonal with
  /// unit norm.
  explicit PilotBook(Eigen::MatrixXcd sequences);

  int length() const { return static_cast<int>(sequences_.rows()); }
  int count() const { return static_cast<int>(sequences_.cols()); }
  const Eigen::MatrixXcd& sequences() const { return sequences_; }

 private:
  Eigen::MatrixXcd sequences_;
};

/// Constant term of the COST-231/Hata style model (dB).
double hata_constant_db(const ChannelConfig& cfg);

/// Three-slope path loss (negative dB) at distance `d_km`.
double path_loss_db(double d_km, const ChannelConfig& cfg);

/// Linear large-scale gain; shadowing only applies beyond d1.
double large_scale_gain(double d_km, double shadow_z, const ChannelConfig& cfg);

/// One CN(0,1) draw.
cplx draw_small_scale(Rng& rng);

/// Thermal noise power in watts.
double noise_power(const ChannelConfig& cfg);

/// Received pilot block at one AP: column m of the result is y_m^p.
Eigen::MatrixXcd receive_pilots(const Eigen::MatrixXcd& g, const PilotBook& pilots,
                                double pilot_power_w, double noise_w, Rng& rng);

/// Least-squares estimate of user `k`'s channel from one AP's pilot vector.
cplx ls_estimate(std::span<const cplx> received, const PilotBook& pilots, int k,
                 double pilot_power_w);

/// Places APs and users, draws shadowing, large- and small-scale fading and
/// runs one pilot round.
NetworkRealization realize_network(const ChannelConfig& cfg, Rng& rng);

/// Recomputes beta from stored distances and shadowing samples.
void refresh_large_scale(NetworkRealization& net, const ChannelConfig& cfg);

/// Redraws h for every link, rebuilds g and re-estimates g_hat.
void redraw_small_scale(NetworkRealization& net, const ChannelConfig& cfg,
                        const PilotBook& pilots, Rng& rng);

}  // namespace jccra
