#include "jccra/channel.hpp"

#include <cmath>
#include <numbers>

namespace jccra {

void ChannelConfig::validate() const {
  require(num_users >= 1, "channel: num_users must be >= 1");
  require(num_aps >= num_users, "channel: num_aps must be >= num_users");
  require(area_side_m > 0.0, "channel: area_side_m must be positive");
  require(d0_km > 0.0 && d1_km > d0_km, "channel: require d1 > d0 > 0");
  require(bandwidth_hz > 0.0, "channel: bandwidth must be positive");
  require(pilot_power_w > 0.0, "channel: pilot power must be positive");
  require(noise_temp_k > 0.0 && boltzmann > 0.0, "channel: noise constants must be positive");
  require(carrier_mhz > 0.0 && ap_height_m > 0.0 && user_height_m > 0.0,
          "channel: carrier and antenna heights must be positive");
  require(shadow_std_db >= 0.0, "channel: shadow_std_db must be non-negative");
  require(coherence_steps >= 1, "channel: coherence_steps must be >= 1");
}

PilotBook::PilotBook(int num_users) {
  require(num_users >= 1, "pilots: need at least one user");
  const double scale = 1.0 / std::sqrt(static_cast<double>(num_users));
  sequences_.resize(num_users, num_users);
  for (int n = 0; n < num_users; ++n) {
    for (int k = 0; k < num_users; ++k) {
      const double phase = -2.0 * std::numbers::pi * n * k / num_users;
      sequences_(n, k) = std::polar(scale, phase);
    }
  }
}

PilotBook::PilotBook(Eigen::MatrixXcd sequences) : sequences_(std::move(sequences)) {
  require(sequences_.cols() >= 1, "pilots: empty pilot book");
  const Eigen::MatrixXcd gram = sequences_.adjoint() * sequences_;
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(gram.rows(), gram.cols());
  require((gram - eye).cwiseAbs().maxCoeff() < 1e-9,
          "pilots: sequences must be pairwise orthogonal with unit norm");
}

double hata_constant_db(const ChannelConfig& cfg) {
  const double lf = std::log10(cfg.carrier_mhz);
  return 46.3 + 33.9 * lf - 13.82 * std::log10(cfg.ap_height_m) -
         (1.1 * lf - 0.7) * cfg.user_height_m + (1.56 * lf - 0.8);
}

double path_loss_db(double d_km, const ChannelConfig& cfg) {
  require(d_km > 0.0 && std::isfinite(d_km), "path_loss_db: distance must be positive");
  const double L = hata_constant_db(cfg);
  if (d_km > cfg.d1_km) return -L - 35.0 * std::log10(d_km);
  const double d1_term = 15.0 * std::log10(cfg.d1_km);
  if (d_km > cfg.d0_km) return -L - 20.0 * std::log10(d_km) - d1_term;
  return -L - 20.0 * std::log10(cfg.d0_km) - d1_term;
}

double large_scale_gain(double d_km, double shadow_z, const ChannelConfig& cfg) {
  double db = path_loss_db(d_km, cfg);
  if (d_km > cfg.d1_km) db += cfg.shadow_std_db * shadow_z;
  return std::pow(10.0, db / 10.0);
}

cplx draw_small_scale(Rng& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

double noise_power(const ChannelConfig& cfg) {
  return cfg.boltzmann * cfg.noise_temp_k * cfg.bandwidth_hz *
         std::pow(10.0, cfg.noise_figure_db / 10.0);
}

Eigen::MatrixXcd receive_pilots(const Eigen::MatrixXcd& g, const PilotBook& pilots,
                                double pilot_power_w, double noise_w, Rng& rng) {
  require(pilots.count() == g.cols(), "receive_pilots: one pilot per user required");
  const int tau = pilots.length();
  const double amp = std::sqrt(tau * pilot_power_w);
  const double noise_amp = std::sqrt(noise_w);
  // y (tau x M) = amp * Psi * g^T + noise
  Eigen::MatrixXcd y = amp * pilots.sequences() * g.transpose();
  for (Eigen::Index m = 0; m < y.cols(); ++m) {
    for (Eigen::Index n = 0; n < y.rows(); ++n) y(n, m) += noise_amp * draw_small_scale(rng);
  }
  return y;
}

cplx ls_estimate(std::span<const cplx> received, const PilotBook& pilots, int k,
                 double pilot_power_w) {
  require(k >= 0 && k < pilots.count(), "ls_estimate: user index out of range");
  require(static_cast<int>(received.size()) == pilots.length(),
          "ls_estimate: received vector length must equal pilot length");
  require(pilot_power_w > 0.0, "ls_estimate: pilot power must be positive");
  cplx acc{0.0, 0.0};
  for (int n = 0; n < pilots.length(); ++n) acc += std::conj(pilots.sequences()(n, k)) * received[n];
  return acc / std::sqrt(pilots.length() * pilot_power_w);
}

void refresh_large_scale(NetworkRealization& net, const ChannelConfig& cfg) {
  const auto M = net.distance_km.rows();
  const auto K = net.distance_km.cols();
  net.beta.resize(M, K);
  for (Eigen::Index k = 0; k < K; ++k) {
    for (Eigen::Index m = 0; m < M; ++m) {
      net.beta(m, k) = large_scale_gain(net.distance_km(m, k), net.shadow_z(m, k), cfg);
    }
  }
}

void redraw_small_scale(NetworkRealization& net, const ChannelConfig& cfg,
                        const PilotBook& pilots, Rng& rng) {
  const auto M = net.beta.rows();
  const auto K = net.beta.cols();
  net.h.resize(M, K);
  for (Eigen::Index k = 0; k < K; ++k) {
    for (Eigen::Index m = 0; m < M; ++m) net.h(m, k) = draw_small_scale(rng);
  }
  net.g = net.beta.cwiseSqrt().cast<cplx>().cwiseProduct(net.h);

  const Eigen::MatrixXcd y = receive_pilots(net.g, pilots, cfg.pilot_power_w, noise_power(cfg), rng);
  net.g_hat.resize(M, K);
  for (Eigen::Index m = 0; m < M; ++m) {
    const Eigen::VectorXcd ym = y.col(m);
    const std::span<const cplx> view(ym.data(), static_cast<std::size_t>(ym.size()));
    for (Eigen::Index k = 0; k < K; ++k) {
      net.g_hat(m, k) = ls_estimate(view, pilots, static_cast<int>(k), cfg.pilot_power_w);
    }
  }
}

NetworkRealization realize_network(const ChannelConfig& cfg, Rng& rng) {
  cfg.validate();
  const int M = cfg.num_aps;
  const int K = cfg.num_users;
  std::uniform_real_distribution<double> coord(0.0, cfg.area_side_m);
  std::normal_distribution<double> normal(0.0, 1.0);

  NetworkRealization net;
  net.ap_positions.resize(M);
  net.user_positions.resize(K);
  for (auto& p : net.ap_positions) {
    p.x = coord(rng);
    p.y = coord(rng);
  }
  for (auto& p : net.user_positions) {
    p.x = coord(rng);
    p.y = coord(rng);
  }

  net.distance_km.resize(M, K);
  net.shadow_z.resize(M, K);
  for (int k = 0; k < K; ++k) {
    for (int m = 0; m < M; ++m) {
      const double dx = net.ap_positions[m].x - net.user_positions[k].x;
      const double dy = net.ap_positions[m].y - net.user_positions[k].y;
      // Coincident nodes fall in the flat d <= d0 region anyway.
      net.distance_km(m, k) = std::max(std::hypot(dx, dy) / 1000.0, 1e-9);
      net.shadow_z(m, k) = normal(rng);
    }
  }
  refresh_large_scale(net, cfg);
  redraw_small_scale(net, cfg, PilotBook(K), rng);
  return net;
}

}  // namespace jccra
