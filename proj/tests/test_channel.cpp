#include <doctest.h>

#include <cmath>

#include "jccra/channel.hpp"
#include "oracles.hpp"

using namespace jccra;

namespace {

std::vector<cplx> column(const Eigen::MatrixXcd& m, int c) {
  return {m.col(c).data(), m.col(c).data() + m.rows()};
}

}  // namespace

TEST_SUITE("formula") {

TEST_CASE("hata constant for the default carrier and heights") {
  ChannelConfig cfg;
  CHECK(std::abs(hata_constant_db(cfg) - 140.715) < 0.01);
  CHECK(hata_constant_db(cfg) == doctest::Approx(oracle::hata_l(1900, 15, 1.65)).epsilon(1e-12));
}

TEST_CASE("path loss branches") {
  ChannelConfig cfg;
  const double l = hata_constant_db(cfg);
  CHECK(path_loss_db(1.0, cfg) == doctest::Approx(-l).epsilon(1e-12));
  CHECK(std::abs(path_loss_db(1.0, cfg) + 140.715) < 0.01);
  CHECK(path_loss_db(0.05, cfg) == doctest::Approx(-l + 45.536).epsilon(1e-5));
  CHECK(path_loss_db(0.01, cfg) == doctest::Approx(-l + 59.516).epsilon(1e-5));
  CHECK(path_loss_db(0.001, cfg) == doctest::Approx(-l + 59.516).epsilon(1e-5));
  for (double d : {0.002, 0.01, 0.02, 0.05, 0.07, 0.3, 1.0, 1.4}) {
    CHECK(path_loss_db(d, cfg) == doctest::Approx(oracle::path_loss(d, l, 0.01, 0.05)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(path_loss_db(0.0, cfg), InvalidInput);
  CHECK_THROWS_AS(path_loss_db(-1.0, cfg), InvalidInput);
}

TEST_CASE("path loss is continuous at both breakpoints") {
  ChannelConfig cfg;
  const double l = hata_constant_db(cfg);
  const double at_d1_far = -l - 35.0 * std::log10(cfg.d1_km);
  const double at_d1_mid = -l - 15.0 * std::log10(cfg.d1_km) - 20.0 * std::log10(cfg.d1_km);
  CHECK(std::abs(at_d1_far - at_d1_mid) < 1e-9);
  CHECK(std::abs(path_loss_db(cfg.d1_km, cfg) - at_d1_far) < 1e-9);
  CHECK(std::abs(path_loss_db(std::nextafter(cfg.d1_km, 1.0), cfg) - at_d1_far) < 1e-9);
  CHECK(std::abs(path_loss_db(cfg.d0_km, cfg) - path_loss_db(std::nextafter(cfg.d0_km, 1.0), cfg)) < 1e-9);
}

TEST_CASE("large-scale gain and shadowing") {
  ChannelConfig cfg;
  CHECK(large_scale_gain(1.0, 0.0, cfg) == doctest::Approx(8.48e-15).epsilon(1e-3));
  CHECK(large_scale_gain(1.0, 0.0, cfg) == doctest::Approx(std::pow(10.0, -14.0715)).epsilon(1e-4));
  const double near = std::pow(10.0, path_loss_db(0.005, cfg) / 10.0);
  CHECK(large_scale_gain(0.005, 2.5, cfg) == near);
  CHECK(large_scale_gain(0.005, -1.0, cfg) == near);
  const double up = large_scale_gain(1.0, 1.0, cfg);
  const double down = large_scale_gain(1.0, -1.0, cfg);
  CHECK(10.0 * std::log10(up / down) == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("noise power") {
  ChannelConfig cfg;
  CHECK(noise_power(cfg) == doctest::Approx(1.5906e-13).epsilon(1e-3));
  cfg.noise_figure_db = 0.0;
  CHECK(noise_power(cfg) == cfg.boltzmann * cfg.noise_temp_k * cfg.bandwidth_hz);
  const double base = noise_power(cfg);
  cfg.bandwidth_hz *= 2.0;
  CHECK(noise_power(cfg) == doctest::Approx(2.0 * base).epsilon(1e-15));
}

TEST_CASE("small-scale fading statistics") {
  Rng rng(7);
  const int n = 100000;
  double power = 0.0, re2 = 0.0, im2 = 0.0, reim = 0.0, re = 0.0, im = 0.0;
  for (int i = 0; i < n; ++i) {
    const cplx h = draw_small_scale(rng);
    power += std::norm(h);
    re += h.real();
    im += h.imag();
    re2 += h.real() * h.real();
    im2 += h.imag() * h.imag();
    reim += h.real() * h.imag();
  }
  power /= n;
  CHECK(power >= 0.99);
  CHECK(power <= 1.01);
  const double mr = re / n, mi = im / n;
  const double cov = reim / n - mr * mi;
  const double corr = cov / std::sqrt((re2 / n - mr * mr) * (im2 / n - mi * mi));
  CHECK(std::abs(corr) < 0.02);

  Rng a(99), b(99);
  for (int i = 0; i < 100; ++i) CHECK(draw_small_scale(a) == draw_small_scale(b));
}

TEST_CASE("noiseless LS estimation recovers the channel exactly") {
  const int users = 4, aps = 3;
  Rng rng(3);
  Eigen::MatrixXcd g(aps, users);
  for (int m = 0; m < aps; ++m)
    for (int k = 0; k < users; ++k) g(m, k) = 1e-6 * draw_small_scale(rng);
  Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(users, users);
  PilotBook book(identity);
  const Eigen::MatrixXcd y = receive_pilots(g, book, 0.1, 0.0, rng);
  for (int m = 0; m < aps; ++m) {
    const auto ym = column(y, m);
    for (int k = 0; k < users; ++k) CHECK(std::abs(ls_estimate(ym, book, k, 0.1) - g(m, k)) <= 1e-14 * std::abs(g(m, k)));
  }

  PilotBook dft(users);
  const Eigen::MatrixXcd yd = receive_pilots(g, dft, 0.1, 0.0, rng);
  for (int m = 0; m < aps; ++m) {
    const auto ym = column(yd, m);
    for (int k = 0; k < users; ++k) CHECK(std::abs(ls_estimate(ym, dft, k, 0.1) - g(m, k)) <= 1e-14 * std::abs(g(m, k)));
  }
}

TEST_CASE("orthogonal pilots isolate users") {
  PilotBook book(2);
  Rng rng(11);
  Eigen::MatrixXcd g(1, 2);
  g(0, 0) = 0.0;
  g(0, 1) = cplx(3e-5, -2e-5);
  const Eigen::MatrixXcd y = receive_pilots(g, book, 0.1, 0.0, rng);
  const auto y0 = column(y, 0);
  CHECK(std::abs(ls_estimate(y0, book, 0, 0.1)) < 1e-15 * std::abs(g(0, 1)));
  CHECK(std::abs(ls_estimate(y0, book, 1, 0.1) - g(0, 1)) < 1e-14 * std::abs(g(0, 1)));
}

TEST_CASE("LS estimation error variance") {
  const int users = 3;
  const double pp = 0.1, noise = 2e-13;
  PilotBook book(users);
  Rng rng(5);
  Eigen::MatrixXcd g(1, users);
  g << cplx(1e-6, 2e-6), cplx(-3e-6, 0.5e-6), cplx(0.0, -1e-6);
  const int trials = 10000;
  double err = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Eigen::MatrixXcd y = receive_pilots(g, book, pp, noise, rng);
    const auto y0 = column(y, 0);
    err += std::norm(ls_estimate(y0, book, 1, pp) - g(0, 1));
  }
  err /= trials;
  const double expected = noise / (users * pp);
  CHECK(err == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("network realization") {
  ChannelConfig cfg;
  cfg.num_aps = 16;
  cfg.num_users = 3;
  Rng a(42), b(42);
  const NetworkRealization x = realize_network(cfg, a);
  const NetworkRealization y = realize_network(cfg, b);
  CHECK(x.beta == y.beta);
  CHECK(x.g == y.g);
  CHECK(x.g_hat == y.g_hat);
  CHECK(x.beta.rows() == 16);
  CHECK(x.beta.cols() == 3);
  CHECK(x.beta.allFinite());
  CHECK((x.beta.array() > 0.0).all());
  for (const auto& p : x.user_positions) {
    CHECK(p.x >= 0.0);
    CHECK(p.x <= cfg.area_side_m);
  }
}

TEST_CASE("small-scale redraws average to the large-scale gain") {
  ChannelConfig cfg;
  cfg.num_aps = 4;
  cfg.num_users = 2;
  Rng rng(8);
  NetworkRealization net = realize_network(cfg, rng);
  PilotBook book(cfg.num_users);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(4, 2);
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    redraw_small_scale(net, cfg, book, rng);
    acc += net.g.cwiseAbs2();
  }
  acc /= draws;
  for (int m = 0; m < 4; ++m)
    for (int k = 0; k < 2; ++k) CHECK(acc(m, k) == doctest::Approx(net.beta(m, k)).epsilon(0.03));
}

}  // TEST_SUITE

TEST_CASE("pilot book validation") {
  Eigen::MatrixXcd bad(2, 2);
  bad << 1.0, 1.0, 0.0, 1.0;
  CHECK_THROWS_AS(PilotBook{bad}, InvalidInput);
  PilotBook dft(5);
  const Eigen::MatrixXcd gram = dft.sequences().adjoint() * dft.sequences();
  CHECK((gram - Eigen::MatrixXcd::Identity(5, 5)).norm() < 1e-12);
}

TEST_CASE("config validation") {
  ChannelConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.num_aps = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
  cfg = ChannelConfig{};
  cfg.d1_km = 0.005;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
}

TEST_CASE("refresh_large_scale reproduces beta from stored samples") {
  ChannelConfig cfg;
  cfg.num_aps = 9;
  cfg.num_users = 2;
  Rng rng(1);
  NetworkRealization net = realize_network(cfg, rng);
  const Eigen::MatrixXd keep = net.beta;
  net.beta.setZero();
  refresh_large_scale(net, cfg);
  CHECK(net.beta == keep);
}
