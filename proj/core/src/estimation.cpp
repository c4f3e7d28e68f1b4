#include "fsq/estimation.hpp"

#include <cmath>

#include "fsq/errors.hpp"
#include "fsq/frames.hpp"

namespace fsq {

double ema(double prev, double sample, double alpha) {
  return alpha * sample + (1.0 - alpha) * prev;
}

double complementary(double prev, double rate, double absolute, double dt, double tau) {
  const double alpha = tau / (tau + dt);
  return alpha * (prev + rate * dt) + (1.0 - alpha) * absolute;
}

double complementary_angle(double prev, double rate, double absolute, double dt, double tau) {
  const double alpha = tau / (tau + dt);
  const double pred = prev + rate * dt;
  const double s = alpha * std::sin(pred) + (1.0 - alpha) * std::sin(absolute);
  const double c = alpha * std::cos(pred) + (1.0 - alpha) * std::cos(absolute);
  return std::atan2(s, c);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform01(std::uint64_t h) {
  return (double)(h >> 11) * 0x1.0p-53 + 0x1.0p-54;  // open (0,1)
}

}  // namespace

double hash_gauss(std::uint64_t seed, std::uint64_t channel, std::uint64_t k) {
  const std::uint64_t base = splitmix64(seed ^ splitmix64(channel * 0x9e3779b97f4a7c15ULL));
  const double u1 = uniform01(splitmix64(base ^ (2 * k)));
  const double u2 = uniform01(splitmix64(base ^ (2 * k + 1)));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

namespace {
enum Channel : std::uint64_t {
  ch_p = 1, ch_q, ch_r, ch_phi, ch_theta, ch_psi,
  ch_x, ch_y, ch_xd, ch_yd, ch_z,
};
}

SensorSampler::SensorSampler(const NoiseConfig& noise, const SensorRates& rates,
                             std::uint64_t seed)
    : noise_(noise), rates_(rates), seed_(seed) {}

SensorFrame SensorSampler::sample(const RigidState& truth, double t) {
  held_.t = t;
  held_.fresh_imu = held_.fresh_gps = held_.fresh_ultra = false;

  if (t >= due_imu_ - 1e-9) {
    const auto k = k_imu_++;
    held_.p = truth.p + noise_.sigma_gyro * hash_gauss(seed_, ch_p, k);
    held_.q = truth.q + noise_.sigma_gyro * hash_gauss(seed_, ch_q, k);
    held_.r = truth.r + noise_.sigma_gyro * hash_gauss(seed_, ch_r, k);
    held_.phi = truth.phi + noise_.sigma_att * hash_gauss(seed_, ch_phi, k);
    held_.theta = truth.theta + noise_.sigma_att * hash_gauss(seed_, ch_theta, k);
    held_.psi = truth.psi + noise_.sigma_att * hash_gauss(seed_, ch_psi, k);
    held_.fresh_imu = true;
    due_imu_ = t + 1.0 / rates_.imu_hz;
  }
  if (t >= due_gps_ - 1e-9) {
    const auto k = k_gps_++;
    held_.x = truth.x + noise_.sigma_gps_pos * hash_gauss(seed_, ch_x, k);
    held_.y = truth.y + noise_.sigma_gps_pos * hash_gauss(seed_, ch_y, k);
    held_.xd = truth.xd + noise_.sigma_gps_vel * hash_gauss(seed_, ch_xd, k);
    held_.yd = truth.yd + noise_.sigma_gps_vel * hash_gauss(seed_, ch_yd, k);
    held_.fresh_gps = true;
    due_gps_ = t + 1.0 / rates_.gps_hz;
  }
  if (t >= due_ultra_ - 1e-9) {
    const auto k = k_ultra_++;
    held_.z = truth.z + noise_.sigma_ultra * hash_gauss(seed_, ch_z, k);
    held_.fresh_ultra = true;
    due_ultra_ = t + 1.0 / rates_.ultra_hz;
  }
  return held_;
}

StateEstimator::StateEstimator(const FilterConfig& cfg) : cfg_(cfg) {}

const RigidState& StateEstimator::update(const SensorFrame& frame, double dt) {
  if (!primed_) {
    est_ = RigidState{};
    est_.p = frame.p;
    est_.q = frame.q;
    est_.r = frame.r;
    est_.phi = frame.phi;
    est_.theta = frame.theta;
    est_.psi = frame.psi;
    est_.x = frame.x;
    est_.y = frame.y;
    est_.xd = frame.xd;
    est_.yd = frame.yd;
    est_.z = frame.z;
    est_.zd = 0;
    last_ultra_z_ = frame.z;
    last_ultra_t_ = frame.t;
    primed_ = true;
    return est_;
  }

  est_.p = ema(est_.p, frame.p, cfg_.alpha_ema);
  est_.q = ema(est_.q, frame.q, cfg_.alpha_ema);
  est_.r = ema(est_.r, frame.r, cfg_.alpha_ema);

  // Gyro prediction through the Euler kinematics; near the theta = 90 deg
  // seam the map blows up, so fall back to the absolute channel alone there.
  double phid = 0, thetad = 0, psid = 0;
  if (std::abs(std::cos(est_.theta)) > 0.02) {
    const auto er = body_to_euler_rates(est_.phi, est_.theta, est_.p, est_.q, est_.r);
    phid = er(0);
    thetad = er(1);
    psid = er(2);
  }
  est_.phi = complementary(est_.phi, phid, frame.phi, dt, cfg_.tau_complementary);
  est_.theta = complementary(est_.theta, thetad, frame.theta, dt, cfg_.tau_complementary);
  est_.psi = complementary_angle(est_.psi, psid, frame.psi, dt, cfg_.tau_complementary);

  est_.x = frame.x;
  est_.y = frame.y;
  est_.xd = frame.xd;
  est_.yd = frame.yd;
  est_.z = frame.z;
  if (frame.fresh_ultra && frame.t > last_ultra_t_ + 1e-12) {
    const double raw = (frame.z - last_ultra_z_) / (frame.t - last_ultra_t_);
    est_.zd = ema(est_.zd, raw, cfg_.alpha_zd);
    last_ultra_z_ = frame.z;
    last_ultra_t_ = frame.t;
  }
  return est_;
}

}  // namespace fsq
