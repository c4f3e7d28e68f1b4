#pragma once

#include <cstdint>

#include "fsq/state.hpp"

namespace fsq {

// One exponential-moving-average update: alpha weights the new sample.
double ema(double prev, double sample, double alpha);

// Complementary blend of an integrated rate and an absolute measurement with
// weight alpha = tau / (tau + dt) on the gyro path.
double complementary(double prev, double rate, double absolute, double dt, double tau);

// Same blend for a wrapping angle, done in the sin/cos domain so +-pi seams
// do not tear the estimate.
double complementary_angle(double prev, double rate, double absolute, double dt, double tau);

// Constants follow the powers-of-2-of-the-loop-period tuning convention:
// tau = 2^5 loop periods, EMA weights 2^-1 and 2^-2.
struct FilterConfig {
  double tau_complementary = 32.0 / 450.0;  // attitude blend time constant [s]
  double alpha_ema = 0.5;                   // EMA weight on body rates
  double alpha_zd = 0.25;                   // EMA weight on differentiated climb rate
};

// 1-sigma levels; zeros mean a perfect sensor.
struct NoiseConfig {
  double sigma_gyro = 0.02;    // [rad/s]
  double sigma_att = 0.01;     // [rad]
  double sigma_gps_pos = 0.5;  // [m]
  double sigma_gps_vel = 0.1;  // [m/s]
  double sigma_ultra = 0.01;   // [m]
  static NoiseConfig ideal() { return {0, 0, 0, 0, 0}; }
};

struct SensorRates {
  double imu_hz = 450.0;
  double gps_hz = 10.0;
  double ultra_hz = 20.0;
};

// Snapshot of every sensor channel as the flight computer sees it: values
// hold at the last sample until that channel's next due time.
struct SensorFrame {
  double t = 0;
  double p = 0, q = 0, r = 0;           // gyro [rad/s]
  double phi = 0, theta = 0, psi = 0;   // attitude reference [rad]
  double x = 0, y = 0;                  // GPS position [m]
  double xd = 0, yd = 0;                // GPS velocity [m/s]
  double z = 0;                         // ultrasonic altitude [m]
  bool fresh_imu = false;               // channel refreshed on this call
  bool fresh_gps = false;
  bool fresh_ultra = false;
};

// Samples the true state on each channel's own clock and holds between
// samples: a channel refreshes when at least one period has elapsed since
// the time it last sampled. Noise is a pure function of (seed, channel,
// sample index), so a given seed replays bit-identically.
class SensorSampler {
 public:
  SensorSampler(const NoiseConfig& noise, const SensorRates& rates, std::uint64_t seed);
  SensorFrame sample(const RigidState& truth, double t);

 private:
  NoiseConfig noise_;
  SensorRates rates_;
  std::uint64_t seed_;
  SensorFrame held_;
  double due_imu_ = -1e300, due_gps_ = -1e300, due_ultra_ = -1e300;
  std::uint64_t k_imu_ = 0, k_gps_ = 0, k_ultra_ = 0;  // noise indices
};

// Gaussian draw used by the sampler; exposed for tests.
double hash_gauss(std::uint64_t seed, std::uint64_t channel, std::uint64_t k);

// Fuses sensor frames into the 12-component state estimate. Attitude blends
// integrated gyro rates (mapped through the Euler kinematics) with the
// absolute attitude channel; climb rate comes from differentiated ultrasonic
// altitude; GPS position/velocity are held as-is.
class StateEstimator {
 public:
  explicit StateEstimator(const FilterConfig& cfg);
  const RigidState& update(const SensorFrame& frame, double dt);
  const RigidState& state() const { return est_; }

 private:
  FilterConfig cfg_;
  RigidState est_{};
  bool primed_ = false;
  double last_ultra_z_ = 0;
  double last_ultra_t_ = 0;
};

}  // namespace fsq
