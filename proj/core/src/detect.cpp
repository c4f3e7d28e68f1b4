#include "fsq/detect.hpp"

#include <cmath>
#include <cstdlib>

namespace fsq {

namespace {

// One spike-table row. Channels left at none are unconstrained and match any
// observed trend; constrained channels must match exactly.
struct TableRow {
  std::array<bool, 4> motors;
  Trend p, q, r, phi, theta;
  bool constrains_p, constrains_q, constrains_r, constrains_phi, constrains_theta;
};

constexpr Trend UP = Trend::up;
constexpr Trend DN = Trend::down;
constexpr Trend XX = Trend::none;  // placeholder value for unconstrained slots

// Signs follow the mixer: pitch torque rises when motor 1 dies (q, theta up),
// roll torque drops when motor 2 dies (p, phi down), and the reaction-torque
// sum loses a + term for motors 1/3 (yaw slows) or a - term for motors 2/4
// (yaw speeds up). Opposite pairs cancel in roll/pitch and double up in yaw.
// Triples behave like the lone survivor pushing its own corner. Blank cells
// are unconstrained.
const TableRow kTable[] = {
    // motors                       p   q   r  phi theta  constrained channels
    {{true, false, false, false},  XX, UP, DN, XX, UP, false, true, true, false, true},
    {{false, true, false, false},  DN, XX, UP, DN, XX, true, false, true, true, false},
    {{false, false, true, false},  XX, DN, DN, XX, DN, false, true, true, false, true},
    {{false, false, false, true},  UP, XX, UP, UP, XX, true, false, true, true, false},
    {{true, false, true, false},   XX, XX, DN, XX, XX, false, false, true, false, false},
    {{false, true, false, true},   XX, XX, UP, XX, XX, false, false, true, false, false},
    {{false, true, true, true},    XX, DN, UP, XX, DN, false, true, true, false, true},
    {{true, false, true, true},    UP, XX, DN, UP, XX, true, false, true, true, false},
    {{true, true, false, true},    XX, UP, UP, XX, UP, false, true, true, false, true},
    {{true, true, true, false},    DN, XX, DN, DN, XX, true, false, true, true, false},
};

Trend trend_of(double delta, double thr) {
  if (delta > thr) return Trend::up;
  if (delta < -thr) return Trend::down;
  return Trend::none;
}

}  // namespace

SpikeSignature extract_signature(const DetectorConfig& cfg, double dp, double dq, double dr,
                                 double dphi, double dtheta) {
  SpikeSignature s;
  s.p = trend_of(dp, cfg.thr_rate_pq);
  s.q = trend_of(dq, cfg.thr_rate_pq);
  s.r = trend_of(dr, cfg.thr_rate_r);
  s.phi = trend_of(dphi, cfg.thr_angle);
  s.theta = trend_of(dtheta, cfg.thr_angle);
  return s;
}

FailureVerdict classify(const SpikeSignature& sig) {
  int best = 0;
  int best_count = 0;
  const TableRow* best_row = nullptr;
  for (const TableRow& row : kTable) {
    bool ok = true;
    int spec = 0;
    auto check = [&](bool constrained, Trend want, Trend got) {
      if (!constrained) return;
      ++spec;
      if (want != got) ok = false;
    };
    check(row.constrains_p, row.p, sig.p);
    check(row.constrains_q, row.q, sig.q);
    check(row.constrains_r, row.r, sig.r);
    check(row.constrains_phi, row.phi, sig.phi);
    check(row.constrains_theta, row.theta, sig.theta);
    if (!ok) continue;
    if (spec > best) {
      best = spec;
      best_count = 1;
      best_row = &row;
    } else if (spec == best) {
      ++best_count;
    }
  }
  FailureVerdict v;
  if (best_row == nullptr) return v;  // quiet signature: nothing to report
  v.confidence = best;
  if (best_count > 1) {
    v.unknown = true;
    return v;
  }
  v.motors = best_row->motors;
  return v;
}

FailureDetector::FailureDetector(const DetectorConfig& cfg) : cfg_(cfg) {}

void FailureDetector::push(double t, double p, double q, double r, double phi, double theta) {
  buf_.push_back({t, p, q, r, phi, theta});
  while (!buf_.empty() && buf_.front().t < t - cfg_.window - 1e-9) buf_.pop_front();
  last_t_ = t;
  const FailureVerdict v = classify(signature());
  if (!v.any()) {
    has_cand_ = false;
    return;
  }
  if (has_cand_ && v.unknown == cand_.unknown && v.motors == cand_.motors) {
    cand_.confidence = v.confidence;
    return;
  }
  cand_ = v;
  cand_since_ = t;
  has_cand_ = true;
}

SpikeSignature FailureDetector::signature() const {
  if (buf_.size() < 2) return SpikeSignature{};
  const Row& a = buf_.front();
  const Row& b = buf_.back();
  if (b.t - a.t < 0.95 * cfg_.window) return SpikeSignature{};
  return extract_signature(cfg_, b.p - a.p, b.q - a.q, b.r - a.r, b.phi - a.phi,
                           b.theta - a.theta);
}

FailureVerdict FailureDetector::verdict() const {
  if (!has_cand_ || last_t_ - cand_since_ < cfg_.dwell - 1e-9) return FailureVerdict{};
  return cand_;
}

std::string to_string(Trend t) {
  switch (t) {
    case Trend::up: return "up";
    case Trend::down: return "down";
    default: return "none";
  }
}

}  // namespace fsq
