#pragma once

#include <array>
#include <cstddef>
#include <deque>
#include <string>

namespace fsq {

enum class Trend { none, up, down };

// Direction of the jump in each monitored channel over the lookback window.
struct SpikeSignature {
  Trend p = Trend::none;
  Trend q = Trend::none;
  Trend r = Trend::none;
  Trend phi = Trend::none;
  Trend theta = Trend::none;
};

// Which motors the signature implicates. confidence counts the channels the
// winning table row actually constrained; ambiguous signatures (two or more
// rows tie at the same specificity) come back as unknown.
struct FailureVerdict {
  std::array<bool, 4> motors{false, false, false, false};
  bool unknown = false;
  int confidence = 0;
  bool any() const { return unknown || motors[0] || motors[1] || motors[2] || motors[3]; }
};

struct DetectorConfig {
  double window = 0.1;          // lookback [s]
  double thr_rate_pq = 1.0;     // |delta p|, |delta q| spike threshold [rad/s]
  double thr_rate_r = 0.12;     // |delta r| spike threshold [rad/s]
  double thr_angle = 0.05;      // |delta phi|, |delta theta| threshold [rad]
  // A single failure builds its yaw spike last, so the signature passes
  // through pair-row lookalikes on the way; a verdict only counts once the
  // same row has matched continuously this long.
  double dwell = 0.08;          // [s]
};

// Classify window deltas into trends per channel.
SpikeSignature extract_signature(const DetectorConfig& cfg, double dp, double dq, double dr,
                                 double dphi, double dtheta);

// Match against the spike table: rows leave channels unconstrained
// (don't-care), the most specific matching row wins, ties are unknown.
FailureVerdict classify(const SpikeSignature& sig);

// Rolling-window monitor over filtered rate/attitude estimates.
class FailureDetector {
 public:
  explicit FailureDetector(const DetectorConfig& cfg);
  void push(double t, double p, double q, double r, double phi, double theta);
  // none-verdict until the buffer spans a full window.
  FailureVerdict verdict() const;
  SpikeSignature signature() const;

 private:
  DetectorConfig cfg_;
  struct Row {
    double t, p, q, r, phi, theta;
  };
  std::deque<Row> buf_;
  FailureVerdict cand_{};
  double cand_since_ = 0;
  double last_t_ = 0;
  bool has_cand_ = false;
};

std::string to_string(Trend t);

}  // namespace fsq
