#pragma once

#include <iosfwd>
#include <string>

namespace fsq {

// Physical description of one airframe + propulsion set.
// Axes: x forward (motor 1 arm), y left (motor 2 arm), z up.
// Motors 1,3 sit on the x arms and spin opposite to motors 2,4 on the y arms.
struct QuadParams {
  double M = 0.0;      // vehicle mass                            [kg]
  double l = 0.0;      // arm length, hub to motor axis           [m]
  double g = 9.80665;  // gravitational acceleration              [m/s^2]
  double Jxx = 0.0;    // body inertia about x                    [kg m^2]
  double Jyy = 0.0;    // body inertia about y                    [kg m^2]
  double Jzz = 0.0;    // body inertia about z                    [kg m^2]
  double Jxz = 0.0;    // xz product of inertia (stored, unused by the
                       // diagonal dynamics; kept for completeness) [kg m^2]
  double Jp = 0.0;     // propeller + rotor spin inertia          [kg m^2]
  double gamma = 0.0;  // aerodynamic yaw drag coefficient, tau_d = gamma*r|r| [N m s^2]
  double kf = 0.0;     // thrust coefficient,  f = kf * w^2       [N s^2]
  double kt = 0.0;     // reaction-torque coefficient, tau = kt * w^2 [N m s^2]

  // Throws ConfigError unless mass/geometry/inertia/propulsion fields are
  // strictly positive; Jp and gamma may be zero; Jxz only has to be finite.
  void validate() const;
};

// Named presets: "low_inertia" (plus-frame racer-class airframe) and
// "high_inertia" (heavier camera-rig airframe). Both carry the same
// propulsion fit (kf, kt, Jp); inertias/mass/drag differ.
QuadParams preset_params(const std::string& name);
bool is_param_preset(const std::string& name);

// key=value text, one pair per line, keys from the field names above.
// '#' starts a comment. Unknown keys and duplicates are ConfigErrors.
// Files are fragments: missing fields fall back to low_inertia, or to the
// base named by a leading preset= line, so a sysid-emitted fragment loads.
QuadParams load_params(std::istream& in);
QuadParams load_params_file(const std::string& path);  // path or preset name
std::string format_params(const QuadParams& p);

// Applies "key=value" override strings (same keys as the file format).
void apply_param_override(QuadParams& p, const std::string& key, const std::string& value);

}  // namespace fsq
