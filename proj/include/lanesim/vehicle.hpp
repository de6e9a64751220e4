#pragma once

namespace lanesim {

/// Kinematic bicycle state; (x, y) is the rear-axle reference point.
struct VehicleState {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // rad, counter-clockwise
  double speed = 0.5;    // m/s
  double wheelbase = 0.15;
  double steering = 0.0;  // rad, positive turns left (counter-clockwise)
};

/// Explicit Euler step; the new steering angle applies from the next step on:
/// x += v cos(psi) dt, y += v sin(psi) dt, psi += v/L tan(delta) dt, delta = cmd.
[[nodiscard]] VehicleState vehicle_step(const VehicleState& state, double steering_cmd_rad,
                                        double dt);

}  // namespace lanesim
