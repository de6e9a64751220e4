#include "lanesim/vehicle.hpp"

#include <cmath>

#include "lanesim/error.hpp"

namespace lanesim {

VehicleState vehicle_step(const VehicleState& s, double steering_cmd_rad, double dt) {
  if (!(dt > 0.0)) throw InvalidInput("vehicle_step: dt must be positive");
  VehicleState n = s;
  n.x += s.speed * std::cos(s.heading) * dt;
  n.y += s.speed * std::sin(s.heading) * dt;
  n.heading += s.speed / s.wheelbase * std::tan(s.steering) * dt;
  n.steering = steering_cmd_rad;
  return n;
}

}  // namespace lanesim
