#include "tidyplan/core.hpp"

#include <cmath>

namespace tidyplan {

double Rng::gaussian(double mean, double stddev) {
  // Box-Muller; draws two uniforms every call to keep the stream position
  // independent of caller history.
  double u1 = uniform();
  double u2 = uniform();
  while (u1 <= 1e-300) u1 = uniform();
  double mag = std::sqrt(-2.0 * std::log(u1));
  return mean + stddev * mag * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace tidyplan
