#pragma once

#include <Eigen/Dense>
#include <vector>

#include "subnyq/common.hpp"

namespace subnyq {

/// Linear array described by sensor positions in multiples of the reference
/// spacing. Positions are strictly increasing and anchored at zero, so the
/// first sensor is the phase reference.
class ArrayGeometry {
 public:
  explicit ArrayGeometry(std::vector<double> positions);

  static ArrayGeometry ula(int sensors);

  /// The 8-sensor minimum redundancy array [0,1,4,10,16,22,28,30].
  static ArrayGeometry mra8();

  int size() const { return static_cast<int>(positions_.size()); }
  const std::vector<double>& positions() const { return positions_; }
  double aperture() const { return positions_.back(); }

 private:
  std::vector<double> positions_;
};

/// Inter-sensor phase increment of a narrowband plane wave:
/// phi = pi * spacing * sin(theta) * f / f_nyquist.
double spatial_phase(double theta, double f, double f_nyquist, double spacing = 1.0);

/// a(phi): entry m is exp(j * phi * p_m). Unit modulus, reference entry 1.
Eigen::VectorXcd steering_vector(const ArrayGeometry& geom, double phi);

/// d a(phi) / d phi, entry m is j * p_m * exp(j * phi * p_m).
Eigen::VectorXcd steering_derivative(const ArrayGeometry& geom, double phi);

}  // namespace subnyq
