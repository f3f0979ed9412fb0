#include "subnyq/array.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace subnyq {

ArrayGeometry::ArrayGeometry(std::vector<double> positions)
    : positions_(std::move(positions)) {
  if (positions_.size() < 2) {
    throw std::invalid_argument("ArrayGeometry: need at least two sensors");
  }
  if (positions_.front() != 0.0) {
    throw std::invalid_argument("ArrayGeometry: first position must be 0");
  }
  for (std::size_t i = 1; i < positions_.size(); ++i) {
    if (!(positions_[i] > positions_[i - 1])) {
      throw std::invalid_argument("ArrayGeometry: positions must be strictly increasing");
    }
  }
}

ArrayGeometry ArrayGeometry::ula(int sensors) {
  if (sensors < 2) throw std::invalid_argument("ula: need at least two sensors");
  std::vector<double> p(static_cast<std::size_t>(sensors));
  std::iota(p.begin(), p.end(), 0.0);
  return ArrayGeometry(std::move(p));
}

ArrayGeometry ArrayGeometry::mra8() {
  return ArrayGeometry({0, 1, 4, 10, 16, 22, 28, 30});
}

double spatial_phase(double theta, double f, double f_nyquist, double spacing) {
  if (!(f_nyquist > 0.0)) {
    throw std::invalid_argument("spatial_phase: f_nyquist must be positive");
  }
  return kPi * spacing * std::sin(theta) * f / f_nyquist;
}

Eigen::VectorXcd steering_vector(const ArrayGeometry& geom, double phi) {
  Eigen::VectorXcd a(geom.size());
  for (int m = 0; m < geom.size(); ++m) {
    a(m) = std::polar(1.0, phi * geom.positions()[static_cast<std::size_t>(m)]);
  }
  return a;
}

Eigen::VectorXcd steering_derivative(const ArrayGeometry& geom, double phi) {
  Eigen::VectorXcd d(geom.size());
  for (int m = 0; m < geom.size(); ++m) {
    const double p = geom.positions()[static_cast<std::size_t>(m)];
    d(m) = kJ * p * std::polar(1.0, phi * p);
  }
  return d;
}

}  // namespace subnyq
