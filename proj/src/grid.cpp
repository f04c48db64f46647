#include "eahm/grid.hpp"

#include <cmath>
#include <utility>

#include "eahm/errors.hpp"

namespace eahm {

Grid::Grid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.empty()) throw ConfigError("grid must contain at least one point");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i])) throw ConfigError("grid points must be finite");
    if (i > 0 && !(points_[i] > points_[i - 1]))
      throw ConfigError("grid points must be strictly increasing");
  }
}

Grid Grid::linspace(double start, double stop, std::size_t n) {
  if (n < 2) throw ConfigError("linspace needs at least two points");
  if (!(stop > start)) throw ConfigError("linspace needs stop > start");
  std::vector<double> pts(n);
  const double step = (stop - start) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) pts[i] = start + step * static_cast<double>(i);
  pts.back() = stop;
  return Grid(std::move(pts));
}

Grid Grid::logspace(double start, double stop, std::size_t n) {
  if (n < 2) throw ConfigError("logspace needs at least two points");
  if (!(start > 0.0)) throw ConfigError("logspace needs start > 0");
  if (!(stop > start)) throw ConfigError("logspace needs stop > start");
  std::vector<double> pts(n);
  const double ls = std::log(start), le = std::log(stop);
  const double step = (le - ls) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) pts[i] = std::exp(ls + step * static_cast<double>(i));
  pts.front() = start;
  pts.back() = stop;
  return Grid(std::move(pts));
}

}  // namespace eahm
