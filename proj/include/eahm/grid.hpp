#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace eahm {

// A strictly increasing evaluation grid.  Most analyzer verdicts carry grid
// indices as witnesses, so grids are shared by value and kept immutable.
class Grid {
public:
  // Throws ConfigError unless the points are finite and strictly increasing
  // (at least one point).
  explicit Grid(std::vector<double> points);

  static Grid linspace(double start, double stop, std::size_t n);
  // Logarithmically spaced; requires 0 < start < stop.
  static Grid logspace(double start, double stop, std::size_t n);

  const std::vector<double>& points() const { return points_; }
  std::span<const double> span() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double operator[](std::size_t i) const { return points_[i]; }
  double front() const { return points_.front(); }
  double back() const { return points_.back(); }

private:
  std::vector<double> points_;
};

}  // namespace eahm
