#pragma once

#include <string>
#include <vector>

#include "gwpt/types.hpp"

namespace gwpt {

/// Uniform periodic grid on the box prod_j [lower_j, upper_j) with the same
/// power-of-two point count on every axis. Flat storage is row-major with the
/// first coordinate varying slowest (the layout FFTW expects).
struct PeriodicGrid {
  int dim = 1;
  Vec lower;
  Vec upper;
  int points_per_axis = 8;

  PeriodicGrid() = default;
  PeriodicGrid(int dim, double lo, double hi, int n);

  double spacing(int axis) const { return (upper[axis] - lower[axis]) / points_per_axis; }
  double cell_volume() const;
  std::size_t total_points() const;

  /// d x total_points() matrix of grid coordinates.
  PointSet points() const;

  /// Angular wavenumbers along one axis in FFT order: 0, 1, ..., n/2-1, -n/2, ..., -1
  /// scaled by 2 pi / L.
  Vec wavenumbers(int axis) const;

  bool operator==(const PeriodicGrid& other) const;
};

/// psi sampled on a periodic grid.
struct GridWaveFunction {
  PeriodicGrid grid;
  CVec values;
  double t = 0.0;
  std::vector<std::string> warnings;

  /// sqrt(sum |psi|^2 dV).
  double norm() const;
};

}  // namespace gwpt
