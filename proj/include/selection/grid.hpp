#pragma once

#include <cstddef>
#include <vector>

namespace selection {

/// Uniform lattice on the trait axis: nodes x_i = x_min + i*dx, i = 0..n_cells.
class Grid {
 public:
  /// Throws InputError unless x_min < x_max and n_cells >= 2.
  Grid(double x_min, double x_max, int n_cells);

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  int n_cells() const noexcept { return n_cells_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_cells_) + 1; }
  double dx() const noexcept { return (x_max_ - x_min_) / n_cells_; }

  // Computed as x_min + (x_max - x_min) * i / n so that nodes at simple
  // fractions of the domain (0.3 on [0,1] with 2000 cells) are exact.
  double node(std::size_t i) const noexcept;
  const std::vector<double>& nodes() const noexcept { return nodes_; }

  /// Trapezoid weights: dx/2 at both ends, dx inside.
  const std::vector<double>& weights() const noexcept { return weights_; }

  bool operator==(const Grid& other) const noexcept {
    return x_min_ == other.x_min_ && x_max_ == other.x_max_ && n_cells_ == other.n_cells_;
  }

 private:
  double x_min_;
  double x_max_;
  int n_cells_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

}  // namespace selection
