#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "jointspec/error.hpp"
#include "jointspec/matrix_core.hpp"

namespace jointspec {

/// Polar grid of the closed unit disk: radii r_k = (k / (R-1))^2 for k = 0..R-1
/// and angles 2 pi m / A. The origin appears once and the unit circle is always
/// included. Quadratic radii make |z|^{1/2} evenly spaced, which is how the
/// coordinates of a pair variety scale with the source parameter.
struct PolarGrid {
  std::size_t radii = 64;
  std::size_t angles = 256;

  void validate() const {
    if (radii < 2 || angles < 1) throw InputError("PolarGrid: need at least 2 radii and 1 angle");
  }

  std::size_t size() const { return 1 + (radii - 1) * angles; }

  double radius(std::size_t k) const {
    const double s = static_cast<double>(k) / static_cast<double>(radii - 1);
    return s * s;
  }

  double angle(std::size_t m) const {
    return 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(angles);
  }

  /// Points in grid order: origin, then ring by ring outward.
  std::vector<Complex> points() const {
    validate();
    std::vector<Complex> out;
    out.reserve(size());
    out.emplace_back(0.0, 0.0);
    for (std::size_t k = 1; k < radii; ++k) {
      for (std::size_t m = 0; m < angles; ++m) out.push_back(std::polar(radius(k), angle(m)));
    }
    return out;
  }

  /// Points only on |z| = 1.
  std::vector<Complex> boundary_points() const {
    validate();
    std::vector<Complex> out;
    out.reserve(angles);
    for (std::size_t m = 0; m < angles; ++m) out.push_back(std::polar(1.0, angle(m)));
    return out;
  }

  std::string describe() const {
    return "polar " + std::to_string(radii) + "x" + std::to_string(angles) + " (r_k=(k/(R-1))^2)";
  }
};

/// Points near z at `factor` times the grid resolution: a (2 factor + 1)^2
/// stencil in polar coordinates, clipped to the closed disk, z excluded.
inline std::vector<Complex> refine_near(Complex z, const PolarGrid& grid, std::size_t factor = 4) {
  grid.validate();
  const double r0 = std::abs(z);
  const double s0 = std::sqrt(r0);
  const double ds = 1.0 / (static_cast<double>(grid.radii - 1) * static_cast<double>(factor));
  const double dt = 2.0 * std::numbers::pi / (static_cast<double>(grid.angles) * static_cast<double>(factor));
  const double t0 = r0 > 0.0 ? std::arg(z) : 0.0;
  std::vector<Complex> out;
  const auto f = static_cast<long>(factor);
  for (long i = -f; i <= f; ++i) {
    const double s = s0 + static_cast<double>(i) * ds;
    if (s < 0.0 || s > 1.0) continue;
    for (long m = -f; m <= f; ++m) {
      if (i == 0 && m == 0) continue;
      out.push_back(std::polar(s * s, t0 + static_cast<double>(m) * dt));
    }
  }
  return out;
}

/// Tensor product of a polar grid over each of k variables, in lexicographic
/// order with the last variable fastest.
inline std::vector<CPoint> tensor_polar_grid(std::size_t k, const PolarGrid& grid, std::size_t max_points = 1'000'000) {
  const auto base = grid.points();
  double total = 1.0;
  for (std::size_t i = 0; i < k; ++i) total *= static_cast<double>(base.size());
  if (total > static_cast<double>(max_points)) {
    throw InputError("tensor_polar_grid: " + std::to_string(static_cast<long long>(total)) +
                     " points exceed the cap of " + std::to_string(max_points));
  }
  std::vector<CPoint> out;
  out.reserve(static_cast<std::size_t>(total));
  std::vector<std::size_t> idx(k, 0);
  while (true) {
    CPoint p(static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) p(static_cast<Eigen::Index>(i)) = base[idx[i]];
    out.push_back(std::move(p));
    std::size_t i = k;
    while (i > 0 && ++idx[i - 1] == base.size()) idx[--i] = 0;
    if (i == 0) break;
  }
  return out;
}

}  // namespace jointspec
