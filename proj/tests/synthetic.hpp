#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dht/emergence.hpp"

namespace synthetic {

/// rho proportional to cos^2(pi (x - 1/2) / 2) on [0,1]; sqrt(rho)''/sqrt(rho)
/// is exactly -(pi/2)^2 in the continuum.
inline dht::RealField cos2_density(std::uint32_t depth) {
  const auto grid = dht::make_grid(dht::Domain::Unit, depth);
  dht::RealField rho(grid);
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const double r = std::cos(std::numbers::pi * (grid.center(c) - 0.5) / 2.0);
    rho.values[c] = 2.0 * r * r;
  }
  return rho;
}

/// Values rounded to multiples of 2^-bits, so that scaling by 0.5, 2 or 10 is
/// exact in double precision.
inline dht::RealField quantized(dht::RealField f, int bits = 20) {
  for (auto& v : f.values) v = std::ldexp(std::round(std::ldexp(v, bits)), -bits);
  return f;
}

inline constexpr double kCos2Potential = -(std::numbers::pi / 2.0) * (std::numbers::pi / 2.0);

/// Smooth positive density and phase on [-1,1] plus a slightly advanced copy,
/// standing in for two consecutive dendrogram states.
struct SmoothPair {
  dht::FieldState prev, present;
  dht::RealField potential;
};

inline SmoothPair smooth_pair(std::uint32_t depth) {
  const auto grid = dht::make_grid(dht::Domain::Symmetric, depth);
  auto rho_at = [](double x, double shift) {
    const double y = x - shift;
    return 0.6 * std::exp(-y * y / (2.0 * 0.35 * 0.35)) + 0.05;
  };
  auto s_at = [](double x, double shift) { return 0.4 * x * x + 0.3 * x - shift; };
  SmoothPair p{{dht::RealField(grid), dht::RealField(grid)},
               {dht::RealField(grid), dht::RealField(grid)},
               dht::RealField(grid)};
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const double x = grid.center(c);
    p.prev.rho.values[c] = rho_at(x, 0.0);
    p.prev.s.values[c] = s_at(x, 0.0);
    p.present.rho.values[c] = rho_at(x, 0.02);
    p.present.s.values[c] = s_at(x, 0.05);
    p.potential.values[c] = 0.25 * x * x;
  }
  return p;
}

/// Largest magnitude of any term entering the Hamilton-Jacobi or standard-flux
/// continuity residual of a pair.
inline double field_scale(const SmoothPair& p) {
  const auto& now = p.present;
  const double h = now.rho.h();
  const auto ds = dht::kernels::gradient(now.s.values, h);
  std::vector<double> flux(ds.size());
  for (std::size_t c = 0; c < ds.size(); ++c) flux[c] = now.rho.values[c] * ds[c];
  const auto dflux = dht::kernels::gradient(flux, h);
  const auto uq = dht::quantum_potential(now.rho);
  double scale = 0.0;
  for (std::size_t c = 0; c < ds.size(); ++c) {
    scale = std::max({scale, std::abs(now.s.values[c] - p.prev.s.values[c]), ds[c] * ds[c],
                      std::abs(p.potential.values[c]), std::abs(uq.values[c]),
                      std::abs(now.rho.values[c] - p.prev.rho.values[c]), std::abs(dflux[c])});
  }
  return scale;
}

}  // namespace synthetic
