#include "dht/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dht/error.hpp"

namespace dht::kernels {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

using Index = std::ptrdiff_t;

void distance_row(std::span<const EventRecord> events, Metric metric, Index i, double* out) {
  const auto n = static_cast<Index>(events.size());
  for (Index k = 0; k < n; ++k) {
    out[k] = feature_distance(events[static_cast<std::size_t>(i)].features,
                              events[static_cast<std::size_t>(k)].features, metric);
  }
}

double gradient_at(std::span<const double> f, double h, Index c) {
  const auto n = f.size();
  const auto i = static_cast<std::size_t>(c);
  // The end stencils carry the same leading error, h^2 f'''/6, as the central
  // difference, so the error field stays smooth up to the boundary and a
  // gradient of a gradient keeps second order there.
  if (i == 0) return (-4.0 * f[0] + 7.0 * f[1] - 4.0 * f[2] + f[3]) / (2.0 * h);
  if (i == n - 1) return (4.0 * f[n - 1] - 7.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / (2.0 * h);
  return (f[i + 1] - f[i - 1]) / (2.0 * h);
}

// Second-difference weights applied around cell c as a 5-slot stencil so the
// interior and boundary cases share one code path. The end stencil
// (3,-9,10,-5,1) has the interior leading error h^2 f''''/12; grids of exactly
// four cells fall back to (2,-5,4,-1).
struct Stencil {
  std::array<Index, 5> at{};
  std::array<double, 5> w{};
  int size = 0;
};

Stencil second_stencil(Index n, Index c) {
  if (n < 5) {
    if (c == 0) return {{0, 1, 2, 3, 0}, {2.0, -5.0, 4.0, -1.0, 0.0}, 4};
    if (c == n - 1) return {{n - 1, n - 2, n - 3, n - 4, 0}, {2.0, -5.0, 4.0, -1.0, 0.0}, 4};
  }
  if (c == 0) return {{0, 1, 2, 3, 4}, {3.0, -9.0, 10.0, -5.0, 1.0}, 5};
  if (c == n - 1) return {{n - 1, n - 2, n - 3, n - 4, n - 5}, {3.0, -9.0, 10.0, -5.0, 1.0}, 5};
  return {{c - 1, c, c + 1, 0, 0}, {1.0, -2.0, 1.0, 0.0, 0.0}, 3};
}

double second_derivative_at(std::span<const double> f, double h, Index c) {
  const auto s = second_stencil(static_cast<Index>(f.size()), c);
  double acc = 0.0;
  for (int k = 0; k < s.size; ++k) acc += s.w[static_cast<std::size_t>(k)] * f[static_cast<std::size_t>(s.at[static_cast<std::size_t>(k)])];
  return acc / (h * h);
}

double quantum_potential_at(std::span<const double> rho, double h, Index c) {
  const double centre = rho[static_cast<std::size_t>(c)];
  if (centre == 0.0) return 0.0;
  const auto s = second_stencil(static_cast<Index>(rho.size()), c);
  double acc = 0.0;
  for (int k = 0; k < s.size; ++k) {
    const Index at = s.at[static_cast<std::size_t>(k)];
    // The stencil's own centre contributes its weight exactly (ratio 1).
    const double ratio = at == c ? 1.0 : std::sqrt(rho[static_cast<std::size_t>(at)] / centre);
    acc += s.w[static_cast<std::size_t>(k)] * ratio;
  }
  return acc / (h * h);
}

double row_square_sum(std::span<const double> v, Index i) {
  double acc = 0.0;
  const double vi = v[static_cast<std::size_t>(i)];
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double d = vi - v[k];
    acc += d * d;
  }
  return acc;
}

void check_sizes(std::size_t n, std::size_t need, const char* what) {
  if (n < need) {
    throw Error(ErrorKind::InvalidArgument,
                std::string(what) + " needs at least " + std::to_string(need) + " samples");
  }
}

template <class Fn>
void for_each_index(Index n, Exec exec, Fn&& fn) {
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) fn(i);
  } else {
    for (Index i = 0; i < n; ++i) fn(i);
  }
}

}  // namespace

DistanceMatrix distance_matrix(std::span<const EventRecord> events, Metric metric, Exec exec) {
  const auto n = static_cast<Index>(events.size());
  DistanceMatrix out(static_cast<std::size_t>(n * n));
  for_each_index(n, exec, [&](Index i) { distance_row(events, metric, i, &out[static_cast<std::size_t>(i * n)]); });
  return out;
}

std::vector<double> gradient(std::span<const double> f, double h, Exec exec) {
  check_sizes(f.size(), 4, "gradient");
  std::vector<double> out(f.size());
  for_each_index(static_cast<Index>(f.size()), exec,
                 [&](Index c) { out[static_cast<std::size_t>(c)] = gradient_at(f, h, c); });
  return out;
}

std::vector<double> second_derivative(std::span<const double> f, double h, Exec exec) {
  check_sizes(f.size(), 4, "second_derivative");
  std::vector<double> out(f.size());
  for_each_index(static_cast<Index>(f.size()), exec,
                 [&](Index c) { out[static_cast<std::size_t>(c)] = second_derivative_at(f, h, c); });
  return out;
}

std::vector<double> quantum_potential(std::span<const double> rho, double h, Exec exec) {
  check_sizes(rho.size(), 4, "quantum_potential");
  std::vector<double> out(rho.size());
  for_each_index(static_cast<Index>(rho.size()), exec,
                 [&](Index c) { out[static_cast<std::size_t>(c)] = quantum_potential_at(rho, h, c); });
  return out;
}

double mean_square_difference(std::span<const double> values, Exec exec) {
  const auto m = static_cast<Index>(values.size());
  if (m < 2) throw Error(ErrorKind::TooFewEvents, "need at least two values");
  std::vector<double> rows(static_cast<std::size_t>(m));
  for_each_index(m, exec, [&](Index i) { rows[static_cast<std::size_t>(i)] = row_square_sum(values, i); });
  double total = 0.0;
  for (double r : rows) total += r;
  return total / static_cast<double>(m * (m - 1));
}

UltrametricReport check_ultrametric(std::span<const EdgeCode> codes, Exec exec) {
  const auto n = static_cast<Index>(codes.size());
  std::vector<UltrametricReport> rows(static_cast<std::size_t>(n));
  for_each_index(n, exec, [&](Index i) {
    auto& r = rows[static_cast<std::size_t>(i)];
    const auto& x = codes[static_cast<std::size_t>(i)];
    for (const auto& y : codes) {
      const auto dxy = padic_distance(x, y);
      for (const auto& z : codes) {
        const auto dyz = padic_distance(y, z);
        const auto dxz = padic_distance(x, z);
        ++r.triples;
        if (dxz > std::max(dxy, dyz)) ++r.strong_triangle_violations;
        std::array<PadicDistance, 3> sides{dxy, dyz, dxz};
        std::sort(sides.begin(), sides.end());
        if (sides[1] != sides[2]) ++r.isosceles_violations;
      }
    }
  });
  UltrametricReport total;
  for (const auto& r : rows) {
    total.triples += r.triples;
    total.strong_triangle_violations += r.strong_triangle_violations;
    total.isosceles_violations += r.isosceles_violations;
  }
  return total;
}

}  // namespace dht::kernels
