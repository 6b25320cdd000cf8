#pragma once

// Data-parallel inner loops. Every kernel has a serial reference and an OpenMP
// variant; the two produce bit-identical results because each output element
// is computed independently and every floating-point reduction is finished
// serially in index order.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dht/edge_code.hpp"
#include "dht/ingest.hpp"

namespace dht::kernels {

enum class Exec { Serial, Parallel };

/// Threads OpenMP would use; 1 when built without OpenMP.
int max_threads();

DistanceMatrix distance_matrix(std::span<const EventRecord> events, Metric metric,
                               Exec exec = Exec::Parallel);

/// First derivative: central differences inside, 4-point one-sided stencil
/// (-4,7,-4,1)/2 at the ends whose truncation error matches the interior one.
/// Needs at least 4 samples.
std::vector<double> gradient(std::span<const double> f, double h, Exec exec = Exec::Parallel);

/// Second derivative: 3-point stencil inside, 5-point one-sided stencil
/// (3,-9,10,-5,1) at the ends, again matching the interior truncation error.
/// Exactly 4 samples use (2,-5,4,-1) at the ends. Needs at least 4 samples.
std::vector<double> second_derivative(std::span<const double> f, double h,
                                      Exec exec = Exec::Parallel);

/// (second difference of sqrt(rho)) / sqrt(rho), evaluated in ratio form
/// sqrt(rho_{c+-1} / rho_c) so that a constant rescaling of rho cancels
/// before any subtraction happens. Cells with rho = 0 yield 0.
std::vector<double> quantum_potential(std::span<const double> rho, double h,
                                      Exec exec = Exec::Parallel);

/// (1/N) sum over ordered pairs i != k of (v_i - v_k)^2, N = m(m-1).
double mean_square_difference(std::span<const double> values, Exec exec = Exec::Parallel);

struct UltrametricReport {
  std::uint64_t triples = 0;
  std::uint64_t strong_triangle_violations = 0;
  std::uint64_t isosceles_violations = 0;
};

/// Checks every ordered triple (x, y, z) of codes.
UltrametricReport check_ultrametric(std::span<const EdgeCode> codes, Exec exec = Exec::Parallel);

}  // namespace dht::kernels
