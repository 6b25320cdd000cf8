#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dht/kernels.hpp"
#include "dht/rational.hpp"

namespace dht {

enum class PairConvention { Ordered, Unordered };

/// q_ik = event_i - event_k.
struct Difference {
  std::size_t i = 0;
  std::size_t k = 0;
  DyadicRational q;
};

/// Ordered: all m(m-1) pairs i != k. Unordered: the m(m-1)/2 pairs i < k.
/// Throws Error(TooFewEvents) for m < 2 and Error(DuplicateEvent) when two
/// events coincide.
std::vector<Difference> pairwise_differences(std::span<const DyadicRational> events,
                                             PairConvention convention = PairConvention::Ordered);

/// Empirical distribution of difference values. Support ascending, masses
/// exact count / total.
struct DiffPdf {
  std::vector<DyadicRational> support;
  std::vector<Rational> mass;
  PairConvention convention = PairConvention::Ordered;

  std::vector<double> mass_double() const;
};

DiffPdf diff_pdf(std::span<const Difference> differences,
                 PairConvention convention = PairConvention::Ordered);

/// (1/N) sum of all q over the given differences.
Rational mean_momentum_global(std::span<const Difference> differences);

/// (1/(m-1)) sum_{k != j} q_jk. Works for either pair convention (under the
/// unordered convention q_kj is taken as -q_jk).
Rational mean_momentum_event(std::span<const Difference> differences, std::size_t j);

/// (1/N) sum q^2, exact.
Rational differences_energy(std::span<const Difference> differences);

/// sum_j rho_j Q_j^2, exact.
Rational second_moment(const DiffPdf& pdf);

// ---------------------------------------------------------------------------
// Grid fields

enum class Domain { Unit, Symmetric };  // [0,1] and [-1,1]

/// Uniform dyadic grid of 2^depth cells over a domain.
struct Grid {
  Domain domain = Domain::Symmetric;
  std::uint32_t depth = 2;

  std::size_t size() const { return std::size_t{1} << depth; }
  double lo() const { return domain == Domain::Unit ? 0.0 : -1.0; }
  double hi() const { return 1.0; }
  double width() const { return hi() - lo(); }
  double spacing() const { return width() / static_cast<double>(size()); }
  double center(std::size_t c) const { return lo() + (static_cast<double>(c) + 0.5) * spacing(); }
  double right_edge(std::size_t c) const { return lo() + static_cast<double>(c + 1) * spacing(); }

  /// Exact cell lookup for a dyadic value. A value on a cell boundary belongs
  /// to the cell on its left; the domain's left end belongs to cell 0.
  /// Throws Error(ValueOutOfRange).
  std::size_t cell_of(const DyadicRational& x) const;

  friend bool operator==(const Grid&, const Grid&) = default;
};

/// Throws Error(InvalidArgument) for depth < 2.
Grid make_grid(Domain domain, std::uint32_t depth);

template <class T>
struct GridField {
  Grid grid;
  std::vector<T> values;

  GridField() = default;
  GridField(Grid g, std::vector<T> v) : grid(g), values(std::move(v)) {}
  explicit GridField(Grid g, T fill = T{}) : grid(g), values(g.size(), fill) {}

  std::size_t size() const { return values.size(); }
  double h() const { return grid.spacing(); }
};

using RealField = GridField<double>;
using ComplexField = GridField<std::complex<double>>;

/// Throws Error(GridMismatch) unless both fields live on the same grid.
void require_same_grid(const Grid& a, const Grid& b, const char* what);

/// Mass of each support point added to its cell, divided by h; the result
/// integrates to the total mass.
RealField density_field(std::span<const DyadicRational> support, std::span<const Rational> mass,
                        const Grid& grid);
RealField density_field(const DiffPdf& pdf, const Grid& grid);

/// Running integral h * sum_{c' <= c} f_c', i.e. the integral from the left
/// end of the domain to the right edge of cell c.
RealField cumulative_integral(const RealField& f);
double integral(const RealField& f);

// ---------------------------------------------------------------------------
// Configuration

enum class PotentialMode { Cdf, TotalMass };
enum class PhaseMode { IntegrateMomentum, UnitModulus };
enum class ContinuityForm { LiteralSquared, StandardFlux };

struct EmergenceConfig {
  std::optional<std::uint32_t> grid_depth;  // default: max event exponent + 2
  double z_v = 1.0;
  PotentialMode potential_mode = PotentialMode::Cdf;
  PhaseMode phase_mode = PhaseMode::IntegrateMomentum;
  ContinuityForm continuity_form = ContinuityForm::LiteralSquared;
  PairConvention convention = PairConvention::Ordered;
  kernels::Exec exec = kernels::Exec::Parallel;
};

/// Phase S on rho's grid.
///  IntegrateMomentum: dS/dQ = rho(Q) Q^2 integrated from S = 0 at the left
///    end, so S_c is the running integral to the right edge of cell c.
///  UnitModulus: the real-valued solution of dS/dQ = cos S, S = 0 at the left
///    end, sampled at the same right-edge points.
RealField phase_field(const RealField& rho, const EmergenceConfig& cfg);

struct ClassicalPotentials {
  RealField v;
  RealField u;
};

/// v integrand Z_V (d rho)^2 / rho (0 where rho = 0) and U integrand rho.
/// Cdf: running integrals. TotalMass: the total, constant over the grid.
ClassicalPotentials classical_potentials(const RealField& rho, const EmergenceConfig& cfg);

/// (second difference of sqrt(rho)) / sqrt(rho); 0 where rho = 0.
/// Throws Error(InvalidArgument) if rho has a negative or non-finite sample.
RealField quantum_potential(const RealField& rho,
                            kernels::Exec exec = kernels::Exec::Parallel);

/// One dendrogram state: phase and density on a common grid.
struct FieldState {
  RealField s;
  RealField rho;
};

struct ActionTerms {
  double phase_rate = 0.0;  // sum S_dot rho h
  double kinetic = 0.0;     // sum (dS)^2 rho h
  double v = 0.0;
  double u = 0.0;

  double total() const { return phase_rate + kinetic - v + u; }
};

struct ActionResult {
  double value = 0.0;
  std::vector<ActionTerms> steps;
};

/// Sum over consecutive pairs of the trajectory, one unit of d(Dendrogram)
/// per collected event. v and U enter through their integrals over the grid.
/// Throws Error(InvalidArgument) for fewer than 2 states, Error(GridMismatch).
ActionResult action(std::span<const FieldState> trajectory, const EmergenceConfig& cfg);

/// -S_dot - (dS)^2 - U - U^Q with present-step fields. U defaults to
/// classical_potentials(present.rho).u.
RealField hj_residual(const FieldState& prev, const FieldState& present,
                      const EmergenceConfig& cfg,
                      const std::optional<RealField>& potential = std::nullopt);

/// LiteralSquared: rho_dot - d((rho dS)^2). StandardFlux: rho_dot + d(rho dS).
RealField continuity_residual(const FieldState& prev, const FieldState& present,
                              ContinuityForm form,
                              kernels::Exec exec = kernels::Exec::Parallel);

/// sqrt(rho) e^{iS}. Throws Error(GridMismatch) or Error(InvalidArgument) for rho < 0.
ComplexField wavefunction(const RealField& rho, const RealField& s);

/// The Hamilton-Jacobi and standard-flux continuity pair rewritten entirely in
/// terms of psi = sqrt(rho) e^{iS}:
///   real: -arg(psi psi_prev^*) - U - [Re(psi^* psi'')/|psi|^2 + 2 (Im(psi^* psi')/|psi|^2)^2]
///   imag: |psi|^2 - |psi_prev|^2 + d Im(psi^* psi')
/// using finite differences of psi itself. In the continuum the real part is
/// hj_residual and the imaginary part is the standard-flux continuity residual;
/// on a grid the two routes differ by discretization error only.
ComplexField schrodinger_residual(const ComplexField& prev, const ComplexField& present,
                                  const RealField& potential,
                                  kernels::Exec exec = kernels::Exec::Parallel);

// ---------------------------------------------------------------------------
// End-to-end pipeline for one event sequence.

struct EmergenceSummary {
  Rational t_exact;
  double t = 0.0;
  double p_global = 0.0;
  double action = 0.0;
  std::size_t steps = 0;
  double max_abs_hj_residual = 0.0;
  double max_abs_continuity_literal = 0.0;
  double max_abs_continuity_standard = 0.0;
};

struct EmergenceResult {
  Grid grid;
  DiffPdf pdf;
  RealField rho, s, uq, v, u, hj, continuity_literal, continuity_standard;
  ComplexField psi;
  EmergenceSummary summary;
};

inline constexpr std::uint32_t kMaxDefaultGridDepth = 16;

/// Default grid depth for a set of event values: max exponent + 2, clamped to
/// [2, kMaxDefaultGridDepth] so deep dendrograms do not allocate 2^100 cells.
std::uint32_t default_grid_depth(std::span<const DyadicRational> events);

/// Builds the trajectory of prefixes events[0..k), k = 2..m, and evaluates
/// every emergent quantity on the last state (residuals against the
/// second-to-last). With m = 2 the previous state is the present one.
/// If `uniform_rho` is set the difference density is replaced by the uniform
/// density on every state.
EmergenceResult run_emergence(std::span<const DyadicRational> events, const EmergenceConfig& cfg,
                              bool uniform_rho = false);

}  // namespace dht
