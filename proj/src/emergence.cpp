#include "dht/emergence.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "dht/error.hpp"

namespace dht {

std::vector<Difference> pairwise_differences(std::span<const DyadicRational> events,
                                             PairConvention convention) {
  if (events.size() < 2) throw Error(ErrorKind::TooFewEvents, "need at least two events");
  std::vector<DyadicRational> sorted(events.begin(), events.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorKind::DuplicateEvent, "two events share one value");
  }
  std::vector<Difference> out;
  const auto m = events.size();
  out.reserve(convention == PairConvention::Ordered ? m * (m - 1) : m * (m - 1) / 2);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = convention == PairConvention::Ordered ? 0 : i + 1; k < m; ++k) {
      if (i != k) out.push_back({i, k, events[i] - events[k]});
    }
  }
  return out;
}

std::vector<double> DiffPdf::mass_double() const {
  std::vector<double> out;
  out.reserve(mass.size());
  for (const auto& m : mass) out.push_back(m.get_d());
  return out;
}

DiffPdf diff_pdf(std::span<const Difference> differences, PairConvention convention) {
  if (differences.empty()) throw Error(ErrorKind::InvalidArgument, "no differences");
  std::map<DyadicRational, std::size_t> counts;
  for (const auto& d : differences) ++counts[d.q];
  DiffPdf pdf;
  pdf.convention = convention;
  const Rational total(static_cast<unsigned long>(differences.size()));
  for (const auto& [q, n] : counts) {
    pdf.support.push_back(q);
    pdf.mass.push_back(Rational(static_cast<unsigned long>(n)) / total);
  }
  return pdf;
}

Rational mean_momentum_global(std::span<const Difference> differences) {
  if (differences.empty()) throw Error(ErrorKind::InvalidArgument, "no differences");
  DyadicRational sum;
  for (const auto& d : differences) sum = sum + d.q;
  return sum.to_rational() / Rational(static_cast<unsigned long>(differences.size()));
}

Rational mean_momentum_event(std::span<const Difference> differences, std::size_t j) {
  // q_jk for fixed j; an unordered list only holds one orientation of each pair.
  std::map<std::size_t, DyadicRational> partner;
  for (const auto& d : differences) {
    if (d.i == j) partner[d.k] = d.q;
    else if (d.k == j) partner.emplace(d.i, -d.q);
  }
  if (partner.empty()) {
    throw Error(ErrorKind::InvalidArgument, "event " + std::to_string(j) + " has no differences");
  }
  DyadicRational sum;
  for (const auto& [k, q] : partner) sum = sum + q;
  return sum.to_rational() / Rational(static_cast<unsigned long>(partner.size()));
}

Rational differences_energy(std::span<const Difference> differences) {
  if (differences.empty()) throw Error(ErrorKind::InvalidArgument, "no differences");
  DyadicRational sum;
  for (const auto& d : differences) sum = sum + d.q * d.q;
  return sum.to_rational() / Rational(static_cast<unsigned long>(differences.size()));
}

Rational second_moment(const DiffPdf& pdf) {
  Rational acc = 0;
  for (std::size_t j = 0; j < pdf.support.size(); ++j) {
    acc += pdf.mass[j] * (pdf.support[j] * pdf.support[j]).to_rational();
  }
  return acc;
}

// ---------------------------------------------------------------------------

Grid make_grid(Domain domain, std::uint32_t depth) {
  if (depth < 2) throw Error(ErrorKind::InvalidArgument, "grid depth must be >= 2");
  if (depth > 30) throw Error(ErrorKind::InvalidArgument, "grid depth must be <= 30");
  return Grid{domain, depth};
}

std::size_t Grid::cell_of(const DyadicRational& x) const {
  const DyadicRational lo_exact(domain == Domain::Unit ? 0 : -1);
  if (x < lo_exact || x > DyadicRational(1)) {
    throw Error(ErrorKind::ValueOutOfRange, x.to_string() + " is outside the grid domain");
  }
  // t = (x - lo) / h, exactly; h = 2^-depth for [0,1], 2^(1-depth) for [-1,1].
  const auto scale = domain == Domain::Unit ? depth : depth - 1;
  BigInt pow = 1;
  mpz_mul_2exp(pow.get_mpz_t(), pow.get_mpz_t(), scale);
  const DyadicRational t = (x - lo_exact) * DyadicRational(pow, 0);
  if (t.is_zero()) return 0;
  // ceil(t) - 1
  BigInt num = t.numerator();
  BigInt den = 1;
  mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), t.exponent());
  BigInt ceil_t;
  mpz_cdiv_q(ceil_t.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return static_cast<std::size_t>(ceil_t.get_ui()) - 1;
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw Error(ErrorKind::GridMismatch, std::string(what) + ": fields live on different grids");
}

RealField density_field(std::span<const DyadicRational> support, std::span<const Rational> mass,
                        const Grid& grid) {
  if (support.size() != mass.size()) throw Error(ErrorKind::InvalidArgument, "support/mass size");
  std::vector<Rational> cell_mass(grid.size(), Rational(0));
  for (std::size_t j = 0; j < support.size(); ++j) cell_mass[grid.cell_of(support[j])] += mass[j];
  RealField out(grid);
  const double h = grid.spacing();
  for (std::size_t c = 0; c < grid.size(); ++c) out.values[c] = cell_mass[c].get_d() / h;
  return out;
}

RealField density_field(const DiffPdf& pdf, const Grid& grid) {
  return density_field(pdf.support, pdf.mass, grid);
}

RealField cumulative_integral(const RealField& f) {
  RealField out(f.grid);
  double acc = 0.0;
  const double h = f.h();
  for (std::size_t c = 0; c < f.size(); ++c) {
    acc += f.values[c] * h;
    out.values[c] = acc;
  }
  return out;
}

double integral(const RealField& f) {
  double acc = 0.0;
  for (double v : f.values) acc += v * f.h();
  return acc;
}

namespace {

void require_density(const RealField& rho) {
  for (double r : rho.values) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
      throw Error(ErrorKind::InvalidArgument, "density must be finite and non-negative");
    }
  }
}

double max_abs(const RealField& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

RealField phase_field(const RealField& rho, const EmergenceConfig& cfg) {
  if (cfg.phase_mode == PhaseMode::UnitModulus) {
    // dS/dQ = cos S, S(lo) = 0  =>  S(Q) = gd(Q - lo) = 2 atan(tanh((Q - lo) / 2)).
    RealField s(rho.grid);
    for (std::size_t c = 0; c < s.size(); ++c) {
      const double x = rho.grid.right_edge(c) - rho.grid.lo();
      s.values[c] = 2.0 * std::atan(std::tanh(0.5 * x));
    }
    return s;
  }
  RealField momentum(rho.grid);
  for (std::size_t c = 0; c < rho.size(); ++c) {
    const double q = rho.grid.center(c);
    momentum.values[c] = rho.values[c] * q * q;
  }
  return cumulative_integral(momentum);
}

ClassicalPotentials classical_potentials(const RealField& rho, const EmergenceConfig& cfg) {
  require_density(rho);
  const auto drho = kernels::gradient(rho.values, rho.h(), cfg.exec);
  RealField v_integrand(rho.grid);
  for (std::size_t c = 0; c < rho.size(); ++c) {
    const double r = rho.values[c];
    v_integrand.values[c] = r == 0.0 ? 0.0 : cfg.z_v * drho[c] * drho[c] / r;
  }
  if (cfg.potential_mode == PotentialMode::Cdf) {
    return {cumulative_integral(v_integrand), cumulative_integral(rho)};
  }
  return {RealField(rho.grid, integral(v_integrand)), RealField(rho.grid, integral(rho))};
}

RealField quantum_potential(const RealField& rho, kernels::Exec exec) {
  require_density(rho);
  return RealField(rho.grid, kernels::quantum_potential(rho.values, rho.h(), exec));
}

ActionResult action(std::span<const FieldState> trajectory, const EmergenceConfig& cfg) {
  if (trajectory.size() < 2) throw Error(ErrorKind::InvalidArgument, "action needs >= 2 states");
  const Grid grid = trajectory.front().rho.grid;
  for (const auto& st : trajectory) {
    require_same_grid(grid, st.rho.grid, "action");
    require_same_grid(grid, st.s.grid, "action");
  }
  ActionResult out;
  const double h = grid.spacing();
  for (std::size_t t = 1; t < trajectory.size(); ++t) {
    const auto& prev = trajectory[t - 1];
    const auto& cur = trajectory[t];
    const auto ds = kernels::gradient(cur.s.values, h, cfg.exec);
    ActionTerms terms;
    for (std::size_t c = 0; c < grid.size(); ++c) {
      const double s_dot = cur.s.values[c] - prev.s.values[c];
      terms.phase_rate += s_dot * cur.rho.values[c] * h;
      terms.kinetic += ds[c] * ds[c] * cur.rho.values[c] * h;
    }
    const auto pot = classical_potentials(cur.rho, cfg);
    // Both modes: the right-end value is the integral over the whole grid.
    terms.v = pot.v.values.back();
    terms.u = pot.u.values.back();
    out.value += terms.total();
    out.steps.push_back(terms);
  }
  return out;
}

RealField hj_residual(const FieldState& prev, const FieldState& present, const EmergenceConfig& cfg,
                      const std::optional<RealField>& potential) {
  const Grid grid = present.rho.grid;
  require_same_grid(grid, present.s.grid, "hj_residual");
  require_same_grid(grid, prev.s.grid, "hj_residual");
  require_same_grid(grid, prev.rho.grid, "hj_residual");
  const RealField u = potential ? *potential : classical_potentials(present.rho, cfg).u;
  require_same_grid(grid, u.grid, "hj_residual");
  const auto uq = quantum_potential(present.rho, cfg.exec);
  const auto ds = kernels::gradient(present.s.values, present.s.h(), cfg.exec);
  RealField out(grid);
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const double s_dot = present.s.values[c] - prev.s.values[c];
    out.values[c] = -s_dot - ds[c] * ds[c] - u.values[c] - uq.values[c];
  }
  return out;
}

RealField continuity_residual(const FieldState& prev, const FieldState& present, ContinuityForm form,
                              kernels::Exec exec) {
  const Grid grid = present.rho.grid;
  require_same_grid(grid, present.s.grid, "continuity_residual");
  require_same_grid(grid, prev.rho.grid, "continuity_residual");
  require_same_grid(grid, prev.s.grid, "continuity_residual");
  const double h = grid.spacing();
  const auto ds = kernels::gradient(present.s.values, h, exec);
  std::vector<double> flux(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const double f = present.rho.values[c] * ds[c];
    flux[c] = form == ContinuityForm::LiteralSquared ? f * f : f;
  }
  const auto dflux = kernels::gradient(flux, h, exec);
  RealField out(grid);
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const double rho_dot = present.rho.values[c] - prev.rho.values[c];
    out.values[c] = form == ContinuityForm::LiteralSquared ? rho_dot - dflux[c] : rho_dot + dflux[c];
  }
  return out;
}

ComplexField wavefunction(const RealField& rho, const RealField& s) {
  require_same_grid(rho.grid, s.grid, "wavefunction");
  require_density(rho);
  ComplexField out(rho.grid);
  for (std::size_t c = 0; c < rho.size(); ++c) {
    out.values[c] = std::polar(std::sqrt(rho.values[c]), s.values[c]);
  }
  return out;
}

ComplexField schrodinger_residual(const ComplexField& prev, const ComplexField& present,
                                  const RealField& potential, kernels::Exec exec) {
  const Grid grid = present.grid;
  require_same_grid(grid, prev.grid, "schrodinger_residual");
  require_same_grid(grid, potential.grid, "schrodinger_residual");
  const double h = grid.spacing();
  const auto n = grid.size();
  std::vector<double> re(n), im(n);
  for (std::size_t c = 0; c < n; ++c) {
    re[c] = present.values[c].real();
    im[c] = present.values[c].imag();
  }
  const auto dre = kernels::gradient(re, h, exec);
  const auto dim = kernels::gradient(im, h, exec);
  const auto d2re = kernels::second_derivative(re, h, exec);
  const auto d2im = kernels::second_derivative(im, h, exec);

  std::vector<double> current(n);  // Im(psi^* psi') = rho dS
  for (std::size_t c = 0; c < n; ++c) current[c] = re[c] * dim[c] - im[c] * dre[c];
  const auto dcurrent = kernels::gradient(current, h, exec);

  ComplexField out(grid);
  for (std::size_t c = 0; c < n; ++c) {
    const auto psi = present.values[c];
    const double rho = std::norm(psi);
    const double phase_step = std::arg(psi * std::conj(prev.values[c]));
    double kinetic_quantum = 0.0;
    if (rho > 0.0) {
      const double laplace_proj = re[c] * d2re[c] + im[c] * d2im[c];  // Re(psi^* psi'')
      const double velocity = current[c] / rho;
      kinetic_quantum = laplace_proj / rho + 2.0 * velocity * velocity;
    }
    const double real = -phase_step - potential.values[c] - kinetic_quantum;
    const double imag = rho - std::norm(prev.values[c]) + dcurrent[c];
    out.values[c] = {real, imag};
  }
  return out;
}

// ---------------------------------------------------------------------------

std::uint32_t default_grid_depth(std::span<const DyadicRational> events) {
  std::uint32_t e = 1;
  for (const auto& v : events) e = std::max(e, v.exponent());
  return std::clamp<std::uint32_t>(e + 2, 2, kMaxDefaultGridDepth);
}

EmergenceResult run_emergence(std::span<const DyadicRational> events, const EmergenceConfig& cfg,
                              bool uniform_rho) {
  const auto diffs = pairwise_differences(events, cfg.convention);
  const Grid grid = make_grid(Domain::Symmetric, cfg.grid_depth.value_or(default_grid_depth(events)));

  std::vector<FieldState> trajectory;
  for (std::size_t k = 2; k <= events.size(); ++k) {
    RealField rho;
    if (uniform_rho) {
      rho = RealField(grid, 1.0 / grid.width());
    } else {
      const auto prefix = pairwise_differences(events.first(k), cfg.convention);
      rho = density_field(diff_pdf(prefix, cfg.convention), grid);
    }
    auto s = phase_field(rho, cfg);
    trajectory.push_back({std::move(s), std::move(rho)});
  }

  EmergenceResult r;
  r.grid = grid;
  r.pdf = diff_pdf(diffs, cfg.convention);
  const auto& present = trajectory.back();
  const auto& prev = trajectory.size() > 1 ? trajectory[trajectory.size() - 2] : present;
  r.rho = present.rho;
  r.s = present.s;
  r.uq = quantum_potential(present.rho, cfg.exec);
  auto pot = classical_potentials(present.rho, cfg);
  r.v = std::move(pot.v);
  r.u = std::move(pot.u);
  r.hj = hj_residual(prev, present, cfg, r.u);
  r.continuity_literal = continuity_residual(prev, present, ContinuityForm::LiteralSquared, cfg.exec);
  r.continuity_standard = continuity_residual(prev, present, ContinuityForm::StandardFlux, cfg.exec);
  r.psi = wavefunction(present.rho, present.s);

  auto& sum = r.summary;
  sum.t_exact = differences_energy(diffs);
  sum.t = sum.t_exact.get_d();
  sum.p_global = mean_momentum_global(diffs).get_d();
  sum.steps = trajectory.size() - 1;
  sum.action = trajectory.size() > 1 ? action(trajectory, cfg).value : 0.0;
  sum.max_abs_hj_residual = max_abs(r.hj);
  sum.max_abs_continuity_literal = max_abs(r.continuity_literal);
  sum.max_abs_continuity_standard = max_abs(r.continuity_standard);
  return r;
}

}  // namespace dht
