#include "fhrt/functionals.hpp"

#include <cmath>
#include <limits>

namespace fhrt {

namespace {

const RadialEngine* radial_of(const Field& f) { return f.radial(); }

RealVector power_of_k(const GridEngine& g, double exponent) {
  const RealVector& k = g.wavenumber_magnitude();
  RealVector out(k.size());
  for (Eigen::Index i = 0; i < k.size(); ++i) {
    out[i] = exponent == 0.0 ? 1.0 : (k[i] == 0.0 ? 0.0 : std::pow(k[i], exponent));
  }
  return out;
}

double spectral_norm2(const GridEngine& g, const ComplexVector& spec, const RealVector& multiplier) {
  CompensatedSum<double> acc;
  const RealVector& w = g.spectral_weights();
  for (Eigen::Index i = 0; i < spec.size(); ++i) acc.add(w[i] * multiplier[i] * std::norm(spec[i]));
  return acc.value();
}

double potential_energy(const Field& p, const PotentialSpec& pot) {
  if (!pot.enabled()) return 0.0;
  const RealVector rho = density(p);
  const RealVector v = hartree_operator(p.grid, pot)->apply(rho);
  return -0.25 * compensated_sum((p.engine().weights().array() * v.array() * rho.array()).matrix());
}

ComplexVector torus_partial(const TorusEngine& t, const ComplexVector& u, const std::vector<int>& orders) {
  ComplexVector s = t.forward(u);
  const int N = t.points_per_axis();
  for (std::size_t a = 0; a < orders.size(); ++a) {
    if (orders[a] == 0) continue;
    const auto& k = t.wavenumber(static_cast<int>(a));
    const auto& m = t.mode_index(static_cast<int>(a));
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      s[i] *= (2 * m[i] == -N) ? Complex(0.0) : std::pow(Complex(0.0, k[i]), orders[a]);
    }
  }
  return t.inverse(s);
}

double radius_weighted_norm(const GridEngine& g, const ComplexVector& v, double ell) {
  const RealVector& r = g.radius();
  CompensatedSum<double> acc;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    acc.add(g.weights()[i] * (ell == 0.0 ? 1.0 : std::pow(r[i], 2.0 * ell)) * std::norm(v[i]));
  }
  return acc.value();
}

}  // namespace

double mass(const Field& f) {
  const Field p = to_physical(f);
  return weighted_norm2(p.engine().weights(), p.data);
}

double kinetic_energy(const Field& f, double alpha) {
  const Field s = to_spectral(f);
  return 0.5 * spectral_norm2(s.engine(), s.data, power_of_k(s.engine(), alpha));
}

EnergyBreakdown energy(const Field& f, double alpha, const PotentialSpec& pot) {
  const Field p = to_physical(f);
  EnergyBreakdown e;
  e.kinetic = kinetic_energy(p, alpha);
  e.potential = potential_energy(p, pot);
  e.total = e.kinetic + e.potential;
  return e;
}

Complex dilation_form(const Field& f, const ComplexVector& a, const ComplexVector& b) {
  const GridEngine& g = f.engine();
  CompensatedSum<double> re;
  CompensatedSum<double> im;
  if (const auto* t = f.torus()) {
    for (int ax = 0; ax < g.dimension(); ++ax) {
      const ComplexVector db = t->derivative(b, ax);
      const RealVector& x = t->sawtooth(ax);
      for (Eigen::Index i = 0; i < db.size(); ++i) {
        const Complex z = g.weights()[i] * x[i] * std::conj(a[i]) * db[i];
        re.add(z.real());
        im.add(z.imag());
      }
    }
  } else {
    // ∫ ā x·∇b = (2π)^{-n} ∫ conj(∂_k â) k b̂ dξ with ∂_k â = -(vector profile of a)
    const auto* r = radial_of(f);
    const ComplexVector F = r->forward(b);
    const ComplexVector V = r->vector_profile_transform(a);
    const RealVector& k = g.wavenumber_magnitude();
    for (Eigen::Index i = 0; i < F.size(); ++i) {
      const Complex z = -g.spectral_weights()[i] * k[i] * std::conj(V[i]) * F[i];
      re.add(z.real());
      im.add(z.imag());
    }
  }
  return {re.value(), im.value()};
}

DilationValue dilation_detail(const Field& f) {
  const Field p = to_physical(f);
  const Complex integral = dilation_form(p, p.data, p.data);
  const double half_nm = 0.5 * p.engine().dimension() * weighted_norm2(p.engine().weights(), p.data);
  DilationValue out;
  out.value = integral.imag();
  out.residue = half_nm > 0.0 ? std::abs(integral.real() + half_nm) / half_nm : 0.0;
  return out;
}

DilationRate dilation_rate(const Field& f, double alpha, const PotentialSpec& pot) {
  const Field p = to_physical(f);
  const GridEngine& g = p.engine();
  ComplexVector s = g.forward(p.data);
  s.array() *= power_of_k(g, alpha).array();
  ComplexVector rhs = g.inverse(s);
  const RealVector rho = density(p);
  DilationRate out;
  out.kinetic_part = 2.0 * alpha * kinetic_energy(p, alpha);
  if (pot.enabled()) {
    const RealVector v = hartree_operator(p.grid, pot)->apply(rho);
    rhs.array() -= v.array() * p.data.array();
    // -x·∇(ψ r^{-γ}) = γ ψ r^{-γ} + μ ψ r^{1-γ} for ψ = e^{-μr}
    PotentialSpec extra = pot;
    extra.gamma = pot.gamma - 1.0;
    const bool has_extra = pot.psi == PsiFamily::exponential && pot.mu > 0.0;
    if (has_extra && !(extra.gamma > 0.0)) {
      out.potential_part = std::numeric_limits<double>::quiet_NaN();
    } else {
      double vw = pot.gamma * -0.25 * compensated_sum((g.weights().array() * v.array() * rho.array()).matrix());
      if (has_extra) {
        const RealVector ve = hartree_operator(p.grid, extra)->apply(rho);
        vw += pot.mu * -0.25 * compensated_sum((g.weights().array() * ve.array() * rho.array()).matrix());
      }
      out.potential_part = 2.0 * vw;
    }
  }
  const ComplexVector udot = Complex(0.0, -1.0) * rhs;
  out.discrete = (dilation_form(p, udot, p.data) + dilation_form(p, p.data, udot)).imag();
  out.continuum = out.kinetic_part + out.potential_part;
  return out;
}

double dilation_expectation(const Field& f) { return dilation_detail(f).value; }

VirialMomentValue virial_moment_detail(const Field& f, double alpha) {
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  const Field p = to_physical(f);
  const GridEngine& g = p.engine();
  const double exponent = 2.0 - alpha;
  VirialMomentValue out;
  if (const auto* t = p.torus()) {
    const RealVector multiplier = power_of_k(g, exponent);
    CompensatedSum<double> sos;
    CompensatedSum<double> direct;
    for (int a = 0; a < g.dimension(); ++a) {
      const ComplexVector xu = (t->sawtooth(a).array() * p.data.array()).matrix();
      const ComplexVector s = t->forward(xu);
      sos.add(spectral_norm2(g, s, multiplier));
      const ComplexVector back = t->inverse((s.array() * multiplier.array()).matrix());
      direct.add(weighted_inner(g.weights(), xu, back).real());
    }
    out.sum_of_squares = sos.value();
    out.direct = direct.value();
    out.zero_mode_dropped = alpha > 2.0;
  } else {
    const auto* r = radial_of(p);
    const ComplexVector V = r->vector_profile_transform(p.data);
    out.sum_of_squares = spectral_norm2(g, V, power_of_k(g, exponent));
    out.direct = r->vector_sector_expectation(p.data, exponent);
  }
  out.value = alpha > 2.0 ? out.direct : out.sum_of_squares;
  out.boundary_flag = boundary_fraction(p) > 1e-8;
  return out;
}

double virial_moment(const Field& f, double alpha) { return virial_moment_detail(f, alpha).value; }

double sobolev_norm(const Field& f, double s) {
  if (s < 0.0) throw ConfigError("Sobolev exponent must be nonnegative");
  const Field spec = to_spectral(f);
  const RealVector& k = spec.engine().wavenumber_magnitude();
  const RealVector multiplier = (1.0 + k.array().square()).pow(s).matrix();
  return std::sqrt(spectral_norm2(spec.engine(), spec.data, multiplier));
}

double weighted_moment(const Field& f, double ell, const std::vector<int>& multi_index) {
  if (ell < 0.0) throw ConfigError("moment weight must be nonnegative");
  const Field p = to_physical(f);
  const auto* t = p.torus();
  if (t == nullptr) throw UsageError("multi-index moments need the torus engine");
  if (static_cast<int>(multi_index.size()) != t->dimension()) throw UsageError("multi-index length must equal n");
  for (int o : multi_index) {
    if (o < 0) throw ConfigError("derivative order must be nonnegative");
  }
  return std::sqrt(radius_weighted_norm(*t, torus_partial(*t, p.data, multi_index), ell));
}

double weighted_moment(const Field& f, double ell, int d) {
  if (ell < 0.0) throw ConfigError("moment weight must be nonnegative");
  if (d < 0) throw ConfigError("derivative order must be nonnegative");
  const Field p = to_physical(f);
  const GridEngine& g = p.engine();
  if (const auto* t = p.torus()) {
    // every ordered axis sequence of length d: the full derivative tensor
    const int n = g.dimension();
    std::vector<int> seq(static_cast<std::size_t>(d), 0);
    CompensatedSum<double> acc;
    while (true) {
      std::vector<int> orders(static_cast<std::size_t>(n), 0);
      for (int a : seq) ++orders[static_cast<std::size_t>(a)];
      acc.add(radius_weighted_norm(g, torus_partial(*t, p.data, orders), ell));
      int pos = d - 1;
      while (pos >= 0 && seq[static_cast<std::size_t>(pos)] == n - 1) seq[static_cast<std::size_t>(pos--)] = 0;
      if (pos < 0) break;
      ++seq[static_cast<std::size_t>(pos)];
    }
    return std::sqrt(acc.value());
  }
  const auto* r = radial_of(p);
  ComplexVector v = p.data;
  for (int i = 0; i < d; ++i) v = r->radial_derivative(v, i % 2 == 1);
  return std::sqrt(radius_weighted_norm(g, v, ell));
}

double spectral_tail(const Field& f) {
  const Field s = to_spectral(f);
  const double total = spectral_norm2(s.engine(), s.data, RealVector::Ones(s.data.size()));
  if (total == 0.0) return 0.0;
  return spectral_norm2(s.engine(), s.data, s.engine().tail_mask()) / total;
}

double boundary_fraction(const Field& f) {
  const Field p = to_physical(f);
  const GridEngine& g = p.engine();
  const double total = weighted_norm2(g.weights(), p.data);
  if (total == 0.0) return 0.0;
  return weighted_norm2((g.weights().array() * g.boundary_mask().array()).matrix(), p.data) / total;
}

double dilation_rate_refinement(const Field& f, double alpha, const PotentialSpec& pot) {
  const Field p = to_physical(f);
  const GridSpec& spec = p.engine().spec();
  const double base = dilation_rate(p, alpha, pot).discrete;
  GridSpec finer = spec;
  finer.points *= 2;
  GridSpec wider = finer;
  wider.extent *= 2.0;
  return std::abs(dilation_rate(resample(p, finer), alpha, pot).discrete - base) +
         std::abs(dilation_rate(resample(p, wider), alpha, pot).discrete - base);
}

DiagnosticsRecord diagnose(const Field& f, double t, double dt, double alpha, const PotentialSpec& pot,
                           bool refine_rate) {
  const Field p = to_physical(f);
  DiagnosticsRecord rec;
  rec.t = t;
  rec.dt = dt;
  rec.mass = mass(p);
  rec.energy = energy(p, alpha, pot);
  rec.dilation = dilation_expectation(p);
  rec.virial_moment = virial_moment(p, alpha);
  rec.hs_norm = sobolev_norm(p, 0.5 * pot.gamma);
  rec.spectral_tail = spectral_tail(p);
  rec.boundary_fraction = boundary_fraction(p);
  for (double ell : {1.0, 2.0}) rec.weighted_moments.push_back({ell, 0, weighted_moment(p, ell, 0)});
  rec.rate = dilation_rate(p, alpha, pot);
  if (refine_rate) rec.rate_refinement = dilation_rate_refinement(p, alpha, pot);
  return rec;
}

}  // namespace fhrt
