#include "fhrt/hartree.hpp"

#include "fhrt/quadrature.hpp"
#include "fhrt/special.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <tuple>

namespace fhrt {

namespace {

constexpr double kPi = std::numbers::pi;

// ∫_0^ρ ψ(r) r^{n-1-γ} dr
double radial_primitive(int n, const PotentialSpec& pot, double rho) {
  const double a = n - pot.gamma;
  if (pot.psi == PsiFamily::one || pot.mu == 0.0) return std::pow(rho, a) / a;
  const double x = pot.mu * rho;
  if (x < 2.0) {
    double term = 1.0;
    double sum = 1.0 / a;
    for (int k = 1; k < 200; ++k) {
      term *= -x / k;
      const double c = term / (a + k);
      sum += c;
      if (std::abs(c) < 1e-17 * std::abs(sum)) break;
    }
    return std::pow(rho, a) * sum;
  }
  QuadratureTolerance tol{0.0, 1e-14, 2000};
  return integrate([&](double r) { return pot.profile(r) * std::pow(r, a - 1.0); }, 0.0, rho, tol).value;
}

double singular_cell_integral(int n, double h, const PotentialSpec& pot) {
  const double half = 0.5 * h;
  if (n == 1) return 2.0 * radial_primitive(1, pot, half);
  // Each of the 2n faces sees the origin under the same solid angle:
  // ∫_cube f = 2n ∫_face (h/2)|p|^{-n} G(|p|) dS.
  const GaussLegendreRule rule = gauss_legendre(24, -half, half);
  const int q = static_cast<int>(rule.nodes.size());
  CompensatedSum<double> face;
  if (n == 2) {
    for (int i = 0; i < q; ++i) {
      const double rho = std::hypot(half, rule.nodes[i]);
      face.add(rule.weights[i] * half * std::pow(rho, -2) * radial_primitive(2, pot, rho));
    }
  } else if (n == 3) {
    for (int i = 0; i < q; ++i) {
      for (int j = 0; j < q; ++j) {
        const double rho = std::sqrt(half * half + rule.nodes[i] * rule.nodes[i] + rule.nodes[j] * rule.nodes[j]);
        face.add(rule.weights[i] * rule.weights[j] * half * std::pow(rho, -3) * radial_primitive(3, pot, rho));
      }
    }
  } else {
    throw ConfigError("torus Hartree potential supports n <= 3");
  }
  return 2.0 * n * face.value();
}

double product_rule_integral(int n, const double* lo, double width, int subdivisions, int points,
                             const PotentialSpec& pot) {
  const GaussLegendreRule ref = gauss_legendre(points);
  const double sub = width / subdivisions;
  const int per_axis = subdivisions * points;
  std::vector<double> x(static_cast<std::size_t>(per_axis * n));
  std::vector<double> w(static_cast<std::size_t>(per_axis));
  for (int s = 0; s < subdivisions; ++s) {
    for (int p = 0; p < points; ++p) {
      const double t = (s + 0.5 * (ref.nodes[p] + 1.0)) * sub;
      w[static_cast<std::size_t>(s * points + p)] = 0.5 * sub * ref.weights[p];
      for (int a = 0; a < n; ++a) x[static_cast<std::size_t>(a * per_axis + s * points + p)] = lo[a] + t;
    }
  }
  CompensatedSum<double> acc;
  std::array<int, 3> it{0, 0, 0};
  const int total = static_cast<int>(std::pow(per_axis, n));
  for (int flat = 0; flat < total; ++flat) {
    int rem = flat;
    double r2 = 0.0;
    double weight = 1.0;
    for (int a = 0; a < n; ++a) {
      it[static_cast<std::size_t>(a)] = rem % per_axis;
      rem /= per_axis;
      const double xa = x[static_cast<std::size_t>(a * per_axis + it[static_cast<std::size_t>(a)])];
      r2 += xa * xa;
      weight *= w[static_cast<std::size_t>(it[static_cast<std::size_t>(a)])];
    }
    acc.add(weight * pot.kernel(std::sqrt(r2)));
  }
  return acc.value();
}

// Hankel-space ingredients for the radial far-field correction.
double scaled_bessel(double nu, double k, double r) {
  const double z = k * r;
  if (z < 1e-4) {
    return std::pow(0.5 * k, nu) / std::tgamma(nu + 1.0) * (1.0 - z * z / (4.0 * (nu + 1.0)));
  }
  return bessel_j(nu, z) * std::pow(r, -nu);
}

}  // namespace

void PotentialSpec::validate(int n) const {
  if (!(gamma > 0.0) || !(gamma < n)) throw ConfigError("gamma must lie in (0, n)");
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw ConfigError("mu must be >= 0");
  if (!std::isfinite(coupling)) throw ConfigError("coupling must be finite");
}

double PotentialSpec::profile(double r) const {
  return psi == PsiFamily::exponential ? std::exp(-mu * r) : 1.0;
}

double PotentialSpec::kernel(double r) const { return profile(r) * std::pow(r, -gamma); }

double kernel_transform(int n, const PotentialSpec& pot, double k) {
  if (pot.psi == PsiFamily::one || pot.mu == 0.0) return riesz_constant(n, pot.gamma) * std::pow(k, pot.gamma - n);
  // F[e^{-s|x|}](k) = c_n s (s² + k²)^{-(n+1)/2}, subordinated through
  // r^{-γ} e^{-μr} = Γ(γ)^{-1} ∫ t^{γ-1} e^{-(μ+t)r} dt. On t < 1 use
  // t = u^{1/γ}, beyond it t = e^y, and close with the algebraic tail.
  const double cn = std::pow(2.0, n) * std::pow(kPi, 0.5 * (n - 1)) * std::tgamma(0.5 * (n + 1));
  const double g = pot.gamma;
  const double mu = pot.mu;
  const double p = 0.5 * (n + 1);
  auto head = [=](double u) {
    const double s = mu + std::pow(u, 1.0 / g);
    return s * std::pow(s * s + k * k, -p) / g;
  };
  auto body = [=](double y) {
    const double t = std::exp(y);
    const double s = mu + t;
    return std::exp(g * y - p * std::log(s * s + k * k)) * s;
  };
  const double top = std::min(600.0, std::max(0.0, std::log(k + mu + 1.0)) + 40.0 / (n - g));
  QuadratureTolerance tol{0.0, 1e-13, 4000};
  const double value = integrate(head, 0.0, 1.0, tol).value + integrate(body, 0.0, top, tol).value +
                       std::exp((g - n) * top) / (n - g);
  return cn / std::tgamma(g) * value;
}

double kernel_cell_average(int n, const int* d, double h, const PotentialSpec& pot) {
  int far = 0;
  for (int a = 0; a < n; ++a) far = std::max(far, std::abs(d[a]));
  const double volume = std::pow(h, n);
  if (far == 0) return singular_cell_integral(n, h, pot) / volume;
  std::array<double, 3> lo{};
  for (int a = 0; a < n; ++a) lo[static_cast<std::size_t>(a)] = (d[a] - 0.5) * h;
  double integral = 0.0;
  if (far <= 2) {
    integral = product_rule_integral(n, lo.data(), h, 4, 8, pot);
  } else if (far <= 5) {
    integral = product_rule_integral(n, lo.data(), h, 1, 6, pot);
  } else {
    integral = product_rule_integral(n, lo.data(), h, 1, 4, pot);
  }
  return integral / volume;
}

HartreeOperator::HartreeOperator(std::shared_ptr<const GridEngine> grid, const PotentialSpec& pot)
    : grid_(std::move(grid)), pot_(pot) {
  const GridSpec& spec = grid_->spec();
  pot_.validate(spec.n);
  if (!pot_.enabled()) return;

  if (spec.engine == Engine::torus) {
    const int n = spec.n;
    if (n > 3) throw ConfigError("torus Hartree potential supports n <= 3");
    const int N = spec.points;
    const int P = 2 * N;
    const double h = spec.extent / N;
    padded_dims_.assign(static_cast<std::size_t>(n), P);
    padded_plan_ = std::make_unique<RealFftPlan>(padded_dims_);
    const Eigen::Index total = padded_plan_->real_size();
    RealVector kernel(total);
    std::map<std::array<int, 3>, double> memo;
    for (Eigen::Index flat = 0; flat < total; ++flat) {
      Eigen::Index rem = flat;
      std::array<int, 3> key{0, 0, 0};
      for (int a = n - 1; a >= 0; --a) {
        const int i = static_cast<int>(rem % P);
        rem /= P;
        key[static_cast<std::size_t>(a)] = std::abs(i < N ? i : i - P);
      }
      std::sort(key.begin(), key.begin() + n);
      auto found = memo.find(key);
      if (found == memo.end()) {
        found = memo.emplace(key, kernel_cell_average(n, key.data(), h, pot_)).first;
      }
      kernel[flat] = found->second;
    }
    Eigen::VectorXcd hat(padded_plan_->complex_size());
    padded_plan_->forward(kernel.data(), hat.data());
    // even kernel: the transform is real up to roundoff
    kernel_hat_ = hat.real() * (std::pow(h, n) / static_cast<double>(total));
    return;
  }

  const auto& radial = dynamic_cast<const RadialEngine&>(*grid_);
  const int n = spec.n;
  const double R = spec.extent;
  const double nu = radial.order();
  const RealVector& k = radial.wavenumber_magnitude();
  multiplier_.resize(k.size());
  for (Eigen::Index m = 0; m < k.size(); ++m) {
    multiplier_[m] = kernel_transform(n, pot_, k[m]);
  }

  sigma_ = std::max(R / 32.0, 8.0 * R / static_cast<double>(spec.points));
  const RealVector& r = radial.radius();
  reference_density_ = ((-(r.array() / sigma_).square()).exp() * std::pow(kPi * sigma_ * sigma_, -0.5 * n)).matrix();

  // Φ(r) = (2π)^{-n/2} r^{-ν} ∫ K̂(k) e^{-k²σ²/4} J_ν(kr) k^{ν+1} dk on a
  // panel rule graded towards the k^{γ-1} endpoint singularity.
  const double kcut = std::sqrt(160.0) / sigma_;
  const auto edges = graded_panels(0.0, kcut, std::min(0.5, kcut), 40, 0.5 * kPi / R);
  const CompositeRule rule = composite_gauss_legendre(edges, 16);
  RealVector profile(rule.nodes.size());
  for (Eigen::Index q = 0; q < rule.nodes.size(); ++q) {
    const double kq = rule.nodes[q];
    profile[q] = rule.weights[q] * kernel_transform(n, pot_, kq) * std::exp(-0.25 * kq * kq * sigma_ * sigma_) * std::pow(kq, nu + 1.0);
  }
  reference_potential_.resize(r.size());
  const double norm = std::pow(2.0 * kPi, -0.5 * n);
  for (Eigen::Index j = 0; j < r.size(); ++j) {
    CompensatedSum<double> acc;
    for (Eigen::Index q = 0; q < rule.nodes.size(); ++q) acc.add(profile[q] * scaled_bessel(nu, rule.nodes[q], r[j]));
    reference_potential_[j] = norm * acc.value();
  }
  // rank-one symmetrisation: the far-field split alone is not self-adjoint
  ComplexVector g = radial.forward(reference_density_.cast<Complex>());
  g.array() *= multiplier_.array();
  if (spec.dealias) g.tail(g.size() - g.size() / 2).setZero();
  reference_defect_ = ((reference_potential_ - radial.inverse(g).real()).array() * radial.weights().array()).matrix();
}

HartreeOperator::~HartreeOperator() = default;

RealVector HartreeOperator::apply(const RealVector& density) const {
  if (density.size() != grid_->size()) throw UsageError("density size does not match grid");
  if (!pot_.enabled()) return RealVector::Zero(density.size());
  RealVector v = grid_->spec().engine == Engine::torus ? apply_torus(density) : apply_radial(density);
  if (pot_.coupling != 1.0) v *= pot_.coupling;
  return v;
}

RealVector HartreeOperator::apply_torus(const RealVector& density) const {
  const auto& torus = dynamic_cast<const TorusEngine&>(*grid_);
  RealVector rho = density;
  if (torus.spec().dealias) {
    ComplexVector spec = torus.forward(rho.cast<Complex>());
    spec.array() *= torus.dealias_mask().array();
    rho = torus.inverse(spec).real();
  }
  RealVector out = convolve_padded(rho);
  if (torus.spec().dealias) {
    ComplexVector spec = torus.forward(out.cast<Complex>());
    spec.array() *= torus.dealias_mask().array();
    out = torus.inverse(spec).real();
  }
  return out;
}

RealVector HartreeOperator::convolve_padded(const RealVector& rho) const {
  const auto& torus = dynamic_cast<const TorusEngine&>(*grid_);
  const int n = torus.dimension();
  const int N = torus.points_per_axis();
  const int P = 2 * N;
  RealVector padded = RealVector::Zero(padded_plan_->real_size());
  const Eigen::Index total = torus.size();
  for (Eigen::Index flat = 0; flat < total; ++flat) {
    Eigen::Index rem = flat;
    Eigen::Index target = 0;
    Eigen::Index stride = 1;
    for (int a = n - 1; a >= 0; --a) {
      target += (rem % N) * stride;
      rem /= N;
      stride *= P;
    }
    padded[target] = rho[flat];
  }
  Eigen::VectorXcd hat(padded_plan_->complex_size());
  padded_plan_->forward(padded.data(), hat.data());
  hat.array() *= kernel_hat_.array();
  padded_plan_->backward(hat.data(), padded.data());
  RealVector out(total);
  for (Eigen::Index flat = 0; flat < total; ++flat) {
    Eigen::Index rem = flat;
    Eigen::Index source = 0;
    Eigen::Index stride = 1;
    for (int a = n - 1; a >= 0; --a) {
      source += (rem % N) * stride;
      rem /= N;
      stride *= P;
    }
    out[flat] = padded[source];
  }
  return out;
}

RealVector HartreeOperator::apply_radial(const RealVector& density) const {
  const auto& radial = dynamic_cast<const RadialEngine&>(*grid_);
  const double m = compensated_sum((radial.weights().array() * density.array()).matrix());
  const RealVector rest = density - m * reference_density_;
  ComplexVector spec = radial.forward(rest.cast<Complex>());
  spec.array() *= multiplier_.array();
  if (radial.spec().dealias) spec.tail(spec.size() - spec.size() / 2).setZero();
  const double shift = compensated_sum((reference_defect_.array() * rest.array()).matrix());
  return (radial.inverse(spec).real() + m * reference_potential_).array() + shift;
}

std::shared_ptr<const HartreeOperator> hartree_operator(std::shared_ptr<const GridEngine> grid,
                                                        const PotentialSpec& pot) {
  using Key = std::tuple<int, int, int, double, bool, double, int, double, double>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const HartreeOperator>> cache;
  const GridSpec& s = grid->spec();
  const Key key{static_cast<int>(s.engine), s.n, s.points, s.extent, s.dealias,
                pot.gamma, static_cast<int>(pot.psi), pot.mu, pot.coupling};
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto op = std::make_shared<const HartreeOperator>(make_grid(s), pot);
  cache.emplace(key, op);
  return op;
}

RealVector density(const Field& f) {
  if (f.rep != Representation::physical) throw UsageError("density needs a physical field");
  return f.data.cwiseAbs2();
}

HartreeResult hartree_potential(const Field& f, const PotentialSpec& pot) {
  if (f.rep != Representation::physical) throw UsageError("hartree_potential needs a physical field");
  const auto op = hartree_operator(f.grid, pot);
  const RealVector rho = density(f);
  HartreeResult out;
  out.potential = make_field(f.grid, op->apply(rho).cast<Complex>());
  const double total = compensated_sum((f.engine().weights().array() * rho.array()).matrix());
  const double edge =
      compensated_sum((f.engine().weights().array() * f.engine().boundary_mask().array() * rho.array()).matrix());
  out.boundary_fraction = total > 0.0 ? edge / total : 0.0;
  out.resolution_flag = out.boundary_fraction > 1e-8;
  return out;
}

}  // namespace fhrt
