#include "fhrt/hartree.hpp"
#include "fhrt/quadrature.hpp"
#include "fhrt/special.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace fhrt;

namespace {

constexpr double kPi = std::numbers::pi;

// Newton: for radial ρ in R³, (|x|^{-1} ∗ ρ)(r) = (4π/r)∫_0^r s²ρ + 4π∫_r^∞ sρ.
// For ρ = e^{-s²} this is π^{3/2} erf(r)/r.
double coulomb_of_gaussian(double r) {
  return r < 1e-8 ? 2.0 * kPi : std::pow(kPi, 1.5) * std::erf(r) / r;
}

Field sqrt_gaussian_density(std::shared_ptr<const GridEngine> g) {
  // |u|² = e^{-|x|²}
  return make_field(g, (-0.5 * g->radius().array().square()).exp().cast<Complex>().matrix());
}

// (ψ|·|^{-γ} ∗ e^{-|·|²})(0) = |S^{n-1}| ∫ ψ(s) s^{n-1-γ} e^{-s²} ds
double potential_at_origin(int n, const PotentialSpec& pot) {
  auto f = [&](double s) { return pot.profile(s) * std::pow(s, n - 1 - pot.gamma) * std::exp(-s * s); };
  return sphere_area(n) * integrate_to_infinity(f, 0.0).value;
}

}  // namespace

TEST_CASE("zero density gives zero potential") {
  for (auto spec : {GridSpec{Engine::torus, 2, 32, 16.0, false}, GridSpec{Engine::radial, 4, 64, 16.0, false}}) {
    auto g = make_grid(spec);
    const HartreeResult v = hartree_potential(zero_field(g), {1.5});
    CHECK(v.potential.data.norm() == 0.0);
  }
}

TEST_CASE("gamma outside (0, n) is rejected") {
  auto g = make_grid({Engine::radial, 3, 64, 10.0, false});
  CHECK_THROWS_AS(hartree_potential(zero_field(g), {3.0}), ConfigError);
  CHECK_THROWS_AS(hartree_potential(zero_field(g), {-0.5}), ConfigError);
}

TEST_CASE("radial Coulomb potential of a Gaussian density") {
  auto g = make_grid({Engine::radial, 3, 512, 24.0, false});
  const HartreeResult v = hartree_potential(sqrt_gaussian_density(g), {1.0});
  const RealVector& r = g->radius();
  double err = 0.0;
  for (Eigen::Index j = 0; j < r.size(); ++j) {
    err = std::max(err, std::abs(v.potential.data[j].real() - coulomb_of_gaussian(r[j])));
  }
  CHECK(err < 1e-9);
  CHECK(v.potential.data.imag().norm() == 0.0);
  CHECK_FALSE(v.resolution_flag);
}

TEST_CASE("radial potential at the origin against quadrature, power and exponential kernels") {
  for (int n : {3, 4, 5}) {
    for (double gamma : {0.5, 1.5, 2.5}) {
      if (gamma >= n) continue;
      for (double mu : {0.0, 1.0}) {
        PotentialSpec pot{gamma, mu > 0.0 ? PsiFamily::exponential : PsiFamily::one, mu};
        auto g = make_grid({Engine::radial, n, 512, 24.0, false});
        const HartreeResult v = hartree_potential(sqrt_gaussian_density(g), pot);
        // origin is not a node: compare at the first node through a Taylor step
        const double r0 = g->radius()[0];
        const double exact0 = potential_at_origin(n, pot);
        CHECK(std::abs(v.potential.data[0].real() - exact0) < 1e-6 * exact0 + 10.0 * r0 * r0 * exact0);
      }
    }
  }
}

TEST_CASE("exponential kernel transform tends to the Riesz multiplier as mu -> 0") {
  for (int n : {3, 4}) {
    const double gamma = 1.5;
    for (double k : {0.3, 1.0, 4.0}) {
      const double riesz = riesz_constant(n, gamma) * std::pow(k, gamma - n);
      double previous = 1e300;
      for (double mu : {1.0, 0.1, 0.01}) {
        const double e = std::abs(kernel_transform(n, {gamma, PsiFamily::exponential, mu}, k) - riesz) / riesz;
        CHECK(e < previous);
        previous = e;
      }
      CHECK(previous < 0.05);
    }
  }
}

TEST_CASE("exponential kernel transform against direct Hankel quadrature in R^3") {
  // F[f](k) = (4π/k) ∫ f(r) r sin(kr) dr for radial f in R³
  const PotentialSpec pot{1.0, PsiFamily::exponential, 0.7};
  for (double k : {0.2, 1.0, 3.0}) {
    const double direct = 4.0 * kPi / k * integrate_to_infinity([&](double r) { return std::exp(-0.7 * r) * std::sin(k * r); }, 0.0).value;
    CHECK(kernel_transform(3, pot, k) == doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("cell averages: singular cell closed form in 1D, far cells approach point values") {
  const PotentialSpec pot{0.5};
  const int zero[1] = {0};
  const double h = 0.2;
  // (1/h)∫_{-h/2}^{h/2}|y|^{-1/2} = 2(h/2)^{1/2}/(1/2)/h
  CHECK(kernel_cell_average(1, zero, h, pot) == doctest::Approx(4.0 * std::sqrt(0.5 * h) / h).epsilon(1e-13));
  const int far[3] = {20, 3, 7};
  const double point = pot.kernel(h * std::sqrt(400.0 + 9.0 + 49.0));
  CHECK(kernel_cell_average(3, far, h, pot) == doctest::Approx(point).epsilon(1e-3));
  // 2D singular cell for γ = 1: ∫_{[-1/2,1/2]²} |y|^{-1} = 4 asinh(1)
  const int zero2[2] = {0, 0};
  CHECK(kernel_cell_average(2, zero2, 1.0, {1.0}) == doctest::Approx(4.0 * std::asinh(1.0)).epsilon(1e-12));
}

TEST_CASE("torus Coulomb potential converges to the whole-space value") {
  double previous = 0.0;
  for (int N : {32, 64}) {
    auto g = make_grid({Engine::torus, 3, N, 16.0, false});
    const HartreeResult v = hartree_potential(sqrt_gaussian_density(g), {1.0});
    const RealVector& r = g->radius();
    double err = 0.0;
    double vmin = 1e300;
    for (Eigen::Index j = 0; j < r.size(); ++j) {
      err = std::max(err, std::abs(v.potential.data[j].real() - coulomb_of_gaussian(r[j])));
      vmin = std::min(vmin, v.potential.data[j].real());
    }
    CHECK(vmin >= 0.0);
    if (previous > 0.0) CHECK(previous / err > 3.5);
    previous = err;
  }
  CHECK(previous < 0.04);
}

TEST_CASE("torus potential of a radial density is radial to discretisation accuracy") {
  auto g = make_grid({Engine::torus, 2, 64, 16.0, false});
  const HartreeResult v = hartree_potential(sqrt_gaussian_density(g), {1.2});
  const auto& t = dynamic_cast<const TorusEngine&>(*g);
  const RealVector x = t.coordinate(0);
  const RealVector y = t.coordinate(1);
  // swap symmetry x <-> y is exact on the grid
  for (Eigen::Index i = 0; i < g->size(); ++i) {
    for (Eigen::Index j = 0; j < g->size(); j += 97) {
      if (x[i] == y[j] && y[i] == x[j]) {
        CHECK(std::abs(v.potential.data[i] - v.potential.data[j]) < 1e-12 * std::abs(v.potential.data[i]));
      }
    }
  }
}
