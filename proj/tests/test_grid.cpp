#include "fhrt/evolution.hpp"
#include "fhrt/grid.hpp"
#include "fhrt/special.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace fhrt;

namespace {

constexpr double kPi = std::numbers::pi;

ComplexVector random_field(Eigen::Index size, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ComplexVector u(size);
  for (Eigen::Index i = 0; i < size; ++i) u[i] = Complex(g(rng), g(rng));
  return u;
}

ComplexVector gaussian(const GridEngine& g, double width = 1.0) {
  return (-(g.radius().array() / width).square() * 0.5).exp().cast<Complex>().matrix();
}

double rel_diff(const ComplexVector& a, const ComplexVector& b) { return (a - b).norm() / b.norm(); }

std::vector<GridSpec> all_grids() {
  return {{Engine::torus, 1, 64, 2.0 * kPi, false}, {Engine::torus, 2, 32, 16.0, false},
          {Engine::torus, 3, 16, 10.0, true},       {Engine::radial, 2, 128, 12.0, false},
          {Engine::radial, 3, 200, 15.0, false},    {Engine::radial, 4, 256, 16.0, false}};
}

}  // namespace

TEST_CASE("torus nodes are centred and weights are the cell volume") {
  auto g = make_grid({Engine::torus, 1, 8, 2.0 * kPi, false});
  const RealVector x = g->coordinate(0);
  for (int j = 0; j < 8; ++j) CHECK(x[j] == doctest::Approx(-kPi + j * 2.0 * kPi / 8).epsilon(1e-15));
  auto g3 = make_grid({Engine::torus, 3, 64, 32.0, false});
  CHECK(g3->size() == 262144);
  CHECK(g3->weights()[17] == doctest::Approx(std::pow(0.5, 3)));
}

TEST_CASE("radial order and nodes from Bessel zeros") {
  auto g = make_grid({Engine::radial, 4, 32, 10.0, false});
  const auto& radial = dynamic_cast<const RadialEngine&>(*g);
  CHECK(radial.order() == 1.0);
  const auto z = bessel_zeros(1.0, 33);
  CHECK(radial.radius()[3] == doctest::Approx(z[3] * 10.0 / z[32]).epsilon(1e-14));
  CHECK(std::abs(bessel_j(1.0, z[3])) < 1e-13);
}

TEST_CASE("invalid specs are configuration errors") {
  CHECK_THROWS_AS(make_grid({Engine::torus, 2, 48, 1.0, false}), ConfigError);
  CHECK_THROWS_AS(make_grid({Engine::radial, 1, 32, 1.0, false}), ConfigError);
  CHECK_THROWS_AS(make_grid({Engine::torus, 2, 32, -1.0, false}), ConfigError);
}

TEST_CASE("plane wave transforms to L^n at its mode") {
  const double L = 8.0;
  auto g = make_grid({Engine::torus, 2, 16, L, false});
  const auto& t = dynamic_cast<const TorusEngine&>(*g);
  const RealVector x = t.coordinate(0);
  const RealVector y = t.coordinate(1);
  const double kx = 2.0 * kPi / L * 3;
  const double ky = -2.0 * kPi / L * 2;
  ComplexVector u(g->size());
  for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = std::exp(Complex(0.0, kx * x[i] + ky * y[i]));
  const ComplexVector s = g->forward(u);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const bool hit = t.mode_index(0)[i] == 3 && t.mode_index(1)[i] == -2;
    CHECK(std::abs(s[i] - (hit ? Complex(L * L) : Complex(0.0))) < 1e-11);
  }
  const ComplexVector c = g->forward(ComplexVector::Constant(g->size(), Complex(2.5, 0.0)));
  CHECK(std::abs(c[0] - 2.5 * L * L) < 1e-12);
  CHECK(c.tail(c.size() - 1).norm() < 1e-11);
}

TEST_CASE("roundtrip and Plancherel on every grid") {
  std::mt19937_64 rng(7);
  for (const auto& spec : all_grids()) {
    auto g = make_grid(spec);
    double worst = 0.0;
    double plancherel = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const ComplexVector u = random_field(g->size(), rng);
      const ComplexVector s = g->forward(u);
      worst = std::max(worst, rel_diff(g->inverse(s), u));
      const double a = weighted_norm2(g->weights(), u);
      const double b = weighted_norm2(g->spectral_weights(), s);
      plancherel = std::max(plancherel, std::abs(a - b) / a);
    }
    CHECK(worst <= 1e-12);
    CHECK(plancherel <= 1e-10);
  }
}

TEST_CASE("representation mismatch is a usage error") {
  auto g = make_grid({Engine::torus, 1, 16, 1.0, false});
  Field f = zero_field(g);
  CHECK_THROWS_AS(transform(f, Direction::inverse), UsageError);
  CHECK_THROWS_AS(transform(to_spectral(f), Direction::forward), UsageError);
}

TEST_CASE("fractional Laplacian: eigenfunctions, identity, composition, symmetry") {
  const double L = 2.0 * kPi;
  auto g = make_grid({Engine::torus, 1, 32, L, false});
  const RealVector x = g->coordinate(0);
  ComplexVector wave(g->size());
  for (Eigen::Index i = 0; i < x.size(); ++i) wave[i] = std::exp(Complex(0.0, 5.0 * x[i]));
  const Field f = make_field(g, wave);
  CHECK(rel_diff(apply_symbol(f, Symbol::fractional_laplacian(1.3)).data, std::pow(5.0, 1.3) * wave) < 1e-12);
  CHECK(rel_diff(apply_symbol(f, Symbol::fractional_laplacian(0.0)).data, wave) < 1e-12);
  CHECK_THROWS_AS(Symbol::fractional_laplacian(-0.5), ConfigError);

  std::mt19937_64 rng(3);
  for (const auto& spec : all_grids()) {
    auto grid = make_grid(spec);
    const Field a = make_field(grid, gaussian(*grid) + 1e-3 * random_field(grid->size(), rng));
    const Field b = make_field(grid, gaussian(*grid, 0.7));
    const Field ab = apply_symbol(apply_symbol(a, Symbol::fractional_laplacian(0.6)), Symbol::fractional_laplacian(0.9));
    CHECK(rel_diff(ab.data, apply_symbol(a, Symbol::fractional_laplacian(1.5)).data) < 1e-10);
    const Field la = apply_symbol(a, Symbol::fractional_laplacian(1.5));
    const Field lb = apply_symbol(b, Symbol::fractional_laplacian(1.5));
    const Complex lhs = weighted_inner(grid->weights(), a.data, lb.data);
    const Complex rhs = weighted_inner(grid->weights(), la.data, b.data);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs));
  }
}

TEST_CASE("alpha = 2 matches centred second differences to second order") {
  double previous = 0.0;
  for (int N : {64, 128}) {
    const double L = 20.0;
    auto g = make_grid({Engine::torus, 1, N, L, false});
    const double h = L / N;
    const ComplexVector u = gaussian(*g);
    const ComplexVector lap = apply_symbol(make_field(g, u), Symbol::fractional_laplacian(2.0)).data;
    double err = 0.0;
    for (int j = 1; j + 1 < N; ++j) {
      const Complex fd = -(u[j + 1] - 2.0 * u[j] + u[j - 1]) / (h * h);
      err = std::max(err, std::abs(lap[j] - fd));
    }
    if (previous > 0.0) CHECK(previous / err == doctest::Approx(4.0).epsilon(0.05));
    previous = err;
  }
}

TEST_CASE("gradient: plane wave, constant, radial stencil order") {
  const double L = 2.0 * kPi;
  auto g = make_grid({Engine::torus, 2, 16, L, false});
  const RealVector x = g->coordinate(0);
  const RealVector y = g->coordinate(1);
  ComplexVector wave(g->size());
  for (Eigen::Index i = 0; i < x.size(); ++i) wave[i] = std::exp(Complex(0.0, 2.0 * x[i] - 3.0 * y[i]));
  const Field f = make_field(g, wave);
  CHECK(rel_diff(gradient(f, 1).data, Complex(0.0, -3.0) * wave) < 1e-12);
  CHECK(gradient(make_field(g, ComplexVector::Constant(g->size(), 1.0)), 0).data.norm() < 1e-12);
  CHECK_THROWS_AS(coordinate_multiply(f, 2), UsageError);

  double previous = 0.0;
  for (int M : {100, 200}) {
    auto r = make_grid({Engine::radial, 4, M, 10.0, false});
    const RealVector rr = r->radius();
    const ComplexVector u = (-0.5 * rr.array().square()).exp().cast<Complex>().matrix();
    const ComplexVector du = gradient(make_field(r, u), kRadialAxis).data;
    const ComplexVector exact = (-rr.array() * (-0.5 * rr.array().square()).exp()).cast<Complex>().matrix();
    const double err = (du - exact).cwiseAbs().maxCoeff();
    if (previous > 0.0) CHECK(previous / err > 12.0);
    previous = err;
  }
}

TEST_CASE("coordinate multiplication") {
  auto g = make_grid({Engine::torus, 1, 16, 4.0, false});
  const Field x = coordinate_multiply(make_field(g, ComplexVector::Constant(16, 1.0)), 0);
  for (int j = 1; j < 16; ++j) CHECK(x.data[j].real() == doctest::Approx(-x.data[16 - j].real()));

  auto r = make_grid({Engine::radial, 3, 256, 14.0, false});
  const Field u = make_field(r, gaussian(*r));
  const Field r2u = coordinate_multiply(coordinate_multiply(u, kRadialAxis), kRadialAxis);
  CHECK(rel_diff(r2u.data, (r->radius().array().square() * u.data.array()).matrix()) < 1e-15);
  const Field xu = coordinate_multiply(u, kRadialAxis);
  const double moment = weighted_norm2(r->weights(), xu.data);
  CHECK(moment == doctest::Approx(1.5 * std::pow(kPi, 1.5)).epsilon(1e-10));
}

TEST_CASE("Gauss-Legendre and Bessel helpers") {
  const GaussLegendreRule rule = gauss_legendre(10, 0.0, 2.0);
  double s = 0.0;
  for (int i = 0; i < 10; ++i) s += rule.weights[i] * std::pow(rule.nodes[i], 19);
  CHECK(s == doctest::Approx(std::pow(2.0, 20) / 20.0).epsilon(1e-13));
  for (double nu : {0.0, 0.5, 1.0, 1.5, 2.0}) {
    for (double z : bessel_zeros(nu, 50)) CHECK(std::abs(bessel_j(nu, z)) < 1e-12);
  }
  CHECK(sphere_area(3) == doctest::Approx(4.0 * kPi));
  // F[1/|x|] = 4π/|k|² in R³
  CHECK(riesz_constant(3, 1.0) == doctest::Approx(4.0 * kPi));
}

TEST_CASE("resample reproduces the band-limited field") {
  DatumSpec d;
  d.chirp = 0.3;
  for (auto spec : {GridSpec{Engine::torus, 1, 64, 16.0, false}, GridSpec{Engine::torus, 2, 64, 16.0, false},
                    GridSpec{Engine::radial, 3, 128, 12.0, false}}) {
    const Field u = make_datum(make_grid(spec), d);
    for (auto [pf, ef] : {std::pair{2, 1.0}, std::pair{2, 2.0}, std::pair{4, 2.0}}) {
      GridSpec target = spec;
      target.points *= pf;
      target.extent *= ef;
      const Field v = resample(u, target);
      const Field exact = make_datum(make_grid(target), d);
      CHECK((v.data - exact.data).norm() / exact.data.norm() < 1e-9);
      CHECK(mass(v) == doctest::Approx(mass(u)).epsilon(1e-10));
    }
    CHECK(resample(u, spec).data == u.data);
  }
  GridSpec bad{Engine::torus, 1, 96, 16.0, false};
  CHECK_THROWS_AS(resample(make_datum(make_grid({Engine::torus, 1, 64, 16.0, false}), d), bad), ConfigError);
}
