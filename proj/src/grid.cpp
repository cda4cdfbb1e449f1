#include "fhrt/grid.hpp"

#include "fhrt/special.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

namespace fhrt {

namespace {

constexpr double kPi = std::numbers::pi;

// Fornberg's recursion for first-derivative weights at x0 on arbitrary nodes.
template <int Points>
Eigen::Matrix<double, 1, Points> first_derivative_weights(double x0, const double* x) {
  double c[2][Points] = {};
  c[0][0] = 1.0;
  double c1 = 1.0;
  double c4 = x[0] - x0;
  for (int i = 1; i < Points; ++i) {
    const int mn = std::min(i, 1);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        }
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  Eigen::Matrix<double, 1, Points> out;
  for (int i = 0; i < Points; ++i) out[i] = c[1][i];
  return out;
}

void check_axis(const GridSpec& spec, int axis) {
  if (spec.engine == Engine::radial) {
    if (axis != kRadialAxis && axis != 0) throw UsageError("radial engine has a single radial axis");
    return;
  }
  if (axis == kRadialAxis) return;
  if (axis < 0 || axis >= spec.n) {
    throw UsageError("axis " + std::to_string(axis) + " out of range for n = " + std::to_string(spec.n));
  }
}

}  // namespace

void GridSpec::validate() const {
  if (n < 1) throw ConfigError("n must be >= 1");
  if (!(extent > 0.0) || !std::isfinite(extent)) throw ConfigError("domain extent (L or R) must be positive");
  if (points < 2) throw ConfigError("grid needs at least 2 points");
  if (engine == Engine::torus) {
    if (!std::has_single_bit(static_cast<unsigned>(points))) {
      throw ConfigError("torus N must be a power of two");
    }
  } else if (n < 2) {
    throw ConfigError("radial engine requires n >= 2");
  }
}

// ---------------------------------------------------------------- torus --

TorusEngine::TorusEngine(GridSpec spec)
    : GridEngine(spec),
      spacing_(spec.extent / spec.points),
      plan_(std::vector<int>(static_cast<std::size_t>(spec.n), spec.points)) {
  const int n = spec.n;
  const int N = spec.points;
  const double L = spec.extent;
  const Eigen::Index total = plan_.size();

  axis_k_.assign(static_cast<std::size_t>(n), RealVector(total));
  axis_mode_.assign(static_cast<std::size_t>(n), Eigen::VectorXi(total));
  axis_x_.assign(static_cast<std::size_t>(n), RealVector(total));
  axis_saw_.assign(static_cast<std::size_t>(n), RealVector(total));
  phase_sign_.resize(total);
  tail_mask_.setZero(total);
  boundary_mask_.setZero(total);
  dealias_mask_.setOnes(total);
  kmag_.resize(total);
  radius_.resize(total);

  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  for (Eigen::Index flat = 0; flat < total; ++flat) {
    Eigen::Index rem = flat;
    for (int a = n - 1; a >= 0; --a) {
      idx[static_cast<std::size_t>(a)] = static_cast<int>(rem % N);
      rem /= N;
    }
    double k2 = 0.0;
    double x2 = 0.0;
    int parity = 0;
    for (int a = 0; a < n; ++a) {
      const int i = idx[static_cast<std::size_t>(a)];
      const int m = i < N / 2 ? i : i - N;
      const double k = 2.0 * kPi / L * m;
      const double x = -0.5 * L + i * spacing_;
      axis_mode_[static_cast<std::size_t>(a)][flat] = m;
      axis_k_[static_cast<std::size_t>(a)][flat] = k;
      axis_x_[static_cast<std::size_t>(a)][flat] = x;
      axis_saw_[static_cast<std::size_t>(a)][flat] = i == 0 ? 0.0 : x;
      k2 += k * k;
      x2 += x * x;
      parity += i;
      if (3 * std::abs(m) > N) {
        tail_mask_[flat] = 1.0;
        dealias_mask_[flat] = 0.0;
      }
      if (8.0 * std::abs(x) >= 3.0 * L) boundary_mask_[flat] = 1.0;
    }
    phase_sign_[flat] = (parity % 2 == 0) ? 1.0 : -1.0;
    kmag_[flat] = std::sqrt(k2);
    radius_[flat] = std::sqrt(x2);
  }
  weights_ = RealVector::Constant(total, std::pow(spacing_, n));
  spectral_weights_ = RealVector::Constant(total, std::pow(L, -n));
}

ComplexVector TorusEngine::forward(const ComplexVector& physical) const {
  if (physical.size() != size()) throw UsageError("field size does not match grid");
  ComplexVector out = physical;
  plan_.forward(out.data());
  out.array() *= phase_sign_.array() * std::pow(spacing_, spec_.n);
  return out;
}

ComplexVector TorusEngine::inverse(const ComplexVector& spectral) const {
  if (spectral.size() != size()) throw UsageError("field size does not match grid");
  ComplexVector out = spectral.array() * phase_sign_.array();
  plan_.backward(out.data());
  out *= std::pow(spec_.extent, -spec_.n);
  return out;
}

ComplexVector TorusEngine::derivative(const ComplexVector& physical, int axis) const {
  if (axis == kRadialAxis) throw UsageError("torus gradient needs a Cartesian axis");
  check_axis(spec_, axis);
  ComplexVector spec = forward(physical);
  const auto& k = axis_k_[static_cast<std::size_t>(axis)];
  const auto& m = axis_mode_[static_cast<std::size_t>(axis)];
  for (Eigen::Index i = 0; i < spec.size(); ++i) {
    spec[i] *= (2 * m[i] == -spec_.points) ? Complex(0.0) : Complex(0.0, k[i]);
  }
  return inverse(spec);
}

RealVector TorusEngine::coordinate(int axis) const {
  if (axis == kRadialAxis) return radius_;
  check_axis(spec_, axis);
  return axis_x_[static_cast<std::size_t>(axis)];
}

// --------------------------------------------------------------- radial --

struct RadialEngine::Companion {
  RealVector radii;
  RealVector to_scaled;   // r^ν √w' for the l = 1 profile
  RealVector wavenumbers;
  Eigen::MatrixXd transform;
  Eigen::MatrixXd interpolation;  // spectral (order ν) -> u at companion radii
};

RadialEngine::RadialEngine(GridSpec spec) : GridEngine(spec), nu_(0.5 * spec.n - 1.0) {
  const int n = spec.n;
  const int M = spec.points;
  const double R = spec.extent;
  const std::vector<double> z = bessel_zeros(nu_, M + 1);
  const double S = z.back();

  radius_.resize(M);
  kmag_.resize(M);
  w_.resize(M);
  v_.resize(M);
  RealVector jp(M);
  for (int j = 0; j < M; ++j) {
    radius_[j] = z[static_cast<std::size_t>(j)] * R / S;
    kmag_[j] = z[static_cast<std::size_t>(j)] / R;
    jp[j] = std::abs(bessel_j(nu_ + 1.0, z[static_cast<std::size_t>(j)]));
    w_[j] = 2.0 * R * R / (S * S * jp[j] * jp[j]);
    v_[j] = 2.0 / (R * R * jp[j] * jp[j]);
  }

  transform_.resize(M, M);
  for (int m = 0; m < M; ++m) {
    for (int j = 0; j <= m; ++j) {
      const double y = 2.0 * bessel_j(nu_, z[static_cast<std::size_t>(m)] * z[static_cast<std::size_t>(j)] / S) /
                       (S * jp[m] * jp[j]);
      transform_(m, j) = y;
      transform_(j, m) = y;
    }
  }
  defect_ = orthogonalize_symmetric(transform_);

  const double area = sphere_area(n);
  weights_ = area * (radius_.array().pow(n - 2.0) * w_.array()).matrix();
  spectral_weights_ = std::pow(2.0 * kPi, -n) * area * (kmag_.array().pow(n - 2.0) * v_.array()).matrix();
  to_scaled_ = (radius_.array().pow(nu_) * w_.array().sqrt()).matrix();
  from_scaled_ = (std::pow(2.0 * kPi, 0.5 * n) * kmag_.array().pow(-nu_) / v_.array().sqrt()).matrix();

  tail_mask_.setZero(M);
  boundary_mask_.setZero(M);
  for (int j = 0; j < M; ++j) {
    if (3 * j >= 2 * M) tail_mask_[j] = 1.0;
    if (8.0 * radius_[j] >= 7.0 * R) boundary_mask_[j] = 1.0;
  }

  // Extended nodes: even reflection through the origin, u(R) = 0.
  std::vector<double> ext(static_cast<std::size_t>(M) + 3);
  ext[0] = -radius_[1];
  ext[1] = -radius_[0];
  for (int j = 0; j < M; ++j) ext[static_cast<std::size_t>(j) + 2] = radius_[j];
  ext[static_cast<std::size_t>(M) + 2] = R;
  stencil_.resize(M, 5);
  stencil_start_.resize(M);
  for (int j = 0; j < M; ++j) {
    const int start = std::clamp(j, 0, M + 3 - 5);
    stencil_start_[j] = start;
    stencil_.row(j) = first_derivative_weights<5>(radius_[j], ext.data() + start);
  }
}

ComplexVector RadialEngine::forward(const ComplexVector& physical) const {
  if (physical.size() != size()) throw UsageError("field size does not match grid");
  const Eigen::Index M = size();
  ComplexVector scaled = physical.array() * to_scaled_.array();
  // Interleaved (re, im) viewed as a 2 x M real matrix; Q is symmetric.
  Eigen::Map<const Eigen::MatrixXd> in(reinterpret_cast<const double*>(scaled.data()), 2, M);
  ComplexVector out(M);
  Eigen::Map<Eigen::MatrixXd> res(reinterpret_cast<double*>(out.data()), 2, M);
  res.noalias() = in * transform_;
  out.array() *= from_scaled_.array();
  return out;
}

ComplexVector RadialEngine::inverse(const ComplexVector& spectral) const {
  if (spectral.size() != size()) throw UsageError("field size does not match grid");
  const Eigen::Index M = size();
  ComplexVector scaled = spectral.array() / from_scaled_.array();
  Eigen::Map<const Eigen::MatrixXd> in(reinterpret_cast<const double*>(scaled.data()), 2, M);
  ComplexVector out(M);
  Eigen::Map<Eigen::MatrixXd> res(reinterpret_cast<double*>(out.data()), 2, M);
  res.noalias() = in * transform_;
  out.array() /= to_scaled_.array();
  return out;
}

ComplexVector RadialEngine::derivative(const ComplexVector& physical, int axis) const {
  check_axis(spec_, axis);
  return radial_derivative(physical, false);
}

ComplexVector RadialEngine::radial_derivative(const ComplexVector& physical, bool odd) const {
  const Eigen::Index M = size();
  if (physical.size() != M) throw UsageError("field size does not match grid");
  const double reflect = odd ? -1.0 : 1.0;
  ComplexVector ext(M + 3);
  ext[0] = reflect * physical[1];
  ext[1] = reflect * physical[0];
  ext.segment(2, M) = physical;
  ext[M + 2] = 0.0;
  ComplexVector out(M);
  for (Eigen::Index j = 0; j < M; ++j) {
    const Eigen::Index s = stencil_start_[j];
    Complex acc = 0.0;
    for (int q = 0; q < 5; ++q) acc += stencil_(j, q) * ext[s + q];
    out[j] = acc;
  }
  return out;
}

RealVector RadialEngine::coordinate(int axis) const {
  check_axis(spec_, axis);
  return radius_;
}

const Eigen::MatrixXd& RadialEngine::vector_matrix() const {
  std::call_once(vector_once_, [this] {
    const Eigen::Index M = size();
    vector_matrix_.resize(M, M);
    const double prefactor = std::pow(2.0 * kPi, 0.5 * spec_.n);
    for (Eigen::Index m = 0; m < M; ++m) {
      const double scale = prefactor * std::pow(kmag_[m], -nu_);
      for (Eigen::Index j = 0; j < M; ++j) {
        vector_matrix_(m, j) = scale * w_[j] * std::pow(radius_[j], nu_ + 1.0) *
                               bessel_j(nu_ + 1.0, kmag_[m] * radius_[j]);
      }
    }
  });
  return vector_matrix_;
}

ComplexVector RadialEngine::vector_profile_transform(const ComplexVector& physical) const {
  if (physical.size() != size()) throw UsageError("field size does not match grid");
  return vector_matrix() * physical;
}

Eigen::MatrixXd RadialEngine::interpolation_matrix(const RealVector& radii) const {
  const Eigen::Index M = size();
  const double norm = std::pow(2.0 * kPi, -0.5 * spec_.n);
  Eigen::MatrixXd out(radii.size(), M);
  for (Eigen::Index i = 0; i < radii.size(); ++i) {
    const double rho = radii[i];
    for (Eigen::Index m = 0; m < M; ++m) {
      const double k = kmag_[m];
      // J_ν(kρ)/ρ^ν · k^ν, with its ρ -> 0 limit k^{2ν}/(2^ν Γ(ν+1))
      const double radial = rho > 0.0 ? bessel_j(nu_, k * rho) * std::pow(k / rho, nu_)
                                      : std::pow(k, 2.0 * nu_) / (std::pow(2.0, nu_) * std::tgamma(nu_ + 1.0));
      out(i, m) = norm * v_[m] * radial;
    }
  }
  return out;
}

ComplexVector RadialEngine::interpolate(const ComplexVector& spectral, const RealVector& radii) const {
  return interpolation_matrix(radii).cast<Complex>() * spectral;
}

const RadialEngine::Companion& RadialEngine::companion() const {
  std::call_once(companion_once_, [this] {
    auto c = std::make_unique<Companion>();
    const Eigen::Index M = size();
    const double mu = nu_ + 1.0;
    const double R = spec_.extent;
    const std::vector<double> z = bessel_zeros(mu, static_cast<int>(M) + 1);
    const double S = z.back();
    c->radii.resize(M);
    c->wavenumbers.resize(M);
    RealVector jp(M);
    RealVector w(M);
    for (Eigen::Index j = 0; j < M; ++j) {
      c->radii[j] = z[static_cast<std::size_t>(j)] * R / S;
      c->wavenumbers[j] = z[static_cast<std::size_t>(j)] / R;
      jp[j] = std::abs(bessel_j(mu + 1.0, z[static_cast<std::size_t>(j)]));
      w[j] = 2.0 * R * R / (S * S * jp[j] * jp[j]);
    }
    c->transform.resize(M, M);
    for (Eigen::Index m = 0; m < M; ++m) {
      for (Eigen::Index j = 0; j <= m; ++j) {
        const double y = 2.0 * bessel_j(mu, z[static_cast<std::size_t>(m)] * z[static_cast<std::size_t>(j)] / S) /
                         (S * jp[m] * jp[j]);
        c->transform(m, j) = y;
        c->transform(j, m) = y;
      }
    }
    orthogonalize_symmetric(c->transform);
    c->to_scaled = (c->radii.array().pow(nu_) * w.array().sqrt()).matrix();
    // the interpolant of u evaluated at the companion radii
    const double norm = std::pow(2.0 * kPi, -0.5 * spec_.n);
    c->interpolation.resize(M, M);
    for (Eigen::Index j = 0; j < M; ++j) {
      for (Eigen::Index m = 0; m < M; ++m) {
        c->interpolation(j, m) =
            norm * v_[m] * bessel_j(nu_, kmag_[m] * c->radii[j]) * std::pow(kmag_[m] / c->radii[j], nu_);
      }
    }
    companion_ = std::move(c);
  });
  return *companion_;
}

double RadialEngine::vector_sector_expectation(const ComplexVector& physical, double exponent) const {
  const Companion& c = companion();
  const ComplexVector u = c.interpolation * forward(physical);
  // profile p = r u of the field x u = p(r) x̂, in scaled coordinates
  const ComplexVector a = u.array() * c.radii.array() * c.to_scaled.array();
  ComplexVector b = c.transform * a;
  b.array() *= c.wavenumbers.array().pow(exponent);
  const ComplexVector q = c.transform * b;
  return sphere_area(spec_.n) * a.dot(q).real();
}

// ------------------------------------------------------------- factory --

double orthogonalize_symmetric(Eigen::MatrixXd& q, int max_iterations) {
  const Eigen::Index M = q.rows();
  double defect = 0.0;
  for (int it = 0;; ++it) {
    const Eigen::MatrixXd p = q * q;
    defect = (p - Eigen::MatrixXd::Identity(M, M)).cwiseAbs().maxCoeff();
    if (defect < 1e-14 || it == max_iterations) break;
    Eigen::MatrixXd next = 1.5 * q - 0.5 * (q * p);
    q = 0.5 * (next + next.transpose());
  }
  return defect;
}

namespace {

using GridKey = std::tuple<int, int, int, double, bool>;

GridKey grid_key(const GridSpec& spec) {
  return std::make_tuple(static_cast<int>(spec.engine), spec.n, spec.points, spec.extent, spec.dealias);
}

}  // namespace

std::shared_ptr<const GridEngine> make_grid(const GridSpec& spec) {
  spec.validate();
  static std::mutex mutex;
  static std::map<GridKey, std::shared_ptr<const GridEngine>> cache;
  const auto key = grid_key(spec);
  std::lock_guard lock(mutex);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  std::shared_ptr<const GridEngine> engine;
  if (spec.engine == Engine::torus) {
    engine = std::make_shared<const TorusEngine>(spec);
  } else {
    engine = std::make_shared<const RadialEngine>(spec);
  }
  cache.emplace(key, engine);
  return engine;
}

// --------------------------------------------------------------- fields --

Field make_field(std::shared_ptr<const GridEngine> grid, ComplexVector physical) {
  if (physical.size() != grid->size()) throw UsageError("field size does not match grid");
  return Field{std::move(grid), Representation::physical, std::move(physical)};
}

Field zero_field(std::shared_ptr<const GridEngine> grid) {
  const Eigen::Index size = grid->size();
  return Field{std::move(grid), Representation::physical, ComplexVector::Zero(size)};
}

Field transform(const Field& f, Direction direction) {
  if (direction == Direction::forward) {
    if (f.rep != Representation::physical) throw UsageError("forward transform needs a physical field");
    return Field{f.grid, Representation::spectral, f.grid->forward(f.data)};
  }
  if (f.rep != Representation::spectral) throw UsageError("inverse transform needs a spectral field");
  return Field{f.grid, Representation::physical, f.grid->inverse(f.data)};
}

Field to_physical(const Field& f) {
  return f.rep == Representation::physical ? f : transform(f, Direction::inverse);
}

Field to_spectral(const Field& f) {
  return f.rep == Representation::spectral ? f : transform(f, Direction::forward);
}

Symbol Symbol::fractional_laplacian(double alpha) {
  if (alpha < 0.0) throw ConfigError("fractional Laplacian exponent must be nonnegative");
  return {Kind::fractional_laplacian, alpha};
}

Symbol Symbol::half_virial(double alpha) { return {Kind::half_virial, 0.5 * (2.0 - alpha)}; }

Symbol Symbol::bessel(double s) { return {Kind::bessel, s}; }

Symbol Symbol::riesz(double exponent) { return {Kind::riesz, exponent}; }

double Symbol::operator()(double k, int n) const {
  switch (kind) {
    case Kind::fractional_laplacian:
    case Kind::half_virial:
      if (parameter == 0.0) return 1.0;
      if (k == 0.0) return 0.0;  // zero mode annihilated for either sign
      return std::pow(k, parameter);
    case Kind::bessel:
      return std::pow(1.0 + k * k, 0.5 * parameter);
    case Kind::riesz: {
      if (k == 0.0) return 0.0;
      const double gamma = parameter + n;
      return riesz_constant(n, gamma) * std::pow(k, parameter);
    }
  }
  return 0.0;
}

Field apply_multiplier(const Field& f, const RealVector& multiplier) {
  Field s = to_spectral(f);
  s.data.array() *= multiplier.array();
  return f.rep == Representation::physical ? transform(s, Direction::inverse) : s;
}

Field apply_symbol(const Field& f, const Symbol& s) {
  const GridEngine& g = f.engine();
  if (s.kind == Symbol::Kind::riesz) {
    if (g.spec().engine == Engine::torus) {
      throw UsageError("Riesz multiplier on the torus is not supported; use the Hartree convolution path");
    }
    const double gamma = s.parameter + g.dimension();
    if (!(gamma > 0.0 && gamma < g.dimension())) throw ConfigError("gamma must lie in (0, n)");
  }
  const RealVector& k = g.wavenumber_magnitude();
  RealVector m(k.size());
  for (Eigen::Index i = 0; i < k.size(); ++i) m[i] = s(k[i], g.dimension());
  return apply_multiplier(f, m);
}

Field coordinate_multiply(const Field& f, int axis) {
  if (f.rep != Representation::physical) throw UsageError("coordinate_multiply needs a physical field");
  check_axis(f.grid->spec(), axis);
  Field out = f;
  const auto* t = f.torus();
  out.data.array() *= (t != nullptr && axis != kRadialAxis ? t->sawtooth(axis) : f.grid->coordinate(axis)).array();
  return out;
}

Field gradient(const Field& f, int axis) {
  const Field p = to_physical(f);
  Field out{p.grid, Representation::physical, p.grid->derivative(p.data, axis)};
  return f.rep == Representation::physical ? out : to_spectral(out);
}

Field resample(const Field& f, const GridSpec& target) {
  const GridSpec& src = f.engine().spec();
  if (target.engine != src.engine || target.n != src.n) throw ConfigError("resample needs the same engine and n");
  auto grid = make_grid(target);
  if (target == src) return to_physical(f);
  if (src.engine == Engine::radial) {
    static std::mutex mutex;
    static std::map<std::pair<GridKey, GridKey>, std::shared_ptr<const Eigen::MatrixXd>> cache;
    const auto key = std::make_pair(grid_key(src), grid_key(target));
    std::shared_ptr<const Eigen::MatrixXd> matrix;
    {
      std::lock_guard lock(mutex);
      if (auto it = cache.find(key); it != cache.end()) matrix = it->second;
    }
    const RealVector& nodes = grid->radius();
    Eigen::Index inside = 0;
    while (inside < nodes.size() && nodes[inside] < src.extent) ++inside;
    if (!matrix) {
      auto built = std::make_shared<const Eigen::MatrixXd>(f.radial()->interpolation_matrix(nodes.head(inside)));
      std::lock_guard lock(mutex);
      if (cache.size() >= 4) cache.erase(cache.begin());
      matrix = cache.emplace(key, std::move(built)).first->second;
    }
    const ComplexVector spec = to_spectral(f).data;
    ComplexVector out = ComplexVector::Zero(grid->size());
    out.head(inside).real() = *matrix * spec.real();
    out.head(inside).imag() = *matrix * spec.imag();
    return make_field(grid, out);
  }
  const int n = src.n;
  const int N = src.points;
  const double h = src.extent / N;
  const double h2 = target.extent / target.points;
  const double ratio = h / h2;
  const int d = static_cast<int>(std::lround(ratio));
  const double shift = 0.5 * (target.extent - src.extent) / h2;
  const auto offset = static_cast<long>(std::lround(shift));
  if (d < 1 || std::abs(ratio - d) > 1e-9 * ratio || std::abs(shift - offset) > 1e-9 * std::max(1.0, shift) || offset < 0) {
    throw ConfigError("resample target grid does not contain the source nodes");
  }
  // spectral refinement to spacing h2 on the source box
  const int N1 = d * N;
  auto fine = make_grid({Engine::torus, n, N1, src.extent, false});
  const ComplexVector coarse = to_spectral(f).data;
  const auto* t = f.torus();
  ComplexVector padded = ComplexVector::Zero(fine->size());
  std::vector<int> m(static_cast<std::size_t>(n));
  for (Eigen::Index flat = 0; flat < coarse.size(); ++flat) {
    int nyquist = 0;
    for (int a = 0; a < n; ++a) {
      m[static_cast<std::size_t>(a)] = t->mode_index(a)[flat];
      if (2 * m[static_cast<std::size_t>(a)] == -N && d > 1) ++nyquist;
    }
    // a Nyquist coefficient is split evenly between ±N/2 on each such axis
    const double share = std::ldexp(1.0, -nyquist);
    for (int combo = 0; combo < (1 << nyquist); ++combo) {
      Eigen::Index target_flat = 0;
      int bit = 0;
      for (int a = 0; a < n; ++a) {
        int ma = m[static_cast<std::size_t>(a)];
        if (2 * ma == -N && d > 1) {
          if ((combo >> bit) & 1) ma = -ma;
          ++bit;
        }
        target_flat = target_flat * N1 + (ma < 0 ? ma + N1 : ma);
      }
      padded[target_flat] += share * coarse[flat];
    }
  }
  const ComplexVector refined = fine->inverse(padded);
  if (N1 == target.points) return make_field(grid, refined);
  ComplexVector out = ComplexVector::Zero(grid->size());
  const Eigen::Index total = refined.size();
  for (Eigen::Index flat = 0; flat < total; ++flat) {
    Eigen::Index rem = flat;
    Eigen::Index dest = 0;
    Eigen::Index stride = 1;
    for (int a = n - 1; a >= 0; --a) {
      dest += (rem % N1 + offset) * stride;
      rem /= N1;
      stride *= target.points;
    }
    out[dest] = refined[flat];
  }
  return make_field(grid, out);
}

}  // namespace fhrt
