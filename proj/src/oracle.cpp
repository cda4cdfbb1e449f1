#include "fhrt/oracle.hpp"

#include "fhrt/io.hpp"
#include "fhrt/quadrature.hpp"
#include "fhrt/special.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace fhrt {

namespace {

constexpr double kGaussReach = 9.4868329805051381;  // √90: e^{-45} relative tail

double rel_tol(int level) { return level <= 0 ? 1e-5 : 1e-7; }

/// A radial profile stripped to what quadrature needs.
struct Profile {
  std::function<double(double)> f;
  std::vector<double> breaks;
  double reach = 0.0;
};

Profile profile(const RadialTestFunction& g) { return {[&g](double r) { return g(r); }, g.breaks(), g.reach()}; }

Profile squared(const RadialTestFunction& g) {
  return {[&g](double r) {
            const double v = g(r);
            return v * v;
          },
          g.breaks(), g.reach()};
}

std::vector<double> edges_of(double a, double b, const std::vector<double>& inner) {
  std::vector<double> e{a, b};
  for (double x : inner) {
    if (x > a && x < b) e.push_back(x);
  }
  std::sort(e.begin(), e.end());
  const double eps = 1e-12 * (std::abs(a) + std::abs(b));
  e.erase(std::unique(e.begin(), e.end(), [eps](double u, double v) { return v - u <= eps; }), e.end());
  e.back() = b;
  return e;
}

/// Piecewise adaptive integral with one absolute target shared across
/// pieces, so negligible pieces do not chase relative accuracy. A scale of
/// zero triggers a loose pre-pass to find one.
double piecewise(const std::function<double(double)>& g, const std::vector<double>& edges, double rel, double scale = 0.0) {
  if (edges.size() < 2) return 0.0;
  const double pieces = static_cast<double>(edges.size() - 1);
  if (scale <= 0.0) {
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      scale += std::abs(integrate(g, edges[i], edges[i + 1], QuadratureTolerance{0.0, 1e-3, 200}).value);
    }
    if (scale == 0.0) return 0.0;
  }
  CompensatedSum<double> total;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const auto r = integrate(g, edges[i], edges[i + 1], QuadratureTolerance{rel * scale / pieces, rel, 20000});
    if (!r.converged || !std::isfinite(r.value)) throw std::runtime_error("oracle quadrature did not converge");
    total.add(r.value);
  }
  return total.value();
}

/// ∫_0^π (x² + s² - 2xs cos θ)^{-λ/2} sin^{n-2}θ dθ. The peak at θ = 0 has
/// width a = |x - s|/√(xs) when s is near x; θ = a sinh v flattens it.
double angular(double x, double s, double lambda, int n, double rel) {
  const double diff2 = (x - s) * (x - s);
  const double xs4 = 4.0 * x * s;
  const double a = std::max(std::abs(x - s) / std::sqrt(x * s), 1e-300);
  const double vmax = std::asinh(std::numbers::pi / a);
  auto g = [&](double v) {
    const double th = a * std::sinh(v);
    const double sh = std::sin(0.5 * th);
    const double q = diff2 + xs4 * sh * sh;
    const double sn = std::sin(th);
    double w = 1.0;
    for (int k = 2; k < n; ++k) w *= sn;
    return std::pow(q, -0.5 * lambda) * w * a * std::cosh(v);
  };
  std::vector<double> edges{0.0};
  for (double v = 4.0; v < vmax; v += 4.0) edges.push_back(v);
  edges.push_back(vmax);
  const double b = std::sqrt(std::numbers::pi) * std::tgamma(0.5 * (n - 1)) / std::tgamma(0.5 * n);
  return piecewise(g, edges, rel, 1e-2 * b * std::pow(x + s, -lambda));
}

double riesz(const Profile& p, int n, double lambda, double x, double rel) {
  if (x == 0.0) {
    auto g = [&](double s) { return p.f(s) * std::pow(s, n - 1 - lambda); };
    return sphere_area(n) * piecewise(g, edges_of(0.0, p.reach, p.breaks), rel);
  }
  auto at = [&](double tol) {
    return [&p, n, x, lambda, tol](double s) {
      const double v = p.f(s);
      if (v == 0.0) return 0.0;
      return v * std::pow(s, n - 1) * angular(x, s, lambda, n, tol);
    };
  };
  std::vector<double> inner = p.breaks;
  inner.push_back(x);
  const auto edges = edges_of(0.0, p.reach, inner);
  const double scale = std::abs(piecewise(at(1e-3), edges, 1e-3));
  if (scale == 0.0) return 0.0;
  return sphere_area(n - 1) * piecewise(at(rel), edges, rel, scale);
}

double lp_norm(const Profile& p, int n, double power, double rel) {
  auto g = [&](double s) { return std::pow(std::abs(p.f(s)), power) * std::pow(s, n - 1); };
  return std::pow(sphere_area(n) * piecewise(g, edges_of(0.0, p.reach, p.breaks), rel), 1.0 / power);
}

void require_nonzero(const RadialTestFunction& f) {
  if (f(0.5 * f.length_scale()) == 0.0 && f(f.reach() * 0.5) == 0.0) {
    throw ConfigError("degenerate input: zero function");
  }
}

/// Fixed outer rule for Stein–Weiss: a first panel [0, r_min], panels
/// doubling up to r_out with the function's breaks inserted, and a tail
/// r = r_out/t for t in (0, 1]. Weights carry the tail Jacobian. The fine
/// level raises the points per panel.
struct OuterRule {
  std::vector<double> r;
  std::vector<double> w;
};

OuterRule outer_rule(double scale, double r_out, const std::vector<double>& breaks, int level) {
  const int points = level <= 0 ? 8 : 12;
  std::vector<double> inner(breaks.begin(), breaks.end());
  for (double r = 1e-3 * scale; r < r_out; r *= 2.0) inner.push_back(r);
  const auto edges = edges_of(0.0, r_out, inner);
  OuterRule out;
  const CompositeRule body = composite_gauss_legendre(edges, points);
  for (Eigen::Index i = 0; i < body.nodes.size(); ++i) {
    out.r.push_back(body.nodes[i]);
    out.w.push_back(body.weights[i]);
  }
  const CompositeRule tail = composite_gauss_legendre({0.0, 0.25, 0.5, 0.75, 1.0}, points);
  for (Eigen::Index i = 0; i < tail.nodes.size(); ++i) {
    const double t = tail.nodes[i];
    out.r.push_back(r_out / t);
    out.w.push_back(tail.weights[i] * r_out / (t * t));
  }
  return out;
}

void check_stein_weiss(int n, double p, double beta, double lambda) {
  if (!(p >= 1.0)) throw ConfigError("Stein-Weiss: p must be >= 1");
  if (!(lambda > 0.0 && lambda < n)) throw ConfigError("Stein-Weiss: lambda must lie in (0, n)");
  if (!(beta < n / p)) throw ConfigError("Stein-Weiss: beta must be < n/p");
  if (std::abs(beta + lambda - n) > 1e-12) throw ConfigError("Stein-Weiss: beta + lambda must equal n");
}

std::vector<double> riesz_on(const RadialTestFunction& f, double lambda, const OuterRule& rule, int level) {
  const Profile pf = profile(f);
  std::vector<double> v;
  v.reserve(rule.r.size());
  for (double r : rule.r) v.push_back(riesz(pf, f.n(), lambda, r, rel_tol(level)));
  return v;
}

double weighted_lp(const OuterRule& rule, const std::vector<double>& values, int n, double p, double beta) {
  CompensatedSum<double> acc;
  for (std::size_t i = 0; i < rule.r.size(); ++i) {
    const double r = rule.r[i];
    acc.add(rule.w[i] * std::pow(r, n - 1 - beta * p) * std::pow(std::abs(values[i]), p));
  }
  return std::pow(sphere_area(n) * acc.value(), 1.0 / p);
}

/// Stein–Weiss sample on a given rule; random_mix goes through its atoms,
/// memoised in `atoms` per width.
RatioSample stein_weiss_on(const RadialTestFunction& f, double p, double beta, double lambda, const OuterRule& rule,
                           int level, std::map<double, std::vector<double>>* atoms) {
  std::vector<double> tf;
  if (f.kind() == RadialKind::random_mix && atoms) {
    tf.assign(rule.r.size(), 0.0);
    for (const auto& [c, w] : f.terms()) {
      auto it = atoms->find(w);
      if (it == atoms->end()) {
        it = atoms->emplace(w, riesz_on(RadialTestFunction::gaussian(f.n(), w), lambda, rule, level)).first;
      }
      for (std::size_t i = 0; i < tf.size(); ++i) tf[i] += c * it->second[i];
    }
  } else {
    tf = riesz_on(f, lambda, rule, level);
  }
  RatioSample s;
  s.id = f.id();
  s.lhs = weighted_lp(rule, tf, f.n(), p, beta);
  s.rhs = radial_lp_norm(f, p, level);
  s.ratio = s.lhs / s.rhs;
  return s;
}

OuterRule rule_for(const RadialTestFunction& f, int level) {
  return outer_rule(f.length_scale(), 1.5 * f.reach(), f.breaks(), level);
}

/// Shared rule for every random_mix function, covering the dictionary.
OuterRule mix_rule(int level) {
  const auto& d = RadialTestFunction::mix_dictionary();
  std::vector<double> breaks(d.begin(), d.end());
  return outer_rule(d.front(), 1.5 * kGaussReach * d.back(), breaks, level);
}

/// ∫_0^reach u(r) J_{n/2-1}(kr) r^{n/2} dr
double hankel(const Profile& u, int n, double k, double rel, double scale) {
  const double nu = 0.5 * n - 1.0;
  auto g = [&](double r) { return u.f(r) * bessel_j(nu, k * r) * std::pow(r, 0.5 * n); };
  std::vector<double> inner = u.breaks;
  const double piece = 4.0 * std::numbers::pi / std::max(k, 1e-300);
  const int count = std::min(4000, static_cast<int>(u.reach / piece));
  for (int i = 1; i <= count; ++i) inner.push_back(u.reach * i / (count + 1));
  return piecewise(g, edges_of(0.0, u.reach, inner), rel, scale);
}

/// ‖u‖²_{Ḣ^{s}} = |S^{n-1}| ∫ k^{2s+1} H(k)² dk, H the Hankel transform above.
double hdot_norm2(const RadialTestFunction& u, double s, int level) {
  const Profile pu = profile(u);
  const int n = u.n();
  const double rel = rel_tol(level);
  const double hscale =
      1e-2 * piecewise([&u, n](double r) { return std::abs(u(r)) * std::pow(r, 0.5 * n); },
                       edges_of(0.0, u.reach(), u.breaks()), 1e-6);
  auto g = [&](double k) {
    const double h = hankel(pu, n, k, rel, hscale);
    return std::pow(k, 2.0 * s + 1.0) * h * h;
  };
  const double k0 = 1.0 / u.length_scale();
  std::vector<double> edges{0.0};
  for (double k = 0.25 * k0; k < 64.0 * k0; k *= 2.0) edges.push_back(k);
  const double body = piecewise(g, edges, rel);
  const auto tail = integrate_to_infinity(g, edges.back(), {rel * std::abs(body), rel, 20000});
  if (!tail.converged) throw std::runtime_error("oracle quadrature did not converge (Hankel tail)");
  return sphere_area(n) * (body + tail.value);
}

double sup_of(const std::vector<RatioSample>& samples) {
  double m = 0.0;
  for (const auto& s : samples) m = std::max(m, s.ratio);
  return m;
}

std::uint64_t mix_seed(std::uint64_t seed, int i) { return seed * 1000003ULL + static_cast<std::uint64_t>(i); }

}  // namespace

RadialTestFunction RadialTestFunction::gaussian(int n, double width) {
  if (n < 1) throw ConfigError("test function needs n >= 1");
  if (!(width > 0.0)) throw ConfigError("gaussian width must be > 0");
  RadialTestFunction f;
  f.kind_ = RadialKind::gaussian;
  f.n_ = n;
  f.p1_ = width;
  return f;
}

RadialTestFunction RadialTestFunction::bump(int n, double r0, double width) {
  if (n < 1) throw ConfigError("test function needs n >= 1");
  if (!(width > 0.0) || !(r0 >= 0.0)) throw ConfigError("bump needs r0 >= 0 and width > 0");
  RadialTestFunction f;
  f.kind_ = RadialKind::bump;
  f.n_ = n;
  f.p1_ = r0;
  f.p2_ = width;
  return f;
}

RadialTestFunction RadialTestFunction::power_cutoff(int n, double a, double r0) {
  if (n < 1) throw ConfigError("test function needs n >= 1");
  if (!(r0 > 0.0)) throw ConfigError("power_cutoff needs r0 > 0");
  if (!(a < n)) throw ConfigError("power_cutoff needs a < n to be integrable");
  RadialTestFunction f;
  f.kind_ = RadialKind::power_cutoff;
  f.n_ = n;
  f.p1_ = a;
  f.p2_ = r0;
  return f;
}

const std::vector<double>& RadialTestFunction::mix_dictionary() {
  static const std::vector<double> widths = [] {
    std::vector<double> w;
    for (int m = 0; m <= 8; ++m) w.push_back(0.25 * std::pow(std::numbers::sqrt2, m));
    return w;
  }();
  return widths;
}

RadialTestFunction RadialTestFunction::random_mix(int n, std::uint64_t seed, int terms) {
  if (n < 1) throw ConfigError("test function needs n >= 1");
  if (terms < 1) throw ConfigError("random_mix needs at least one term");
  RadialTestFunction f;
  f.kind_ = RadialKind::random_mix;
  f.n_ = n;
  f.seed_ = seed;
  f.p1_ = terms;
  std::mt19937_64 rng(seed);
  const auto& dict = mix_dictionary();
  for (int j = 0; j < terms; ++j) {
    const double c = 0.1 + 0.9 * static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const double w = dict[static_cast<std::size_t>(rng() % dict.size())];
    f.terms_.emplace_back(c, w);
  }
  return f;
}

double RadialTestFunction::operator()(double r) const {
  switch (kind_) {
    case RadialKind::gaussian: {
      const double t = r / p1_;
      return amp_ * std::exp(-0.5 * t * t);
    }
    case RadialKind::bump: {
      const double t = (r - p1_) / p2_;
      return std::abs(t) < 1.0 ? amp_ * std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0;
    }
    case RadialKind::power_cutoff:
      return r < p2_ ? amp_ * (p1_ == 0.0 ? 1.0 : std::pow(r, -p1_)) : 0.0;
    case RadialKind::random_mix: {
      double v = 0.0;
      for (const auto& [c, w] : terms_) {
        const double t = r / w;
        v += c * std::exp(-0.5 * t * t);
      }
      return amp_ * v;
    }
  }
  return 0.0;
}

RadialTestFunction RadialTestFunction::dilated(double s) const {
  if (!(s > 0.0)) throw ConfigError("dilation factor must be > 0");
  RadialTestFunction f = *this;
  f.amp_ *= std::pow(s, 0.5 * n_);
  switch (kind_) {
    case RadialKind::gaussian:
      f.p1_ /= s;
      break;
    case RadialKind::bump:
      f.p1_ /= s;
      f.p2_ /= s;
      break;
    case RadialKind::power_cutoff:
      // (s r)^{-a} = s^{-a} r^{-a}
      f.amp_ *= std::pow(s, -p1_);
      f.p2_ /= s;
      break;
    case RadialKind::random_mix:
      for (auto& t : f.terms_) t.second /= s;
      break;
  }
  return f;
}

RadialTestFunction RadialTestFunction::scaled(double c) const {
  RadialTestFunction f = *this;
  f.amp_ *= c;
  return f;
}

std::string RadialTestFunction::id() const {
  std::ostringstream o;
  switch (kind_) {
    case RadialKind::gaussian:
      o << "gaussian(w=" << p1_ << ")";
      break;
    case RadialKind::bump:
      o << "bump(r0=" << p1_ << ";width=" << p2_ << ")";
      break;
    case RadialKind::power_cutoff:
      o << "power_cutoff(a=" << p1_ << ";r0=" << p2_ << ")";
      break;
    case RadialKind::random_mix:
      o << "random_mix(seed=" << seed_ << ";terms=" << terms_.size() << ")";
      break;
  }
  if (amp_ != 1.0) o << "*" << amp_;
  return o.str();
}

double RadialTestFunction::reach() const {
  switch (kind_) {
    case RadialKind::gaussian:
      return kGaussReach * p1_;
    case RadialKind::bump:
      return p1_ + p2_;
    case RadialKind::power_cutoff:
      return p2_;
    case RadialKind::random_mix: {
      double w = 0.0;
      for (const auto& t : terms_) w = std::max(w, t.second);
      return kGaussReach * w;
    }
  }
  return 0.0;
}

double RadialTestFunction::length_scale() const {
  switch (kind_) {
    case RadialKind::gaussian:
      return p1_;
    case RadialKind::bump:
      return p2_;
    case RadialKind::power_cutoff:
      return p2_;
    case RadialKind::random_mix: {
      double w = terms_.front().second;
      for (const auto& t : terms_) w = std::min(w, t.second);
      return w;
    }
  }
  return 1.0;
}

bool RadialTestFunction::radially_decreasing() const { return kind_ != RadialKind::bump || p1_ == 0.0; }

std::vector<double> RadialTestFunction::breaks() const {
  switch (kind_) {
    case RadialKind::gaussian:
      return {p1_, 3.0 * p1_};
    case RadialKind::bump:
      return p1_ > p2_ ? std::vector<double>{p1_ - p2_, p1_} : std::vector<double>{p1_};
    case RadialKind::power_cutoff:
      return {};
    case RadialKind::random_mix: {
      std::vector<double> b;
      for (const auto& t : terms_) b.push_back(t.second);
      return b;
    }
  }
  return {};
}

bool RadialTestFunction::in_lp(double p) const {
  if (amp_ == 0.0) return false;
  return kind_ != RadialKind::power_cutoff || p1_ * p < n_;
}

bool RadialTestFunction::in_hdot(double s) const {
  if (!in_lp(2.0)) return false;
  // the cutoff jump limits power_cutoff to s < 1/2, the origin to a + s < n/2
  return kind_ != RadialKind::power_cutoff || (s < 0.5 && p1_ + s < 0.5 * n_);
}

double radial_lp_norm(const RadialTestFunction& f, double p, int level) {
  if (!f.in_lp(p)) throw ConfigError("function is not in L^p: " + f.id());
  return lp_norm(profile(f), f.n(), p, rel_tol(level));
}

double riesz_convolution(const RadialTestFunction& f, double lambda, double x_mag, int level) {
  if (!(lambda > 0.0 && lambda < f.n())) throw ConfigError("Riesz exponent must lie in (0, n)");
  if (!(x_mag >= 0.0)) throw ConfigError("evaluation radius must be >= 0");
  return riesz(profile(f), f.n(), lambda, x_mag, rel_tol(level));
}

RatioSample weighted_convolution_sample(const RadialTestFunction& f, double gamma, double x_mag, int level) {
  const int n = f.n();
  if (n < 2) throw ConfigError("hypothesis violation: weighted convolution bound needs n >= 2");
  if (!(gamma > 0.0 && gamma < n - 1)) throw ConfigError("hypothesis violation: weighted convolution bound needs 0 < gamma < n-1");
  if (!(x_mag > 0.0)) throw ConfigError("weighted convolution needs |x| > 0");
  require_nonzero(f);
  RatioSample s;
  s.id = f.id();
  s.x = x_mag;
  s.lhs = riesz_convolution(f, gamma, x_mag, level);
  s.rhs = std::pow(x_mag, -gamma) * radial_lp_norm(f, 1.0, level);
  s.ratio = s.lhs / s.rhs;
  return s;
}

double weighted_convolution_ratio(const RadialTestFunction& f, double gamma, double x_mag, int level) {
  return weighted_convolution_sample(f, gamma, x_mag, level).ratio;
}

RatioSample stein_weiss_sample(const RadialTestFunction& f, double p, double beta, double lambda, int level) {
  check_stein_weiss(f.n(), p, beta, lambda);
  require_nonzero(f);
  if (!f.in_lp(p)) throw ConfigError("function is not in L^p: " + f.id());
  return stein_weiss_on(f, p, beta, lambda, rule_for(f, level), level, nullptr);
}

double stein_weiss_ratio(const RadialTestFunction& f, double p, double beta, double lambda, int level) {
  return stein_weiss_sample(f, p, beta, lambda, level).ratio;
}

RatioSample hardy_sobolev_sample(const RadialTestFunction& u, double gamma, int level) {
  const int n = u.n();
  if (!(gamma > 0.0 && gamma < n)) throw ConfigError("Hardy-Sobolev needs 0 < gamma < n");
  require_nonzero(u);
  if (!u.in_lp(2.0)) throw ConfigError("function is not square integrable: " + u.id());
  if (!u.in_hdot(0.5 * gamma)) throw ConfigError("function is not in the homogeneous Sobolev space: " + u.id());
  const Profile u2 = squared(u);
  RatioSample s;
  s.id = u.id();
  if (u.radially_decreasing()) {
    s.lhs = riesz(u2, n, gamma, 0.0, rel_tol(level));
  } else {
    for (int i = 0; i <= 16; ++i) {
      const double x = u.reach() * i / 16.0;
      const double v = riesz(u2, n, gamma, x, rel_tol(level));
      if (v > s.lhs) {
        s.lhs = v;
        s.x = x;
      }
    }
  }
  s.rhs = hdot_norm2(u, 0.5 * gamma, level);
  s.ratio = s.lhs / s.rhs;
  return s;
}

double hardy_sobolev_ratio(const RadialTestFunction& u, double gamma, int level) {
  return hardy_sobolev_sample(u, gamma, level).ratio;
}

double hardy_sobolev_dilation_drift(const RadialTestFunction& u, double gamma, const std::vector<double>& scales) {
  const double base = hardy_sobolev_ratio(u, gamma);
  double drift = 0.0;
  for (double s : scales) drift = std::max(drift, std::abs(hardy_sobolev_ratio(u.dilated(s), gamma) / base - 1.0));
  return drift;
}

bool RatioReport::accepted() const {
  if (samples.empty() || !(refinement_delta <= 0.05)) return false;
  return std::all_of(samples.begin(), samples.end(),
                     [](const RatioSample& s) { return std::isfinite(s.ratio) && s.ratio > 0.0; });
}

RatioReport weighted_convolution_suite(int n, double gamma, std::uint64_t seed) {
  RatioReport rep;
  rep.suite = "wconv";
  rep.n = n;
  rep.gamma = gamma;
  rep.seed = seed;
  std::vector<RadialTestFunction> fs{RadialTestFunction::power_cutoff(n, 0.0, 1.0),
                                     RadialTestFunction::power_cutoff(n, 0.5 * n, 1.0),
                                     RadialTestFunction::gaussian(n, 1.0),
                                     RadialTestFunction::bump(n, 0.0, 1.0),
                                     RadialTestFunction::bump(n, 1.0, 0.5)};
  for (int i = 0; i < 5; ++i) fs.push_back(RadialTestFunction::random_mix(n, mix_seed(seed, i), 3));
  const std::vector<double> xs{0.1, 0.3, 1.0, 2.0, 3.0, 10.0};
  std::vector<RatioSample> coarse;
  for (const auto& f : fs) {
    for (double x : xs) {
      rep.samples.push_back(weighted_convolution_sample(f, gamma, x, 1));
      coarse.push_back(weighted_convolution_sample(f, gamma, x, 0));
    }
  }
  rep.sup_ratio = sup_of(rep.samples);
  rep.refinement_delta = std::abs(rep.sup_ratio - sup_of(coarse)) / rep.sup_ratio;
  return rep;
}

RatioReport stein_weiss_suite(int n, double p, double beta, std::uint64_t seed, int mixes) {
  const double lambda = n - beta;
  check_stein_weiss(n, p, beta, lambda);
  RatioReport rep;
  rep.suite = "sw";
  rep.n = n;
  rep.p = p;
  rep.beta = beta;
  rep.lambda = lambda;
  rep.seed = seed;
  std::vector<RadialTestFunction> fs{RadialTestFunction::gaussian(n, 1.0),
                                     RadialTestFunction::bump(n, 0.0, 1.0),
                                     RadialTestFunction::bump(n, 0.0, 0.5),
                                     RadialTestFunction::bump(n, 0.0, 0.25),
                                     RadialTestFunction::bump(n, 1.0, 0.5),
                                     RadialTestFunction::power_cutoff(n, 0.0, 1.0),
                                     RadialTestFunction::power_cutoff(n, 0.5 * n / p, 1.0)};
  double coarse_sup = 0.0;
  for (const auto& f : fs) {
    rep.samples.push_back(stein_weiss_on(f, p, beta, lambda, rule_for(f, 1), 1, nullptr));
    coarse_sup = std::max(coarse_sup, stein_weiss_on(f, p, beta, lambda, rule_for(f, 0), 0, nullptr).ratio);
  }
  std::map<double, std::vector<double>> fine_atoms;
  std::map<double, std::vector<double>> coarse_atoms;
  const OuterRule fine_rule = mix_rule(1);
  const OuterRule coarse_rule = mix_rule(0);
  for (int i = 0; i < mixes; ++i) {
    const auto f = RadialTestFunction::random_mix(n, mix_seed(seed, i), 2 + i % 4);
    rep.samples.push_back(stein_weiss_on(f, p, beta, lambda, fine_rule, 1, &fine_atoms));
    coarse_sup = std::max(coarse_sup, stein_weiss_on(f, p, beta, lambda, coarse_rule, 0, &coarse_atoms).ratio);
  }
  rep.sup_ratio = sup_of(rep.samples);
  rep.refinement_delta = std::abs(rep.sup_ratio - coarse_sup) / rep.sup_ratio;
  return rep;
}

RatioReport hardy_sobolev_suite(int n, double gamma, std::uint64_t seed) {
  RatioReport rep;
  rep.suite = "hs";
  rep.n = n;
  rep.gamma = gamma;
  rep.seed = seed;
  std::vector<RadialTestFunction> fs{RadialTestFunction::gaussian(n, 1.0), RadialTestFunction::bump(n, 0.0, 1.0),
                                     RadialTestFunction::bump(n, 1.0, 0.5)};
  for (int i = 0; i < 3; ++i) fs.push_back(RadialTestFunction::random_mix(n, mix_seed(seed, i), 3));
  double coarse_sup = 0.0;
  for (const auto& f : fs) {
    rep.samples.push_back(hardy_sobolev_sample(f, gamma, 1));
    coarse_sup = std::max(coarse_sup, hardy_sobolev_sample(f, gamma, 0).ratio);
  }
  rep.sup_ratio = sup_of(rep.samples);
  rep.refinement_delta = std::abs(rep.sup_ratio - coarse_sup) / rep.sup_ratio;
  return rep;
}

void write_ratio_report(const RatioReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "function,x,lhs,rhs,ratio\n";
  for (const auto& s : report.samples) {
    out << '"' << s.id << "\"," << format_double(s.x) << ',' << format_double(s.lhs) << ',' << format_double(s.rhs) << ','
        << format_double(s.ratio) << '\n';
  }
  if (!out) throw std::runtime_error("failed writing: " + path);
}

std::string ratio_summary(const RatioReport& r) {
  std::ostringstream o;
  o << "suite = " << r.suite << "\nn = " << r.n << '\n';
  if (r.suite == "sw") {
    o << "p = " << r.p << "\nbeta = " << r.beta << "\nlambda = " << r.lambda << '\n';
  } else {
    o << "gamma = " << r.gamma << '\n';
  }
  o << "seed = " << r.seed << "\nsamples = " << r.samples.size() << "\nsup_ratio = " << format_double(r.sup_ratio)
    << "\nrefinement_delta = " << format_double(r.refinement_delta) << "\naccepted = " << (r.accepted() ? "yes" : "no")
    << '\n';
  return o.str();
}

}  // namespace fhrt
