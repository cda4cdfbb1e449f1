#include "fhrt/quadrature.hpp"

#include "fhrt/special.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>

namespace fhrt {

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment kronrod(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double gauss = fc * kWg[3];
  double kron = fc * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[static_cast<std::size_t>(j)];
    const double fsum = f(c - dx) + f(c + dx);
    kron += kWgk[static_cast<std::size_t>(j)] * fsum;
    if (j % 2 == 1) gauss += kWg[static_cast<std::size_t>(j / 2)] * fsum;
  }
  return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           QuadratureTolerance tol) {
  QuadratureResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::priority_queue<Segment> heap;
  Segment first = kronrod(f, a, b);
  heap.push(first);
  double total = first.value;
  double error = first.error;
  out.evaluations = 15;
  int intervals = 1;
  while (error > std::max(tol.absolute, tol.relative * std::abs(total)) && intervals < tol.max_intervals) {
    const Segment s = heap.top();
    heap.pop();
    const double mid = 0.5 * (s.a + s.b);
    if (!(mid > s.a && mid < s.b)) {
      heap.push(s);
      break;
    }
    const Segment left = kronrod(f, s.a, mid);
    const Segment right = kronrod(f, mid, s.b);
    total += left.value + right.value - s.value;
    error += left.error + right.error - s.error;
    heap.push(left);
    heap.push(right);
    out.evaluations += 30;
    ++intervals;
  }
  // re-sum from the leaves to shed accumulated drift in the running totals
  CompensatedSum<double> v;
  CompensatedSum<double> e;
  while (!heap.empty()) {
    v.add(heap.top().value);
    e.add(heap.top().error);
    heap.pop();
  }
  out.value = v.value();
  out.error = e.value();
  out.converged = out.error <= std::max(tol.absolute, tol.relative * std::abs(out.value));
  return out;
}

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const std::vector<double>& breaks, QuadratureTolerance tol) {
  std::vector<double> edges{a};
  for (double x : breaks) {
    if (x > a && x < b) edges.push_back(x);
  }
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  QuadratureResult out;
  out.converged = true;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const QuadratureResult piece = integrate(f, edges[i], edges[i + 1], tol);
    out.value += piece.value;
    out.error += piece.error;
    out.evaluations += piece.evaluations;
    out.converged = out.converged && piece.converged;
  }
  return out;
}

QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                       QuadratureTolerance tol) {
  auto g = [&f, a](double s) {
    const double one_minus = 1.0 - s;
    const double t = a + s / one_minus;
    if (!std::isfinite(t)) return 0.0;
    const double v = f(t);
    return v == 0.0 ? 0.0 : v / (one_minus * one_minus);
  };
  return integrate(g, 0.0, 1.0, tol);
}

std::vector<double> graded_panels(double a, double b, double grading_end, int geometric_levels,
                                  double uniform_width) {
  std::vector<double> edges{a};
  const double span = std::min(grading_end, b) - a;
  for (int level = geometric_levels; level >= 1; --level) edges.push_back(a + span * std::ldexp(1.0, -level));
  edges.push_back(a + span);
  const double start = a + span;
  if (b > start) {
    const int panels = std::max(1, static_cast<int>(std::ceil((b - start) / uniform_width)));
    for (int i = 1; i <= panels; ++i) edges.push_back(start + (b - start) * i / panels);
  }
  return edges;
}

CompositeRule composite_gauss_legendre(const std::vector<double>& edges, int points_per_panel) {
  const GaussLegendreRule ref = gauss_legendre(points_per_panel);
  const auto panels = static_cast<Eigen::Index>(edges.size()) - 1;
  CompositeRule rule{RealVector(panels * points_per_panel), RealVector(panels * points_per_panel)};
  for (Eigen::Index p = 0; p < panels; ++p) {
    const double a = edges[static_cast<std::size_t>(p)];
    const double b = edges[static_cast<std::size_t>(p) + 1];
    for (int q = 0; q < points_per_panel; ++q) {
      rule.nodes[p * points_per_panel + q] = 0.5 * (a + b) + 0.5 * (b - a) * ref.nodes[q];
      rule.weights[p * points_per_panel + q] = 0.5 * (b - a) * ref.weights[q];
    }
  }
  return rule;
}

}  // namespace fhrt
