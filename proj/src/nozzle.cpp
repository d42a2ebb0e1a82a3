#include "nozzleflow/nozzle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nozzleflow {

template <int Dim>
Profile<Dim> Profile<Dim>::cylinder(double r0) {
  if (!(r0 > 0)) throw DomainError("cylinder radius must be positive");
  return Profile("cylinder", [r0](double) { return Jet{r0, 0, 0}; }, r0, r0, {0.0, 0.0});
}

template <int Dim>
Profile<Dim> Profile<Dim>::tanh_expansion(double r_minus, double r_plus, double length) {
  if (!(r_minus > 0) || !(r_plus > 0)) throw DomainError("tanh nozzle radii must be positive");
  if (!(length > 0)) throw DomainError("tanh nozzle transition length must be positive");
  auto radius = [=](double x) {
    const double t = std::tanh(x / length);
    const double sech2 = 1 - t * t;
    const double jump = r_plus - r_minus;
    return Jet{r_minus + jump * (1 + t) / 2, jump * sech2 / (2 * length), -jump * sech2 * t / (length * length)};
  };
  return Profile("tanh", radius, r_minus, r_plus, {0.0, 0.0});
}

template <int Dim>
Profile<Dim> Profile<Dim>::gaussian_throat(double r0, double depth, double width) {
  if (!(r0 > 0)) throw DomainError("throat far-field radius must be positive");
  if (!(depth >= 0)) throw DomainError("throat depth must be nonnegative");
  if (!(width > 0)) throw DomainError("throat width must be positive");
  auto radius = [=](double x) {
    const double w2 = width * width;
    const double e = std::exp(-x * x / w2);
    return Jet{r0 - depth * e, depth * e * 2 * x / w2, depth * e * (2 / w2 - 4 * x * x / (w2 * w2))};
  };
  return Profile("gaussian", radius, r0, r0, {0.0, 0.0});
}

template <int Dim>
Point<Dim> NozzleMap<Dim>::forward(const Point<Dim>& x) const {
  const double xn = x(Dim - 1);
  const double r = profile_.radius(xn).value;
  if (!(r > 0)) throw DomainError("nozzle has non-positive width at x_n = " + std::to_string(xn));
  const auto c = profile_.centerline(xn);
  Point<Dim> y;
  y.template head<Dim - 1>() = (x.template head<Dim - 1>() - c.value) / r;
  y(Dim - 1) = xn;
  if (y.template head<Dim - 1>().cwiseAbs().maxCoeff() > 1 + 1e-12)
    throw DomainError("point lies outside the nozzle");
  return y;
}

template <int Dim>
Point<Dim> NozzleMap<Dim>::inverse(const Point<Dim>& y) const {
  if (y.template head<Dim - 1>().cwiseAbs().maxCoeff() > 1 + 1e-12)
    throw DomainError("point lies outside the reference cylinder");
  const double yn = y(Dim - 1);
  const double r = profile_.radius(yn).value;
  const auto c = profile_.centerline(yn);
  Point<Dim> x;
  x.template head<Dim - 1>() = r * y.template head<Dim - 1>() + c.value;
  x(Dim - 1) = yn;
  return x;
}

template <int Dim>
MapJacobian<Dim> NozzleMap<Dim>::jacobian(const Point<Dim>& y) const {
  constexpr int n = Dim - 1;
  const Jet r = profile_.radius(y(n));
  const auto c = profile_.centerline(y(n));
  MapJacobian<Dim> out;
  out.sigma.setZero();
  for (int a = 0; a < n; ++a) {
    out.sigma(a, a) = 1 / r.value;
    out.sigma(n, a) = -(c.d1(a) + y(a) * r.d1) / r.value;
  }
  out.sigma(n, n) = 1;
  out.det = std::pow(r.value, n);
  return out;
}

template <int Dim>
bool NozzleMap<Dim>::contains(const Point<Dim>& x, double tol) const {
  const double xn = x(Dim - 1);
  const double r = profile_.radius(xn).value;
  if (!(r > 0)) return false;
  const auto c = profile_.centerline(xn);
  return ((x.template head<Dim - 1>() - c.value).cwiseAbs().array() <= r * (1 + tol)).all();
}

template <int Dim>
RegularityReport verify_regularity(const Profile<Dim>& profile, double K, double x_min, double x_max, int samples) {
  RegularityReport rep;
  rep.min_radius = std::numeric_limits<double>::infinity();
  rep.max_radius = -std::numeric_limits<double>::infinity();
  const auto [t_lo, t_hi] = profile.transition();
  double prev_left_gap = -1, prev_right_gap = -1;
  for (int i = 0; i < samples; ++i) {
    const double x = x_min + (x_max - x_min) * i / std::max(samples - 1, 1);
    const Jet r = profile.radius(x);
    const auto c = profile.centerline(x);
    rep.min_radius = std::min(rep.min_radius, r.value);
    rep.max_radius = std::max(rep.max_radius, r.value);
    const double worst = std::max({std::abs(r.d1), std::abs(r.d2), c.d1.cwiseAbs().maxCoeff(),
                                   c.d2.cwiseAbs().maxCoeff()});
    if (worst > rep.worst_derivative) {
      rep.worst_derivative = worst;
      rep.worst_station = x;
    }
    // Distance to the far-field limit shrinks moving away from the transition:
    // nondecreasing in x on the left, nonincreasing on the right.
    if (x <= t_lo) {
      const double gap = std::abs(r.value - profile.r_minus());
      if (prev_left_gap >= 0 && gap < prev_left_gap * (1 - 1e-12) - 1e-15) rep.monotone_far_field = false;
      prev_left_gap = gap;
    }
    if (x >= t_hi) {
      const double gap = std::abs(r.value - profile.r_plus());
      if (prev_right_gap >= 0 && gap > prev_right_gap * (1 + 1e-12) + 1e-15) rep.monotone_far_field = false;
      prev_right_gap = gap;
    }
  }
  rep.positive = rep.min_radius > 0;
  rep.bounded = rep.worst_derivative <= K;
  rep.passed = rep.positive && rep.bounded && rep.monotone_far_field;
  return rep;
}

template class Profile<2>;
template class Profile<3>;
template class NozzleMap<2>;
template class NozzleMap<3>;
template RegularityReport verify_regularity<2>(const Profile<2>&, double, double, double, int);
template RegularityReport verify_regularity<3>(const Profile<3>&, double, double, double, int);

}  // namespace nozzleflow
