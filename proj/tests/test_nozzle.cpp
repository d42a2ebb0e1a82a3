#include <cmath>
#include <random>

#include "doctest.h"
#include "nozzleflow/nozzle.hpp"

using namespace nozzleflow;

namespace {

template <int Dim>
Point<Dim> random_reference_point(std::mt19937& gen, double L = 6) {
  std::uniform_real_distribution<double> u(-1, 1);
  Point<Dim> y;
  for (int d = 0; d < Dim - 1; ++d) y(d) = u(gen);
  y(Dim - 1) = L * u(gen);
  return y;
}

// Central differences of the forward map: entry (i, j) = dy_j / dx_i.
template <int Dim>
Eigen::Matrix<double, Dim, Dim> fd_sigma(const NozzleMap<Dim>& map, const Point<Dim>& x, double step = 1e-6) {
  Eigen::Matrix<double, Dim, Dim> s;
  for (int i = 0; i < Dim; ++i) {
    Point<Dim> xp = x, xm = x;
    xp(i) += step;
    xm(i) -= step;
    s.row(i) = ((map.forward(xp) - map.forward(xm)) / (2 * step)).transpose();
  }
  return s;
}

template <int Dim>
double fd_inverse_det(const NozzleMap<Dim>& map, const Point<Dim>& y, double step = 1e-6) {
  Eigen::Matrix<double, Dim, Dim> m;
  for (int j = 0; j < Dim; ++j) {
    Point<Dim> yp = y, ym = y;
    yp(j) += step;
    ym(j) -= step;
    m.col(j) = (map.inverse(yp) - map.inverse(ym)) / (2 * step);
  }
  return m.determinant();
}

}  // namespace

TEST_CASE("unit cylinder map is the identity") {
  const NozzleMap<2> map(Profile<2>::cylinder(1.0));
  const Point<2> y = map.forward(Point<2>(0.5, 2.0));
  CHECK(y(0) == 0.5);
  CHECK(y(1) == 2.0);
  const auto J = map.jacobian(y);
  CHECK((J.sigma - Eigen::Matrix2d::Identity()).norm() == 0.0);
  CHECK(J.det == 1.0);
  CHECK(NozzleMap<2>(Profile<2>::cylinder(2.0)).jacobian(Point<2>(0.1, 0.3)).det == 2.0);
}

TEST_CASE("tanh nozzle maps") {
  const NozzleMap<2> map(Profile<2>::tanh_expansion(0.5, 1.0, 1.0));
  CHECK(map.profile().radius(0).value == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(map.forward(Point<2>(0.25, 0.0))(0) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  for (double yn : {-3.0, 0.0, 2.5}) {
    const Point<2> x = map.inverse(Point<2>(0.0, yn));
    CHECK(x(0) == 0.0);
    CHECK(x(1) == yn);
  }
  // Off-diagonal coupling at y_n = 0: dy'/dx_n = -y' r'(0) / r(0), with r'(0) = (r+ - r-) / (2 l).
  const Point<2> y(0.6, 0.0);
  const auto J = map.jacobian(y);
  CHECK(J.sigma(1, 0) == doctest::Approx(-0.6 * 0.25 / 0.75).epsilon(1e-14));
  CHECK(J.sigma(0, 1) == 0.0);
  CHECK(J.sigma(1, 1) == 1.0);
}

TEST_CASE("section measures") {
  CHECK(NozzleMap<2>(Profile<2>::cylinder(0.5)).section_measure(3.0) == 1.0);
  const NozzleMap<2> tanh2(Profile<2>::tanh_expansion(0.5, 1.0, 1.0));
  CHECK(tanh2.measure_plus() == 2.0);
  CHECK(tanh2.measure_minus() == 1.0);
  CHECK(tanh2.section_measure(40.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(tanh2.section_measure(-40.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(NozzleMap<3>(Profile<3>::gaussian_throat(1.0, 0.3, 1.0)).section_measure(0.0) ==
        doctest::Approx(1.96).epsilon(1e-15));
  // exponential approach to the far field
  const double gap8 = 2.0 - tanh2.section_measure(8.0), gap16 = 2.0 - tanh2.section_measure(16.0);
  CHECK(gap16 < gap8 * 1e-6);
}

TEST_CASE("round trip on random points") {
  std::mt19937 gen(7);
  const NozzleMap<2> tanh2(Profile<2>::tanh_expansion(0.5, 1.0, 1.0));
  const NozzleMap<3> throat3(Profile<3>::gaussian_throat(1.0, 0.3, 1.0));
  double worst = 0;
  for (int i = 0; i < 10000; ++i) {
    const Point<2> y2 = random_reference_point<2>(gen);
    worst = std::max(worst, (tanh2.forward(tanh2.inverse(y2)) - y2).cwiseAbs().maxCoeff());
    const Point<3> y3 = random_reference_point<3>(gen);
    worst = std::max(worst, (throat3.forward(throat3.inverse(y3)) - y3).cwiseAbs().maxCoeff());
    CHECK(tanh2.contains(tanh2.inverse(y2)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("off-centre nozzle round trip and containment") {
  using P3 = Profile<3>;
  P3 bent(
      "bent", [](double x) { return Jet{0.8 + 0.1 * std::tanh(x), 0.1 / std::pow(std::cosh(x), 2), 0}; }, 0.7, 0.9,
      {-5, 5}, [](double x) {
        P3::CenterlineJet c;
        c.value << 0.2 * std::sin(x), 0.1 * x;
        c.d1 << 0.2 * std::cos(x), 0.1;
        c.d2 << -0.2 * std::sin(x), 0;
        return c;
      });
  const NozzleMap<3> map(bent);
  const Point<3> x(0.2 * std::sin(1.0) + 0.95, 0.1, 1.0);  // r(1) = 0.876
  CHECK_FALSE(map.contains(x));
  const Point<3> inside(0.2 * std::sin(1.0) + 0.3, 0.1, 1.0);
  CHECK(map.contains(inside));
  CHECK((map.inverse(map.forward(inside)) - inside).norm() < 1e-14);
  CHECK_THROWS_AS(map.forward(x), DomainError);
}

TEST_CASE("jacobian against finite differences") {
  std::mt19937 gen(11);
  const NozzleMap<2> tanh2(Profile<2>::tanh_expansion(0.5, 1.0, 1.0));
  const NozzleMap<3> throat3(Profile<3>::gaussian_throat(1.0, 0.3, 1.0));
  for (int i = 0; i < 200; ++i) {
    {
      const Point<2> y = random_reference_point<2>(gen, 3) * 0.9;
      const auto J = tanh2.jacobian(y);
      const auto fd = fd_sigma(tanh2, tanh2.inverse(y));
      CHECK((J.sigma - fd).norm() <= 1e-6 * fd.norm());
      CHECK(J.det == doctest::Approx(fd_inverse_det(tanh2, y)).epsilon(1e-6));
      CHECK(J.det == doctest::Approx(tanh2.profile().radius(y(1)).value).epsilon(1e-15));
    }
    {
      const Point<3> y = random_reference_point<3>(gen, 3) * 0.9;
      const auto J = throat3.jacobian(y);
      const auto fd = fd_sigma(throat3, throat3.inverse(y));
      CHECK((J.sigma - fd).norm() <= 1e-6 * fd.norm());
      CHECK(J.det == doctest::Approx(fd_inverse_det(throat3, y)).epsilon(1e-6));
      CHECK(J.det == doctest::Approx(std::pow(throat3.profile().radius(y(2)).value, 2)).epsilon(1e-14));
      CHECK(J.det > 0);
    }
  }
}

TEST_CASE("profile derivatives against finite differences") {
  for (const auto& p : {Profile<2>::tanh_expansion(0.5, 1.0, 1.0), Profile<2>::gaussian_throat(1.0, 0.3, 1.5)}) {
    for (double x : {-2.0, -0.3, 0.0, 0.7, 2.2}) {
      const double h = 1e-5;
      const double d1 = (p.radius(x + h).value - p.radius(x - h).value) / (2 * h);
      const double d2 = (p.radius(x + h).d1 - p.radius(x - h).d1) / (2 * h);
      CHECK(p.radius(x).d1 == doctest::Approx(d1).epsilon(1e-8));
      CHECK(p.radius(x).d2 == doctest::Approx(d2).epsilon(1e-7));
    }
  }
}

TEST_CASE("regularity screen") {
  CHECK(verify_regularity(Profile<2>::cylinder(0.5), 1.0).passed);
  CHECK(verify_regularity(Profile<3>::cylinder(2.0), 1.0).passed);

  // max |r'| = (r+ - r-) / (2 l): 0.25 at l = 1, 25 at l = 0.01
  const auto smooth = verify_regularity(Profile<2>::tanh_expansion(0.5, 1.0, 1.0), 1.0);
  CHECK(smooth.passed);
  const auto steep = verify_regularity(Profile<2>::tanh_expansion(0.5, 1.0, 0.01), 1.0);
  CHECK_FALSE(steep.passed);
  CHECK_FALSE(steep.bounded);
  CHECK(steep.positive);
  CHECK(steep.worst_derivative >= 25.0 * 0.99);

  const auto pinched = verify_regularity(Profile<2>::gaussian_throat(1.0, 1.2, 1.0), 10.0);
  CHECK_FALSE(pinched.passed);
  CHECK_FALSE(pinched.positive);
  CHECK(pinched.min_radius <= 0);
  CHECK(verify_regularity(Profile<2>::gaussian_throat(1.0, 0.3, 1.0), 10.0).passed);

  // a bump that overshoots r+ on the right is not a monotone far-field approach
  Profile<2> overshoot(
      "overshoot", [](double x) { return Jet{1.0 + 0.3 * std::exp(-(x - 5) * (x - 5)), 0, 0}; }, 1.0, 1.0, {-1, 1});
  CHECK_FALSE(verify_regularity(overshoot, 100.0).monotone_far_field);
}
