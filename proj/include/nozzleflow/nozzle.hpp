#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <utility>

#include "nozzleflow/errors.hpp"

namespace nozzleflow {

template <int Dim>
using Point = Eigen::Matrix<double, Dim, 1>;

/// Value and first two derivatives of a scalar function of x_n.
struct Jet {
  double value = 0;
  double d1 = 0;
  double d2 = 0;
};

/// Nozzle described by its half-width r(x_n) and centerline offset c(x_n).
/// The cross-section at station x_n is c(x_n) + r(x_n) * (-1, 1)^(Dim-1).
template <int Dim>
class Profile {
  static_assert(Dim == 2 || Dim == 3, "nozzles are 2D or 3D");

 public:
  using Transverse = Eigen::Matrix<double, Dim - 1, 1>;

  struct CenterlineJet {
    Transverse value = Transverse::Zero();
    Transverse d1 = Transverse::Zero();
    Transverse d2 = Transverse::Zero();
  };

  using RadiusFn = std::function<Jet(double)>;
  using CenterlineFn = std::function<CenterlineJet(double)>;

  /// `transition` is the axial interval outside of which r approaches its
  /// far-field limits monotonically.
  Profile(std::string name, RadiusFn radius, double r_minus, double r_plus, std::pair<double, double> transition,
          CenterlineFn centerline = {})
      : name_(std::move(name)),
        radius_(std::move(radius)),
        centerline_(std::move(centerline)),
        r_minus_(r_minus),
        r_plus_(r_plus),
        transition_(transition) {}

  static Profile cylinder(double r0);
  /// r(x) = r- + (r+ - r-) (1 + tanh(x / l)) / 2
  static Profile tanh_expansion(double r_minus, double r_plus, double length);
  /// r(x) = r0 - d exp(-x^2 / w^2); admissible for d < r0.
  static Profile gaussian_throat(double r0, double depth, double width);

  const std::string& name() const { return name_; }
  Jet radius(double xn) const { return radius_(xn); }
  CenterlineJet centerline(double xn) const { return centerline_ ? centerline_(xn) : CenterlineJet{}; }
  bool has_centerline() const { return static_cast<bool>(centerline_); }
  double r_minus() const { return r_minus_; }
  double r_plus() const { return r_plus_; }
  std::pair<double, double> transition() const { return transition_; }

  /// Measure of the cross-section of half-width r: (2r)^(Dim-1).
  static double measure_of(double r) { return Dim == 2 ? 2 * r : 4 * r * r; }

 private:
  std::string name_;
  RadiusFn radius_;
  CenterlineFn centerline_;
  double r_minus_, r_plus_;
  std::pair<double, double> transition_;
};

/// Jacobian data of the nozzle map at a point: sigma(i, j) = dy_j / dx_i, so
/// grad_x = sigma * grad_y, and det = det(dx/dy) = r^(Dim-1).
template <int Dim>
struct MapJacobian {
  Eigen::Matrix<double, Dim, Dim> sigma;
  double det;
};

/// y = T(x) = ((x' - c(x_n)) / r(x_n), x_n), mapping the nozzle onto the
/// reference cylinder (-1, 1)^(Dim-1) x R.
template <int Dim>
class NozzleMap {
 public:
  explicit NozzleMap(Profile<Dim> profile) : profile_(std::move(profile)) {}

  const Profile<Dim>& profile() const { return profile_; }

  Point<Dim> forward(const Point<Dim>& x) const;
  Point<Dim> inverse(const Point<Dim>& y) const;
  MapJacobian<Dim> jacobian(const Point<Dim>& y) const;
  double section_measure(double xn) const { return Profile<Dim>::measure_of(profile_.radius(xn).value); }
  bool contains(const Point<Dim>& x, double tol = 1e-12) const;

  /// Far-field section measures |S-|, |S+|.
  double measure_minus() const { return Profile<Dim>::measure_of(profile_.r_minus()); }
  double measure_plus() const { return Profile<Dim>::measure_of(profile_.r_plus()); }

 private:
  Profile<Dim> profile_;
};

struct RegularityReport {
  bool passed = true;
  bool positive = true;           ///< inf r > 0
  bool bounded = true;            ///< all derivative magnitudes <= K
  bool monotone_far_field = true; ///< r -> r+- monotonically outside the transition
  double min_radius = 0;
  double max_radius = 0;
  double worst_derivative = 0;    ///< max of |r'|, |r''|, |c'|, |c''|
  double worst_station = 0;
};

/// Samples the profile on [x_min, x_max] and checks the bounds a uniformly
/// bi-regular nozzle map needs. Reports violations; never throws.
template <int Dim>
RegularityReport verify_regularity(const Profile<Dim>& profile, double K, double x_min = -20, double x_max = 20,
                                   int samples = 20001);

}  // namespace nozzleflow
