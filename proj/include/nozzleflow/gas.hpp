#pragma once

// Polytropic gas in critical-speed units: speeds are scaled by the critical
// speed and densities by the critical density, so the sonic point sits at
// q = 1, rho = 1.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "nozzleflow/errors.hpp"
#include "nozzleflow/quadrature.hpp"

namespace nozzleflow {

/// p(rho) = rho^gamma / gamma.
template <typename Scalar = double>
class GasLaw {
 public:
  explicit GasLaw(Scalar gamma) : gamma_(gamma) {
    if (!(gamma > 1)) throw DomainError("adiabatic exponent must exceed 1, got " + std::to_string(double(gamma)));
  }

  Scalar gamma() const { return gamma_; }

  Scalar pressure(Scalar rho) const {
    using std::pow;
    return pow(rho, gamma_) / gamma_;
  }
  Scalar pressure_derivative(Scalar rho) const {
    using std::pow;
    return pow(rho, gamma_ - 1);
  }
  Scalar pressure_second_derivative(Scalar rho) const {
    using std::pow;
    return (gamma_ - 1) * pow(rho, gamma_ - 2);
  }
  Scalar sound_speed(Scalar rho) const {
    using std::sqrt;
    return sqrt(pressure_derivative(rho));
  }

  /// h(rho) = int_1^rho p'(s)/s ds.
  Scalar enthalpy(Scalar rho) const {
    using std::expm1;
    using std::log;
    if (!(rho > 0)) throw DomainError("enthalpy requires positive density");
    return expm1((gamma_ - 1) * log(rho)) / (gamma_ - 1);
  }

 private:
  Scalar gamma_;
};

/// Density as a function of squared speed from Bernoulli's law,
/// rho(q^2) = ((g+1)/2 - (g-1)/2 q^2)^(1/(g-1)).
template <typename Scalar = double>
class DensityRelation {
 public:
  explicit DensityRelation(GasLaw<Scalar> gas)
      : gas_(gas),
        a_((gas.gamma() + 1) / 2),
        b_((gas.gamma() - 1) / 2),
        exponent_(1 / (gas.gamma() - 1)) {}

  const GasLaw<Scalar>& gas() const { return gas_; }

  /// Squared speed at which the density vanishes.
  Scalar vacuum_bound() const { return a_ / b_; }

  Scalar density(Scalar q2) const {
    using std::pow;
    check(q2);
    return pow(a_ - b_ * q2, exponent_);
  }

  /// d rho / d(q^2).
  Scalar density_derivative(Scalar q2) const {
    using std::pow;
    check(q2);
    return -exponent_ * b_ * pow(a_ - b_ * q2, exponent_ - 1);
  }

  /// (q^2 / rho) d rho / d(q^2); tends to -1/2 at the sonic point.
  Scalar log_slope(Scalar q2) const {
    check(q2);
    return -exponent_ * b_ * q2 / (a_ - b_ * q2);
  }

  /// d(log_slope)/d(log q^2).
  Scalar log_slope_derivative(Scalar q2) const {
    check(q2);
    const Scalar d = a_ - b_ * q2;
    return -exponent_ * b_ * a_ * q2 / (d * d);
  }

  /// int_0^t rho(s) ds in closed form.
  Scalar density_integral(Scalar t) const {
    using std::expm1;
    using std::log1p;
    using std::pow;
    check(t);
    const Scalar k1 = exponent_ + 1;
    return -pow(a_, k1) * expm1(k1 * log1p(-b_ * t / a_)) / (b_ * k1);
  }

  /// j(q) = rho(q^2) q; attains its maximum 1 at q = 1.
  Scalar momentum(Scalar q) const { return density(q * q) * q; }

  Scalar mach(Scalar q) const { return q / gas_.sound_speed(density(q * q)); }

 private:
  void check(Scalar q2) const {
    if (!(q2 >= 0) || !(q2 < vacuum_bound()))
      throw DomainError("squared speed " + std::to_string(double(q2)) + " outside [0, " +
                        std::to_string(double(vacuum_bound())) + ")");
  }

  GasLaw<Scalar> gas_;
  Scalar a_, b_, exponent_;
};

/// Subsonic truncation Theta of the density. Equal to rho below
/// 1 - 2*delta0, constant rho(1 - delta0) above 1 - delta0, and a monotone
/// C^2 bridge in between that keeps Theta + 2 Theta' s^2 bounded away from 0.
///
/// The bridge is built on the logarithmic slope sigma = d ln Theta / d ln s^2
/// over the band, parametrised by tau in [0, 1] (linear in ln s^2):
///   [0, w]       cubic Hermite from rho's slope (value and derivative) to p
///   [w, 1 - w]   plateau p > -1/2
///   [1 - w, 1]   smoothstep from p to 0
/// Strict ellipticity is Theta (1 + 2 sigma) > 0, i.e. sigma > -1/2. The
/// width w is chosen so that the integral of sigma reproduces the drop
/// ln(rho(1 - delta0) / rho(1 - 2 delta0)) exactly with p halfway between
/// the mean slope of rho over the band and -1/2.
template <typename Scalar = double>
class TruncatedDensity {
 public:
  TruncatedDensity(DensityRelation<Scalar> base, Scalar delta0) : base_(base), delta0_(delta0) {
    using std::log;
    using std::sqrt;
    if (!(delta0 > 0) || !(delta0 < Scalar(0.25)))
      throw DomainError("truncation parameter must lie in (0, 1/4), got " + std::to_string(double(delta0)));
    lower_ = 1 - 2 * delta0;
    upper_ = 1 - delta0;
    log_width_ = log(upper_ / lower_);
    rho_lower_ = base_.density(lower_);
    rho_upper_ = base_.density(upper_);
    slope0_ = base_.log_slope(lower_);
    curvature0_ = base_.log_slope_derivative(lower_) * log_width_;
    const Scalar mean_slope = log(rho_upper_ / rho_lower_) / log_width_;
    const Scalar target = (mean_slope - Scalar(0.5)) / 2;
    // integral of sigma = w s0 / 2 + w^2 m0 / 12 + p (1 - w)
    const Scalar qa = curvature0_ / 12, qb = slope0_ / 2 - target, qc = target - mean_slope;
    const Scalar disc = qb * qb - 4 * qa * qc;
    if (!(disc >= 0)) throw DomainError("no admissible truncation bridge");
    // Citardauq form for the root that survives qa -> 0, then the other one.
    const Scalar sq = sqrt(disc);
    const Scalar denom = -qb - (qb >= 0 ? sq : -sq);
    Scalar w = denom != 0 ? 2 * qc / denom : Scalar(-1);
    if (!(w > 0 && w < Scalar(0.5)) && qa != 0) w = denom / (2 * qa);
    if (!(w > 0 && w < Scalar(0.5))) throw DomainError("no admissible truncation bridge");
    ramp_ = w;
    plateau_ = (mean_slope - w * slope0_ / 2 - w * w * curvature0_ / 12) / (1 - w);
  }

  const DensityRelation<Scalar>& base() const { return base_; }
  Scalar delta0() const { return delta0_; }
  /// Squared speed below which Theta coincides with rho.
  Scalar certified_limit() const { return lower_; }
  Scalar band_lower() const { return lower_; }
  Scalar band_upper() const { return upper_; }
  Scalar plateau_value() const { return rho_upper_; }

  bool untruncated(Scalar s2) const { return s2 < lower_; }

  Scalar theta(Scalar s2) const {
    if (s2 < lower_) return base_.density(s2 < 0 ? Scalar(0) : s2);
    if (s2 >= upper_) return rho_upper_;
    return bridge(tau_of(s2));
  }

  /// dTheta / d(s^2).
  Scalar theta_prime(Scalar s2) const {
    if (s2 < lower_) return base_.density_derivative(s2 < 0 ? Scalar(0) : s2);
    if (s2 >= upper_) return Scalar(0);
    const Scalar tau = tau_of(s2);
    return bridge(tau) * sigma(tau) / s2;
  }

  /// Breakpoints of the bridge in s^2 (band start, ramp end, plateau end, band end).
  std::array<Scalar, 4> bridge_breakpoints() const {
    using std::exp;
    return {lower_, lower_ * exp(log_width_ * ramp_), lower_ * exp(log_width_ * (1 - ramp_)), upper_};
  }

 private:
  Scalar tau_of(Scalar s2) const {
    using std::log;
    return log(s2 / lower_) / log_width_;
  }

  Scalar bridge(Scalar tau) const {
    using std::exp;
    return rho_lower_ * exp(log_width_ * sigma_integral(tau));
  }

  Scalar sigma(Scalar tau) const {
    const Scalar w = ramp_;
    if (tau <= w) {
      const Scalar x = tau / w, x2 = x * x, x3 = x2 * x;
      return (2 * x3 - 3 * x2 + 1) * slope0_ + (x3 - 2 * x2 + x) * w * curvature0_ + (3 * x2 - 2 * x3) * plateau_;
    }
    if (tau < 1 - w) return plateau_;
    const Scalar x = (tau - (1 - w)) / w;
    return plateau_ * (1 - x * x * (3 - 2 * x));
  }

  Scalar sigma_integral(Scalar tau) const {
    const Scalar w = ramp_;
    auto ramp_in = [&](Scalar x) {
      const Scalar x2 = x * x, x3 = x2 * x, x4 = x3 * x;
      return w * ((x4 / 2 - x3 + x) * slope0_ + (x4 / 4 - 2 * x3 / 3 + x2 / 2) * w * curvature0_ +
                  (x3 - x4 / 2) * plateau_);
    };
    if (tau <= w) return ramp_in(tau / w);
    const Scalar head = ramp_in(Scalar(1));
    if (tau < 1 - w) return head + plateau_ * (tau - w);
    const Scalar x = (tau - (1 - w)) / w;
    return head + plateau_ * (1 - 2 * w) + w * plateau_ * (x - x * x * x + x * x * x * x / 2);
  }

  DensityRelation<Scalar> base_;
  Scalar delta0_;
  Scalar lower_ = 0, upper_ = 0, log_width_ = 0;
  Scalar rho_lower_ = 0, rho_upper_ = 0;
  Scalar slope0_ = 0, curvature0_ = 0;
  Scalar ramp_ = 0, plateau_ = 0;
};

/// F(q^2) = 1/2 int_0^{q^2} Theta(s^2) ds^2.
template <typename Scalar = double>
class EnergyDensity {
 public:
  explicit EnergyDensity(TruncatedDensity<Scalar> theta) : theta_(theta), rule_(20) {
    const auto br = theta_.bridge_breakpoints();
    f_lower_ = theta_.base().density_integral(br[0]) / 2;
    partial_[0] = f_lower_;
    for (int i = 0; i < 3; ++i)
      partial_[i + 1] = partial_[i] + rule_.integrate([&](Scalar s) { return theta_.theta(s); }, br[i], br[i + 1]) / 2;
  }

  const TruncatedDensity<Scalar>& theta() const { return theta_; }

  Scalar operator()(Scalar q2) const { return value(q2); }

  Scalar value(Scalar q2) const {
    if (q2 <= 0) return Scalar(0);
    const auto br = theta_.bridge_breakpoints();
    if (q2 < br[0]) return theta_.base().density_integral(q2) / 2;
    if (q2 >= br[3]) return partial_[3] + theta_.plateau_value() * (q2 - br[3]) / 2;
    int piece = 0;
    while (piece < 2 && q2 >= br[piece + 1]) ++piece;
    return partial_[piece] + rule_.integrate([&](Scalar s) { return theta_.theta(s); }, br[piece], q2) / 2;
  }

  Scalar derivative(Scalar q2) const { return theta_.theta(q2) / 2; }

 private:
  TruncatedDensity<Scalar> theta_;
  GaussLegendre<Scalar> rule_;
  Scalar f_lower_ = 0;
  std::array<Scalar, 4> partial_{};
};

/// Everything the discretization needs from the gas: the truncated
/// coefficient Theta, its energy density F and the untruncated relation.
template <typename Scalar = double>
class GasModel {
 public:
  GasModel(Scalar gamma, Scalar delta0)
      : law_(gamma), relation_(law_), theta_(relation_, delta0), energy_(theta_) {}

  const GasLaw<Scalar>& law() const { return law_; }
  const DensityRelation<Scalar>& relation() const { return relation_; }
  const TruncatedDensity<Scalar>& truncation() const { return theta_; }
  const EnergyDensity<Scalar>& energy() const { return energy_; }

  Scalar gamma() const { return law_.gamma(); }
  Scalar delta0() const { return theta_.delta0(); }
  Scalar theta(Scalar s2) const { return theta_.theta(s2); }
  Scalar theta_prime(Scalar s2) const { return theta_.theta_prime(s2); }
  Scalar F(Scalar q2) const { return energy_.value(q2); }

 private:
  GasLaw<Scalar> law_;
  DensityRelation<Scalar> relation_;
  TruncatedDensity<Scalar> theta_;
  EnergyDensity<Scalar> energy_;
};

/// Unique subsonic speed q in [0, 1) with rho(q^2) q = j, by bisection.
template <typename Scalar>
Scalar solve_q_from_flux(const DensityRelation<Scalar>& relation, Scalar j) {
  if (!(j >= 0)) throw DomainError("momentum density must be nonnegative");
  if (!(j < 1)) throw InfeasibleFluxError("momentum density " + std::to_string(double(j)) +
                                          " is not attainable by a subsonic flow (choking bound 1)");
  if (j == 0) return Scalar(0);
  Scalar lo = 0, hi = 1;
  for (int i = 0; i < 200 && hi - lo > Scalar(1e-17); ++i) {
    const Scalar mid = (lo + hi) / 2;
    if (relation.momentum(mid) < j)
      lo = mid;
    else
      hi = mid;
  }
  return (lo + hi) / 2;
}

template <typename Scalar>
struct EllipticityBounds {
  Scalar lambda;
  Scalar Lambda;
};

/// Extreme values of Theta and Theta + 2 Theta' s^2 over s^2 in [0, s2_max]
/// (plus the bridge breakpoints). These bound a_ij xi_i xi_j / |xi|^2 for
/// a_ij = Theta delta_ij + 2 Theta' w_i w_j.
template <typename Scalar>
EllipticityBounds<Scalar> ellipticity_bounds(const TruncatedDensity<Scalar>& theta, int samples = 100000,
                                             Scalar s2_max = 4) {
  Scalar lo = theta.theta(0), hi = lo;
  auto visit = [&](Scalar s2) {
    const Scalar th = theta.theta(s2);
    const Scalar normal = th + 2 * theta.theta_prime(s2) * s2;
    lo = std::min({lo, th, normal});
    hi = std::max({hi, th, normal});
  };
  for (int i = 0; i <= samples; ++i) visit(s2_max * Scalar(i) / Scalar(samples));
  for (Scalar b : theta.bridge_breakpoints()) visit(b);
  if (!(lo > 0)) throw DomainError("truncated coefficient is not uniformly elliptic (lambda <= 0)");
  return {lo, hi};
}

}  // namespace nozzleflow
