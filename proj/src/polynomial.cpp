#include "gridplan/polynomial.hpp"

#include <stdexcept>

namespace gridplan {

PolynomialProfile::PolynomialProfile(std::vector<double> coefficients, double duration)
    : coefficients_(std::move(coefficients)), duration_(duration) {
  if (!(duration_ > 0.0)) throw std::invalid_argument("profile duration must be > 0");
  const auto n = coefficients_.size();
  if (n != 5 && n != 6) throw std::invalid_argument("profile degree must be 4 or 5");
}

double PolynomialProfile::eval(double t, int order) const {
  if (order < 0 || order > 3) throw std::invalid_argument("derivative order must be 0..3");
  double value = 0.0;
  const int n = static_cast<int>(coefficients_.size());
  for (int i = n - 1; i >= order; --i) {
    double factor = 1.0;
    for (int k = 0; k < order; ++k) factor *= static_cast<double>(i - k);
    value = value * t + coefficients_[static_cast<std::size_t>(i)] * factor;
  }
  return value;
}

PolynomialProfile fit_quartic(double s0, double s0_dot, double s0_ddot, double s1_dot,
                              double s1_ddot, double t1) {
  if (!(t1 > 0.0)) throw std::invalid_argument("fit_quartic: t1 must be > 0");
  const double c0 = s0;
  const double c1 = s0_dot;
  const double c2 = 0.5 * s0_ddot;
  // Remaining end conditions on velocity and acceleration.
  const double dv = s1_dot - c1 - 2.0 * c2 * t1;
  const double da = s1_ddot - 2.0 * c2;
  const double c3 = (3.0 * dv - da * t1) / (3.0 * t1 * t1);
  const double c4 = (da * t1 - 2.0 * dv) / (4.0 * t1 * t1 * t1);
  return PolynomialProfile({c0, c1, c2, c3, c4}, t1);
}

PolynomialProfile fit_quintic(double s0, double s0_dot, double s0_ddot, double s1,
                              double s1_dot, double s1_ddot, double t1) {
  if (!(t1 > 0.0)) throw std::invalid_argument("fit_quintic: t1 must be > 0");
  const double c0 = s0;
  const double c1 = s0_dot;
  const double c2 = 0.5 * s0_ddot;
  const double t2 = t1 * t1;
  const double t3 = t2 * t1;
  const double t4 = t3 * t1;
  const double t5 = t4 * t1;
  const double dp = s1 - c0 - c1 * t1 - c2 * t2;
  const double dv = s1_dot - c1 - 2.0 * c2 * t1;
  const double da = s1_ddot - 2.0 * c2;
  const double c3 = (20.0 * dp - 8.0 * dv * t1 + da * t2) / (2.0 * t3);
  const double c4 = (-30.0 * dp + 14.0 * dv * t1 - 2.0 * da * t2) / (2.0 * t4);
  const double c5 = (12.0 * dp - 6.0 * dv * t1 + da * t2) / (2.0 * t5);
  return PolynomialProfile({c0, c1, c2, c3, c4, c5}, t1);
}

}  // namespace gridplan
