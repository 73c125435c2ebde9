#pragma once

#include <vector>

namespace gridplan {

// Polynomial motion profile over t in [0, duration]. Degree 4 profiles fix
// position/velocity/acceleration at t = 0 plus velocity/acceleration at the
// end (end position free, as cruising needs); degree 5 fixes all six.
class PolynomialProfile {
 public:
  PolynomialProfile() = default;
  PolynomialProfile(std::vector<double> coefficients, double duration);

  // Evaluates the profile or one of its derivatives (order 0..3).
  double eval(double t, int order = 0) const;
  double duration() const { return duration_; }
  int degree() const { return static_cast<int>(coefficients_.size()) - 1; }
  const std::vector<double>& coefficients() const { return coefficients_; }

 private:
  std::vector<double> coefficients_;  // c0 + c1 t + c2 t^2 + ...
  double duration_{0.0};
};

// Quartic profile s(t) with s(0), s'(0), s''(0), s'(t1), s''(t1) pinned.
// Throws std::invalid_argument if t1 <= 0.
PolynomialProfile fit_quartic(double s0, double s0_dot, double s0_ddot, double s1_dot,
                              double s1_ddot, double t1);

// Quintic profile with all six boundary conditions pinned.
PolynomialProfile fit_quintic(double s0, double s0_dot, double s0_ddot, double s1,
                              double s1_dot, double s1_ddot, double t1);

}  // namespace gridplan
