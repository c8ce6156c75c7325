#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace holling {

/// Univariate polynomial, coefficients in increasing degree order.
class Polynomial {
 public:
  Polynomial() : c_(Eigen::VectorXd::Zero(1)) {}
  explicit Polynomial(Eigen::VectorXd coeffs);
  Polynomial(std::initializer_list<double> coeffs);

  static Polynomial monomial(int degree, double coeff = 1.0);

  /// Degree after dropping exactly-zero leading coefficients (0 for constants).
  int degree() const;
  double operator[](int i) const { return i < c_.size() ? c_[i] : 0.0; }
  const Eigen::VectorXd& coefficients() const { return c_; }

  template <typename Scalar>
  Scalar operator()(const Scalar& x) const {
    Scalar r(0);
    for (int i = degree(); i >= 0; --i) r = r * x + Scalar(c_[i]);
    return r;
  }

  Polynomial derivative() const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double s, const Polynomial& a);

 private:
  Eigen::VectorXd c_;
};

/// All complex roots via eigenvalues of the companion matrix, each polished
/// by a few Newton steps. Leading coefficients below rel_tol * max|c| are
/// treated as zero.
std::vector<std::complex<double>> polynomial_roots(const Polynomial& p, double rel_tol = 1e-14);

/// Real roots (|Im| <= imag_tol * (1 + |z|)), sorted ascending. Close real
/// roots are kept separately; callers deduplicate.
std::vector<double> real_roots(const Polynomial& p, double imag_tol = 1e-7);

/// Bivariate polynomial sum c(i, j) x^i y^j.
class Bivariate {
 public:
  explicit Bivariate(int max_degree = 0) : c_(Eigen::MatrixXd::Zero(max_degree + 1, max_degree + 1)) {}
  static Bivariate constant(double v);
  static Bivariate x();
  static Bivariate y();

  double coeff(int i, int j) const {
    return (i < c_.rows() && j < c_.cols()) ? c_(i, j) : 0.0;
  }
  void set(int i, int j, double v);
  const Eigen::MatrixXd& coefficients() const { return c_; }
  int total_degree() const;

  double operator()(double x, double y) const;
  Eigen::Vector2d gradient(double x, double y) const;
  /// Homogeneous part of the given total degree.
  Bivariate homogeneous_part(int degree) const;

  friend Bivariate operator+(const Bivariate& a, const Bivariate& b);
  friend Bivariate operator-(const Bivariate& a, const Bivariate& b);
  friend Bivariate operator*(const Bivariate& a, const Bivariate& b);
  friend Bivariate operator*(double s, const Bivariate& a);

 private:
  Eigen::MatrixXd c_;
};

}  // namespace holling
