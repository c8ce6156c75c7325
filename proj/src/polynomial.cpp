#include "holling/polynomial.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace holling {

Polynomial::Polynomial(Eigen::VectorXd coeffs) : c_(std::move(coeffs)) {
  if (c_.size() == 0) c_ = Eigen::VectorXd::Zero(1);
}

Polynomial::Polynomial(std::initializer_list<double> coeffs)
    : Polynomial(Eigen::Map<const Eigen::VectorXd>(coeffs.begin(), Eigen::Index(coeffs.size()))) {}

Polynomial Polynomial::monomial(int degree, double coeff) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(degree + 1);
  c[degree] = coeff;
  return Polynomial(c);
}

int Polynomial::degree() const {
  int d = int(c_.size()) - 1;
  while (d > 0 && c_[d] == 0.0) --d;
  return d;
}

Polynomial Polynomial::derivative() const {
  const int d = degree();
  if (d == 0) return Polynomial();
  Eigen::VectorXd c(d);
  for (int i = 1; i <= d; ++i) c[i - 1] = i * c_[i];
  return Polynomial(c);
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  const Eigen::Index n = std::max(a.c_.size(), b.c_.size());
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  c.head(a.c_.size()) += a.c_;
  c.head(b.c_.size()) += b.c_;
  return Polynomial(c);
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-1.0) * b; }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(a.c_.size() + b.c_.size() - 1);
  for (Eigen::Index i = 0; i < a.c_.size(); ++i) {
    for (Eigen::Index j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  }
  return Polynomial(c);
}

Polynomial operator*(double s, const Polynomial& a) { return Polynomial(Eigen::VectorXd(s * a.c_)); }

std::vector<std::complex<double>> polynomial_roots(const Polynomial& p, double rel_tol) {
  const Eigen::VectorXd& c = p.coefficients();
  const double cmax = c.cwiseAbs().maxCoeff();
  std::vector<std::complex<double>> roots;
  if (cmax == 0.0) return roots;
  int n = int(c.size()) - 1;
  while (n > 0 && std::abs(c[n]) <= rel_tol * cmax) --n;
  // Factor out roots at zero so the companion matrix stays well scaled.
  int low = 0;
  while (low < n && c[low] == 0.0) ++low;
  for (int i = 0; i < low; ++i) roots.emplace_back(0.0, 0.0);
  const int m = n - low;
  if (m <= 0) return roots;

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(m, m);
  for (int i = 1; i < m; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < m; ++i) companion(i, m - 1) = -c[low + i] / c[n];
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
  const Polynomial dp = p.derivative();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    std::complex<double> z = es.eigenvalues()[i];
    for (int it = 0; it < 4; ++it) {
      const std::complex<double> fz = p(z), dz = dp(z);
      if (std::abs(dz) == 0.0) break;
      const std::complex<double> step = fz / dz;
      if (!std::isfinite(std::abs(step)) || std::abs(step) > 1e-3 * (1.0 + std::abs(z))) break;
      z -= step;
    }
    roots.push_back(z);
  }
  return roots;
}

std::vector<double> real_roots(const Polynomial& p, double imag_tol) {
  std::vector<double> out;
  for (const auto& z : polynomial_roots(p)) {
    if (std::abs(z.imag()) <= imag_tol * (1.0 + std::abs(z))) out.push_back(z.real());
  }
  std::sort(out.begin(), out.end());
  return out;
}

Bivariate Bivariate::constant(double v) {
  Bivariate b(0);
  b.c_(0, 0) = v;
  return b;
}

Bivariate Bivariate::x() {
  Bivariate b(1);
  b.c_(1, 0) = 1.0;
  return b;
}

Bivariate Bivariate::y() {
  Bivariate b(1);
  b.c_(0, 1) = 1.0;
  return b;
}

void Bivariate::set(int i, int j, double v) {
  const int need = std::max(i, j) + 1;
  if (need > c_.rows()) {
    Eigen::MatrixXd grown = Eigen::MatrixXd::Zero(need, need);
    grown.topLeftCorner(c_.rows(), c_.cols()) = c_;
    c_ = grown;
  }
  c_(i, j) = v;
}

int Bivariate::total_degree() const {
  int d = 0;
  for (Eigen::Index i = 0; i < c_.rows(); ++i) {
    for (Eigen::Index j = 0; j < c_.cols(); ++j) {
      if (c_(i, j) != 0.0) d = std::max(d, int(i + j));
    }
  }
  return d;
}

double Bivariate::operator()(double x, double y) const {
  double r = 0.0;
  for (Eigen::Index i = c_.rows() - 1; i >= 0; --i) {
    double row = 0.0;
    for (Eigen::Index j = c_.cols() - 1; j >= 0; --j) row = row * y + c_(i, j);
    r = r * x + row;
  }
  return r;
}

Eigen::Vector2d Bivariate::gradient(double x, double y) const {
  double gx = 0.0, gy = 0.0;
  for (Eigen::Index i = 0; i < c_.rows(); ++i) {
    for (Eigen::Index j = 0; j < c_.cols(); ++j) {
      const double c = c_(i, j);
      if (c == 0.0) continue;
      if (i > 0) gx += c * double(i) * std::pow(x, double(i - 1)) * std::pow(y, double(j));
      if (j > 0) gy += c * double(j) * std::pow(x, double(i)) * std::pow(y, double(j - 1));
    }
  }
  return {gx, gy};
}

Bivariate Bivariate::homogeneous_part(int degree) const {
  Bivariate h(std::max<int>(int(c_.rows()) - 1, 0));
  for (Eigen::Index i = 0; i < c_.rows(); ++i) {
    const Eigen::Index j = degree - i;
    if (j >= 0 && j < c_.cols()) h.c_(i, j) = c_(i, j);
  }
  return h;
}

Bivariate operator+(const Bivariate& a, const Bivariate& b) {
  const Eigen::Index n = std::max(a.c_.rows(), b.c_.rows());
  Bivariate r(int(n) - 1);
  r.c_.topLeftCorner(a.c_.rows(), a.c_.cols()) += a.c_;
  r.c_.topLeftCorner(b.c_.rows(), b.c_.cols()) += b.c_;
  return r;
}

Bivariate operator-(const Bivariate& a, const Bivariate& b) { return a + (-1.0) * b; }

Bivariate operator*(const Bivariate& a, const Bivariate& b) {
  Bivariate r(int(a.c_.rows() + b.c_.rows()) - 2);
  for (Eigen::Index i = 0; i < a.c_.rows(); ++i)
    for (Eigen::Index j = 0; j < a.c_.cols(); ++j) {
      if (a.c_(i, j) == 0.0) continue;
      for (Eigen::Index k = 0; k < b.c_.rows(); ++k)
        for (Eigen::Index l = 0; l < b.c_.cols(); ++l) r.c_(i + k, j + l) += a.c_(i, j) * b.c_(k, l);
    }
  return r;
}

Bivariate operator*(double s, const Bivariate& a) {
  Bivariate r = a;
  r.c_ *= s;
  return r;
}

}  // namespace holling
