#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace holling {

struct Tolerances {
  double rtol = 1e-10;
  double atol = 1e-12;
};

/// Embedded Runge-Kutta 5(4) pair of Dormand and Prince with PI step-size
/// control and the 4th-order continuous extension. Autonomous right-hand
/// sides only. N is the state dimension.
template <int N>
class DormandPrince {
 public:
  using State = Eigen::Matrix<double, N, 1>;
  using Rhs = std::function<State(const State&)>;

  /// One accepted step together with what is needed for dense output.
  struct Step {
    double t0 = 0.0;
    double h = 0.0;
    State y0, y1;
    State k1;  // f(y0)
    State r2, r3, r4, r5;

    double t1() const { return t0 + h; }
    State dense(double t) const {
      const double th = (t - t0) / h;
      const double th1 = 1.0 - th;
      return y0 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
    }
  };

  DormandPrince(Rhs rhs, Tolerances tol) : rhs_(std::move(rhs)), tol_(tol) {}

  const Tolerances& tolerances() const { return tol_; }
  State eval(const State& y) const { return rhs_(y); }

  /// Plain 5th-order step of size h from y0 (no error control). Used to polish
  /// event locations inside an already accepted step.
  State single_step(const State& y0, const State& k1, double h) const {
    State k[7];
    stages(y0, k1, h, k);
    return y0 + h * (b1 * k[0] + b3 * k[2] + b4 * k[3] + b5 * k[4] + b6 * k[5]);
  }

  /// Stateful driver. Advances in accepted steps, never stepping past t_end.
  class Stepper {
   public:
    Stepper(const DormandPrince& dp, const State& y0, double t0, double h_init = 0.0)
        : dp_(&dp), t_(t0), y_(y0), k1_(dp.eval(y0)) {
      h_ = h_init > 0.0 ? h_init : dp.initial_step(y_, k1_);
    }

    double t() const { return t_; }
    const State& y() const { return y_; }
    const State& dy() const { return k1_; }
    double next_h() const { return h_; }

    /// Take one accepted step. Throws std::underflow_error if the step size
    /// collapses below h_min.
    Step advance(double t_end, double h_min) {
      double h = std::min(h_, t_end - t_);
      for (int rejects = 0;; ++rejects) {
        if (h < h_min && h < t_end - t_) {
          throw std::underflow_error("step size underflow");
        }
        State k[7];
        dp_->stages(y_, k1_, h, k);
        const State y1 =
            y_ + h * (b1 * k[0] + b3 * k[2] + b4 * k[3] + b5 * k[4] + b6 * k[5]);
        k[6] = dp_->eval(y1);
        const State e =
            h * (e1 * k[0] + e3 * k[2] + e4 * k[3] + e5 * k[4] + e6 * k[5] + e7 * k[6]);
        const auto& tol = dp_->tol_;
        const State sk =
            (tol.atol + tol.rtol * y_.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).matrix();
        const double err = std::sqrt((e.cwiseQuotient(sk)).squaredNorm() / double(N));
        if (!std::isfinite(err)) {
          h *= 0.1;
          continue;
        }
        const double fac11 = std::pow(std::max(err, 1e-300), kExpo1);
        if (err <= 1.0) {
          double fac = fac11 / std::pow(facold_, kBeta);
          fac = std::clamp(fac / kSafe, 1.0 / kFacMax, 1.0 / kFacMin);
          facold_ = std::max(err, 1e-4);
          Step s;
          s.t0 = t_;
          s.h = h;
          s.y0 = y_;
          s.y1 = y1;
          s.k1 = k[0];
          s.r2 = y1 - y_;
          s.r3 = h * k[0] - s.r2;
          s.r4 = s.r2 - h * k[6] - s.r3;
          s.r5 = h * (d1 * k[0] + d3 * k[2] + d4 * k[3] + d5 * k[4] + d6 * k[5] + d7 * k[6]);
          t_ = (h == t_end - t_) ? t_end : t_ + h;
          y_ = y1;
          k1_ = k[6];
          h_ = h / fac;
          if (rejects > 0) h_ = std::min(h_, h);
          return s;
        }
        h /= std::min(1.0 / kFacMin, fac11 / kSafe);
      }
    }

   private:
    const DormandPrince* dp_;
    double t_;
    State y_, k1_;
    double h_;
    double facold_ = 1e-4;
  };

  double initial_step(const State& y0, const State& f0) const {
    const State sk = (tol_.atol + tol_.rtol * y0.cwiseAbs().array()).matrix();
    const double d0 = std::sqrt(y0.cwiseQuotient(sk).squaredNorm() / N);
    const double d1n = std::sqrt(f0.cwiseQuotient(sk).squaredNorm() / N);
    double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    const State y1 = y0 + h0 * f0;
    const State f1 = rhs_(y1);
    const double d2 = std::sqrt((f1 - f0).cwiseQuotient(sk).squaredNorm() / N) / h0;
    const double m = std::max(d1n, d2);
    const double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 0.2);
    return std::min(100.0 * h0, h1);
  }

 private:
  void stages(const State& y0, const State& k1, double h, State* k) const {
    k[0] = k1;
    k[1] = rhs_(y0 + h * (a21 * k[0]));
    k[2] = rhs_(y0 + h * (a31 * k[0] + a32 * k[1]));
    k[3] = rhs_(y0 + h * (a41 * k[0] + a42 * k[1] + a43 * k[2]));
    k[4] = rhs_(y0 + h * (a51 * k[0] + a52 * k[1] + a53 * k[2] + a54 * k[3]));
    k[5] = rhs_(y0 + h * (a61 * k[0] + a62 * k[1] + a63 * k[2] + a64 * k[3] + a65 * k[4]));
  }

  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                          a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                          a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                          b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                          e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
  static constexpr double d1 = -12715105075.0 / 11282082432.0,
                          d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0,
                          d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

  static constexpr double kBeta = 0.04;
  static constexpr double kExpo1 = 0.2 - kBeta * 0.75;
  static constexpr double kSafe = 0.9;
  static constexpr double kFacMin = 0.2;   // largest shrink 1/5
  static constexpr double kFacMax = 10.0;  // largest growth x10

  Rhs rhs_;
  Tolerances tol_;
};

}  // namespace holling
