#pragma once

// Dormand-Prince 5(4) embedded Runge-Kutta pair with its 4th-order
// continuous extension. The caller drives the loop one accepted step at a time.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <utility>

namespace dpower {

template <std::size_t N>
using State = std::array<double, N>;

struct StepControls {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_min = 1e-14;
  double h_max = 1.0;
};

/// One accepted step [t0, t1] plus everything needed to evaluate the dense output on it.
template <std::size_t N>
struct AcceptedStep {
  double t0 = 0.0;
  double t1 = 0.0;
  State<N> y0{};
  State<N> y1{};
  std::array<State<N>, 4> q{};  // dense coefficients, y(t0 + s h) = y0 + h sum_j q[j] s^(j+1)

  double h() const noexcept { return t1 - t0; }

  State<N> at(double t) const noexcept {
    const double s = (t - t0) / h();
    State<N> y = y0;
    for (std::size_t i = 0; i < N; ++i)
      y[i] += h() * s * (q[0][i] + s * (q[1][i] + s * (q[2][i] + s * q[3][i])));
    return y;
  }
};

template <std::size_t N, class Rhs>
class DormandPrince45 {
public:
  DormandPrince45(Rhs rhs, double t, State<N> y, double h_initial, StepControls controls)
      : rhs_(std::move(rhs)), t_(t), y_(y), h_(h_initial), ctl_(controls) {
    k_[0] = rhs_(t_, y_);
  }

  double t() const noexcept { return t_; }
  const State<N>& y() const noexcept { return y_; }
  double step_size() const noexcept { return h_; }
  std::size_t rejected() const noexcept { return rejected_; }

  /// Attempts steps until one is accepted or the step size underflows.
  /// `t_limit` clips the step so the integration never passes it.
  /// Returns false on underflow.
  bool advance(double t_limit, AcceptedStep<N>& out) {
    while (true) {
      const double remaining = t_limit - t_;
      if (!(remaining > 0.0)) return false;
      const double h = std::min({h_, ctl_.h_max, remaining});
      if (h < ctl_.h_min && h < remaining) return false;
      State<N> y_new{};
      State<N> err{};
      stages(h, y_new, err);

      double norm = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double scale = ctl_.atol + ctl_.rtol * std::max(std::abs(y_[i]), std::abs(y_new[i]));
        const double e = err[i] / scale;
        norm += e * e;
      }
      norm = std::sqrt(norm / static_cast<double>(N));
      if (!std::isfinite(norm)) norm = 1e10;

      const double factor =
          norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
      if (norm <= 1.0) {
        out.t0 = t_;
        out.t1 = t_ + h;
        out.y0 = y_;
        out.y1 = y_new;
        dense(out.q);
        t_ = out.t1;
        y_ = y_new;
        k_[0] = k_[6];  // first-same-as-last
        h_ = h * factor;
        return true;
      }
      ++rejected_;
      h_ = h * std::min(1.0, factor);
      if (h_ < ctl_.h_min) return false;
    }
  }

private:
  void stages(double h, State<N>& y_new, State<N>& err) {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                     b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    auto combo = [&](std::initializer_list<std::pair<double, std::size_t>> terms) {
      State<N> y = y_;
      for (auto [coef, j] : terms)
        for (std::size_t i = 0; i < N; ++i) y[i] += h * coef * k_[j][i];
      return y;
    };
    k_[1] = rhs_(t_ + c2 * h, combo({{a21, 0}}));
    k_[2] = rhs_(t_ + c3 * h, combo({{a31, 0}, {a32, 1}}));
    k_[3] = rhs_(t_ + c4 * h, combo({{a41, 0}, {a42, 1}, {a43, 2}}));
    k_[4] = rhs_(t_ + c5 * h, combo({{a51, 0}, {a52, 1}, {a53, 2}, {a54, 3}}));
    k_[5] = rhs_(t_ + h, combo({{a61, 0}, {a62, 1}, {a63, 2}, {a64, 3}, {a65, 4}}));
    y_new = combo({{b1, 0}, {b3, 2}, {b4, 3}, {b5, 4}, {b6, 5}});
    k_[6] = rhs_(t_ + h, y_new);
    for (std::size_t i = 0; i < N; ++i)
      err[i] = h * (e1 * k_[0][i] + e3 * k_[2][i] + e4 * k_[3][i] + e5 * k_[4][i] +
                    e6 * k_[5][i] + e7 * k_[6][i]);
  }

  // Continuous extension coefficients (Hairer/Shampine form, as used by dopri5).
  void dense(std::array<State<N>, 4>& q) const {
    static constexpr double P[7][4] = {
        {1.0, -8048581381.0 / 2820520608, 8663915743.0 / 2820520608,
         -12715105075.0 / 11282082432},
        {0.0, 0.0, 0.0, 0.0},
        {0.0, 131558114200.0 / 32700410799, -68118460800.0 / 10900136933,
         87487479700.0 / 32700410799},
        {0.0, -1754552775.0 / 470086768, 14199869525.0 / 1410260304,
         -10690763975.0 / 1880347072},
        {0.0, 127303824393.0 / 49829197408, -318862633887.0 / 49829197408,
         701980252875.0 / 199316789632},
        {0.0, -282668133.0 / 205662961, 2019193451.0 / 616988883, -1453857185.0 / 822651844},
        {0.0, 40617522.0 / 29380423, -110615467.0 / 29380423, 69997945.0 / 29380423},
    };
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t i = 0; i < N; ++i) {
        double acc = 0.0;
        for (std::size_t s = 0; s < 7; ++s) acc += P[s][j] * k_[s][i];
        q[j][i] = acc;
      }
  }

  Rhs rhs_;
  double t_;
  State<N> y_;
  double h_;
  StepControls ctl_;
  std::array<State<N>, 7> k_{};
  std::size_t rejected_ = 0;
};

} // namespace dpower
