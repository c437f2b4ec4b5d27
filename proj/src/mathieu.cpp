#include "paultrap/mathieu.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace paultrap {

namespace {

using State = std::array<double, 2>;

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

struct MathieuRhs {
  double a, q;
  State operator()(double xi, const State& y) const {
    return {y[1], -(a - 2.0 * q * std::cos(2.0 * xi)) * y[0]};
  }
};

// Integrates one solution over [0, pi] with adaptive step control.
State integrate_period(const MathieuRhs& f, State y, double tol, int& steps) {
  constexpr double xi_end = constants::pi;
  constexpr int max_steps = 2'000'000;
  double xi = 0.0;
  double h = 1e-2;
  State k1 = f(xi, y);
  int attempts = 0;
  while (xi < xi_end) {
    if (++attempts > max_steps) {
      std::ostringstream msg;
      msg << "Mathieu integration did not finish: a=" << f.a << " q=" << f.q << " xi=" << xi
          << " h=" << h << " after " << max_steps << " attempts";
      throw NumericalError(msg.str());
    }
    if (xi + h > xi_end) h = xi_end - xi;
    auto stage = [&](double c, std::initializer_list<std::pair<double, const State*>> terms) {
      State tmp = y;
      for (auto [coef, k] : terms)
        for (int i = 0; i < 2; ++i) tmp[i] += h * coef * (*k)[i];
      return f(xi + c * h, tmp);
    };
    State k2 = stage(c2, {{a21, &k1}});
    State k3 = stage(c3, {{a31, &k1}, {a32, &k2}});
    State k4 = stage(c4, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
    State k5 = stage(c5, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
    State k6 = stage(1.0, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
    State y5;
    for (int i = 0; i < 2; ++i)
      y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    State k7 = f(xi + h, y5);

    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
      double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                       e7 * k7[i]);
      double scale = tol * (1.0 + std::max(std::abs(y[i]), std::abs(y5[i])));
      err = std::max(err, std::abs(ei) / scale);
    }
    if (!std::isfinite(err)) throw NumericalError("Mathieu integration produced non-finite values");
    if (err <= 1.0) {
      xi += h;
      y = y5;
      k1 = k7;  // first-same-as-last
      ++steps;
    }
    double factor = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.2);
    h *= std::clamp(factor, 0.2, 5.0);
    if (h < 1e-14) throw NumericalError("Mathieu integration step size underflow");
  }
  return y;
}

}  // namespace

void MathieuParams::validate() const {
  if (!std::isfinite(a) || !std::isfinite(q))
    throw DomainError("Mathieu parameters must be finite");
  if (std::abs(a) >= 10.0 || std::abs(q) >= 10.0)
    throw DomainError("Mathieu parameters outside sanity bounds |a|, |q| < 10");
}

FloquetResult characteristic_exponent(const MathieuParams& p, double tolerance) {
  p.validate();
  if (!(tolerance >= 1e-12 && tolerance <= 1e-3))
    throw DomainError("Floquet tolerance must lie in [1e-12, 1e-3]");

  // Local error control two orders below the requested accuracy, floored
  // near double precision.
  const double tol = std::max(tolerance * 1e-2, 1e-14);
  const MathieuRhs rhs{p.a, std::abs(p.q)};
  FloquetResult r;
  State s1 = integrate_period(rhs, {1.0, 0.0}, tol, r.steps);
  State s2 = integrate_period(rhs, {0.0, 1.0}, tol, r.steps);
  r.monodromy = {s1[0], s2[0], s1[1], s2[1]};
  r.monodromy_trace = s1[0] + s2[1];
  r.stable = std::abs(r.monodromy_trace) < 2.0;
  r.beta = r.stable ? std::acos(r.monodromy_trace / 2.0) / constants::pi : 0.0;
  return r;
}

double lowest_order_beta(const MathieuParams& p) {
  p.validate();
  const double radicand = p.a + p.q * p.q / 2.0;
  if (radicand < 0.0)
    throw DomainError("a + q^2/2 < 0: unstable in lowest order");
  return std::sqrt(radicand);
}

double stability_boundary_q(double a) {
  if (!std::isfinite(a) || std::abs(a) >= 1.0)
    throw DomainError("stability_boundary_q requires |a| < 1");
  auto excess = [a](double q) {
    return characteristic_exponent({a, q}, 1e-12).monodromy_trace + 2.0;
  };
  // First crossing of trace = -2 when walking out in q from zero; the coarse
  // scan covers the default (0, 1.2) bracket and then extends to 2.
  constexpr double step = 0.01;
  double lo = 0.0;
  double hi = -1.0;
  for (double q = step; q <= 2.0 + 1e-12; q += step) {
    if (excess(q) < 0.0) {
      hi = q;
      break;
    }
    lo = q;
  }
  if (hi < 0.0) {
    std::ostringstream msg;
    msg << "no first-region stability boundary in q in (0, 2) for a=" << a;
    throw DomainError(msg.str());
  }
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) < 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

double secular_frequency(const MathieuParams& p, double omega_rf, double tolerance) {
  if (!(omega_rf > 0.0)) throw DomainError("omega_rf must be positive");
  const FloquetResult r = characteristic_exponent(p, tolerance);
  if (!r.stable) {
    std::ostringstream msg;
    msg << "unstable Mathieu parameters (a=" << p.a << ", q=" << p.q
        << "), monodromy trace " << r.monodromy_trace;
    throw StabilityError(msg.str());
  }
  return r.beta * omega_rf / 2.0;
}

MathieuParams params_from_coefficients(const IonSpecies& species, const DriveConfig& drive,
                                       double A, double A_prime) {
  if (!(drive.omega_rf > 0.0)) throw DomainError("omega_rf must be positive");
  const double denom = species.mass * drive.omega_rf * drive.omega_rf;
  const double ze = species.charge_number * constants::elementary_charge;
  return {4.0 * ze * drive.u_dc * A / denom, -2.0 * ze * drive.u_tilde * A_prime / denom};
}

}  // namespace paultrap
