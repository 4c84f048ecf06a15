#include "qsem/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qsem/errors.hpp"

namespace qsem::harmonics {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDomainTol = 1e-12;

}  // namespace

SampledFunction SampledFunction::square_wave() {
  constexpr double amp = std::numbers::pi / 4.0;
  return SampledFunction(
      [](double x) {
        if (x <= 0.0 || x >= kTwoPi || x == std::numbers::pi) return 0.0;
        return x < std::numbers::pi ? amp : -amp;
      },
      amp * amp * kTwoPi / std::numbers::pi);
}

SampledFunction SampledFunction::sine(int k) {
  return SampledFunction([k](double x) { return std::sin(k * x); }, k == 0 ? 0.0 : 1.0);
}

SampledFunction SampledFunction::cosine(int k) {
  return SampledFunction([k](double x) { return std::cos(k * x); }, k == 0 ? 2.0 : 1.0);
}

SampledFunction SampledFunction::constant(double c) {
  return SampledFunction([c](double) { return c; }, 2.0 * c * c);
}

SampledFunction SampledFunction::from_samples(std::vector<double> xs, std::vector<double> ys) {
  if (xs.size() < 2 || xs.size() != ys.size()) {
    throw InvalidArgument("SampledFunction: need at least two (x, y) samples");
  }
  if (std::abs(xs.front()) > kDomainTol || std::abs(xs.back() - kTwoPi) > kDomainTol) {
    throw InvalidArgument("SampledFunction: domain must be [0, 2pi]");
  }
  for (std::size_t k = 1; k < xs.size(); ++k) {
    if (!(xs[k] > xs[k - 1])) {
      throw InvalidArgument("SampledFunction: x must be strictly increasing");
    }
  }
  return SampledFunction(
      [xs = std::move(xs), ys = std::move(ys)](double x) {
        if (x <= xs.front()) return ys.front();
        if (x >= xs.back()) return ys.back();
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const auto hi = static_cast<std::size_t>(it - xs.begin());
        const auto lo = hi - 1;
        const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
        return ys[lo] + t * (ys[hi] - ys[lo]);
      },
      -1.0);
}

double trapezoid(const std::function<double(double)>& f, std::size_t panels) {
  if (panels < 1) throw InvalidArgument("trapezoid: panels must be >= 1");
  const double h = kTwoPi / static_cast<double>(panels);
  double sum = 0.5 * (f(0.0) + f(kTwoPi));
  for (std::size_t i = 1; i < panels; ++i) sum += f(h * static_cast<double>(i));
  return h * sum;
}

FourierCoefficients fourier_coeffs(const SampledFunction& f, std::size_t harmonics,
                                   std::size_t quad_points) {
  if (harmonics < 1) throw InvalidArgument("fourier_coeffs: K must be >= 1");
  if (quad_points < 64) throw InvalidArgument("fourier_coeffs: quad_points must be >= 64");
  // Sample once; every coefficient reuses the same nodes.
  const double h = kTwoPi / static_cast<double>(quad_points);
  std::vector<double> xs(quad_points + 1), ys(quad_points + 1), ws(quad_points + 1, h);
  for (std::size_t i = 0; i <= quad_points; ++i) {
    xs[i] = i == quad_points ? kTwoPi : h * static_cast<double>(i);
    ys[i] = f(xs[i]);
  }
  ws.front() = ws.back() = 0.5 * h;

  FourierCoefficients c;
  c.a.assign(harmonics, 0.0);
  c.b.assign(harmonics + 1, 0.0);
  double mean = 0.0;
  for (std::size_t i = 0; i <= quad_points; ++i) mean += ws[i] * ys[i];
  c.b[0] = mean / kTwoPi;
  for (std::size_t k = 1; k <= harmonics; ++k) {
    double sa = 0.0;
    double sb = 0.0;
    const auto kd = static_cast<double>(k);
    for (std::size_t i = 0; i <= quad_points; ++i) {
      sa += ws[i] * ys[i] * std::sin(kd * xs[i]);
      sb += ws[i] * ys[i] * std::cos(kd * xs[i]);
    }
    c.a[k - 1] = sa / std::numbers::pi;
    c.b[k] = sb / std::numbers::pi;
  }
  return c;
}

double partial_sum(const FourierCoefficients& c, double x) {
  double s = c.b.empty() ? 0.0 : c.b[0];
  for (std::size_t k = 1; k <= c.a.size(); ++k) {
    s += c.a[k - 1] * std::sin(static_cast<double>(k) * x);
  }
  for (std::size_t k = 1; k < c.b.size(); ++k) {
    s += c.b[k] * std::cos(static_cast<double>(k) * x);
  }
  return s;
}

FourierCoefficients first_nonzero_harmonics(const FourierCoefficients& c, std::size_t count,
                                            double tol) {
  FourierCoefficients out{std::vector<double>(c.a.size(), 0.0),
                          std::vector<double>(c.b.size(), 0.0)};
  std::size_t kept = 0;
  if (!c.b.empty() && std::abs(c.b[0]) > tol && kept < count) {
    out.b[0] = c.b[0];
    ++kept;
  }
  const std::size_t kmax = std::max(c.a.size(), c.b.empty() ? 0 : c.b.size() - 1);
  for (std::size_t k = 1; k <= kmax && kept < count; ++k) {
    if (k <= c.a.size() && std::abs(c.a[k - 1]) > tol && kept < count) {
      out.a[k - 1] = c.a[k - 1];
      ++kept;
    }
    if (k < c.b.size() && std::abs(c.b[k]) > tol && kept < count) {
      out.b[k] = c.b[k];
      ++kept;
    }
  }
  return out;
}

}  // namespace qsem::harmonics
