#pragma once

// Functions on [0, 2pi] as vectors: Fourier coefficients by composite
// trapezoid quadrature and partial-sum reconstruction.

#include <cstddef>
#include <functional>
#include <vector>

namespace qsem::harmonics {

// A named analytic function or piecewise-linear samples over [0, 2pi].
class SampledFunction {
 public:
  // pi/4 on (0, pi), -pi/4 on (pi, 2pi), 0 at the jumps; sine coefficients
  // are (1, 0, 1/3, 0, 1/5, ...).
  static SampledFunction square_wave();
  static SampledFunction sine(int k);
  static SampledFunction cosine(int k);
  static SampledFunction constant(double c);
  // xs strictly increasing, xs.front() == 0 and xs.back() == 2pi.
  static SampledFunction from_samples(std::vector<double> xs, std::vector<double> ys);

  [[nodiscard]] double operator()(double x) const { return eval_(x); }
  // Mean-square integral (1/pi) * int f^2 over [0, 2pi] when known in closed
  // form; negative otherwise.
  [[nodiscard]] double norm2_over_pi() const noexcept { return norm2_over_pi_; }

 private:
  SampledFunction(std::function<double(double)> eval, double norm2_over_pi)
      : eval_(std::move(eval)), norm2_over_pi_(norm2_over_pi) {}

  std::function<double(double)> eval_;
  double norm2_over_pi_;
};

// f(x) ~ sum_k a_k sin(kx) + b_k cos(kx).
struct FourierCoefficients {
  std::vector<double> a;  // a[k - 1] = a_k, k = 1..K
  std::vector<double> b;  // b[k] = b_k, k = 0..K

  [[nodiscard]] std::size_t harmonics() const noexcept { return a.size(); }
};

inline constexpr std::size_t kDefaultQuadPoints = std::size_t{1} << 14;

// Composite trapezoid rule on [0, 2pi] with `panels` panels.
double trapezoid(const std::function<double(double)>& f, std::size_t panels);

// K >= 1, quad_points >= 64.
FourierCoefficients fourier_coeffs(const SampledFunction& f, std::size_t harmonics,
                                   std::size_t quad_points = kDefaultQuadPoints);

double partial_sum(const FourierCoefficients& c, double x);

// Keeps the first `count` coefficients with |c| > tol (sines and cosines in
// order of frequency), zeroing the rest.
FourierCoefficients first_nonzero_harmonics(const FourierCoefficients& c, std::size_t count,
                                            double tol = 1e-9);

}  // namespace qsem::harmonics
