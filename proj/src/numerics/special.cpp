#include "tlsloss/numerics/special.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tlsloss/error.hpp"

namespace tlsloss::numerics {
namespace {

using cplx = std::complex<double>;

// B_{2k} / (2k) for k = 1..8.
constexpr std::array<double, 8> kAsymptotic = {
    1.0 / 12.0,    -1.0 / 120.0, 1.0 / 252.0,   -1.0 / 240.0,
    1.0 / 132.0,   -691.0 / 32760.0, 1.0 / 12.0, -3617.0 / 8160.0};

bool is_pole(cplx z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

cplx digamma_shifted(cplx z) {
  // Re(z) >= 1/2 here.
  cplx acc = 0.0;
  while (z.real() < 10.0) {
    acc -= 1.0 / z;
    z += 1.0;
  }
  const cplx inv2 = 1.0 / (z * z);
  cplx series = 0.0;
  cplx power = inv2;
  for (double coeff : kAsymptotic) {
    series += coeff * power;
    power *= inv2;
  }
  return acc + std::log(z) - 0.5 / z - series;
}

}  // namespace

cplx digamma(cplx z) {
  if (is_pole(z)) {
    std::ostringstream msg;
    msg << "digamma: pole at z = " << z.real();
    throw DomainError(msg.str());
  }
  if (z.real() < 0.5) {
    // psi(1 - z) - psi(z) = pi cot(pi z)
    const cplx pz = std::numbers::pi * z;
    return digamma_shifted(1.0 - z) - std::numbers::pi * std::cos(pz) / std::sin(pz);
  }
  return digamma_shifted(z);
}

double digamma(double x) { return digamma(cplx(x, 0.0)).real(); }

double bessel_k0(double x) {
  if (!(x > 0.0)) throw DomainError("bessel_k0: requires x > 0");
  if (x <= 2.0) {
    // K0 = -(ln(x/2) + gamma) I0(x) + sum_k (x^2/4)^k / (k!)^2 H_k
    const double y = 0.25 * x * x;
    double term = 1.0;
    double i0 = 1.0;
    double tail = 0.0;
    double harmonic = 0.0;
    for (int k = 1; k < 60; ++k) {
      term *= y / (static_cast<double>(k) * k);
      harmonic += 1.0 / k;
      i0 += term;
      tail += term * harmonic;
      if (term * harmonic < 1e-18 * tail) break;
    }
    return -(std::log(0.5 * x) + std::numbers::egamma) * i0 + tail;
  }
  if (x > 745.0) return 0.0;
  // Steed's method for the second continued fraction (order mu = 0).
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 1; i < 10000; ++i) {
    a -= 2.0 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < 1e-17) break;
  }
  return std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) / s;
}

double coth(double x) {
  if (std::abs(x) < 1e-8) return 1.0 / x + x / 3.0;
  return 1.0 / std::tanh(x);
}

double sech2(double x) {
  const double ax = std::abs(x);
  if (ax > 350.0) return 0.0;
  const double e = std::exp(-2.0 * ax);
  const double denom = 1.0 + e;
  return 4.0 * e / (denom * denom);
}

}  // namespace tlsloss::numerics
