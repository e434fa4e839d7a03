#include "tlsloss/ftir/peaks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tlsloss/error.hpp"
#include "tlsloss/numerics/least_squares.hpp"
#include "tlsloss/numerics/polyfit.hpp"

namespace tlsloss::ftir {

namespace {

const double kSqrt2Pi = std::sqrt(2.0 * std::numbers::pi);

bool excluded(double x, const std::vector<Window>& w) {
  return std::any_of(w.begin(), w.end(), [x](const Window& win) { return win.contains(x); });
}

// Robust point scatter from successive differences (MAD scaled to sigma).
double local_noise(const IrSpectrum& s, const Window& w) {
  std::vector<double> d;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (w.contains(s.wavenumber[i]) && w.contains(s.wavenumber[i - 1]))
      d.push_back(s.absorbance[i] - s.absorbance[i - 1]);
  if (d.size() < 3) return 0.0;
  auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  const double med = *mid;
  for (auto& v : d) v = std::abs(v - med);
  std::nth_element(d.begin(), mid, d.end());
  return 1.4826 * *mid / std::sqrt(2.0);
}

struct LinearAmp {
  double amplitude = 0.0, sigma = 0.0;
};

// Least-squares amplitude of a fixed-shape line within the window.
LinearAmp linear_amplitude(const IrSpectrum& s, const Window& w, double center, double width, double noise) {
  double sgy = 0.0, sgg = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (w.contains(s.wavenumber[i])) {
      const double g = gaussian(s.wavenumber[i], {center, width, 1.0});
      sgy += g * s.absorbance[i];
      sgg += g * g;
    }
  if (sgg == 0.0) return {};
  return {sgy / sgg, noise / std::sqrt(sgg)};
}

void set_area(PeakModel& p, double var_s, double var_a, double cov_sa) {
  p.area = p.amplitude * p.sigma * kSqrt2Pi;
  const double ds = p.amplitude * kSqrt2Pi, da = p.sigma * kSqrt2Pi;
  p.sigmas.area = std::sqrt(std::max(0.0, ds * ds * var_s + da * da * var_a + 2.0 * ds * da * cov_sa));
}

void flag_if_weak(PeakModel& p, double threshold) {
  p.upper_limit = !(p.amplitude >= threshold) || p.amplitude <= 0.0;
  p.area_bound = p.upper_limit ? std::max(p.area, 0.0) + 3.0 * p.sigmas.area : 0.0;
}

// Joint Gaussian fit of the peaks in `idx`; returns false when the fitter fails.
bool joint_fit(const IrSpectrum& s, const std::vector<PeakSeed>& seeds, const std::vector<std::size_t>& idx,
               std::vector<PeakModel>& out, const std::vector<Window>& windows, const PeakFitOptions& opts) {
  std::vector<std::size_t> pts;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (auto k : idx)
      if (windows[k].contains(s.wavenumber[i])) {
        pts.push_back(i);
        break;
      }
  const auto np = static_cast<Eigen::Index>(3 * idx.size());
  if (static_cast<Eigen::Index>(pts.size()) <= np) return false;

  numerics::FitProblem prob;
  prob.initial.resize(np);
  prob.lower.resize(np);
  prob.upper.resize(np);
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const auto& seed = seeds[idx[j]];
    const auto e = static_cast<Eigen::Index>(3 * j);
    prob.initial.segment(e, 3) << seed.center, seed.width_guess, out[idx[j]].amplitude;
    prob.lower.segment(e, 3) << seed.center - 0.5 * opts.window_half_width, 1.0, -inf;
    prob.upper.segment(e, 3) << seed.center + 0.5 * opts.window_half_width, opts.window_half_width, inf;
  }
  prob.residuals = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double w = s.wavenumber[pts[i]];
      double m = 0.0;
      for (Eigen::Index j = 0; j < np; j += 3) m += gaussian(w, {x[j], x[j + 1], x[j + 2]});
      r[static_cast<Eigen::Index>(i)] = s.absorbance[pts[i]] - m;
    }
    return r;
  };
  numerics::FitResult fr;
  try {
    fr = numerics::nlls_fit(prob);
  } catch (const Error&) {
    return false;
  }
  if (!fr.converged) return false;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    auto& p = out[idx[j]];
    const auto e = static_cast<Eigen::Index>(3 * j);
    p.center = fr.params[e];
    p.sigma = fr.params[e + 1];
    p.amplitude = fr.params[e + 2];
    const auto& c = fr.covariance;
    p.sigmas.center = std::sqrt(std::max(0.0, c(e, e)));
    p.sigmas.sigma = std::sqrt(std::max(0.0, c(e + 1, e + 1)));
    p.sigmas.amplitude = std::sqrt(std::max(0.0, c(e + 2, e + 2)));
    set_area(p, c(e + 1, e + 1), c(e + 2, e + 2), c(e + 1, e + 2));
    p.converged = true;
    p.message = fr.message;
  }
  return true;
}

}  // namespace

IrSpectrum remove_baseline(const IrSpectrum& s, int degree, const std::vector<Window>& exclusions) {
  s.validate();
  if (degree < 0) throw DomainError("remove_baseline: degree must be >= 0");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!excluded(s.wavenumber[i], exclusions)) {
      x.push_back(s.wavenumber[i]);
      y.push_back(s.absorbance[i]);
    }
  if (static_cast<int>(x.size()) < degree + 2)
    throw DegenerateError("remove_baseline: " + std::to_string(x.size()) +
                          " baseline points outside the exclusion windows, need " + std::to_string(degree + 2));
  const auto poly = numerics::polyfit(x, y, degree);
  IrSpectrum out = s;
  for (std::size_t i = 0; i < s.size(); ++i) out.absorbance[i] = s.absorbance[i] - poly(s.wavenumber[i]);
  return out;
}

std::vector<PeakSeed> default_seeds() { return {{"N-H", 3330.0, 60.0}, {"Si-H", 2210.0, 50.0}}; }

std::vector<Window> seed_windows(const std::vector<PeakSeed>& seeds, double half_width) {
  std::vector<Window> w;
  for (const auto& s : seeds) w.push_back({s.center - half_width, s.center + half_width});
  return w;
}

std::vector<PeakModel> fit_peaks(const IrSpectrum& s, const std::vector<PeakSeed>& seeds, const PeakFitOptions& opts) {
  s.validate();
  const auto windows = seed_windows(seeds, opts.window_half_width);
  std::vector<PeakModel> out(seeds.size());
  std::vector<std::size_t> detected;
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    auto& p = out[k];
    p.name = seeds[k].name;
    p.local_noise = local_noise(s, windows[k]);
    const auto lin = linear_amplitude(s, windows[k], seeds[k].center, seeds[k].width_guess, p.local_noise);
    p.center = seeds[k].center;
    p.sigma = seeds[k].width_guess;
    p.amplitude = lin.amplitude;
    p.sigmas.amplitude = lin.sigma;
    set_area(p, 0.0, lin.sigma * lin.sigma, 0.0);
    if (lin.amplitude > 0.0 && lin.amplitude >= opts.detection_sigmas * p.local_noise) detected.push_back(k);
    else p.message = "no line above the detection threshold; centre and width held at the seed";
  }

  if (!detected.empty() && !joint_fit(s, seeds, detected, out, windows, opts)) {
    for (auto k : detected)
      if (!joint_fit(s, seeds, {k}, out, windows, opts)) {
        out[k].converged = false;
        out[k].message = "Gaussian fit did not converge; linear amplitude at the seed reported";
      }
  }
  for (auto& p : out) flag_if_weak(p, opts.detection_sigmas * p.local_noise);
  return out;
}

}  // namespace tlsloss::ftir
