#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tlsloss/ftir/spectrum.hpp"

namespace tlsloss::ftir {

struct Window {
  double lo = 0.0, hi = 0.0;  // cm^-1
  bool contains(double x) const { return x >= lo && x <= hi; }
};

// Subtract a polynomial fitted to the points outside every exclusion window.
// Throws DegenerateError when fewer than degree + 2 points remain.
IrSpectrum remove_baseline(const IrSpectrum& s, int degree = 3, const std::vector<Window>& exclusions = {});

struct PeakSeed {
  std::string name;         // e.g. "N-H", "Si-H"
  double center = 0.0;      // cm^-1
  double width_guess = 50.0; // cm^-1, Gaussian sigma
};

// N-H stretch near 3330 cm^-1 and Si-H stretch near 2210 cm^-1.
std::vector<PeakSeed> default_seeds();
// seed centre +- half_width for every seed.
std::vector<Window> seed_windows(const std::vector<PeakSeed>& seeds, double half_width = 300.0);

struct PeakSigmas {
  double center = 0.0, sigma = 0.0, amplitude = 0.0, area = 0.0;
};

struct PeakModel {
  std::string name;
  double center = 0.0;     // cm^-1
  double sigma = 0.0;      // cm^-1
  double amplitude = 0.0;  // absorbance
  double area = 0.0;       // absorbance * cm^-1, = amplitude sigma sqrt(2 pi)
  PeakSigmas sigmas;
  double local_noise = 0.0;   // absorbance, point scatter in the fit window
  bool upper_limit = false;   // amplitude below the detection threshold
  double area_bound = 0.0;    // upper bound on the area when upper_limit
  bool converged = true;
  std::string message;
};

struct PeakFitOptions {
  double window_half_width = 300.0;  // cm^-1
  double detection_sigmas = 3.0;     // amplitude threshold in units of local noise
};

// Simultaneous Gaussian fit of every detected seed over the union of the seed
// windows. Seeds without a detectable line keep centre and width fixed at the
// seed and get a linear amplitude estimate; they are flagged as upper limits.
// A failed joint fit falls back to per-peak fits; failures are reported per
// peak (converged = false) rather than thrown.
std::vector<PeakModel> fit_peaks(const IrSpectrum& s, const std::vector<PeakSeed>& seeds,
                                 const PeakFitOptions& opts = {});

}  // namespace tlsloss::ftir
