#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tlsloss/error.hpp"
#include "tlsloss/ftir/hydrogen.hpp"
#include "tlsloss/ftir/peaks.hpp"
#include "tlsloss/ftir/spectrum.hpp"

using namespace tlsloss;
using namespace tlsloss::ftir;

namespace {

const double kSqrt2Pi = std::sqrt(2.0 * std::numbers::pi);

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double rms(const IrSpectrum& s, const std::vector<Window>& outside) {
  double sum = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    bool ex = false;
    for (const auto& w : outside) ex |= w.contains(s.wavenumber[i]);
    if (!ex) {
      sum += s.absorbance[i] * s.absorbance[i];
      ++n;
    }
  }
  return std::sqrt(sum / n);
}

double trapezoid(const IrSpectrum& s, const Window& w) {
  double a = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (w.contains(s.wavenumber[i]) && w.contains(s.wavenumber[i - 1]))
      a += 0.5 * (s.absorbance[i] + s.absorbance[i - 1]) * (s.wavenumber[i] - s.wavenumber[i - 1]);
  return a;
}

const GaussianLine kNH{3330.0, 60.0, 0.02};
const GaussianLine kSiH{2210.0, 50.0, 0.01};
const std::vector<double> kCubic{0.05, 0.01, -0.004, 0.002};

SpectrumSpec film_spec(double scale, double thickness, double noise, std::uint64_t seed) {
  SpectrumSpec s;
  s.grid = uniform_grid(400.0, 4500.0, 2.0);
  s.lines = {{kNH.center, kNH.sigma, scale * kNH.amplitude}, {kSiH.center, kSiH.sigma, scale * kSiH.amplitude}};
  s.baseline = kCubic;
  s.noise_sigma = noise;
  s.seed = seed;
  s.thickness_cm = thickness;
  return s;
}

HydrogenResult analyse(const IrSpectrum& raw) {
  const auto seeds = default_seeds();
  const auto corrected = remove_baseline(raw, 3, seed_windows(seeds));
  const auto peaks = fit_peaks(corrected, seeds);
  return hydrogen_content(peaks[1], peaks[0], raw.thickness_cm);
}

// Exact %H of the generator lines.
double truth_percent(double scale, double thickness) {
  PeakModel nh, sih;
  nh.area = scale * kNH.amplitude * kNH.sigma * kSqrt2Pi;
  sih.area = scale * kSiH.amplitude * kSiH.sigma * kSqrt2Pi;
  return hydrogen_content(sih, nh, thickness).atomic_h_percent;
}

}  // namespace

TEST_SUITE("remove_baseline") {
  TEST_CASE("flat zero spectrum is unchanged") {
    SpectrumSpec spec;
    spec.grid = uniform_grid(400.0, 4500.0, 2.0);
    const auto s = synth_spectrum(spec);
    const auto out = remove_baseline(s, 3, seed_windows(default_seeds()));
    for (double a : out.absorbance) CHECK(a == 0.0);
    CHECK(out.wavenumber == s.wavenumber);
  }

  TEST_CASE("cubic baseline under two lines: areas preserved within 0.5%") {
    const auto raw = synth_spectrum(film_spec(1.0, 5e-5, 0.0, 0));
    const auto windows = seed_windows(default_seeds());
    const auto out = remove_baseline(raw, 3, windows);
    CHECK(rel(trapezoid(out, windows[0]), kNH.amplitude * kNH.sigma * kSqrt2Pi) < 0.005);
    CHECK(rel(trapezoid(out, windows[1]), kSiH.amplitude * kSiH.sigma * kSqrt2Pi) < 0.005);
    CHECK(rms(out, windows) < rms(raw, windows));
    CHECK(out.wavenumber == raw.wavenumber);
  }

  TEST_CASE("baseline recovered within 0.5% RMS with peaks masked") {
    auto spec = film_spec(1.0, 5e-5, 0.0, 0);
    const auto raw = synth_spectrum(spec);
    spec.lines.clear();
    const auto baseline_only = synth_spectrum(spec);
    const auto out = remove_baseline(raw, 3, seed_windows(default_seeds()));
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const double recovered = raw.absorbance[i] - out.absorbance[i];
      err += std::pow(recovered - baseline_only.absorbance[i], 2);
      ref += std::pow(baseline_only.absorbance[i], 2);
    }
    CHECK(std::sqrt(err / ref) < 0.005);
  }

  TEST_CASE("idempotent") {
    const auto raw = synth_spectrum(film_spec(1.0, 5e-5, 1e-4, 3));
    const auto w = seed_windows(default_seeds());
    const auto once = remove_baseline(raw, 3, w);
    const auto twice = remove_baseline(once, 3, w);
    CHECK(std::abs(rms(twice, {}) - rms(once, {})) < 1e-10);
  }

  TEST_CASE("too few baseline points") {
    SpectrumSpec spec;
    spec.grid = uniform_grid(2000.0, 2400.0, 2.0);
    const auto s = synth_spectrum(spec);
    CHECK_THROWS_AS(remove_baseline(s, 3, {{1990.0, 2398.0}}), DegenerateError);
  }

  TEST_CASE("schema violations name the field") {
    IrSpectrum s;
    s.wavenumber = {300.0, 500.0};
    s.absorbance = {0.0, 0.0};
    s.thickness_cm = 1e-5;
    try {
      s.validate();
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(e.field == "wavenumber_cm1");
    }
    s.wavenumber = {500.0, 600.0};
    s.thickness_cm = 0.0;
    CHECK_THROWS_AS(s.validate(), SchemaError);
  }
}

TEST_SUITE("fit_peaks") {
  TEST_CASE("single Gaussian at 0.5% noise: parameters within 1%") {
    SpectrumSpec spec;
    spec.grid = uniform_grid(2800.0, 3900.0, 1.0);
    spec.lines = {kNH};
    spec.noise_sigma = 0.005 * kNH.amplitude;
    spec.seed = 21;
    const auto peaks = fit_peaks(synth_spectrum(spec), {{"N-H", 3330.0, 60.0}});
    REQUIRE(peaks.size() == 1);
    const auto& p = peaks[0];
    CHECK(p.converged);
    CHECK_FALSE(p.upper_limit);
    CHECK(rel(p.center, kNH.center) < 0.01);
    CHECK(rel(p.sigma, kNH.sigma) < 0.01);
    CHECK(rel(p.amplitude, kNH.amplitude) < 0.01);
    CHECK(rel(p.area, kNH.amplitude * kNH.sigma * kSqrt2Pi) < 0.01);
    CHECK(p.local_noise == doctest::Approx(1e-4).epsilon(0.15));
    CHECK(rel(p.area, p.amplitude * p.sigma * kSqrt2Pi) < 1e-9);
  }

  TEST_CASE("zero spectrum: both peaks are upper limits consistent with zero") {
    SpectrumSpec spec;
    spec.grid = uniform_grid(400.0, 4500.0, 2.0);
    const auto peaks = fit_peaks(synth_spectrum(spec), default_seeds());
    REQUIRE(peaks.size() == 2);
    for (const auto& p : peaks) {
      CHECK(p.upper_limit);
      CHECK(std::abs(p.area) <= 3.0 * p.sigmas.area);
      CHECK(p.area == 0.0);
    }
  }

  TEST_CASE("lines at 2210 and 3330 and an overlapping pair: areas within 2%") {
    const auto raw = synth_spectrum(film_spec(1.0, 5e-5, 1e-4, 4));
    const auto corrected = remove_baseline(raw, 3, seed_windows(default_seeds()));
    const auto peaks = fit_peaks(corrected, default_seeds());
    CHECK(rel(peaks[0].area, kNH.amplitude * kNH.sigma * kSqrt2Pi) < 0.02);
    CHECK(rel(peaks[1].area, kSiH.amplitude * kSiH.sigma * kSqrt2Pi) < 0.02);

    SpectrumSpec spec;
    spec.grid = uniform_grid(2600.0, 4000.0, 1.0);
    spec.lines = {{3330.0, 60.0, 0.02}, {3200.0, 50.0, 0.012}};
    spec.noise_sigma = 1e-4;
    spec.seed = 9;
    const auto pair = fit_peaks(synth_spectrum(spec), {{"a", 3340.0, 50.0}, {"b", 3190.0, 50.0}});
    CHECK(rel(pair[0].area, 0.02 * 60.0 * kSqrt2Pi) < 0.02);
    CHECK(rel(pair[1].area, 0.012 * 50.0 * kSqrt2Pi) < 0.02);
    for (const auto& p : pair) CHECK(rel(p.area, p.amplitude * p.sigma * kSqrt2Pi) < 1e-9);
  }

  TEST_CASE("weak line is reported as an upper limit") {
    SpectrumSpec spec;
    spec.grid = uniform_grid(2800.0, 3900.0, 1.0);
    spec.lines = {{3330.0, 60.0, 2e-4}};
    spec.noise_sigma = 1e-4;
    spec.seed = 2;
    const auto p = fit_peaks(synth_spectrum(spec), {{"N-H", 3330.0, 60.0}})[0];
    CHECK(p.upper_limit);
    CHECK(p.area_bound >= std::max(p.area, 0.0));
  }
}

TEST_SUITE("hydrogen_content") {
  TEST_CASE("zero areas give zero hydrogen") {
    const auto r = hydrogen_content(PeakModel{}, PeakModel{}, 5e-5);
    CHECK(r.atomic_h_percent == 0.0);
    CHECK(r.n_sih == 0.0);
    CHECK(r.n_nh == 0.0);
  }

  TEST_CASE("bond densities and fraction") {
    PeakModel sih, nh;
    sih.area = 1.0;
    nh.area = 2.0;
    HydrogenCalibration cal;
    cal.decadic_absorbance = false;
    const auto r = hydrogen_content(sih, nh, 1e-4, cal);
    CHECK(r.n_sih == doctest::Approx(1.0 / (7.4e-18 * 1e-4)));
    CHECK(r.n_nh == doctest::Approx(2.0 / (5.3e-18 * 1e-4)));
    const double h = r.n_sih + r.n_nh;
    CHECK(r.atomic_h_percent == doctest::Approx(100.0 * h / (9.3e22 + h)));
    cal.decadic_absorbance = true;
    CHECK(hydrogen_content(sih, nh, 1e-4, cal).n_sih == doctest::Approx(std::numbers::ln10 * r.n_sih));
  }

  TEST_CASE("thickness independence and joint rescaling") {
    PeakModel sih, nh;
    sih.area = 1.2;
    nh.area = 3.1;
    const auto a = hydrogen_content(sih, nh, 5e-5);
    sih.area *= 2;
    nh.area *= 2;
    const auto b = hydrogen_content(sih, nh, 1e-4);
    CHECK(b.atomic_h_percent == doctest::Approx(a.atomic_h_percent).epsilon(1e-14));
  }

  TEST_CASE("monotone in each area, uncertainty propagation") {
    PeakModel sih, nh;
    sih.area = 1.0;
    nh.area = 1.0;
    sih.sigmas.area = 0.1;
    double last = hydrogen_content(sih, nh, 5e-5).atomic_h_percent;
    for (double a : {1.5, 2.0, 4.0}) {
      nh.area = a;
      const double v = hydrogen_content(sih, nh, 5e-5).atomic_h_percent;
      CHECK(v > last);
      last = v;
    }
    const auto r = hydrogen_content(sih, nh, 5e-5);
    PeakModel bumped = sih;
    bumped.area += 1e-6;
    const double slope = (hydrogen_content(bumped, nh, 5e-5).atomic_h_percent - r.atomic_h_percent) / 1e-6;
    CHECK(r.sigma_percent == doctest::Approx(slope * 0.1).epsilon(1e-4));
  }
}

TEST_SUITE("hydrogen pipeline") {
  TEST_CASE("noiseless %H within 1%, 0.5% noise within 5%") {
    CHECK(rel(analyse(synth_spectrum(film_spec(1.0, 5e-5, 0.0, 0))).atomic_h_percent, truth_percent(1.0, 5e-5)) < 0.01);
    CHECK(rel(analyse(synth_spectrum(film_spec(1.0, 5e-5, 1e-4, 6))).atomic_h_percent, truth_percent(1.0, 5e-5)) < 0.05);
  }

  TEST_CASE("thickness series and as-deposited / annealed ratio") {
    std::vector<double> pct;
    for (double t_nm : {500.0, 600.0, 700.0, 800.0}) {
      const double t = t_nm * 1e-7;
      pct.push_back(analyse(synth_spectrum(film_spec(t / 5e-5, t, 1e-4, 10))).atomic_h_percent);
    }
    for (double p : pct) CHECK(rel(p, pct[0]) < 0.02);
    const double dep = analyse(synth_spectrum(film_spec(1.0, 5e-5, 1e-4, 11))).atomic_h_percent;
    const double ann = analyse(synth_spectrum(film_spec(1.0 / 20.0, 5e-5, 1e-4, 12))).atomic_h_percent;
    CHECK(dep / ann > 10.0);
  }
}
