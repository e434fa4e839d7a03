#pragma once

#include <vector>

#include "tlsloss/inference/loss_fit.hpp"
#include "tlsloss/response/resonator.hpp"
#include "tlsloss/tlsmodel/device_model.hpp"

namespace tlsloss::inference {

// Forward model of a driven resonator: loss and TLS frequency shift at the
// effective temperature set by the intracavity photon number.
struct DetuningModel {
  tlsmodel::FilmParams film;  // self-heating applied when film.heat is set
  tlsmodel::Device dev;       // dev.f0 is the resonance at t_bp and vanishing drive
  double t_bp = 0.01;         // K
  RelaxationCache* cache = nullptr;

  double t_eff(double n) const;
  // Resonance frequency at photon number n: dev.f0 (1 + s(T_eff) - s(T_bp)).
  double resonance(double n) const;
  // Loaded resonator at photon number n (internal loss from the film model).
  response::ResonatorParams resonator(double n) const;
  // Self-consistent photon number for a drive at frequency f_drive and power p_inc.
  double photon_number_at(double f_drive, double p_inc) const;
};

struct DetuningOptions {
  double rel_tol = 1e-4;        // stop when |measured - target| < rel_tol |target|
  int max_iterations = 100;
  double initial_f0_error = 0.0; // Hz added to the first assumed resonance
};

struct DetuningResult {
  double drive_freq = 0.0;   // Hz
  double n_bar = 0.0;
  double resonance = 0.0;    // Hz, shifted resonance at the operating point
  double detuning = 0.0;     // Hz, drive_freq - resonance
  double t_eff = 0.0;        // K
  int iterations = 0;
  double first_mismatch = 0.0;        // Hz, measured - target after iteration 1
  std::vector<double> mismatch_history;  // Hz, one entry per iteration
};

// Fixed-point iteration: drive at (assumed resonance + target), solve for the
// photon number and the shifted resonance it implies, take that as the new
// assumed resonance, and repeat until the realised detuning matches the target.
// Throws ConvergenceError naming the last two iterates when the cap is hit.
DetuningResult converge_detuning(double target_detuning, double drive_power, const DetuningModel& model,
                                 const DetuningOptions& opts = {});

}  // namespace tlsloss::inference
