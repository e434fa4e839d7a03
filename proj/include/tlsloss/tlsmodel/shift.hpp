#pragma once

#include "tlsloss/tlsmodel/params.hpp"

namespace tlsloss::tlsmodel {

// Bracket Re Psi(1/2 + y/i) - ln(y), y = hbar w0 / (2 pi k T). Vanishes as T -> 0.
double resonant_shift_bracket(double t, double f0);

// Resonant TLS frequency shift, shift_res_scale * bracket (scale defaults to
// f_tan_res / pi when unset).
double dfrac_res(double t, double f0, const TlsParams& p);

// Resonant plus relaxation fractional frequency shift at temperature T. The
// relaxation prefactor defaults to the calibrated relaxation scale.
double dfrac_tls(double t, double f0, const TlsParams& p, const RelaxKernelParams& k);

}  // namespace tlsloss::tlsmodel
