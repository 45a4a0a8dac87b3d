#pragma once

namespace metastab {

// Tail of the Riemann zeta series, sum_{i >= a} i^{-tau}, for tau > 1 and a >= 1.
// Direct summation up to a cutoff plus an Euler-Maclaurin remainder whose
// first omitted term is below `tol`.
double zeta_tail(double tau, long long a, double tol = 1e-14);

}  // namespace metastab
