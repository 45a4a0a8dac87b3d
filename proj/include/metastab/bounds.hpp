#pragma once

#include <string>

#include "metastab/graph.hpp"

namespace metastab {

// ---------------------------------------------------------------------------
// I_delta
// ---------------------------------------------------------------------------

struct IDelta {
  double value = 0;
  bool saturated = false;  // no sign change on (0, x]: value is x
};

// Smallest y in (0, x] where f_{delta,x}(y) turns positive, f being the log of
// the expected count of sets with degree fraction x and boundary fraction y.
// Requires delta > 1 and 0 < x <= 1/2.
IDelta i_delta_full(double delta, double x, double tol = 1e-12);
double i_delta(double delta, double x, double tol = 1e-12);

// f_{delta,x}(y) itself, with 0 ln 0 = 0.
double i_delta_exponent(double delta, double x, double y);

// ---------------------------------------------------------------------------
// Barrier bounds on a degree sequence
// ---------------------------------------------------------------------------

struct UpperBound {
  double gamma_plus = 0;
  std::size_t m_bar = 0;
  long long ell_mbar = 0;
  double slack = 0;           // slack_constant * ell_n^{3/4}
  double slack_constant = 1;
  std::size_t m_bar_equivalent = 0;  // from d_{m+1}(1 - 2 ell_m / ell_n) <= h/J
  double regular_closed_form = 0;        // (J r / 4) n (1 - (h / (J r))^2), NaN unless regular
  std::string warning;
};

// m_bar = min{m >= 1 : g(m) >= g(m+1) - h/J}, g(m) = ell_m (1 - ell_m / ell_n).
// Throws NumericError unless m_bar < n/2.
UpperBound gamma_upper(const DegreeSequence& degrees, double J, double h, double slack_constant = 1.0);

struct LowerBound {
  double gamma_minus = 0;
  std::size_t m_tilde = 0;
  double i_half = 0;  // I_{d_ave}(1/2)
  bool saturated = false;
  std::string note = "o(n) correction not subtracted";
};

// m_tilde = min{m : ell_m >= ell_n / 2}; Gamma- = J d_ave I_{d_ave}(1/2) n - h m_tilde.
LowerBound gamma_lower(const DegreeSequence& degrees, double J, double h);

// Sufficient condition for (H) in terms of d_min and d_ave.
bool h_condition_strict(double d_min, double d_ave, double J, double h);
double h_condition_strict_rhs(double d_min, double d_ave);

struct WeakCondition {
  bool holds = false;
  double worst_margin = 0;  // min over the grid of rhs - lhs
  double worst_x = 0;
};

// Weak form of (H), checked on a 1000-point grid of x in (0, 1/2].
WeakCondition h_condition_weak(const DegreeSequence& degrees, double J, double h, std::size_t grid = 1000);

// ---------------------------------------------------------------------------
// Power-law and Dirac asymptotics
// ---------------------------------------------------------------------------

struct PowerLawQuantities {
  double tau = 0;
  int delta = 0;
  double d_ave = 0;
  int kappa = 0;          // threshold index as printed, -1 when its set is empty
  int kappa_group = 0;    // degree group delta + k holding the path peak
  double y = 0;           // fraction of that group flipped at the peak
  double m_bar_frac = 0;  // m_bar / n
  double ell_frac = 0;    // ell_mbar / ell_n
  double m_tilde_frac = 0;         // exact limit of m_tilde / n (partial group)
  double m_tilde_frac_group = 0;   // whole-group form with tail differences
  int kappa_tilde = 0;
  // Printed forms, kept for comparison.
  double m_bar_frac_literal = 0;
  double ell_frac_literal = 0;
  double m_tilde_frac_literal = 0;
};

PowerLawQuantities power_law_quantities(double tau, int delta, double J, double h);

// ---------------------------------------------------------------------------
// Reference families
// ---------------------------------------------------------------------------

struct ClosedForm {
  double gamma = 0;
  double prefactor = 0;  // NaN when the family has none
  bool precondition_ok = true;
  std::string note;
};

// L x L torus; throws unless 2J/h is not an integer and 1 < ell_c.
ClosedForm torus_reference(std::size_t L, double J, double h);
// n-dimensional hypercube. The rationality condition on h/J is reported in
// precondition_ok rather than thrown.
ClosedForm hypercube_reference(std::size_t n, double J, double h);
// Complete graph K_n; throws if h/J is an integer.
ClosedForm complete_reference(std::size_t n, double J, double h);
// Critical size n* on K_n.
std::size_t complete_critical_size(std::size_t n, double J, double h);
// Prefactor of K_n from the two-level birth-death reduction,
// (1 / |C*|) n / (n* (n - n*)).
double complete_chain_prefactor(std::size_t n, double J, double h);
// K_n with J = J'/n.
ClosedForm complete_scaled_reference(std::size_t n, double J_prime, double h);
// Dense Erdos-Renyi leading order J n f / 4 with p = f / n.
double er_leading_order(std::size_t n, double J, double f);

ClosedForm closed_form_reference(const ReferenceGraph& family, double J, double h);

}  // namespace metastab
