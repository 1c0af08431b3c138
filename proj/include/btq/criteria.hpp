#pragma once

// Grid- and truncation-scale evidence for the self-adjointness criteria.
// Verdicts are one-sided: a PASS means no violation was seen on the sampled
// grid or cutoffs, not a proof about the unbounded operator.

#include <cstdint>
#include <string>
#include <vector>

#include "btq/symbol.hpp"
#include "btq/toeplitz.hpp"

namespace btq {

struct OscillationReport {
  // max ||g(z + w) - g(z)|| over centres |z| <= R and probes |w| <= 1
  double sup_statistic = 0.0;
  // same statistic on the refined grid (radius 2R, four times the centres)
  double refined_statistic = 0.0;
  // max ||g(z) - g(w)|| / (1 + |z - w|) over sampled centre pairs
  double linear_constant = 0.0;
  bool stable = false;
  bool verdict = false;
  double radius = 0.0;
  int centres = 0;
  int probes = 0;
};

OscillationReport oscillation_estimate(const Symbol& g, double radius, int resolution = 256);

struct DerivativeReport {
  std::string name;  // e.g. "d/dz_1", "d/dzbar_1"
  OscillationReport oscillation;
};

struct HypothesisReport {
  bool verdict = false;
  double s = 0.0;
  PolyBound growth;
  std::string derivative_method;  // "closed-form", "gradient", "finite-difference"
  std::vector<DerivativeReport> derivatives;
  std::string note;
};

// Requires 0 <= s < t/2 and a hermitian, polynomially bounded f.
HypothesisReport main_theorem_hypothesis_check(const Symbol& f, double s, const QuantizationContext& ctx,
                                               double radius = 4.0, int resolution = 256);

// (2 t eps)^{-n}, eps = 1/(4t) - 1/(8(t - s)); requires 0 < s < t/2
double bc_constant(double s, double t, int n);

struct InequalityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;
  // grid sup entering the right-hand side
  double sup = 0.0;
  double slack = 0.0;
  bool holds = false;
};

// ||T_f|| <= C(s,t) sup ||heat(f, s)||
InequalityReport bc_verify(const Symbol& f, double s, const TruncationSpec& spec, double radius = 4.0);

// ||T_f - T_{heat(f,s)}|| <= C(s,t) sup ||heat(f,s) - heat(f,2s)||
InequalityReport perturbation_bound_check(const Symbol& f, double s, const TruncationSpec& spec, double radius = 4.0);

struct TaylorReport {
  double sup_remainder = 0.0;
  // sqrt(sum_k c_k^2) over the linear-fit constants of the partials
  double constant = 0.0;
  double bound = 0.0;
  bool holds = false;
};

// R_x(y) = F(y + x) - F(y) - x . grad F(y) on a grid of y with |y| <= R;
// x is a real 2n-vector (x_1..x_n, xi_1..xi_n).
TaylorReport taylor_remainder_check(const Symbol& F, const std::vector<double>& x, double radius = 4.0);

struct CommutatorRow {
  int cutoff = 0;
  double c1 = 0.0;
  double c2 = 0.0;
};

struct CommutatorDiagnostics {
  std::vector<CommutatorRow> rows;
  double c1_exponent = 0.0;
  double c2_exponent = 0.0;
  int assembly_cutoff = 0;
};

CommutatorDiagnostics commutator_diagnostics(const Symbol& f, const QuantizationContext& ctx,
                                             const std::vector<int>& cutoffs, int random_probes = 32,
                                             std::uint64_t seed = 0);

// least-squares slope of log y against log x over the upper half of the points
double growth_exponent(const std::vector<double>& x, const std::vector<double>& y);

struct ThetaReport {
  PolyBound symbol_growth;
  PolyBound theta_growth;
  bool verdict = false;
};

// d/dtheta f(e^{i theta} z) at 0, as a symbol
Symbol theta_derivative(const Symbol& f);

ThetaReport theta_derivative_bound(const Symbol& f, double radius = 4.0);

}  // namespace btq
