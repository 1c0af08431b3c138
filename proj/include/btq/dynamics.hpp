#pragma once

// Single-orbit probes of classical completeness against quantum truncation
// leakage. Nothing here decides completeness; reports juxtapose the two sides.

#include <optional>
#include <string>
#include <vector>

#include "btq/symbol.hpp"
#include "btq/toeplitz.hpp"

namespace btq {

struct ClassicalState {
  std::vector<double> x;
  std::vector<double> xi;

  static ClassicalState from(const PhasePoint& z);
  PhasePoint point() const;
  double norm() const;
  void validate() const;
};

enum class Integrator { ImplicitMidpoint, AdaptiveRK };

// Paper: (x', xi') = -J grad f with J(x, xi) = (xi, -x), i.e. x' = -f_xi and
// xi' = f_x. This is the time reverse of the textbook flow; on it the
// harmonic oscillator orbit z e^{i tau} matches exp(-i tau N) on coherent
// states.
enum class FlowDirection { Paper, Textbook };

struct EvolutionConfig {
  double total_time = 1.0;
  double step = 1e-3;
  Integrator integrator = Integrator::ImplicitMidpoint;
  FlowDirection direction = FlowDirection::Paper;
  // escape threshold B on |state|
  double blowup = 1e8;
  // adaptive-rk relative and absolute tolerance
  double rk_tolerance = 1e-10;
  std::vector<int> cutoffs{20, 40, 80};
  // quantum sample times are k * total_time / samples, k = 0..samples
  int samples = 200;
  // leakage level that marks onset
  double leakage_threshold = 1e-6;

  void validate() const;
};

struct EscapeEstimate {
  bool escaped = false;
  // B/100, B/10, B and the first times |state| crosses them (NaN if not)
  std::vector<double> thresholds;
  std::vector<double> crossing_times;
  // [last crossing, extrapolated blow-up time]
  double lower = 0.0;
  double upper = 0.0;
  std::string note;
};

struct ClassicalTrajectory {
  std::vector<double> times;
  std::vector<ClassicalState> states;
  EscapeEstimate escape;
};

// f scalar, hermitian, with a gradient. Implicit midpoint steps are scaled by
// min(1, (1 + |y|) / |y'|) so a blow-up is resolved without leaving the
// fixed-point regime; halving cfg.step halves every step.
ClassicalTrajectory classical_flow(const Symbol& f, const ClassicalState& z0, const EvolutionConfig& cfg);

struct QuantumTrajectory {
  TruncationSpec spec;
  std::vector<double> times;
  std::vector<Vector> states;
};

// exp(-i tau A / t) psi0 from one eigendecomposition; A hermitian, psi0 a unit vector.
QuantumTrajectory quantum_evolve(const TruncatedOperator& a, const Vector& psi0, const std::vector<double>& times);

// <psi, A psi> at every sample
std::vector<cplx> expectation_trajectory(const TruncatedOperator& a, const QuantumTrajectory& traj);

// <psi, T_{z_j} psi> for j = 1..n at every sample
std::vector<PhasePoint> position_trajectory(const QuantumTrajectory& traj);

// mass on degrees above floor(0.9 M)
double leakage(const TruncationSpec& spec, const Vector& psi);

struct LeakageCurve {
  int cutoff = 0;
  std::vector<double> times;
  std::vector<double> leakage;
  // first sample time with leakage above the threshold
  std::optional<double> onset;
  double max_norm_error = 0.0;
};

struct CompletenessReport {
  EscapeEstimate escape;
  std::vector<LeakageCurve> curves;
  // "increasing", "decreasing", "non-monotone" or "incomplete" in the cutoff
  std::string onset_ordering;
  std::string summary;
};

// Classical flow from z0 and quantum runs from coherent(z0) for every cutoff.
// The direction flag affects the classical side only.
CompletenessReport completeness_experiment(const Symbol& f, const ClassicalState& z0, const EvolutionConfig& cfg,
                                           const QuantizationContext& ctx);

}  // namespace btq
