#include "btq/core.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace btq {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Accuracy: return "accuracy";
    case ErrorKind::DegenerateInput: return "degenerate_input";
    case ErrorKind::UnsupportedVariant: return "unsupported_variant";
    case ErrorKind::GrowthExceedsPolynomial: return "growth_exceeds_polynomial";
    case ErrorKind::Evaluation: return "evaluation";
    case ErrorKind::Assembly: return "assembly";
    case ErrorKind::MemoryGuard: return "memory_guard";
    case ErrorKind::Spec: return "spec";
    case ErrorKind::StepSize: return "step_size";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

QuantizationContext::QuantizationContext(int n_, double t_, int d_) : n(n_), t(t_), d(d_) {
  validate();
}

void QuantizationContext::validate() const {
  require(n >= 1, ErrorKind::Parameter, "n must be >= 1, got " + std::to_string(n));
  require(t > 0.0 && std::isfinite(t), ErrorKind::Parameter, "t must be > 0");
  require(d >= 1, ErrorKind::Parameter, "d must be >= 1, got " + std::to_string(d));
}

PhasePoint PhasePoint::from_real(const std::vector<double>& x, const std::vector<double>& xi) {
  require(x.size() == xi.size(), ErrorKind::Parameter, "x and xi must have equal length");
  PhasePoint p(static_cast<int>(x.size()));
  for (size_t j = 0; j < x.size(); ++j) p.z_[j] = cplx{x[j], xi[j]};
  return p;
}

double PhasePoint::norm2() const {
  double s = 0.0;
  for (const auto& c : z_) s += std::norm(c);
  return s;
}

double PhasePoint::norm() const { return std::sqrt(norm2()); }

bool PhasePoint::finite() const {
  for (const auto& c : z_)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

std::vector<double> PhasePoint::to_real() const {
  std::vector<double> r(2 * z_.size());
  for (size_t j = 0; j < z_.size(); ++j) {
    r[j] = z_[j].real();
    r[j + z_.size()] = z_[j].imag();
  }
  return r;
}

PhasePoint PhasePoint::conj() const {
  PhasePoint p(*this);
  for (auto& c : p.z_) c = std::conj(c);
  return p;
}

PhasePoint PhasePoint::operator+(const PhasePoint& o) const {
  require(dim() == o.dim(), ErrorKind::Parameter, "phase point dimension mismatch");
  PhasePoint p(*this);
  for (size_t j = 0; j < z_.size(); ++j) p.z_[j] += o.z_[j];
  return p;
}

PhasePoint PhasePoint::operator-(const PhasePoint& o) const {
  require(dim() == o.dim(), ErrorKind::Parameter, "phase point dimension mismatch");
  PhasePoint p(*this);
  for (size_t j = 0; j < z_.size(); ++j) p.z_[j] -= o.z_[j];
  return p;
}

PhasePoint PhasePoint::operator-() const {
  PhasePoint p(*this);
  for (auto& c : p.z_) c = -c;
  return p;
}

PhasePoint PhasePoint::operator*(cplx a) const {
  PhasePoint p(*this);
  for (auto& c : p.z_) c *= a;
  return p;
}

cplx dot(const PhasePoint& a, const PhasePoint& b) {
  require(a.dim() == b.dim(), ErrorKind::Parameter, "phase point dimension mismatch");
  cplx s{0.0, 0.0};
  for (int j = 0; j < a.dim(); ++j) s += a[j] * b[j];
  return s;
}

cplx reproducing_kernel(const QuantizationContext& ctx, const PhasePoint& z, const PhasePoint& w) {
  return std::exp(dot(w.conj(), z) / (2.0 * ctx.t));
}

cplx normalized_kernel(const QuantizationContext& ctx, const PhasePoint& z, const PhasePoint& w) {
  // combined into one exponent so large |w| does not overflow before cancelling
  return std::exp(-w.norm2() / (4.0 * ctx.t) + dot(w.conj(), z) / (2.0 * ctx.t));
}

double symplectic_form(const PhasePoint& z, const PhasePoint& w) { return dot(z.conj(), w).imag(); }

double gaussian_density(const QuantizationContext& ctx, const PhasePoint& z) {
  const double n = static_cast<double>(z.dim());
  return std::pow(2.0 * std::numbers::pi * ctx.t, -n) * std::exp(-z.norm2() / (2.0 * ctx.t));
}

}  // namespace btq
