#pragma once

// Truncated Fock basis: monomials e_nu(z) = z^nu / sqrt(nu! (2t)^|nu|) with
// total degree |nu| <= M, enumerated graded (by |nu|) with lexicographic
// tie-break, e.g. n=2, M=1 -> (0,0), (1,0), (0,1).

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "btq/core.hpp"

namespace btq {

class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(int n) : entries_(static_cast<size_t>(n), 0) {}
  MultiIndex(std::initializer_list<int> e);
  explicit MultiIndex(std::vector<int> e);

  int size() const { return static_cast<int>(entries_.size()); }
  int operator[](int j) const { return entries_[static_cast<size_t>(j)]; }
  const std::vector<int>& entries() const { return entries_; }

  int degree() const;
  double log_factorial() const;
  // all entries >= 0
  bool valid() const;

  MultiIndex operator+(const MultiIndex& o) const;
  MultiIndex operator-(const MultiIndex& o) const;
  MultiIndex with(int j, int value) const;

  static MultiIndex unit(int n, int j);

  auto operator<=>(const MultiIndex&) const = default;
  bool operator==(const MultiIndex&) const = default;

  std::string str() const;

 private:
  std::vector<int> entries_;
};

// n over k for small arguments, exact in double for the sizes in scope
double binomial(int n, int k);

class TruncationSpec {
 public:
  TruncationSpec(QuantizationContext ctx, int cutoff);

  const QuantizationContext& ctx() const { return impl_->ctx; }
  int n() const { return impl_->ctx.n; }
  double t() const { return impl_->ctx.t; }
  int d() const { return impl_->ctx.d; }
  int cutoff() const { return impl_->cutoff; }

  // number of basis monomials, binomial(M+n, n)
  int size() const { return static_cast<int>(impl_->order.size()); }
  // basis size times internal dimension
  int dim() const { return size() * d(); }

  const std::vector<MultiIndex>& order() const { return impl_->order; }
  const MultiIndex& index(int i) const { return impl_->order[static_cast<size_t>(i)]; }
  std::optional<int> position(const MultiIndex& nu) const;
  // first position with |nu| == k (block start); size() for k > M
  int degree_start(int k) const;

  TruncationSpec with_cutoff(int cutoff) const;
  TruncationSpec with_internal_dim(int d) const;

  bool same_basis(const TruncationSpec& o) const;

 private:
  struct Impl {
    QuantizationContext ctx;
    int cutoff = 0;
    std::vector<MultiIndex> order;
    std::map<MultiIndex, int> lookup;
    std::vector<int> block_start;
  };
  std::shared_ptr<const Impl> impl_;
};

std::vector<MultiIndex> enumerate_basis(const TruncationSpec& spec);

// log of sqrt(nu! (2t)^|nu|)
double monomial_log_norm(double t, const MultiIndex& nu);
cplx monomial_eval(const QuantizationContext& ctx, const MultiIndex& nu, const PhasePoint& z);

struct CoefficientVector {
  Vector coeffs;
  // mass of the untruncated vector beyond the cutoff (coherent states only)
  double tail_mass = 0.0;
};

// Coefficients of the normalized kernel k_w: conj(e_nu(w)) exp(-|w|^2/4t).
CoefficientVector coherent_coefficients(const TruncationSpec& spec, const PhasePoint& w);

// sum_nu c_nu e_nu(z)
cplx evaluate_series(const TruncationSpec& spec, const Vector& coeffs, const PhasePoint& z);

struct BargmannHermite {
  double scaled;      // t^{-1/4} psi_nu(x / sqrt t) from the closed-form Hermite polynomial
  double recurrence;  // same value from the normalized Hermite-function recurrence
};

BargmannHermite bargmann_hermite_check(const QuantizationContext& ctx, int nu, const std::vector<double>& x);

enum class DecayVerdict { FiniteSupport, SuperPolynomial, PolynomialOrSlower };
const char* to_string(DecayVerdict v);

struct DecayReport {
  DecayVerdict verdict = DecayVerdict::PolynomialOrSlower;
  // slope of log|c| against log(1+|nu|) over the tail
  double loglog_slope = 0.0;
  // slope of log|c| against |nu| over the tail
  double exponential_slope = 0.0;
  // polynomial rates p for which |c| (1+|nu|)^p still decreases over the tail
  std::vector<int> rates_beaten;
  int last_nonzero_degree = 0;
};

// Coefficients indexed by the graded enumeration of spec; vector-valued
// entries are reduced to the largest magnitude per degree.
DecayReport decay_diagnostic(const TruncationSpec& spec, const Vector& coeffs);

}  // namespace btq
