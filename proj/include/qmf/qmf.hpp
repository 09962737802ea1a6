#pragma once

#include "qmf/graph.hpp"
#include "qmf/tensor.hpp"

#include <string>
#include <vector>

namespace qmf {

/// Default absolute tolerance for predicates (Hermitian symmetry, validity
/// of configurations, off-diagonal checks).
inline constexpr double kDefaultTol = 1e-9;

/// Nonnegative real mass function over unprimed axes.
class Pmf {
public:
    Pmf(std::vector<Axis> axes, std::vector<double> values);
    static Pmf uniform(const std::string& axis, std::size_t cardinality);

    const std::vector<Axis>& axes() const { return axes_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double at(std::span<const std::size_t> idx) const;
    double at(std::initializer_list<std::size_t> idx) const;

    /// The same data as a 1-axis-per-variable complex tensor.
    NamedTensor as_tensor() const;

private:
    std::vector<Axis> axes_;
    std::vector<double> values_;
};

/// A contracted tensor over mirror-paired axes certified as a simple
/// quantum mass function: Hermitian, positive semidefinite as a matrix
/// indexed by (x; x'), and summing to 1. Construct via certify_sqmf.
class Sqmf {
public:
    const NamedTensor& tensor() const { return tensor_; }
    const std::vector<MirrorPair>& pairs() const { return pairs_; }
    std::size_t pair_count() const { return pairs_.size(); }
    const MirrorPair& pair(const std::string& unprimed) const;
    bool has_pair(const std::string& unprimed) const;

    /// Axis names in canonical interleaved order (u1, u1', u2, u2', ...).
    std::vector<std::string> axis_order() const;
    std::vector<std::string> unprimed_axes() const;
    std::vector<std::string> primed_axes() const;

private:
    friend struct CertifyResult;
    Sqmf() = default;
    NamedTensor tensor_;
    std::vector<MirrorPair> pairs_;
};

struct PsdCheck {
    bool ok = false;
    bool hermitian = false;
    double hermitian_violation = 0.0;
    double min_eigenvalue = 0.0;
    double spectral_radius = 0.0;
    std::string detail;

    explicit operator bool() const { return ok; }
};

/// True iff `t`, read over the given mirror pairs, is Hermitian within tol
/// and the flattened (x; x') matrix has smallest eigenvalue
/// >= -tol * spectral radius. Diagnostics carry the violation.
PsdCheck is_psd_kernel(const NamedTensor& t, std::span<const MirrorPair> pairs,
                       double tol = kDefaultTol);

struct CertifyResult {
    enum class Failure { none, pairing, hermitian, psd, normalization };

    bool ok = false;
    Failure failure = Failure::none;
    std::string detail;
    bool normalization_warning = false;
    double total = 0.0; // real part of the full sum
    Sqmf sqmf;          // valid iff ok

    explicit operator bool() const { return ok; }

    static CertifyResult success(NamedTensor t, std::vector<MirrorPair> pairs, double total,
                                 bool warning);
};

/// Checks the three defining invariants and returns the certified Sqmf or
/// a detailed failure. Normalization drift up to 1e-6 passes with a
/// warning beyond 1e-9.
CertifyResult certify_sqmf(const NamedTensor& t, std::span<const MirrorPair> pairs,
                           double tol = kDefaultTol);

/// Throwing convenience wrapper around certify_sqmf.
Sqmf certify_sqmf_or_throw(const NamedTensor& t, std::span<const MirrorPair> pairs,
                           double tol = kDefaultTol);

/// Contracts the graph over the named pairs (unprimed names) and certifies
/// the result.
CertifyResult sqmf_from_graph(const FactorGraph& g, std::span<const std::string> pair_names,
                              double tol = kDefaultTol);
CertifyResult sqmf_from_graph(const FactorGraph& g, std::initializer_list<std::string> pair_names,
                              double tol = kDefaultTol);

Sqmf sqmf_from_graph_or_throw(const FactorGraph& g, std::span<const std::string> pair_names,
                              double tol = kDefaultTol);
Sqmf sqmf_from_graph_or_throw(const FactorGraph& g, std::initializer_list<std::string> pair_names,
                              double tol = kDefaultTol);

/// Sums over both members of every pair not named in `keep_pairs` and
/// re-certifies the result.
Sqmf marginalize(const Sqmf& q, std::span<const std::string> keep_pairs,
                 double tol = kDefaultTol);
Sqmf marginalize(const Sqmf& q, std::initializer_list<std::string> keep_pairs,
                 double tol = kDefaultTol);

/// Marginalizes to the measured pairs and reads the diagonal q(x, x).
/// Requires the measured pairs to be jointly classicable.
Pmf measurement_pmf(const Sqmf& q, std::span<const std::string> measured_pairs,
                    double tol = kDefaultTol);
Pmf measurement_pmf(const Sqmf& q, std::initializer_list<std::string> measured_pairs,
                    double tol = kDefaultTol);

} // namespace qmf
