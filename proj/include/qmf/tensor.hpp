#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qmf {

using Complex = std::complex<double>;

struct qmf_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A named, finite index set. Axis names are unique within a tensor
/// and within a factor graph.
struct Axis {
    std::string name;
    std::size_t cardinality = 0;

    friend bool operator==(const Axis&, const Axis&) = default;
};

/// Dense complex multi-array with named axes, stored row-major in axis
/// order. A tensor with no axes is a scalar holding exactly one entry.
class NamedTensor {
public:
    NamedTensor() : data_(1, Complex{0.0, 0.0}) {}
    explicit NamedTensor(std::vector<Axis> axes);
    NamedTensor(std::vector<Axis> axes, std::vector<Complex> data);

    static NamedTensor scalar(Complex value);

    std::size_t rank() const { return axes_.size(); }
    std::size_t size() const { return data_.size(); }
    const std::vector<Axis>& axes() const { return axes_; }
    const std::vector<Complex>& data() const { return data_; }
    std::vector<Complex>& data() { return data_; }

    bool has_axis(std::string_view name) const;
    std::optional<std::size_t> axis_position(std::string_view name) const;
    const Axis& axis(std::string_view name) const;

    /// Row-major strides, one per axis.
    std::vector<std::size_t> strides() const;

    Complex& at(std::span<const std::size_t> idx);
    Complex at(std::span<const std::size_t> idx) const;
    Complex& at(std::initializer_list<std::size_t> idx);
    Complex at(std::initializer_list<std::size_t> idx) const;

    Complex& flat(std::size_t i) { return data_[i]; }
    Complex flat(std::size_t i) const { return data_[i]; }

    /// Entrywise complex conjugate.
    NamedTensor conjugated() const;

    /// Same data, axes renamed via the (old, new) map. Names not present
    /// in the map are kept.
    NamedTensor renamed(std::span<const std::pair<std::string, std::string>> mapping) const;

    /// Reorders axes to `order`, permuting data accordingly. `order` must
    /// name every axis exactly once.
    NamedTensor transposed(std::span<const std::string> order) const;

    bool same_shape(const NamedTensor& other) const;

private:
    std::vector<Axis> axes_;
    std::vector<Complex> data_;

    std::size_t flatten(std::span<const std::size_t> idx) const;
};

/// Largest |a - b| over all entries; tensors must have identical axes
/// (order included).
double max_abs_diff(const NamedTensor& a, const NamedTensor& b);

/// Cheap odometer over a multi-index given axis cardinalities.
class MultiIndex {
public:
    explicit MultiIndex(std::span<const Axis> axes);
    const std::vector<std::size_t>& values() const { return idx_; }
    bool done() const { return done_; }
    void next();

private:
    std::vector<std::size_t> cards_;
    std::vector<std::size_t> idx_;
    bool done_;
};

struct ContractionStats {
    /// Entry count of the largest tensor materialized while contracting.
    std::size_t peak_intermediate_entries = 0;
    /// Entry count of the full product over all distinct axes.
    std::size_t naive_product_entries = 0;
};

/// Sum-elimination order for `contract`: greedy, picking at each step the
/// axis whose elimination yields the smallest product tensor. Ties break
/// lexicographically so results are reproducible.
std::vector<std::string> elimination_order(std::span<const NamedTensor> factors,
                                           std::span<const std::string> keep);

/// Exterior function of a set of factors: the sum, over every axis not in
/// `keep`, of the entrywise product of all factors. Axes with the same
/// name are identified across factors. The result's axes are exactly
/// `keep`, in the given order; an empty `keep` yields a scalar.
NamedTensor contract(std::span<const NamedTensor> factors,
                     std::span<const std::string> keep,
                     ContractionStats* stats = nullptr);

NamedTensor contract(std::span<const NamedTensor> factors,
                     std::initializer_list<std::string> keep,
                     ContractionStats* stats = nullptr);

/// True iff `m` is a square 2-axis tensor with max-norm(M^H M - I) <= tol.
bool is_unitary(const NamedTensor& m, double tol = 1e-12);

} // namespace qmf
