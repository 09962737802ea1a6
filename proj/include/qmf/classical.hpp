#pragma once

#include "qmf/graph.hpp"
#include "qmf/qmf.hpp"
#include "qmf/tensor.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace qmf {

inline constexpr std::size_t kDefaultEnumerationCap = std::size_t{1} << 24;

struct ConfigRow {
    std::vector<std::size_t> assignment; // aligned with ConfigTable::variables
    Complex value;
};

/// Enumeration of valid configurations: every assignment where the
/// function value exceeds the validity threshold in magnitude. Variables
/// are ordered lexicographically by name and rows lexicographically by
/// value, so tables are reproducible.
struct ConfigTable {
    std::vector<std::string> variables;
    std::vector<std::size_t> cardinalities;
    std::vector<ConfigRow> rows;

    std::string to_text() const;
};

/// Valid configurations of an arbitrary complex tensor.
ConfigTable valid_configurations(const NamedTensor& q, double tol = kDefaultTol,
                                 std::size_t cap = kDefaultEnumerationCap);

/// Valid configurations of a certified Sqmf (over its paired axes).
ConfigTable valid_configurations(const Sqmf& q, double tol = kDefaultTol,
                                 std::size_t cap = kDefaultEnumerationCap);

/// Valid configurations of the product of all factors of a graph, as a
/// function of every variable. Each row's value is that product.
ConfigTable graph_configurations(const FactorGraph& g, double tol = kDefaultTol,
                                 std::size_t cap = kDefaultEnumerationCap);

/// X is classical with q iff x = x' in every valid configuration.
bool is_classical(const Sqmf& q, const std::string& pair_name, double tol = kDefaultTol);

/// X is classicable iff the marginal onto (x, x') vanishes off the
/// diagonal.
bool is_classicable(const Sqmf& q, const std::string& pair_name, double tol = kDefaultTol);

/// A set of pairs is jointly classicable iff the marginal onto them
/// vanishes whenever any member differs from its conjugate.
bool is_jointly_classicable(const Sqmf& q, std::span<const std::string> pair_names,
                            double tol = kDefaultTol);
bool is_jointly_classicable(const Sqmf& q, std::initializer_list<std::string> pair_names,
                            double tol = kDefaultTol);

/// Largest off-diagonal magnitude of the marginal onto `pair_names`,
/// with the offending assignment. Zero (within tol) means classicable.
struct OffDiagonalWitness {
    double magnitude = 0.0;
    std::vector<std::size_t> assignment; // interleaved (x1, x1', x2, x2', ...)
};
OffDiagonalWitness off_diagonal_witness(const Sqmf& q, std::span<const std::string> pair_names);

struct PairFlags {
    std::string pair;
    bool classical = false;
    bool classicable = false;
};

struct ClassicalityReport {
    std::vector<PairFlags> pairs;
    /// Maximal jointly classicable subsets among those of size <= cap.
    std::vector<std::vector<std::string>> maximal_jointly_classicable;
    std::size_t subset_size_cap = 0;
};

ClassicalityReport classicality_report(const Sqmf& q, std::size_t subset_size_cap = 4,
                                       double tol = kDefaultTol);

} // namespace qmf
