#pragma once

#include "qmf/classical.hpp"
#include "qmf/graph.hpp"
#include "qmf/linalg.hpp"
#include "qmf/qmf.hpp"
#include "qmf/tensor.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qmf::gates {

/// 2x2 Hadamard matrix.
NamedTensor hadamard(const std::string& row, const std::string& col);

/// Equality-constraint function over any number (>= 2) of axes.
NamedTensor f_eq(std::span<const std::string> axes, std::size_t cardinality);
NamedTensor f_eq(std::initializer_list<std::string> axes, std::size_t cardinality);

/// Mod-M sum constraint: 1 iff sign-weighted arguments sum to 0 mod M.
/// Default signs are all +1.
NamedTensor f_oplus(std::span<const std::string> axes, std::size_t m,
                    std::span<const int> signs = {});
NamedTensor f_oplus(std::initializer_list<std::string> axes, std::size_t m,
                    std::initializer_list<int> signs = {});

/// Controlled-swap over three binary wires: the first control value passes
/// the pair through; the second exchanges it. Six axes, outputs then
/// inputs: (S, X, R, St, Xt, Rt).
NamedTensor fredkin(std::span<const std::string> axes);
NamedTensor fredkin(std::initializer_list<std::string> axes);

/// The same function flattened to an 8x8 matrix, basis ordered (s, x, r).
NamedTensor fredkin_matrix(const std::string& row, const std::string& col);

/// Joint unitary shifting the probe by the system value; a controlled-NOT
/// for m = 2. Axes (sys_out, probe_out, sys_in, probe_in), all cardinality m.
NamedTensor controlled_shift(std::span<const std::string> axes, std::size_t m);
NamedTensor controlled_shift(std::initializer_list<std::string> axes, std::size_t m);

NamedTensor identity(const std::string& row, const std::string& col, std::size_t cardinality);

/// Indicator of a fixed known value on one axis.
NamedTensor point(const std::string& axis, std::size_t cardinality, std::size_t value);

} // namespace qmf::gates

namespace qmf {

/// Renames axes by position, keeping shape and data.
NamedTensor renamed_positional(const NamedTensor& t, std::span<const std::string> names);
NamedTensor renamed_positional(const NamedTensor& t, std::initializer_list<std::string> names);

/// Extends `fixed` (n x k, orthonormal columns) to an n x n unitary by
/// Gram-Schmidt against deterministically seeded random vectors.
linalg::Matrix complete_unitary_from_columns(const linalg::Matrix& fixed, std::uint64_t seed);

linalg::Matrix random_unitary(std::size_t n, std::uint64_t seed);

/// Initial mixture p(x0), unitary evolution u0 then u1, and a projection
/// measurement in the basis of b's columns, followed by termination.
/// The measurement result is the (X3, X3') pair.
FactorGraph elementary_system(const Pmf& p0, const NamedTensor& u0, const NamedTensor& u1,
                              const NamedTensor& b);

struct TwoMeasurementSpec {
    Pmf p0;          // over cardinality m1 * m2
    std::size_t m1 = 0;
    std::size_t m2 = 0;
    NamedTensor u0; // 3 axes: (A1, A2, X0)
    NamedTensor u1; // 4 axes: (C1, C2, A1, A2)
    NamedTensor u2; // 3 axes: (Z, C1, C2)
    NamedTensor b1; // m2 x m2, first measurement basis
    NamedTensor b2; // m2 x m2, second measurement basis
};

/// General system with two partial projection measurements on the second
/// subsystem; results are the (Y1, Y1') and (Y2, Y2') pairs. The box
/// "unknown_future" covers everything past the first measurement.
FactorGraph two_measurement_system(const TwoMeasurementSpec& spec);

/// Chain p(x0) -> U1 -> U2 with termination; the standing example for
/// classicality analysis over pairs X0, X1, X2. Requires all entries of
/// u1 and u2 to have magnitude strictly below 1.
FactorGraph classicable_example(const Pmf& p0, const NamedTensor& u1, const NamedTensor& u2);

/// The nested-agents model: a coin-like qubit R controls swapping a
/// superposed X into S; one agent measures R and X jointly in the basis b,
/// another measures S through a Hadamard. The agent views are marginals of
/// the full graph.
struct FrModel {
    FactorGraph full;       // measurements (Y1, Y1') and (Y2, Y2')
    FactorGraph agent_f;    // measurements (R, R') and (S, S'), X terminated
    FactorGraph agent_wbar; // measurement (Y1, Y1'), S terminated
    FactorGraph agent_w;    // measurements (R, R') and (Y2, Y2'), X terminated
    NamedTensor u;          // 2x2, first column (sqrt(1/3), sqrt(2/3))
    NamedTensor b;          // 4x4, first row (1/2, 1/2, -sqrt(1/2), 0)
};

FrModel fr_model(std::uint64_t completion_seed = 7);

/// Ket-half exterior over (S, Y1); entry (0, 0) vanishes.
NamedTensor fr_psi_s_y1(const FrModel& m);

/// Ket-half configuration graph with Y1 pinned to 0 (six variables).
FactorGraph fr_table1_graph(const FrModel& m);
/// fr_table1_graph extended with the second measurement pinned to 1.
FactorGraph fr_table2_graph(const FrModel& m);

struct FrImplicationReport {
    std::string description;
    std::string view;
    bool holds = false;
    std::size_t antecedent_rows = 0; // valid configurations satisfying the antecedent
};

struct FrReport {
    ConfigTable table1;
    ConfigTable table2;
    Complex table2_sum{0.0, 0.0};
    double psi00_magnitude = 0.0;
    double pr_rb1 = 0.0;  // Pr(Rb = 1)
    double pr_stop = 0.0; // Pr(Y1b = 0 and Y2b = 1)
    FrImplicationReport agent_f;
    FrImplicationReport agent_wbar;
    FrImplicationReport agent_w;
    bool four_pairs_jointly_classicable = true;
    OffDiagonalWitness witness; // off-diagonal entry of the four-pair marginal
};

/// Verifies the three single-agent inferences inside their own marginals
/// and shows that the four measured pairs share no common classical scope.
FrReport fr_implications(const FrModel& m);

} // namespace qmf
