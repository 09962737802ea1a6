#pragma once

#include "qmf/graph.hpp"
#include "qmf/qmf.hpp"
#include "qmf/tensor.hpp"

#include <vector>

namespace qmf {

/// A marginalized unitary interaction: the probe is prepared with p_xi and
/// each value of the interacting system selects one unitary acting on it.
struct InteractionFamily {
    Pmf p_xi;                            // over the probe alphabet
    std::vector<NamedTensor> unitaries;  // one per system value, axes (probe_out, probe_in)

    std::size_t system_cardinality() const { return unitaries.size(); }
    std::size_t probe_cardinality() const;
    void validate(double tol = 1e-12) const;
};

/// Matrix of weighted column inner products of interaction unitaries.
/// Unit diagonal, Hermitian, entries at most 1 in magnitude.
struct KappaMatrix {
    std::size_t n = 0;
    std::vector<Complex> k;

    explicit KappaMatrix(std::size_t dim) : n(dim), k(dim * dim, Complex{0.0, 0.0}) {}
    Complex& operator()(std::size_t z, std::size_t zp) { return k[z * n + zp]; }
    Complex operator()(std::size_t z, std::size_t zp) const { return k[z * n + zp]; }

    double max_off_diagonal() const;
    void validate(double tol = 1e-12) const;

    /// True iff this is the equality-constraint function, i.e. an exact
    /// projection measurement.
    bool is_equality(double tol = 1e-12) const;
};

KappaMatrix kappa(const InteractionFamily& family);

/// Family whose single interaction already measures exactly: each unitary
/// is the cyclic shift by the system value, so kappa is the equality
/// function. For probe cardinality 2 the joint unitary is a controlled-NOT.
InteractionFamily one_shot_family(std::size_t m, const Pmf& p_xi);
InteractionFamily one_shot_family(std::size_t m);

/// Entrywise (Schur) product; the effect of running the interactions in
/// sequence.
KappaMatrix kappa_product(std::span<const KappaMatrix> kappas);

struct ConvergenceResult {
    bool converged = false;
    std::size_t interactions = 0; // N at which threshold was reached
    double max_off_diagonal = 0.0;
};

/// Repeats the interaction until the off-diagonal drops to `threshold`,
/// up to `max_n` repetitions. Non-convergence is reported, not thrown.
ConvergenceResult classicalize(const KappaMatrix& single, double threshold = 1e-6,
                               std::size_t max_n = 100000);

/// Projection measurement onto the basis formed by the columns of b.
/// Boundary (X, Xt, X', Xt'); the classical result is the internal wire
/// shared by the two mirror halves.
Gadget projection_gadget(const NamedTensor& b, double tol = 1e-12);

/// Marginalized unitary interaction over boundary (X, Xt, X', Xt').
/// With terminate_probe the probe pair is closed inside the gadget and the
/// closed exterior equals the projection form with this family's kappa;
/// otherwise the probe wires (Xi, Xi') join the boundary.
Gadget interaction_gadget(const InteractionFamily& family, bool terminate_probe = true);

/// Fully entangled copy: boundary (X, Xt, Xb, X', Xt', Xb') with
/// Xb = Xt = X and Xb' = Xt' = X' in every valid configuration.
Gadget copy_gadget(std::size_t m);

/// Closes a gadget over its own boundary, in boundary order.
NamedTensor gadget_exterior(const Gadget& gadget);

/// Identity wires on (X, Xt, X', Xt'): the exterior of "nothing happened".
NamedTensor identity_wires(std::size_t m);

/// Builds the interaction u_tilde followed by its inverse with the probe
/// re-fed in between, and reports whether the exterior function is the
/// plain double identity wire, i.e. whether the measurement was undone.
/// u_tilde has axes (system_out, probe_out, system_in, probe_in).
bool undo_check(const NamedTensor& u_tilde, const Pmf& p_xi, double tol = kDefaultTol);

/// Structural check that, after the given measuring interaction, no factor
/// touches both a probe descendant and a system descendant before the
/// terminating identities. Every factor needs a stage annotation.
bool separation_check(const FactorGraph& g, const std::string& instantiation,
                      std::span<const std::string> termination_factor_ids);
bool separation_check(const FactorGraph& g, const std::string& instantiation,
                      std::initializer_list<std::string> termination_factor_ids);

} // namespace qmf
