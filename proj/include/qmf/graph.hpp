#pragma once

#include "qmf/tensor.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qmf {

struct VariableDecl {
    std::string name;
    std::size_t cardinality = 0;
    std::optional<std::string> mirror_of; // conjugate variable, if any

    friend bool operator==(const VariableDecl&, const VariableDecl&) = default;
};

struct MirrorPair {
    std::string unprimed;
    std::string primed;

    friend bool operator==(const MirrorPair&, const MirrorPair&) = default;
};

struct Factor {
    std::string id;
    NamedTensor tensor;
    std::optional<int> stage; // temporal annotation, used by separation checks
};

struct Box {
    std::string name;
    std::vector<std::string> factor_ids;
    std::vector<std::string> boundary;
};

/// A reusable subgraph with declared boundary variables. Boundary slots are
/// bound to host variables on instantiation; internal variables get a fresh
/// prefix.
struct Gadget {
    std::string kind;
    std::vector<std::string> boundary;       // slot names
    std::vector<MirrorPair> boundary_pairs;  // mirror structure among slots
    std::vector<VariableDecl> internals;     // slot-named, prefixed when instantiated
    std::vector<Factor> factors;             // axes name boundary or internal slots
    std::vector<std::string> system_out;     // slots carrying the system afterwards
    std::vector<std::string> probe_out;      // slots carrying the measuring system
};

struct Instantiation {
    std::string prefix;
    std::string gadget_kind;
    std::vector<std::string> factor_ids;
    std::vector<std::string> system_out; // resolved variable names
    std::vector<std::string> probe_out;
    std::optional<int> stage;
};

/// Factor graph in Forney normal form: nodes are factors, edges are
/// variables, every variable appears in at most two factors. Mirror pairs
/// (X, X') carry the bra/ket structure.
class FactorGraph {
public:
    void declare(const std::string& name, std::size_t cardinality);
    /// Declares both X and X' with mirror pairing recorded.
    void declare_pair(const std::string& name, std::size_t cardinality);
    void declare(VariableDecl decl);

    void add_factor(const std::string& id, NamedTensor tensor,
                    std::optional<int> stage = std::nullopt);
    void add_box(Box box);

    /// Splits `var` into k fresh copies joined by an equality-constraint
    /// factor, for use where a variable would otherwise exceed degree 2.
    /// Returns the fresh names.
    std::vector<std::string> share(const std::string& var, std::size_t k);

    /// Adds an equality-constraint (identity) factor between a currently
    /// open mirror pair, summarizing an arbitrary unknown future.
    void terminate(const MirrorPair& pair, std::optional<int> stage = std::nullopt);

    /// Like terminate, but records the pair as a measurement result.
    void measure(const MirrorPair& pair, std::optional<int> stage = std::nullopt);

    /// Records a pair as a measurement result without adding a factor, for
    /// measurements whose equality constraint is built by hand.
    void note_measured(const MirrorPair& pair);

    void instantiate(const Gadget& gadget, const std::map<std::string, std::string>& binding,
                     const std::string& prefix, std::optional<int> stage = std::nullopt);

    /// Exterior function of a declared box over its boundary variables.
    NamedTensor close_box(const std::string& name) const;

    /// Exterior function of the whole graph over `keep`.
    NamedTensor exterior(std::span<const std::string> keep,
                         ContractionStats* stats = nullptr) const;
    NamedTensor exterior(std::initializer_list<std::string> keep,
                         ContractionStats* stats = nullptr) const;

    bool has_variable(const std::string& name) const;
    const VariableDecl& variable(const std::string& name) const;
    std::size_t degree(const std::string& name) const;
    std::optional<std::string> mirror_of(const std::string& name) const;
    bool is_mirror_pair(const MirrorPair& pair) const;

    const std::map<std::string, VariableDecl>& variables() const { return variables_; }
    const std::vector<Factor>& factors() const { return factors_; }
    const Factor& factor(const std::string& id) const;
    bool has_factor(const std::string& id) const;
    const std::vector<Box>& boxes() const { return boxes_; }
    const std::vector<MirrorPair>& measured_pairs() const { return measured_; }
    const std::map<std::string, Instantiation>& instantiations() const { return instantiations_; }

    /// All mirror pairs, ordered by unprimed name.
    std::vector<MirrorPair> mirror_pairs() const;

private:
    std::map<std::string, VariableDecl> variables_;
    std::vector<Factor> factors_;
    std::vector<Box> boxes_;
    std::vector<MirrorPair> measured_;
    std::map<std::string, Instantiation> instantiations_;

    void check_axes(const NamedTensor& tensor) const;
    void add_equality(const std::string& id, const MirrorPair& pair, std::optional<int> stage);

    friend FactorGraph mirror_complete(const FactorGraph& half);
};

/// Returns `half` extended with, for every factor F, the entrywise complex
/// conjugate of F over the primed copies of F's variables. Mirror pairing
/// is recorded; `half` must not contain mirror pairs yet.
FactorGraph mirror_complete(const FactorGraph& half);

/// The literal primed-name convention: mirror of X is X'.
std::string primed(const std::string& name);

} // namespace qmf
