#pragma once

#include "qmf/graph.hpp"
#include "qmf/measure.hpp"
#include "qmf/qmf.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qmf {

/// One factor as stored in a model file: either a builtin gate reference
/// (kept exact) or inline complex data, row-major in axis order.
struct FactorSpec {
    std::string id;
    std::vector<std::string> axes;
    std::optional<int> stage;
    std::string gate;                 // empty means inline data
    std::vector<int> signs;           // f_oplus only
    std::optional<std::size_t> value; // point only
    std::vector<Complex> data;
};

struct GadgetSpec {
    std::string type; // "projection", "copy" or "interaction_oneshot"
    std::string prefix;
    std::map<std::string, std::string> binding;
    std::optional<int> stage;
    std::size_t cardinality = 0;      // copy / interaction_oneshot
    std::vector<double> p;            // optional probe distribution
    std::vector<Complex> basis;       // projection: row-major basis matrix
    std::size_t basis_cardinality = 0;
};

struct FamilySpec {
    std::vector<double> p;
    std::optional<std::size_t> one_shot;
    std::vector<std::vector<Complex>> unitaries; // row-major, square over p.size()
};

struct UndoSpec {
    std::vector<double> p;
    std::size_t system_cardinality = 0;
    std::string gate;           // "controlled_shift" or empty for data
    std::vector<Complex> data;  // row-major over joint (out, in) pairs
};

struct SeparationSpec {
    std::string interaction;
    std::vector<std::string> terminations;
};

struct ModelFile {
    std::vector<VariableDecl> variables;
    std::vector<FactorSpec> factors;
    std::vector<Box> boxes;
    std::vector<GadgetSpec> gadgets;
    std::vector<MirrorPair> measured_pairs;
    std::vector<std::string> sqmf_pairs; // unprimed names defining the model's scope
    std::optional<FamilySpec> family;
    std::optional<UndoSpec> undo;
    std::optional<SeparationSpec> separation;

    friend bool operator==(const ModelFile&, const ModelFile&);
};

/// Parses the JSON model document. Schema violations throw qmf_error with
/// a JSON-path diagnostic.
ModelFile parse_model_file(const std::string& text);

/// Canonical serialization; parse_model_file inverts it bit-exactly.
std::string serialize_model_file(const ModelFile& m);

/// Instantiates the document as a validated factor graph.
FactorGraph build_graph(const ModelFile& m);

/// Materializes the family section.
InteractionFamily build_family(const FamilySpec& spec);

/// Materializes the undo section: the joint unitary and probe preparation.
std::pair<NamedTensor, Pmf> build_undo(const UndoSpec& spec);

ModelFile load_model(const std::string& path);
std::string read_text_file(const std::string& path);

} // namespace qmf
