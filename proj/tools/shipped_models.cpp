#include "shipped_models.hpp"

#include "qmf/models.hpp"

#include <algorithm>

namespace qmf::shipped {

namespace {

struct GateHint {
    std::string gate;
    std::vector<int> signs;
    std::optional<std::size_t> value;
};

// Lifts a built graph into a model document. Factors named in `hints` are
// stored as gate references, everything else as inline data.
ModelFile transcribe(const FactorGraph& g, const std::map<std::string, GateHint>& hints) {
    ModelFile m;
    for (const auto& [name, decl] : g.variables()) {
        VariableDecl out{name, decl.cardinality, std::nullopt};
        // One-sided mirror links so the declarations parse in file order.
        if (decl.mirror_of && *decl.mirror_of < name)
            out.mirror_of = decl.mirror_of;
        m.variables.push_back(std::move(out));
    }
    for (const auto& f : g.factors()) {
        FactorSpec spec;
        spec.id = f.id;
        for (const auto& ax : f.tensor.axes())
            spec.axes.push_back(ax.name);
        spec.stage = f.stage;
        if (auto it = hints.find(f.id); it != hints.end()) {
            spec.gate = it->second.gate;
            spec.signs = it->second.signs;
            spec.value = it->second.value;
        } else {
            spec.data = f.tensor.data();
        }
        m.factors.push_back(std::move(spec));
    }
    for (const auto& box : g.boxes())
        m.boxes.push_back(box);
    for (const auto& pair : g.measured_pairs())
        m.measured_pairs.push_back(pair);
    return m;
}

GateHint point0() { return GateHint{"point", {}, 0}; }
GateHint eq() { return GateHint{"f_eq", {}, std::nullopt}; }

} // namespace

ModelFile fr() {
    const FrModel fr = fr_model();
    std::map<std::string, GateHint> hints{
        {"init.S", point0()},  {"init.S'", point0()},
        {"init.X", point0()},  {"init.X'", point0()},
        {"init.R", point0()},  {"init.R'", point0()},
        {"had.X", {"hadamard", {}, std::nullopt}},
        {"had.X'", {"hadamard", {}, std::nullopt}},
        {"had.S", {"hadamard", {}, std::nullopt}},
        {"had.S'", {"hadamard", {}, std::nullopt}},
        {"swap", {"fredkin", {}, std::nullopt}},
        {"swap'", {"fredkin", {}, std::nullopt}},
        {"meas.Y1", eq()},     {"meas.Y2", eq()},
    };
    ModelFile m = transcribe(fr.full, hints);
    m.sqmf_pairs = {"S", "X", "R", "Y1", "Y2"};
    return m;
}

ModelFile table1() {
    const FrModel fr = fr_model();
    return transcribe(fr_table1_graph(fr),
                      {{"init.S", point0()}, {"swap", {"fredkin", {}, std::nullopt}}});
}

ModelFile table2() {
    const FrModel fr = fr_model();
    return transcribe(fr_table2_graph(fr),
                      {{"init.S", point0()}, {"swap", {"fredkin", {}, std::nullopt}}});
}

ModelFile elementary() {
    const Pmf p0({Axis{"X0", 2}}, {0.7, 0.3});
    const NamedTensor eye = gates::identity("r", "c", 2);
    NamedTensor rot({Axis{"r", 2}, Axis{"c", 2}},
                    {Complex{0.6, 0.0}, Complex{-0.8, 0.0}, Complex{0.8, 0.0},
                     Complex{0.6, 0.0}});
    FactorGraph g = elementary_system(p0, eye, rot, eye);
    std::map<std::string, GateHint> hints{
        {"u0", {"identity", {}, std::nullopt}},  {"u0'", {"identity", {}, std::nullopt}},
        {"bh", {"identity", {}, std::nullopt}},  {"bh'", {"identity", {}, std::nullopt}},
        {"bk", {"identity", {}, std::nullopt}},  {"bk'", {"identity", {}, std::nullopt}},
        {"meas.X3", eq()},                       {"term.X4", eq()},
    };
    ModelFile m = transcribe(g, hints);
    m.sqmf_pairs = {"X3"};
    return m;
}

ModelFile oneshot2_family() {
    ModelFile m;
    FamilySpec fam;
    fam.p = {0.5, 0.5};
    fam.one_shot = 2;
    m.family = std::move(fam);
    return m;
}

ModelFile partial_family() {
    ModelFile m;
    FamilySpec fam;
    fam.p = {0.5, 0.5};
    fam.unitaries.push_back({Complex{1, 0}, Complex{0, 0}, Complex{0, 0}, Complex{1, 0}});
    fam.unitaries.push_back({Complex{0.6, 0}, Complex{-0.8, 0}, Complex{0.8, 0},
                             Complex{0.6, 0}});
    m.family = std::move(fam);
    return m;
}

ModelFile undo_cnot() {
    ModelFile m;
    UndoSpec u;
    u.p = {0.5, 0.5};
    u.system_cardinality = 2;
    u.gate = "controlled_shift";
    m.undo = std::move(u);
    return m;
}

ModelFile separation_demo() {
    ModelFile m;
    const double h = 0.70710678118654752;
    m.variables = {
        {"X", 2, std::nullopt},  {"X'", 2, "X"},  {"Xe", 2, std::nullopt}, {"Xe'", 2, "Xe"},
        {"Xt", 2, std::nullopt}, {"Xt'", 2, "Xt"},
    };
    FactorSpec init{"init", {"X"}, 0, "", {}, std::nullopt,
                    {Complex{h, 0.0}, Complex{h, 0.0}}};
    FactorSpec init_p{"init'", {"X'"}, 0, "", {}, std::nullopt,
                      {Complex{h, 0.0}, Complex{h, 0.0}}};
    FactorSpec evolve{"evolve", {"Xe", "Xt"}, 2, "hadamard", {}, std::nullopt, {}};
    FactorSpec evolve_p{"evolve'", {"Xe'", "Xt'"}, 2, "hadamard", {}, std::nullopt, {}};
    FactorSpec term{"term.Xe", {"Xe", "Xe'"}, 3, "f_eq", {}, std::nullopt, {}};
    m.factors = {init, init_p, evolve, evolve_p, term};

    GadgetSpec gadget;
    gadget.type = "interaction_oneshot";
    gadget.prefix = "meas1";
    gadget.binding = {{"X", "X"}, {"Xt", "Xt"}, {"X'", "X'"}, {"Xt'", "Xt'"}};
    gadget.stage = 1;
    gadget.cardinality = 2;
    m.gadgets = {gadget};

    SeparationSpec sep;
    sep.interaction = "meas1";
    sep.terminations = {"term.Xe"};
    m.separation = std::move(sep);
    m.sqmf_pairs = {"Xe"};
    return m;
}

std::map<std::string, ModelFile> all() {
    return {
        {"fr.model.json", fr()},
        {"table1.model.json", table1()},
        {"table2.model.json", table2()},
        {"elementary.model.json", elementary()},
        {"oneshot2.family.json", oneshot2_family()},
        {"partial.family.json", partial_family()},
        {"undo_cnot.model.json", undo_cnot()},
        {"separation.model.json", separation_demo()},
    };
}

} // namespace qmf::shipped
