#include "qmf/model_io.hpp"

#include "qmf/models.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace qmf {

using ordered_json = nlohmann::ordered_json;

bool operator==(const ModelFile& a, const ModelFile& b) {
    auto fs_eq = [](const FactorSpec& x, const FactorSpec& y) {
        return x.id == y.id && x.axes == y.axes && x.stage == y.stage && x.gate == y.gate &&
               x.signs == y.signs && x.value == y.value && x.data == y.data;
    };
    auto box_eq = [](const Box& x, const Box& y) {
        return x.name == y.name && x.factor_ids == y.factor_ids && x.boundary == y.boundary;
    };
    auto gadget_eq = [](const GadgetSpec& x, const GadgetSpec& y) {
        return x.type == y.type && x.prefix == y.prefix && x.binding == y.binding &&
               x.stage == y.stage && x.cardinality == y.cardinality && x.p == y.p &&
               x.basis == y.basis && x.basis_cardinality == y.basis_cardinality;
    };
    if (a.variables != b.variables || a.measured_pairs != b.measured_pairs ||
        a.sqmf_pairs != b.sqmf_pairs)
        return false;
    if (a.factors.size() != b.factors.size() || a.boxes.size() != b.boxes.size() ||
        a.gadgets.size() != b.gadgets.size())
        return false;
    for (std::size_t i = 0; i < a.factors.size(); ++i)
        if (!fs_eq(a.factors[i], b.factors[i]))
            return false;
    for (std::size_t i = 0; i < a.boxes.size(); ++i)
        if (!box_eq(a.boxes[i], b.boxes[i]))
            return false;
    for (std::size_t i = 0; i < a.gadgets.size(); ++i)
        if (!gadget_eq(a.gadgets[i], b.gadgets[i]))
            return false;
    auto fam_eq = [](const std::optional<FamilySpec>& x, const std::optional<FamilySpec>& y) {
        if (x.has_value() != y.has_value())
            return false;
        if (!x)
            return true;
        return x->p == y->p && x->one_shot == y->one_shot && x->unitaries == y->unitaries;
    };
    auto undo_eq = [](const std::optional<UndoSpec>& x, const std::optional<UndoSpec>& y) {
        if (x.has_value() != y.has_value())
            return false;
        if (!x)
            return true;
        return x->p == y->p && x->system_cardinality == y->system_cardinality &&
               x->gate == y->gate && x->data == y->data;
    };
    auto sep_eq = [](const std::optional<SeparationSpec>& x,
                     const std::optional<SeparationSpec>& y) {
        if (x.has_value() != y.has_value())
            return false;
        if (!x)
            return true;
        return x->interaction == y->interaction && x->terminations == y->terminations;
    };
    return fam_eq(a.family, b.family) && undo_eq(a.undo, b.undo) &&
           sep_eq(a.separation, b.separation);
}

namespace {

constexpr const char* kVersionTag = "qmf-model/1";

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw qmf_error("model schema error at " + path + ": " + message);
}

const ordered_json& expect(const ordered_json& j, const std::string& key,
                           const std::string& path) {
    auto it = j.find(key);
    if (it == j.end())
        fail(path, "missing field '" + key + "'");
    return *it;
}

std::string as_string(const ordered_json& j, const std::string& path) {
    if (!j.is_string())
        fail(path, "expected a string");
    return j.get<std::string>();
}

std::size_t as_size(const ordered_json& j, const std::string& path) {
    if (!j.is_number_unsigned())
        fail(path, "expected a nonnegative integer");
    return j.get<std::size_t>();
}

std::vector<Complex> as_complex_array(const ordered_json& j, const std::string& path) {
    if (!j.is_array())
        fail(path, "expected an array of [re, im] pairs");
    std::vector<Complex> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& e = j[i];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            fail(path + "[" + std::to_string(i) + "]", "expected [re, im]");
        out.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    return out;
}

std::vector<double> as_double_array(const ordered_json& j, const std::string& path) {
    if (!j.is_array())
        fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number())
            fail(path + "[" + std::to_string(i) + "]", "expected a number");
        out.push_back(j[i].get<double>());
    }
    return out;
}

std::vector<std::string> as_string_array(const ordered_json& j, const std::string& path) {
    if (!j.is_array())
        fail(path, "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(as_string(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

MirrorPair as_pair(const ordered_json& j, const std::string& path) {
    auto v = as_string_array(j, path);
    if (v.size() != 2)
        fail(path, "expected a [unprimed, primed] pair");
    return MirrorPair{v[0], v[1]};
}

ordered_json complex_array_json(std::span<const Complex> data) {
    ordered_json arr = ordered_json::array();
    for (const auto& v : data)
        arr.push_back(ordered_json::array({v.real(), v.imag()}));
    return arr;
}

} // namespace

namespace {
ModelFile parse_model_object(const ordered_json& j);
} // namespace

ModelFile parse_model_file(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) { // parse and overflow errors
        throw qmf_error(std::string("model is not valid JSON: ") + e.what());
    }
    try {
        return parse_model_object(j);
    } catch (const nlohmann::json::exception& e) {
        throw qmf_error(std::string("model schema error: ") + e.what());
    }
}

namespace {

ModelFile parse_model_object(const ordered_json& j) {
    if (!j.is_object())
        fail("$", "expected an object");
    const std::string version = as_string(expect(j, "version", "$"), "$.version");
    if (version != kVersionTag)
        fail("$.version", "unsupported version '" + version + "'");

    ModelFile m;
    const auto& vars = expect(j, "variables", "$");
    if (!vars.is_array())
        fail("$.variables", "expected an array");
    for (std::size_t i = 0; i < vars.size(); ++i) {
        const std::string path = "$.variables[" + std::to_string(i) + "]";
        const auto& v = vars[i];
        VariableDecl decl;
        decl.name = as_string(expect(v, "name", path), path + ".name");
        decl.cardinality = as_size(expect(v, "cardinality", path), path + ".cardinality");
        if (decl.cardinality == 0)
            fail(path + ".cardinality", "cardinality must be positive");
        if (v.contains("mirror_of"))
            decl.mirror_of = as_string(v["mirror_of"], path + ".mirror_of");
        m.variables.push_back(std::move(decl));
    }

    const auto& factors = expect(j, "factors", "$");
    if (!factors.is_array())
        fail("$.factors", "expected an array");
    for (std::size_t i = 0; i < factors.size(); ++i) {
        const std::string path = "$.factors[" + std::to_string(i) + "]";
        const auto& f = factors[i];
        FactorSpec spec;
        spec.id = as_string(expect(f, "id", path), path + ".id");
        spec.axes = as_string_array(expect(f, "axes", path), path + ".axes");
        if (f.contains("stage")) {
            if (!f["stage"].is_number_integer())
                fail(path + ".stage", "expected an integer");
            spec.stage = f["stage"].get<int>();
        }
        const bool has_gate = f.contains("gate");
        const bool has_data = f.contains("data");
        if (has_gate == has_data)
            fail(path, "factor needs exactly one of 'gate' or 'data'");
        if (has_gate) {
            spec.gate = as_string(f["gate"], path + ".gate");
            if (f.contains("signs")) {
                for (const auto& s : f["signs"])
                    spec.signs.push_back(s.get<int>());
            }
            if (f.contains("value"))
                spec.value = as_size(f["value"], path + ".value");
        } else {
            spec.data = as_complex_array(f["data"], path + ".data");
        }
        m.factors.push_back(std::move(spec));
    }

    if (j.contains("boxes")) {
        const auto& boxes = j["boxes"];
        if (!boxes.is_array())
            fail("$.boxes", "expected an array");
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            const std::string path = "$.boxes[" + std::to_string(i) + "]";
            const auto& b = boxes[i];
            Box box;
            box.name = as_string(expect(b, "name", path), path + ".name");
            box.factor_ids = as_string_array(expect(b, "factors", path), path + ".factors");
            box.boundary = as_string_array(expect(b, "boundary", path), path + ".boundary");
            m.boxes.push_back(std::move(box));
        }
    }

    if (j.contains("gadgets")) {
        const auto& gadgets = j["gadgets"];
        if (!gadgets.is_array())
            fail("$.gadgets", "expected an array");
        for (std::size_t i = 0; i < gadgets.size(); ++i) {
            const std::string path = "$.gadgets[" + std::to_string(i) + "]";
            const auto& g = gadgets[i];
            GadgetSpec spec;
            spec.type = as_string(expect(g, "type", path), path + ".type");
            spec.prefix = as_string(expect(g, "prefix", path), path + ".prefix");
            const auto& binding = expect(g, "binding", path);
            if (!binding.is_object())
                fail(path + ".binding", "expected an object");
            for (const auto& [slot, target] : binding.items())
                spec.binding.emplace(slot, as_string(target, path + ".binding." + slot));
            if (g.contains("stage"))
                spec.stage = g["stage"].get<int>();
            if (g.contains("cardinality"))
                spec.cardinality = as_size(g["cardinality"], path + ".cardinality");
            if (g.contains("p"))
                spec.p = as_double_array(g["p"], path + ".p");
            if (g.contains("basis")) {
                spec.basis = as_complex_array(expect(g["basis"], "data", path + ".basis"),
                                              path + ".basis.data");
                spec.basis_cardinality =
                    as_size(expect(g["basis"], "cardinality", path + ".basis"),
                            path + ".basis.cardinality");
            }
            m.gadgets.push_back(std::move(spec));
        }
    }

    if (j.contains("measured_pairs")) {
        const auto& pairs = j["measured_pairs"];
        for (std::size_t i = 0; i < pairs.size(); ++i)
            m.measured_pairs.push_back(
                as_pair(pairs[i], "$.measured_pairs[" + std::to_string(i) + "]"));
    }
    if (j.contains("sqmf_pairs"))
        m.sqmf_pairs = as_string_array(j["sqmf_pairs"], "$.sqmf_pairs");

    if (j.contains("family")) {
        const auto& f = j["family"];
        FamilySpec spec;
        spec.p = as_double_array(expect(f, "p", "$.family"), "$.family.p");
        if (f.contains("one_shot"))
            spec.one_shot = as_size(f["one_shot"], "$.family.one_shot");
        if (f.contains("unitaries")) {
            for (std::size_t i = 0; i < f["unitaries"].size(); ++i)
                spec.unitaries.push_back(as_complex_array(
                    expect(f["unitaries"][i], "data", "$.family.unitaries"),
                    "$.family.unitaries[" + std::to_string(i) + "].data"));
        }
        if (spec.one_shot.has_value() == !spec.unitaries.empty())
            fail("$.family", "family needs exactly one of 'one_shot' or 'unitaries'");
        m.family = std::move(spec);
    }

    if (j.contains("undo")) {
        const auto& u = j["undo"];
        UndoSpec spec;
        spec.p = as_double_array(expect(u, "p", "$.undo"), "$.undo.p");
        spec.system_cardinality =
            as_size(expect(u, "system_cardinality", "$.undo"), "$.undo.system_cardinality");
        const auto& unitary = expect(u, "unitary", "$.undo");
        if (unitary.contains("gate"))
            spec.gate = as_string(unitary["gate"], "$.undo.unitary.gate");
        else
            spec.data = as_complex_array(expect(unitary, "data", "$.undo.unitary"),
                                         "$.undo.unitary.data");
        m.undo = std::move(spec);
    }

    if (j.contains("separation")) {
        const auto& s = j["separation"];
        SeparationSpec spec;
        spec.interaction = as_string(expect(s, "interaction", "$.separation"),
                                     "$.separation.interaction");
        spec.terminations =
            as_string_array(expect(s, "terminations", "$.separation"), "$.separation.terminations");
        m.separation = std::move(spec);
    }
    return m;
}

} // namespace

std::string serialize_model_file(const ModelFile& m) {
    ordered_json j;
    j["version"] = kVersionTag;

    ordered_json vars = ordered_json::array();
    for (const auto& v : m.variables) {
        ordered_json e;
        e["name"] = v.name;
        e["cardinality"] = v.cardinality;
        if (v.mirror_of)
            e["mirror_of"] = *v.mirror_of;
        vars.push_back(std::move(e));
    }
    j["variables"] = std::move(vars);

    ordered_json factors = ordered_json::array();
    for (const auto& f : m.factors) {
        ordered_json e;
        e["id"] = f.id;
        e["axes"] = f.axes;
        if (!f.gate.empty()) {
            e["gate"] = f.gate;
            if (!f.signs.empty())
                e["signs"] = f.signs;
            if (f.value)
                e["value"] = *f.value;
        } else {
            e["data"] = complex_array_json(f.data);
        }
        if (f.stage)
            e["stage"] = *f.stage;
        factors.push_back(std::move(e));
    }
    j["factors"] = std::move(factors);

    if (!m.boxes.empty()) {
        ordered_json boxes = ordered_json::array();
        for (const auto& b : m.boxes) {
            ordered_json e;
            e["name"] = b.name;
            e["factors"] = b.factor_ids;
            e["boundary"] = b.boundary;
            boxes.push_back(std::move(e));
        }
        j["boxes"] = std::move(boxes);
    }

    if (!m.gadgets.empty()) {
        ordered_json gadgets = ordered_json::array();
        for (const auto& g : m.gadgets) {
            ordered_json e;
            e["type"] = g.type;
            e["prefix"] = g.prefix;
            ordered_json binding;
            for (const auto& [slot, target] : g.binding)
                binding[slot] = target;
            e["binding"] = std::move(binding);
            if (g.stage)
                e["stage"] = *g.stage;
            if (g.cardinality)
                e["cardinality"] = g.cardinality;
            if (!g.p.empty())
                e["p"] = g.p;
            if (!g.basis.empty()) {
                ordered_json basis;
                basis["cardinality"] = g.basis_cardinality;
                basis["data"] = complex_array_json(g.basis);
                e["basis"] = std::move(basis);
            }
            gadgets.push_back(std::move(e));
        }
        j["gadgets"] = std::move(gadgets);
    }

    if (!m.measured_pairs.empty()) {
        ordered_json pairs = ordered_json::array();
        for (const auto& p : m.measured_pairs)
            pairs.push_back(ordered_json::array({p.unprimed, p.primed}));
        j["measured_pairs"] = std::move(pairs);
    }
    if (!m.sqmf_pairs.empty())
        j["sqmf_pairs"] = m.sqmf_pairs;

    if (m.family) {
        ordered_json f;
        f["p"] = m.family->p;
        if (m.family->one_shot)
            f["one_shot"] = *m.family->one_shot;
        if (!m.family->unitaries.empty()) {
            ordered_json us = ordered_json::array();
            for (const auto& u : m.family->unitaries) {
                ordered_json e;
                e["data"] = complex_array_json(u);
                us.push_back(std::move(e));
            }
            f["unitaries"] = std::move(us);
        }
        j["family"] = std::move(f);
    }

    if (m.undo) {
        ordered_json u;
        u["p"] = m.undo->p;
        u["system_cardinality"] = m.undo->system_cardinality;
        ordered_json unitary;
        if (!m.undo->gate.empty())
            unitary["gate"] = m.undo->gate;
        else
            unitary["data"] = complex_array_json(m.undo->data);
        u["unitary"] = std::move(unitary);
        j["undo"] = std::move(u);
    }

    if (m.separation) {
        ordered_json s;
        s["interaction"] = m.separation->interaction;
        s["terminations"] = m.separation->terminations;
        j["separation"] = std::move(s);
    }
    return j.dump(2) + "\n";
}

namespace {

NamedTensor build_factor(const ModelFile& m, const FactorSpec& spec, const FactorGraph& g) {
    std::vector<Axis> axes;
    for (const auto& name : spec.axes) {
        if (!g.has_variable(name))
            throw qmf_error("factor '" + spec.id + "' references undeclared variable '" + name +
                            "'");
        axes.push_back(Axis{name, g.variable(name).cardinality});
    }
    auto shared_card = [&]() {
        for (const auto& a : axes)
            if (a.cardinality != axes.front().cardinality)
                throw qmf_error("factor '" + spec.id + "' requires equal cardinalities");
        return axes.front().cardinality;
    };

    if (spec.gate.empty()) {
        return NamedTensor(axes, spec.data);
    }
    if (spec.gate == "hadamard") {
        if (axes.size() != 2)
            throw qmf_error("hadamard takes two axes");
        if (shared_card() != 2)
            throw qmf_error("hadamard needs cardinality 2");
        return gates::hadamard(spec.axes[0], spec.axes[1]);
    }
    if (spec.gate == "identity") {
        if (axes.size() != 2)
            throw qmf_error("identity takes two axes");
        return gates::identity(spec.axes[0], spec.axes[1], shared_card());
    }
    if (spec.gate == "f_eq")
        return gates::f_eq(spec.axes, shared_card());
    if (spec.gate == "f_oplus")
        return gates::f_oplus(spec.axes, shared_card(), spec.signs);
    if (spec.gate == "fredkin")
        return gates::fredkin(spec.axes);
    if (spec.gate == "fredkin_matrix")
        return gates::fredkin_matrix(spec.axes.at(0), spec.axes.at(1));
    if (spec.gate == "controlled_shift")
        return gates::controlled_shift(spec.axes, shared_card());
    if (spec.gate == "point") {
        if (axes.size() != 1 || !spec.value)
            throw qmf_error("point takes one axis and a value");
        return gates::point(spec.axes[0], axes[0].cardinality, *spec.value);
    }
    (void)m;
    throw qmf_error("unknown gate '" + spec.gate + "' in factor '" + spec.id + "'");
}

} // namespace

FactorGraph build_graph(const ModelFile& m) {
    FactorGraph g;
    for (const auto& decl : m.variables)
        g.declare(decl);
    for (const auto& spec : m.factors)
        g.add_factor(spec.id, build_factor(m, spec, g), spec.stage);
    for (const auto& spec : m.gadgets) {
        Gadget gadget;
        if (spec.type == "copy") {
            gadget = copy_gadget(spec.cardinality);
        } else if (spec.type == "interaction_oneshot" ||
                   spec.type == "interaction_oneshot_open") {
            InteractionFamily fam =
                spec.p.empty()
                    ? one_shot_family(spec.cardinality)
                    : one_shot_family(spec.cardinality,
                                      Pmf({Axis{"xi", spec.cardinality}}, spec.p));
            gadget = interaction_gadget(fam, spec.type == "interaction_oneshot");
        } else if (spec.type == "projection") {
            if (spec.basis.empty())
                throw qmf_error("projection gadget needs a basis");
            NamedTensor b({Axis{"r", spec.basis_cardinality}, Axis{"c", spec.basis_cardinality}},
                          spec.basis);
            gadget = projection_gadget(b);
        } else {
            throw qmf_error("unknown gadget type '" + spec.type + "'");
        }
        g.instantiate(gadget, spec.binding, spec.prefix, spec.stage);
    }
    for (const auto& box : m.boxes)
        g.add_box(box);
    for (const auto& pair : m.measured_pairs)
        g.note_measured(pair);
    for (const auto& name : m.sqmf_pairs)
        if (!g.has_variable(name) || !g.mirror_of(name))
            throw qmf_error("sqmf pair '" + name + "' is not a mirrored variable");
    return g;
}

InteractionFamily build_family(const FamilySpec& spec) {
    const std::size_t k = spec.p.size();
    Pmf p({Axis{"xi", k}}, spec.p);
    if (spec.one_shot)
        return one_shot_family(*spec.one_shot, std::move(p));
    InteractionFamily fam{std::move(p), {}};
    for (const auto& data : spec.unitaries)
        fam.unitaries.push_back(
            NamedTensor({Axis{"xi_out", k}, Axis{"xi_in", k}}, data));
    fam.validate();
    return fam;
}

std::pair<NamedTensor, Pmf> build_undo(const UndoSpec& spec) {
    const std::size_t k = spec.p.size();
    const std::size_t m = spec.system_cardinality;
    Pmf p({Axis{"xi", k}}, spec.p);
    if (spec.gate == "controlled_shift") {
        if (m != k)
            throw qmf_error("controlled shift needs matching system and probe alphabets");
        return {gates::controlled_shift({"a", "b", "x", "xi"}, m), std::move(p)};
    }
    if (!spec.gate.empty())
        throw qmf_error("unknown undo gate '" + spec.gate + "'");
    NamedTensor u({Axis{"a", m}, Axis{"b", k}, Axis{"x", m}, Axis{"xi", k}}, spec.data);
    return {std::move(u), std::move(p)};
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw qmf_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ModelFile load_model(const std::string& path) { return parse_model_file(read_text_file(path)); }

} // namespace qmf
