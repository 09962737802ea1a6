#include "qmf/graph.hpp"

#include <algorithm>

namespace qmf {

std::string primed(const std::string& name) { return name + "'"; }

void FactorGraph::declare(const std::string& name, std::size_t cardinality) {
    declare(VariableDecl{name, cardinality, std::nullopt});
}

void FactorGraph::declare(VariableDecl decl) {
    if (decl.name.empty())
        throw qmf_error("variable name may not be empty");
    if (decl.cardinality == 0)
        throw qmf_error("variable '" + decl.name + "' has cardinality 0");
    if (variables_.count(decl.name))
        throw qmf_error("variable '" + decl.name + "' already declared");
    if (!decl.mirror_of && decl.name.back() == '\'')
        throw qmf_error("name '" + decl.name + "' ends in ' which is reserved for mirrors");
    if (decl.mirror_of) {
        auto it = variables_.find(*decl.mirror_of);
        if (it == variables_.end())
            throw qmf_error("mirror_of names unknown variable '" + *decl.mirror_of + "'");
        if (it->second.cardinality != decl.cardinality)
            throw qmf_error("mirrored variables '" + decl.name + "' and '" + *decl.mirror_of +
                            "' must share cardinality");
        if (it->second.mirror_of)
            throw qmf_error("variable '" + *decl.mirror_of + "' already has a mirror");
        it->second.mirror_of = decl.name;
    }
    variables_.emplace(decl.name, std::move(decl));
}

void FactorGraph::declare_pair(const std::string& name, std::size_t cardinality) {
    declare(name, cardinality);
    declare(VariableDecl{primed(name), cardinality, name});
}

void FactorGraph::check_axes(const NamedTensor& tensor) const {
    for (const auto& ax : tensor.axes()) {
        auto it = variables_.find(ax.name);
        if (it == variables_.end())
            throw qmf_error("factor axis '" + ax.name + "' names no declared variable");
        if (it->second.cardinality != ax.cardinality)
            throw qmf_error("factor axis '" + ax.name + "' has cardinality " +
                            std::to_string(ax.cardinality) + " but the variable has " +
                            std::to_string(it->second.cardinality));
    }
}

void FactorGraph::add_factor(const std::string& id, NamedTensor tensor,
                             std::optional<int> stage) {
    if (has_factor(id))
        throw qmf_error("factor id '" + id + "' already used");
    check_axes(tensor);
    for (const auto& ax : tensor.axes())
        if (degree(ax.name) >= 2)
            throw qmf_error("variable '" + ax.name +
                            "' would appear in more than two factors; use share()");
    factors_.push_back(Factor{id, std::move(tensor), stage});
}

void FactorGraph::add_box(Box box) {
    for (const auto& b : boxes_)
        if (b.name == box.name)
            throw qmf_error("box '" + box.name + "' already declared");
    for (const auto& fid : box.factor_ids)
        if (!has_factor(fid))
            throw qmf_error("box '" + box.name + "' references unknown factor '" + fid + "'");
    for (const auto& v : box.boundary)
        if (!has_variable(v))
            throw qmf_error("box '" + box.name + "' boundary names unknown variable '" + v + "'");
    boxes_.push_back(std::move(box));
}

std::vector<std::string> FactorGraph::share(const std::string& var, std::size_t k) {
    const auto& decl = variable(var);
    if (k < 2)
        throw qmf_error("share requires k >= 2");
    std::vector<std::string> fresh;
    std::vector<Axis> axes{Axis{var, decl.cardinality}};
    for (std::size_t i = 1; i <= k; ++i) {
        std::string name = var + "#" + std::to_string(i);
        declare(name, decl.cardinality);
        axes.push_back(Axis{name, decl.cardinality});
        fresh.push_back(std::move(name));
    }
    NamedTensor eq(axes);
    for (std::size_t v = 0; v < decl.cardinality; ++v) {
        std::vector<std::size_t> idx(k + 1, v);
        eq.at(std::span<const std::size_t>(idx)) = Complex{1.0, 0.0};
    }
    add_factor("share." + var, std::move(eq));
    return fresh;
}

void FactorGraph::add_equality(const std::string& id, const MirrorPair& pair,
                               std::optional<int> stage) {
    if (!is_mirror_pair(pair))
        throw qmf_error("(" + pair.unprimed + ", " + pair.primed + ") is not a mirror pair");
    if (degree(pair.unprimed) >= 2 || degree(pair.primed) >= 2)
        throw qmf_error("pair (" + pair.unprimed + ", " + pair.primed +
                        ") has no open half-edges");
    const std::size_t card = variable(pair.unprimed).cardinality;
    NamedTensor eq({Axis{pair.unprimed, card}, Axis{pair.primed, card}});
    for (std::size_t v = 0; v < card; ++v)
        eq.at({v, v}) = Complex{1.0, 0.0};
    add_factor(id, std::move(eq), stage);
}

void FactorGraph::terminate(const MirrorPair& pair, std::optional<int> stage) {
    add_equality("term." + pair.unprimed, pair, stage);
}

void FactorGraph::measure(const MirrorPair& pair, std::optional<int> stage) {
    add_equality("meas." + pair.unprimed, pair, stage);
    measured_.push_back(pair);
}

void FactorGraph::note_measured(const MirrorPair& pair) {
    if (!is_mirror_pair(pair))
        throw qmf_error("(" + pair.unprimed + ", " + pair.primed + ") is not a mirror pair");
    measured_.push_back(pair);
}

void FactorGraph::instantiate(const Gadget& gadget,
                              const std::map<std::string, std::string>& binding,
                              const std::string& prefix, std::optional<int> stage) {
    if (instantiations_.count(prefix))
        throw qmf_error("instantiation prefix '" + prefix + "' already used");
    for (const auto& slot : gadget.boundary)
        if (!binding.count(slot))
            throw qmf_error("gadget boundary slot '" + slot + "' left dangling");

    // Resolve a slot name to a host variable name.
    auto resolve = [&](const std::string& slot) -> std::string {
        if (auto it = binding.find(slot); it != binding.end())
            return it->second;
        return prefix + "." + slot;
    };

    for (const auto& slot : gadget.boundary) {
        const std::string& host = binding.at(slot);
        if (!has_variable(host))
            throw qmf_error("binding targets unknown variable '" + host + "'");
    }
    for (const auto& pair : gadget.boundary_pairs) {
        MirrorPair bound{binding.at(pair.unprimed), binding.at(pair.primed)};
        if (!is_mirror_pair(bound))
            throw qmf_error("binding of (" + pair.unprimed + ", " + pair.primed +
                            ") breaks mirror pairing");
    }

    for (const auto& decl : gadget.internals) {
        VariableDecl d{resolve(decl.name), decl.cardinality, std::nullopt};
        if (decl.mirror_of)
            d.mirror_of = resolve(*decl.mirror_of);
        declare(std::move(d));
    }

    Instantiation inst;
    inst.prefix = prefix;
    inst.gadget_kind = gadget.kind;
    inst.stage = stage;
    for (const auto& f : gadget.factors) {
        std::vector<std::pair<std::string, std::string>> rename;
        for (const auto& ax : f.tensor.axes()) {
            // Cardinality agreement between slot and bound variable.
            if (binding.count(ax.name) && variable(binding.at(ax.name)).cardinality !=
                                              ax.cardinality)
                throw qmf_error("binding of slot '" + ax.name + "' to '" +
                                binding.at(ax.name) + "' has mismatched cardinality");
            rename.emplace_back(ax.name, resolve(ax.name));
        }
        std::string fid = prefix + "." + f.id;
        add_factor(fid, f.tensor.renamed(rename), stage ? stage : f.stage);
        inst.factor_ids.push_back(std::move(fid));
    }
    for (const auto& slot : gadget.system_out)
        inst.system_out.push_back(resolve(slot));
    for (const auto& slot : gadget.probe_out)
        inst.probe_out.push_back(resolve(slot));
    instantiations_.emplace(prefix, std::move(inst));
}

NamedTensor FactorGraph::close_box(const std::string& name) const {
    const Box* box = nullptr;
    for (const auto& b : boxes_)
        if (b.name == name)
            box = &b;
    if (!box)
        throw qmf_error("unknown box '" + name + "'");
    std::vector<NamedTensor> tensors;
    for (const auto& fid : box->factor_ids)
        tensors.push_back(factor(fid).tensor);
    return contract(tensors, box->boundary);
}

NamedTensor FactorGraph::exterior(std::span<const std::string> keep,
                                  ContractionStats* stats) const {
    std::vector<NamedTensor> tensors;
    tensors.reserve(factors_.size());
    for (const auto& f : factors_)
        tensors.push_back(f.tensor);
    return contract(tensors, keep, stats);
}

NamedTensor FactorGraph::exterior(std::initializer_list<std::string> keep,
                                  ContractionStats* stats) const {
    std::vector<std::string> k(keep);
    return exterior(std::span<const std::string>(k), stats);
}

bool FactorGraph::has_variable(const std::string& name) const {
    return variables_.count(name) != 0;
}

const VariableDecl& FactorGraph::variable(const std::string& name) const {
    auto it = variables_.find(name);
    if (it == variables_.end())
        throw qmf_error("unknown variable '" + name + "'");
    return it->second;
}

std::size_t FactorGraph::degree(const std::string& name) const {
    std::size_t d = 0;
    for (const auto& f : factors_)
        if (f.tensor.has_axis(name))
            ++d;
    return d;
}

std::optional<std::string> FactorGraph::mirror_of(const std::string& name) const {
    return variable(name).mirror_of;
}

bool FactorGraph::is_mirror_pair(const MirrorPair& pair) const {
    if (!has_variable(pair.unprimed) || !has_variable(pair.primed))
        return false;
    auto m = variable(pair.unprimed).mirror_of;
    return m && *m == pair.primed;
}

const Factor& FactorGraph::factor(const std::string& id) const {
    for (const auto& f : factors_)
        if (f.id == id)
            return f;
    throw qmf_error("unknown factor '" + id + "'");
}

bool FactorGraph::has_factor(const std::string& id) const {
    return std::any_of(factors_.begin(), factors_.end(),
                       [&](const Factor& f) { return f.id == id; });
}

std::vector<MirrorPair> FactorGraph::mirror_pairs() const {
    std::vector<MirrorPair> pairs;
    for (const auto& [name, decl] : variables_) {
        if (!decl.mirror_of)
            continue;
        // Report each pair once, keyed on the unprimed member.
        if (name.back() != '\'')
            pairs.push_back(MirrorPair{name, *decl.mirror_of});
    }
    return pairs;
}

FactorGraph mirror_complete(const FactorGraph& half) {
    for (const auto& [name, decl] : half.variables_)
        if (decl.mirror_of)
            throw qmf_error("mirror_complete input already contains mirror pairs");

    FactorGraph full = half;
    for (const auto& [name, decl] : half.variables_)
        full.declare(VariableDecl{primed(name), decl.cardinality, name});
    for (const auto& f : half.factors_) {
        std::vector<std::pair<std::string, std::string>> rename;
        for (const auto& ax : f.tensor.axes())
            rename.emplace_back(ax.name, primed(ax.name));
        full.add_factor(primed(f.id), f.tensor.conjugated().renamed(rename), f.stage);
    }
    return full;
}

} // namespace qmf
