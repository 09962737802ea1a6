#include "qmf/measure.hpp"

#include "qmf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace qmf {

namespace {

NamedTensor equality3(const std::string& a, const std::string& b, const std::string& c,
                      std::size_t card) {
    NamedTensor t({Axis{a, card}, Axis{b, card}, Axis{c, card}});
    for (std::size_t v = 0; v < card; ++v)
        t.at({v, v, v}) = Complex{1.0, 0.0};
    return t;
}

NamedTensor equality2(const std::string& a, const std::string& b, std::size_t card) {
    NamedTensor t({Axis{a, card}, Axis{b, card}});
    for (std::size_t v = 0; v < card; ++v)
        t.at({v, v}) = Complex{1.0, 0.0};
    return t;
}

NamedTensor point_mass(const std::string& axis, std::size_t card, std::size_t value) {
    NamedTensor t({Axis{axis, card}});
    t.at({value}) = Complex{1.0, 0.0};
    return t;
}

NamedTensor pmf_equality(const Pmf& p, const std::string& a, const std::string& b) {
    if (p.axes().size() != 1)
        throw qmf_error("probe distribution must have a single axis");
    const std::size_t card = p.axes()[0].cardinality;
    NamedTensor t({Axis{a, card}, Axis{b, card}});
    for (std::size_t v = 0; v < card; ++v)
        t.at({v, v}) = Complex{p.at({v}), 0.0};
    return t;
}

} // namespace

std::size_t InteractionFamily::probe_cardinality() const {
    if (unitaries.empty())
        throw qmf_error("interaction family has no unitaries");
    return unitaries.front().axes()[0].cardinality;
}

void InteractionFamily::validate(double tol) const {
    if (unitaries.size() < 2)
        throw qmf_error("interaction family needs at least two system values");
    const std::size_t k = probe_cardinality();
    if (p_xi.axes().size() != 1 || p_xi.axes()[0].cardinality != k)
        throw qmf_error("probe distribution does not match the probe alphabet");
    for (const auto& u : unitaries) {
        if (u.rank() != 2 || u.axes()[0].cardinality != k || u.axes()[1].cardinality != k)
            throw qmf_error("family unitaries must be square over the probe alphabet");
        if (!is_unitary(u, tol))
            throw qmf_error("family member fails the unitarity check");
    }
}

double KappaMatrix::max_off_diagonal() const {
    double m = 0.0;
    for (std::size_t z = 0; z < n; ++z)
        for (std::size_t zp = 0; zp < n; ++zp)
            if (z != zp)
                m = std::max(m, std::abs((*this)(z, zp)));
    return m;
}

void KappaMatrix::validate(double tol) const {
    for (std::size_t z = 0; z < n; ++z)
        if (std::abs((*this)(z, z) - Complex{1.0, 0.0}) > tol)
            throw qmf_error("kappa diagonal entry differs from 1");
    for (std::size_t z = 0; z < n; ++z)
        for (std::size_t zp = 0; zp < n; ++zp) {
            if (std::abs((*this)(z, zp) - std::conj((*this)(zp, z))) > tol)
                throw qmf_error("kappa is not Hermitian");
            if (std::abs((*this)(z, zp)) > 1.0 + tol)
                throw qmf_error("kappa entry exceeds magnitude 1");
        }
}

bool KappaMatrix::is_equality(double tol) const {
    for (std::size_t z = 0; z < n; ++z)
        for (std::size_t zp = 0; zp < n; ++zp) {
            const Complex expected = (z == zp) ? Complex{1.0, 0.0} : Complex{0.0, 0.0};
            if (std::abs((*this)(z, zp) - expected) > tol)
                return false;
        }
    return true;
}

KappaMatrix kappa(const InteractionFamily& family) {
    family.validate();
    const std::size_t n = family.system_cardinality();
    const std::size_t k = family.probe_cardinality();
    KappaMatrix out(n);
    for (std::size_t z = 0; z < n; ++z) {
        for (std::size_t zp = 0; zp < n; ++zp) {
            Complex acc{0.0, 0.0};
            for (std::size_t xi = 0; xi < k; ++xi) {
                Complex inner{0.0, 0.0};
                for (std::size_t t = 0; t < k; ++t)
                    inner += std::conj(family.unitaries[zp].flat(t * k + xi)) *
                             family.unitaries[z].flat(t * k + xi);
                acc += family.p_xi.at({xi}) * inner;
            }
            out(z, zp) = acc;
        }
    }
    out.validate();
    return out;
}

InteractionFamily one_shot_family(std::size_t m, const Pmf& p_xi) {
    if (m < 2)
        throw qmf_error("one-shot family needs an alphabet of size at least 2");
    InteractionFamily fam{p_xi, {}};
    for (std::size_t z = 0; z < m; ++z) {
        NamedTensor u({Axis{"xi_out", m}, Axis{"xi_in", m}});
        for (std::size_t xi = 0; xi < m; ++xi)
            u.at({(xi + z) % m, xi}) = Complex{1.0, 0.0};
        fam.unitaries.push_back(std::move(u));
    }
    fam.validate();
    return fam;
}

InteractionFamily one_shot_family(std::size_t m) {
    return one_shot_family(m, Pmf::uniform("xi", m));
}

KappaMatrix kappa_product(std::span<const KappaMatrix> kappas) {
    if (kappas.empty())
        throw qmf_error("kappa_product needs at least one matrix");
    KappaMatrix out = kappas.front();
    for (std::size_t i = 1; i < kappas.size(); ++i) {
        if (kappas[i].n != out.n)
            throw qmf_error("kappa dimension mismatch");
        for (std::size_t j = 0; j < out.k.size(); ++j)
            out.k[j] *= kappas[i].k[j];
    }
    out.validate();
    return out;
}

ConvergenceResult classicalize(const KappaMatrix& single, double threshold, std::size_t max_n) {
    ConvergenceResult r;
    KappaMatrix acc = single;
    for (std::size_t n = 1; n <= max_n; ++n) {
        if (n > 1)
            for (std::size_t j = 0; j < acc.k.size(); ++j)
                acc.k[j] *= single.k[j];
        r.interactions = n;
        r.max_off_diagonal = acc.max_off_diagonal();
        if (r.max_off_diagonal <= threshold) {
            r.converged = true;
            return r;
        }
    }
    return r;
}

Gadget projection_gadget(const NamedTensor& b, double tol) {
    if (!is_unitary(b, tol))
        throw qmf_error("projection basis is not unitary");
    const std::size_t m = b.axes()[0].cardinality;

    auto bh = NamedTensor({Axis{"m", m}, Axis{"X", m}});
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < m; ++c)
            bh.at({r, c}) = std::conj(b.flat(c * m + r));
    auto bk = NamedTensor({Axis{"Xt", m}, Axis{"m2", m}});
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < m; ++c)
            bk.at({r, c}) = b.flat(r * m + c);

    Gadget g;
    g.kind = "projection";
    g.boundary = {"X", "Xt", "X'", "Xt'"};
    g.boundary_pairs = {{"X", "X'"}, {"Xt", "Xt'"}};
    g.internals = {
        VariableDecl{"m", m, std::nullopt},   VariableDecl{"m'", m, "m"},
        VariableDecl{"m2", m, std::nullopt},  VariableDecl{"m2'", m, "m2"},
        VariableDecl{"z", m, std::nullopt},
    };
    g.factors.push_back(Factor{"analysis", bh, std::nullopt});
    g.factors.push_back(Factor{"synthesis", bk, std::nullopt});
    g.factors.push_back(Factor{"eq", equality3("m", "m2", "z", m), std::nullopt});
    std::vector<std::pair<std::string, std::string>> prime_axes = {
        {"m", "m'"}, {"X", "X'"}, {"Xt", "Xt'"}, {"m2", "m2'"}};
    g.factors.push_back(Factor{"analysis'", bh.conjugated().renamed(prime_axes), std::nullopt});
    g.factors.push_back(Factor{"synthesis'", bk.conjugated().renamed(prime_axes), std::nullopt});
    g.factors.push_back(Factor{"eq'", equality3("m'", "m2'", "z", m), std::nullopt});
    g.system_out = {"Xt", "Xt'"};
    return g;
}

Gadget interaction_gadget(const InteractionFamily& family, bool terminate_probe) {
    family.validate();
    const std::size_t m = family.system_cardinality();
    const std::size_t k = family.probe_cardinality();

    // Stack of unitaries indexed by the copied system value.
    NamedTensor stack({Axis{"z", m}, Axis{"Xi", k}, Axis{"xi_in", k}});
    for (std::size_t z = 0; z < m; ++z)
        for (std::size_t t = 0; t < k; ++t)
            for (std::size_t c = 0; c < k; ++c)
                stack.at({z, t, c}) = family.unitaries[z].flat(t * k + c);

    Gadget g;
    g.kind = "interaction";
    g.boundary = {"X", "Xt", "X'", "Xt'"};
    g.boundary_pairs = {{"X", "X'"}, {"Xt", "Xt'"}};
    g.internals = {
        VariableDecl{"z", m, std::nullopt},      VariableDecl{"z'", m, "z"},
        VariableDecl{"xi_in", k, std::nullopt},  VariableDecl{"xi_in'", k, "xi_in"},
    };
    if (terminate_probe) {
        g.internals.push_back(VariableDecl{"Xi", k, std::nullopt});
        g.internals.push_back(VariableDecl{"Xi'", k, "Xi"});
    } else {
        g.boundary.push_back("Xi");
        g.boundary.push_back("Xi'");
        g.boundary_pairs.push_back({"Xi", "Xi'"});
    }

    std::vector<std::pair<std::string, std::string>> prime_axes = {
        {"z", "z'"}, {"X", "X'"}, {"Xt", "Xt'"}, {"Xi", "Xi'"}, {"xi_in", "xi_in'"}};
    g.factors.push_back(Factor{"eq", equality3("X", "Xt", "z", m), std::nullopt});
    g.factors.push_back(Factor{"eq'", equality3("X'", "Xt'", "z'", m), std::nullopt});
    g.factors.push_back(Factor{"u", stack, std::nullopt});
    g.factors.push_back(Factor{"u'", stack.conjugated().renamed(prime_axes), std::nullopt});
    g.factors.push_back(Factor{"probe", pmf_equality(family.p_xi, "xi_in", "xi_in'"),
                               std::nullopt});
    if (terminate_probe)
        g.factors.push_back(Factor{"escape", equality2("Xi", "Xi'", k), std::nullopt});
    g.system_out = {"Xt", "Xt'"};
    g.probe_out = {"Xi", "Xi'"};
    return g;
}

Gadget copy_gadget(std::size_t m) {
    if (m < 2)
        throw qmf_error("copy gadget needs an alphabet of size at least 2");

    // xb = z + xi0 with the probe pinned to zero.
    NamedTensor add({Axis{"z", m}, Axis{"xi0", m}, Axis{"Xb", m}});
    for (std::size_t z = 0; z < m; ++z)
        for (std::size_t xi = 0; xi < m; ++xi)
            add.at({z, xi, (z + xi) % m}) = Complex{1.0, 0.0};

    Gadget g;
    g.kind = "copy";
    g.boundary = {"X", "Xt", "Xb", "X'", "Xt'", "Xb'"};
    g.boundary_pairs = {{"X", "X'"}, {"Xt", "Xt'"}, {"Xb", "Xb'"}};
    g.internals = {
        VariableDecl{"z", m, std::nullopt},    VariableDecl{"z'", m, "z"},
        VariableDecl{"xi0", m, std::nullopt},  VariableDecl{"xi0'", m, "xi0"},
    };
    std::vector<std::pair<std::string, std::string>> prime_axes = {
        {"z", "z'"}, {"xi0", "xi0'"}, {"Xb", "Xb'"}};
    g.factors.push_back(Factor{"eq", equality3("X", "Xt", "z", m), std::nullopt});
    g.factors.push_back(Factor{"eq'", equality3("X'", "Xt'", "z'", m), std::nullopt});
    g.factors.push_back(Factor{"zero", point_mass("xi0", m, 0), std::nullopt});
    g.factors.push_back(Factor{"zero'", point_mass("xi0'", m, 0), std::nullopt});
    g.factors.push_back(Factor{"add", add, std::nullopt});
    g.factors.push_back(Factor{"add'", add.conjugated().renamed(prime_axes), std::nullopt});
    g.system_out = {"Xt", "Xt'"};
    g.probe_out = {"Xb", "Xb'"};
    return g;
}

NamedTensor gadget_exterior(const Gadget& gadget) {
    // Cardinalities of boundary slots, read off the gadget's factors.
    std::map<std::string, std::size_t> cards;
    for (const auto& f : gadget.factors)
        for (const auto& ax : f.tensor.axes())
            cards.emplace(ax.name, ax.cardinality);

    FactorGraph host;
    std::set<std::string> declared;
    for (const auto& pair : gadget.boundary_pairs) {
        host.declare_pair(pair.unprimed, cards.at(pair.unprimed));
        declared.insert(pair.unprimed);
        declared.insert(pair.primed);
    }
    std::map<std::string, std::string> binding;
    for (const auto& slot : gadget.boundary) {
        if (!declared.count(slot))
            host.declare(slot, cards.at(slot));
        binding.emplace(slot, slot);
    }
    host.instantiate(gadget, binding, "g");
    return host.exterior(std::span<const std::string>(gadget.boundary));
}

NamedTensor identity_wires(std::size_t m) {
    NamedTensor t({Axis{"X", m}, Axis{"Xt", m}, Axis{"X'", m}, Axis{"Xt'", m}});
    for (std::size_t x = 0; x < m; ++x)
        for (std::size_t xp = 0; xp < m; ++xp)
            t.at({x, x, xp, xp}) = Complex{1.0, 0.0};
    return t;
}

bool undo_check(const NamedTensor& u_tilde, const Pmf& p_xi, double tol) {
    if (u_tilde.rank() != 4)
        throw qmf_error("undo_check expects a joint unitary with four axes");
    const std::size_t m = u_tilde.axes()[0].cardinality;
    const std::size_t k = u_tilde.axes()[1].cardinality;
    if (u_tilde.axes()[2].cardinality != m || u_tilde.axes()[3].cardinality != k)
        throw qmf_error("joint unitary output and input spaces differ");
    {
        std::vector<std::string> rows{u_tilde.axes()[0].name, u_tilde.axes()[1].name};
        std::vector<std::string> cols{u_tilde.axes()[2].name, u_tilde.axes()[3].name};
        if (!linalg::is_unitary(linalg::to_matrix(u_tilde, rows, cols), 1e-12))
            throw qmf_error("undo_check input is not unitary on the joint space");
    }

    auto named = [&](const std::string& a, const std::string& b, const std::string& c,
                     const std::string& d) {
        std::vector<std::pair<std::string, std::string>> r = {
            {u_tilde.axes()[0].name, a},
            {u_tilde.axes()[1].name, b},
            {u_tilde.axes()[2].name, c},
            {u_tilde.axes()[3].name, d}};
        return u_tilde.renamed(r);
    };
    // Adjoint: rows and columns exchanged, entries conjugated.
    NamedTensor u = named("A", "B", "X", "Xi");
    NamedTensor uh = named("A", "B", "Xt", "G").conjugated();

    FactorGraph g;
    for (const auto& name : {"X", "Xt", "A"})
        g.declare_pair(name, m);
    for (const auto& name : {"Xi", "B", "G"})
        g.declare_pair(name, k);

    std::vector<std::pair<std::string, std::string>> primes = {
        {"A", "A'"}, {"B", "B'"}, {"X", "X'"}, {"Xi", "Xi'"}, {"Xt", "Xt'"}, {"G", "G'"}};
    g.add_factor("u", u);
    g.add_factor("uh", uh);
    g.add_factor("u'", u.conjugated().renamed(primes));
    g.add_factor("uh'", uh.conjugated().renamed(primes));
    g.add_factor("probe", pmf_equality(p_xi, "Xi", "Xi'"));
    g.terminate(MirrorPair{"G", "G'"});

    const NamedTensor exterior = g.exterior({"X", "Xt", "X'", "Xt'"});
    return max_abs_diff(exterior, identity_wires(m)) <= tol;
}

bool separation_check(const FactorGraph& g, const std::string& instantiation,
                      std::span<const std::string> termination_factor_ids) {
    auto it = g.instantiations().find(instantiation);
    if (it == g.instantiations().end())
        throw qmf_error("unknown instantiation '" + instantiation + "'");
    const Instantiation& inst = it->second;
    if (!inst.stage)
        throw qmf_error("interaction '" + instantiation + "' carries no stage annotation");

    const std::set<std::string> own(inst.factor_ids.begin(), inst.factor_ids.end());
    const std::set<std::string> terminations(termination_factor_ids.begin(),
                                             termination_factor_ids.end());

    std::vector<const Factor*> post;
    for (const auto& f : g.factors()) {
        if (own.count(f.id) || terminations.count(f.id))
            continue;
        if (!f.stage)
            throw qmf_error("factor '" + f.id + "' carries no stage annotation");
        if (*f.stage > *inst.stage)
            post.push_back(&f);
    }
    std::stable_sort(post.begin(), post.end(),
                     [](const Factor* a, const Factor* b) { return *a->stage < *b->stage; });

    std::set<std::string> system(inst.system_out.begin(), inst.system_out.end());
    std::set<std::string> probe(inst.probe_out.begin(), inst.probe_out.end());
    for (const Factor* f : post) {
        bool touches_system = false, touches_probe = false;
        for (const auto& ax : f->tensor.axes()) {
            touches_system |= system.count(ax.name) != 0;
            touches_probe |= probe.count(ax.name) != 0;
        }
        if (touches_system && touches_probe)
            return false;
        if (touches_system)
            for (const auto& ax : f->tensor.axes())
                system.insert(ax.name);
        if (touches_probe)
            for (const auto& ax : f->tensor.axes())
                probe.insert(ax.name);
    }
    return true;
}

bool separation_check(const FactorGraph& g, const std::string& instantiation,
                      std::initializer_list<std::string> termination_factor_ids) {
    std::vector<std::string> ids(termination_factor_ids);
    return separation_check(g, instantiation, std::span<const std::string>(ids));
}

} // namespace qmf
