#include "qmf/models.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace qmf::gates {

NamedTensor hadamard(const std::string& row, const std::string& col) {
    const double h = 1.0 / std::sqrt(2.0);
    return NamedTensor({Axis{row, 2}, Axis{col, 2}}, {Complex{h, 0.0}, Complex{h, 0.0},
                                                      Complex{h, 0.0}, Complex{-h, 0.0}});
}

NamedTensor f_eq(std::span<const std::string> axes, std::size_t cardinality) {
    if (axes.size() < 2)
        throw qmf_error("equality constraint needs at least two arguments");
    std::vector<Axis> ax;
    for (const auto& name : axes)
        ax.push_back(Axis{name, cardinality});
    NamedTensor t(ax);
    for (std::size_t v = 0; v < cardinality; ++v) {
        std::vector<std::size_t> idx(axes.size(), v);
        t.at(std::span<const std::size_t>(idx)) = Complex{1.0, 0.0};
    }
    return t;
}

NamedTensor f_eq(std::initializer_list<std::string> axes, std::size_t cardinality) {
    std::vector<std::string> a(axes);
    return f_eq(std::span<const std::string>(a), cardinality);
}

NamedTensor f_oplus(std::span<const std::string> axes, std::size_t m,
                    std::span<const int> signs) {
    if (axes.size() < 2)
        throw qmf_error("mod-sum constraint needs at least two arguments");
    if (!signs.empty() && signs.size() != axes.size())
        throw qmf_error("sign list must match argument count");
    std::vector<Axis> ax;
    for (const auto& name : axes)
        ax.push_back(Axis{name, m});
    NamedTensor t(ax);
    MultiIndex mi(t.axes());
    for (std::size_t flat = 0; !mi.done(); mi.next(), ++flat) {
        std::size_t sum = 0;
        for (std::size_t i = 0; i < ax.size(); ++i) {
            const int sign = signs.empty() ? 1 : signs[i];
            const std::size_t v = mi.values()[i];
            sum += (sign >= 0) ? v : (m - v) % m;
        }
        if (sum % m == 0)
            t.flat(flat) = Complex{1.0, 0.0};
    }
    return t;
}

NamedTensor f_oplus(std::initializer_list<std::string> axes, std::size_t m,
                    std::initializer_list<int> signs) {
    std::vector<std::string> a(axes);
    std::vector<int> s(signs);
    return f_oplus(std::span<const std::string>(a), m, std::span<const int>(s));
}

NamedTensor fredkin(std::span<const std::string> axes) {
    if (axes.size() != 6)
        throw qmf_error("controlled swap takes six axes: outputs (S, X, R), inputs (St, Xt, Rt)");
    std::vector<Axis> ax;
    for (const auto& name : axes)
        ax.push_back(Axis{name, 2});
    NamedTensor t(ax);
    for (std::size_t st = 0; st < 2; ++st)
        for (std::size_t xt = 0; xt < 2; ++xt)
            for (std::size_t rt = 0; rt < 2; ++rt) {
                const std::size_t s = (rt == 0) ? st : xt;
                const std::size_t x = (rt == 0) ? xt : st;
                t.at({s, x, rt, st, xt, rt}) = Complex{1.0, 0.0};
            }
    return t;
}

NamedTensor fredkin(std::initializer_list<std::string> axes) {
    std::vector<std::string> a(axes);
    return fredkin(std::span<const std::string>(a));
}

NamedTensor fredkin_matrix(const std::string& row, const std::string& col) {
    NamedTensor t({Axis{row, 8}, Axis{col, 8}});
    for (std::size_t st = 0; st < 2; ++st)
        for (std::size_t xt = 0; xt < 2; ++xt)
            for (std::size_t rt = 0; rt < 2; ++rt) {
                const std::size_t s = (rt == 0) ? st : xt;
                const std::size_t x = (rt == 0) ? xt : st;
                t.at({4 * s + 2 * x + rt, 4 * st + 2 * xt + rt}) = Complex{1.0, 0.0};
            }
    return t;
}

NamedTensor controlled_shift(std::span<const std::string> axes, std::size_t m) {
    if (axes.size() != 4)
        throw qmf_error("controlled shift takes axes (sys_out, probe_out, sys_in, probe_in)");
    std::vector<Axis> ax;
    for (const auto& name : axes)
        ax.push_back(Axis{name, m});
    NamedTensor t(ax);
    for (std::size_t x = 0; x < m; ++x)
        for (std::size_t xi = 0; xi < m; ++xi)
            t.at({x, (xi + x) % m, x, xi}) = Complex{1.0, 0.0};
    return t;
}

NamedTensor controlled_shift(std::initializer_list<std::string> axes, std::size_t m) {
    std::vector<std::string> a(axes);
    return controlled_shift(std::span<const std::string>(a), m);
}

NamedTensor identity(const std::string& row, const std::string& col, std::size_t cardinality) {
    NamedTensor t({Axis{row, cardinality}, Axis{col, cardinality}});
    for (std::size_t v = 0; v < cardinality; ++v)
        t.at({v, v}) = Complex{1.0, 0.0};
    return t;
}

NamedTensor point(const std::string& axis, std::size_t cardinality, std::size_t value) {
    if (value >= cardinality)
        throw qmf_error("point value out of range");
    NamedTensor t({Axis{axis, cardinality}});
    t.at({value}) = Complex{1.0, 0.0};
    return t;
}

} // namespace qmf::gates

namespace qmf {

NamedTensor renamed_positional(const NamedTensor& t, std::span<const std::string> names) {
    if (names.size() != t.rank())
        throw qmf_error("positional rename must cover every axis");
    std::vector<std::pair<std::string, std::string>> mapping;
    for (std::size_t i = 0; i < names.size(); ++i)
        mapping.emplace_back(t.axes()[i].name, names[i]);
    return t.renamed(mapping);
}

NamedTensor renamed_positional(const NamedTensor& t, std::initializer_list<std::string> names) {
    std::vector<std::string> n(names);
    return renamed_positional(t, std::span<const std::string>(n));
}

linalg::Matrix complete_unitary_from_columns(const linalg::Matrix& fixed, std::uint64_t seed) {
    const std::size_t n = fixed.rows;
    const std::size_t k = fixed.cols;
    if (k > n)
        throw qmf_error("more fixed columns than dimensions");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<std::vector<Complex>> basis;
    auto push_orthonormalized = [&](std::vector<Complex> v, bool required) {
        for (const auto& b : basis) {
            Complex overlap{0.0, 0.0};
            for (std::size_t i = 0; i < n; ++i)
                overlap += std::conj(b[i]) * v[i];
            for (std::size_t i = 0; i < n; ++i)
                v[i] -= overlap * b[i];
        }
        double norm = 0.0;
        for (const auto& x : v)
            norm += std::norm(x);
        norm = std::sqrt(norm);
        if (norm < 1e-8) {
            if (required)
                throw qmf_error("fixed columns are not linearly independent");
            return false;
        }
        for (auto& x : v)
            x /= norm;
        basis.push_back(std::move(v));
        return true;
    };

    for (std::size_t j = 0; j < k; ++j) {
        std::vector<Complex> col(n);
        for (std::size_t i = 0; i < n; ++i)
            col[i] = fixed(i, j);
        push_orthonormalized(std::move(col), true);
    }
    while (basis.size() < n) {
        std::vector<Complex> col(n);
        for (auto& x : col)
            x = Complex{gauss(rng), gauss(rng)};
        push_orthonormalized(std::move(col), false);
    }

    linalg::Matrix out(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i)
            out(i, j) = basis[j][i];
    return out;
}

linalg::Matrix random_unitary(std::size_t n, std::uint64_t seed) {
    return complete_unitary_from_columns(linalg::Matrix(n, 0), seed);
}

namespace {

NamedTensor from_matrix(const linalg::Matrix& m, const std::string& row, const std::string& col) {
    NamedTensor t({Axis{row, m.rows}, Axis{col, m.cols}});
    t.data() = m.a;
    return t;
}

NamedTensor pmf_diagonal(const Pmf& p, const std::string& a, const std::string& b) {
    if (p.axes().size() != 1)
        throw qmf_error("expected a single-axis mass function");
    const std::size_t card = p.axes()[0].cardinality;
    NamedTensor t({Axis{a, card}, Axis{b, card}});
    for (std::size_t v = 0; v < card; ++v)
        t.at({v, v}) = Complex{p.at({v}), 0.0};
    return t;
}

void require_unitary(const NamedTensor& t, const std::string& what) {
    if (t.rank() != 2 || !is_unitary(t, 1e-12))
        throw qmf_error(what + " is not unitary");
}

} // namespace

FactorGraph elementary_system(const Pmf& p0, const NamedTensor& u0, const NamedTensor& u1,
                              const NamedTensor& b) {
    require_unitary(u0, "u0");
    require_unitary(u1, "u1");
    require_unitary(b, "b");
    const std::size_t m = p0.axes().at(0).cardinality;
    for (const auto& t : {&u0, &u1, &b})
        if ((*t).axes()[0].cardinality != m)
            throw qmf_error("dimension mismatch between p0 and the unitaries");

    FactorGraph half;
    for (const auto& v : {"X0", "X1", "X2", "X3", "X3c", "X4"})
        half.declare(v, m);
    half.add_factor("u0", renamed_positional(u0, {"X1", "X0"}), 0);
    half.add_factor("u1", renamed_positional(u1, {"X2", "X1"}), 1);
    // Analysis side of the measurement: B^H applied to X2.
    NamedTensor bh({Axis{"X3", m}, Axis{"X2", m}});
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < m; ++c)
            bh.at({r, c}) = std::conj(b.flat(c * m + r));
    half.add_factor("bh", std::move(bh), 2);
    half.add_factor("bk", renamed_positional(b, {"X4", "X3c"}), 2);

    FactorGraph g = mirror_complete(half);
    g.add_factor("p0", pmf_diagonal(p0, "X0", "X0'"), 0);
    g.add_factor("meas.X3", gates::f_eq({"X3", "X3c", "X3'", "X3c'"}, m), 2);
    g.note_measured(MirrorPair{"X3", "X3'"});
    g.terminate(MirrorPair{"X4", "X4'"}, 3);

    g.add_box(Box{"initial_density", {"p0", "u0", "u0'"}, {"X1", "X1'"}});
    {
        std::vector<std::string> all;
        for (const auto& f : g.factors())
            if (f.id != "term.X4")
                all.push_back(f.id);
        g.add_box(Box{"post_measurement", std::move(all), {"X4", "X4'"}});
    }
    return g;
}

FactorGraph two_measurement_system(const TwoMeasurementSpec& spec) {
    const std::size_t m1 = spec.m1, m2 = spec.m2;
    const std::size_t m = m1 * m2;
    if (spec.p0.axes().at(0).cardinality != m)
        throw qmf_error("p0 must range over the joint alphabet");
    auto check_joint = [&](const NamedTensor& t, std::span<const std::size_t> rows,
                           std::span<const std::size_t> cols, const std::string& what) {
        std::vector<std::string> r, c;
        for (auto i : rows)
            r.push_back(t.axes().at(i).name);
        for (auto i : cols)
            c.push_back(t.axes().at(i).name);
        if (!linalg::is_unitary(linalg::to_matrix(t, r, c), 1e-12))
            throw qmf_error(what + " is not unitary");
    };
    const std::size_t r0[] = {0}, r01[] = {0, 1}, c2[] = {2}, c12[] = {1, 2}, c23[] = {2, 3};
    check_joint(spec.u0, r01, c2, "u0");
    check_joint(spec.u1, r01, c23, "u1");
    check_joint(spec.u2, r0, c12, "u2");
    require_unitary(spec.b1, "b1");
    require_unitary(spec.b2, "b2");

    FactorGraph half;
    half.declare("X0", m);
    half.declare("A1", m1);
    half.declare("A2", m2);
    half.declare("Y1", m2);
    half.declare("Y1c", m2);
    half.declare("A2m", m2);
    half.declare("C1", m1);
    half.declare("C2", m2);
    half.declare("Y2", m2);
    half.declare("Y2c", m2);
    half.declare("C2m", m2);
    half.declare("Z", m);

    half.add_factor("u0", renamed_positional(spec.u0, {"A1", "A2", "X0"}), 0);
    NamedTensor b1h({Axis{"Y1", m2}, Axis{"A2", m2}});
    for (std::size_t r = 0; r < m2; ++r)
        for (std::size_t c = 0; c < m2; ++c)
            b1h.at({r, c}) = std::conj(spec.b1.flat(c * m2 + r));
    half.add_factor("b1h", std::move(b1h), 1);
    half.add_factor("b1k", renamed_positional(spec.b1, {"A2m", "Y1c"}), 1);
    half.add_factor("u1", renamed_positional(spec.u1, {"C1", "C2", "A1", "A2m"}), 2);
    NamedTensor b2h({Axis{"Y2", m2}, Axis{"C2", m2}});
    for (std::size_t r = 0; r < m2; ++r)
        for (std::size_t c = 0; c < m2; ++c)
            b2h.at({r, c}) = std::conj(spec.b2.flat(c * m2 + r));
    half.add_factor("b2h", std::move(b2h), 3);
    half.add_factor("b2k", renamed_positional(spec.b2, {"C2m", "Y2c"}), 3);
    half.add_factor("u2", renamed_positional(spec.u2, {"Z", "C1", "C2m"}), 4);

    FactorGraph g = mirror_complete(half);
    g.add_factor("p0", pmf_diagonal(spec.p0, "X0", "X0'"), 0);
    g.add_factor("meas.Y1", gates::f_eq({"Y1", "Y1c", "Y1'", "Y1c'"}, m2), 1);
    g.note_measured(MirrorPair{"Y1", "Y1'"});
    g.add_factor("meas.Y2", gates::f_eq({"Y2", "Y2c", "Y2'", "Y2c'"}, m2), 3);
    g.note_measured(MirrorPair{"Y2", "Y2'"});
    g.terminate(MirrorPair{"Z", "Z'"}, 5);

    g.add_box(Box{"unknown_future",
                  {"u1", "u1'", "b2h", "b2h'", "meas.Y2", "b2k", "b2k'", "u2", "u2'", "term.Z"},
                  {"A1", "A2m", "A1'", "A2m'"}});
    return g;
}

FactorGraph classicable_example(const Pmf& p0, const NamedTensor& u1, const NamedTensor& u2) {
    require_unitary(u1, "u1");
    require_unitary(u2, "u2");
    for (const auto* t : {&u1, &u2})
        for (const auto& v : t->data())
            if (std::abs(v) >= 1.0)
                throw qmf_error("transition matrices must have all entries of magnitude "
                                "strictly below 1");
    const std::size_t m = p0.axes().at(0).cardinality;

    FactorGraph half;
    for (const auto& v : {"X0", "X1", "X2"})
        half.declare(v, m);
    half.add_factor("u1", renamed_positional(u1, {"X1", "X0"}), 1);
    half.add_factor("u2", renamed_positional(u2, {"X2", "X1"}), 2);

    FactorGraph g = mirror_complete(half);
    g.add_factor("p0", pmf_diagonal(p0, "X0", "X0'"), 0);
    g.terminate(MirrorPair{"X2", "X2'"}, 3);
    return g;
}

namespace {

// Preparation shared by the full model and every agent view: R controls
// swapping the superposed X into S.
FactorGraph fr_prep_half(const NamedTensor& u) {
    FactorGraph half;
    for (const auto& v : {"St", "X0", "Xt", "R0", "Rt", "S", "X", "R"})
        half.declare(v, 2);
    half.add_factor("init.S", gates::point("St", 2, 0), 0);
    half.add_factor("init.X", gates::point("X0", 2, 0), 0);
    half.add_factor("had.X", gates::hadamard("Xt", "X0"), 0);
    half.add_factor("init.R", gates::point("R0", 2, 0), 0);
    half.add_factor("coin", renamed_positional(u, {"Rt", "R0"}), 0);
    half.add_factor("swap", gates::fredkin({"S", "X", "R", "St", "Xt", "Rt"}), 1);
    return half;
}

// Joint measurement of (R, X) in the basis given by b's rows over the
// paired index r * 2 + x.
NamedTensor fr_b_factor(const NamedTensor& b) {
    NamedTensor t({Axis{"Y1", 4}, Axis{"R", 2}, Axis{"X", 2}});
    for (std::size_t y = 0; y < 4; ++y)
        for (std::size_t r = 0; r < 2; ++r)
            for (std::size_t x = 0; x < 2; ++x)
                t.at({y, r, x}) = b.flat(y * 4 + (r * 2 + x));
    return t;
}

} // namespace

FrModel fr_model(std::uint64_t completion_seed) {
    FrModel m;
    {
        linalg::Matrix col(2, 1);
        col(0, 0) = Complex{std::sqrt(1.0 / 3.0), 0.0};
        col(1, 0) = Complex{std::sqrt(2.0 / 3.0), 0.0};
        m.u = from_matrix(complete_unitary_from_columns(col, completion_seed), "r", "c");
        m.u.at({0, 0}) = col(0, 0); // pinned exactly
        m.u.at({1, 0}) = col(1, 0);
    }
    {
        // First row fixed: complete the adjoint from its first column.
        linalg::Matrix col(4, 1);
        col(0, 0) = Complex{0.5, 0.0};
        col(1, 0) = Complex{0.5, 0.0};
        col(2, 0) = Complex{-std::sqrt(0.5), 0.0};
        col(3, 0) = Complex{0.0, 0.0};
        linalg::Matrix bh = complete_unitary_from_columns(col, completion_seed + 1);
        m.b = from_matrix(linalg::adjoint(bh), "r", "c");
        for (std::size_t j = 0; j < 4; ++j)
            m.b.at({0, j}) = std::conj(col(j, 0)); // exact first row
    }

    { // Full model: both undone measurements absent, final measurements present.
        FactorGraph half = fr_prep_half(m.u);
        half.declare("Y1", 4);
        half.declare("Y2", 2);
        half.add_factor("basis", fr_b_factor(m.b), 2);
        half.add_factor("had.S", gates::hadamard("Y2", "S"), 2);
        m.full = mirror_complete(half);
        m.full.measure(MirrorPair{"Y1", "Y1'"}, 3);
        m.full.measure(MirrorPair{"Y2", "Y2'"}, 3);
    }
    { // Agent F: R and S measured directly, X terminated.
        m.agent_f = mirror_complete(fr_prep_half(m.u));
        m.agent_f.measure(MirrorPair{"R", "R'"}, 2);
        m.agent_f.terminate(MirrorPair{"X", "X'"}, 2);
        m.agent_f.measure(MirrorPair{"S", "S'"}, 2);
    }
    { // Agent Wbar: joint (R, X) measurement, S terminated.
        FactorGraph half = fr_prep_half(m.u);
        half.declare("Y1", 4);
        half.add_factor("basis", fr_b_factor(m.b), 2);
        m.agent_wbar = mirror_complete(half);
        m.agent_wbar.measure(MirrorPair{"Y1", "Y1'"}, 3);
        m.agent_wbar.terminate(MirrorPair{"S", "S'"}, 3);
    }
    { // Agent W: R measured, S measured through the Hadamard.
        FactorGraph half = fr_prep_half(m.u);
        half.declare("Y2", 2);
        half.add_factor("had.S", gates::hadamard("Y2", "S"), 2);
        m.agent_w = mirror_complete(half);
        m.agent_w.measure(MirrorPair{"R", "R'"}, 2);
        m.agent_w.terminate(MirrorPair{"X", "X'"}, 2);
        m.agent_w.measure(MirrorPair{"Y2", "Y2'"}, 3);
    }
    return m;
}

NamedTensor fr_psi_s_y1(const FrModel& m) {
    FactorGraph half = fr_prep_half(m.u);
    half.declare("Y1", 4);
    half.add_factor("basis", fr_b_factor(m.b), 2);
    return half.exterior({"S", "Y1"});
}

FactorGraph fr_table1_graph(const FrModel& m) {
    FactorGraph g;
    for (const auto& v : {"St", "Xt", "Rt", "S", "X", "R"})
        g.declare(v, 2);
    g.add_factor("init.S", gates::point("St", 2, 0), 0);
    NamedTensor hcol({Axis{"Xt", 2}});
    hcol.at({0}) = hcol.at({1}) = Complex{1.0 / std::sqrt(2.0), 0.0};
    g.add_factor("had.X", std::move(hcol), 0);
    NamedTensor ucol({Axis{"Rt", 2}});
    ucol.at({0}) = m.u.at({0, 0});
    ucol.at({1}) = m.u.at({1, 0});
    g.add_factor("coin", std::move(ucol), 0);
    g.add_factor("swap", gates::fredkin({"S", "X", "R", "St", "Xt", "Rt"}), 1);
    NamedTensor brow({Axis{"R", 2}, Axis{"X", 2}});
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t x = 0; x < 2; ++x)
            brow.at({r, x}) = m.b.at({0, r * 2 + x});
    g.add_factor("basis.row0", std::move(brow), 2);
    return g;
}

FactorGraph fr_table2_graph(const FrModel& m) {
    FactorGraph g = fr_table1_graph(m);
    NamedTensor hrow({Axis{"S", 2}});
    hrow.at({0}) = Complex{1.0 / std::sqrt(2.0), 0.0};
    hrow.at({1}) = Complex{-1.0 / std::sqrt(2.0), 0.0};
    g.add_factor("had.S.row1", std::move(hrow), 3);
    return g;
}

namespace {

// Support check on a two-pair marginal: whenever the first pair sits on
// the diagonal at `a`, the second must sit on the diagonal at `c`.
FrImplicationReport check_implication(const Sqmf& q, const std::string& antecedent,
                                      std::size_t a, const std::string& consequent,
                                      std::size_t c, std::string description,
                                      std::string view) {
    Sqmf marg = marginalize(q, {antecedent, consequent});
    ConfigTable table = valid_configurations(marg);
    const auto pos = [&](const std::string& name) {
        auto it = std::find(table.variables.begin(), table.variables.end(), name);
        return static_cast<std::size_t>(it - table.variables.begin());
    };
    const std::size_t pa = pos(antecedent), pap = pos(primed(antecedent));
    const std::size_t pc = pos(consequent), pcp = pos(primed(consequent));

    FrImplicationReport r;
    r.description = std::move(description);
    r.view = std::move(view);
    r.holds = true;
    for (const auto& row : table.rows) {
        if (row.assignment[pa] != a || row.assignment[pap] != a)
            continue;
        ++r.antecedent_rows;
        if (row.assignment[pc] != c || row.assignment[pcp] != c)
            r.holds = false;
    }
    if (r.antecedent_rows == 0)
        r.holds = false; // vacuous antecedent would prove nothing
    return r;
}

} // namespace

FrReport fr_implications(const FrModel& m) {
    FrReport report;

    report.table1 = graph_configurations(fr_table1_graph(m));
    const FactorGraph table2 = fr_table2_graph(m);
    report.table2 = graph_configurations(table2);
    report.table2_sum = table2.exterior({}).flat(0);

    const NamedTensor psi = fr_psi_s_y1(m);
    report.psi00_magnitude = std::abs(psi.at({0, 0}));

    Sqmf view_f = sqmf_from_graph_or_throw(m.agent_f, {"R", "S", "X"});
    report.agent_f = check_implication(view_f, "S", 1, "R", 1, "Sb = 1 implies Rb = 1", "agent F");
    report.pr_rb1 = measurement_pmf(view_f, {"R"}).at({1});

    Sqmf view_wbar = sqmf_from_graph_or_throw(m.agent_wbar, {"Y1", "S"});
    report.agent_wbar = check_implication(view_wbar, "Y1", 0, "S", 1,
                                          "Y1b = 0 implies S = S' = 1", "agent Wbar");

    Sqmf view_w = sqmf_from_graph_or_throw(m.agent_w, {"R", "X", "Y2"});
    report.agent_w =
        check_implication(view_w, "R", 1, "Y2", 0, "Rb = 1 implies Y2b = 0", "agent W");

    Sqmf four = sqmf_from_graph_or_throw(m.full, {"R", "S", "Y1", "Y2"});
    std::vector<std::string> names{"R", "S", "Y1", "Y2"};
    report.witness = off_diagonal_witness(four, names);
    report.four_pairs_jointly_classicable = is_jointly_classicable(four, names);

    Sqmf stop = sqmf_from_graph_or_throw(m.full, {"Y1", "Y2"});
    report.pr_stop = measurement_pmf(stop, {"Y1", "Y2"}).at({0, 1});
    return report;
}

} // namespace qmf
