#include "qmf/graph.hpp"
#include "qmf/measure.hpp"
#include "qmf/models.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <random>

using namespace qmf;

TEST_SUITE_BEGIN("graph");

TEST_CASE("closing the upper mirror box of two identity factors gives a delta") {
    // g1(y1, x) g2(y2, x) with g1 = g2 = I, summed over x.
    FactorGraph g;
    g.declare("Y1", 3);
    g.declare("Y2", 3);
    g.declare("Xs", 3);
    g.add_factor("g1", gates::identity("Y1", "Xs", 3));
    g.add_factor("g2", gates::identity("Y2", "Xs", 3));
    g.add_box(Box{"upper", {"g1", "g2"}, {"Y1", "Y2"}});
    NamedTensor e = g.close_box("upper");
    CHECK(max_abs_diff(e, gates::identity("Y1", "Y2", 3)) <= 1e-12);
}

TEST_CASE("measurement tail after the result reduces to a neutral factor") {
    // = branch into B, B^H and a termination; exterior over the result wire
    // is identically one.
    std::mt19937_64 rng(9);
    const std::size_t m = 3;
    NamedTensor b = oracles::random_unitary_tensor(m, "r", "c", rng);

    FactorGraph g;
    for (const auto* v : {"Y", "Yk", "Yb"})
        g.declare(v, m);
    g.declare_pair("X4", m);
    g.add_factor("eq", gates::f_eq({"Y", "Yk", "Yb"}, m));
    g.add_factor("bk", renamed_positional(b, {"X4", "Yk"}));
    NamedTensor bh({Axis{"X4'", m}, Axis{"Yb", m}});
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < m; ++c)
            bh.at({r, c}) = std::conj(b.flat(r * m + c));
    g.add_factor("bh", std::move(bh));
    g.add_factor("term", gates::f_eq({"X4", "X4'"}, m));
    g.add_box(Box{"tail", {"eq", "bk", "bh", "term"}, {"Y"}});

    NamedTensor e = g.close_box("tail");
    for (std::size_t y = 0; y < m; ++y)
        CHECK(std::abs(e.at({y}) - Complex{1.0, 0.0}) <= 1e-12);
}

TEST_CASE("unknown second result reduces its box to an identity matrix") {
    std::mt19937_64 rng(10);
    const std::size_t m1 = 2, m2 = 2, m = m1 * m2;
    TwoMeasurementSpec spec{
        oracles::random_pmf("X0", m, rng),
        m1,
        m2,
        NamedTensor({Axis{"A1", m1}, Axis{"A2", m2}, Axis{"X0", m}},
                    oracles::random_unitary_tensor(m, "r", "c", rng).data()),
        NamedTensor({Axis{"C1", m1}, Axis{"C2", m2}, Axis{"A1", m1}, Axis{"A2", m2}},
                    oracles::random_unitary_tensor(m, "r", "c", rng).data()),
        NamedTensor({Axis{"Z", m}, Axis{"C1", m1}, Axis{"C2", m2}},
                    oracles::random_unitary_tensor(m, "r", "c", rng).data()),
        oracles::random_unitary_tensor(m2, "r", "c", rng),
        oracles::random_unitary_tensor(m2, "r", "c", rng),
    };

    FactorGraph g = two_measurement_system(spec);
    NamedTensor e = g.close_box("unknown_future");
    // Exterior over (A1, A2m, A1', A2m') is the double identity.
    NamedTensor expect({Axis{"A1", m1}, Axis{"A2m", m2}, Axis{"A1'", m1}, Axis{"A2m'", m2}});
    for (std::size_t a = 0; a < m1; ++a)
        for (std::size_t b = 0; b < m2; ++b)
            for (std::size_t ap = 0; ap < m1; ++ap)
                for (std::size_t bp = 0; bp < m2; ++bp)
                    expect.at({a, b, ap, bp}) =
                        (a == ap && b == bp) ? Complex{1, 0} : Complex{0, 0};
    CHECK(max_abs_diff(e.transposed(std::vector<std::string>{"A1", "A2m", "A1'", "A2m'"}),
                       expect) <= 1e-12);
}

TEST_CASE("box closure does not change the enclosing exterior function") {
    std::mt19937_64 rng(21);
    for (int round = 0; round < 10; ++round) {
        FactorGraph g;
        g.declare("a", 2);
        g.declare("b", 3);
        g.declare("c", 2);
        g.declare("d", 2);
        g.add_factor("f1", oracles::random_tensor({Axis{"a", 2}, Axis{"b", 3}}, rng));
        g.add_factor("f2", oracles::random_tensor({Axis{"b", 3}, Axis{"c", 2}}, rng));
        g.add_factor("f3", oracles::random_tensor({Axis{"c", 2}, Axis{"d", 2}}, rng));
        g.add_box(Box{"inner", {"f2", "f3"}, {"b", "d"}});

        NamedTensor whole = g.exterior({"a", "d"});

        FactorGraph replaced;
        replaced.declare("a", 2);
        replaced.declare("b", 3);
        replaced.declare("d", 2);
        replaced.add_factor("f1", g.factor("f1").tensor);
        replaced.add_factor("closed", g.close_box("inner"));
        CHECK(max_abs_diff(whole, replaced.exterior({"a", "d"})) <= 1e-12);
    }
}

TEST_CASE("mirror_complete conjugates onto primed variables") {
    std::mt19937_64 rng(33);
    FactorGraph half;
    half.declare("Y1", 2);
    half.declare("Xs", 3);
    NamedTensor g1 = oracles::random_tensor({Axis{"Y1", 2}, Axis{"Xs", 3}}, rng);
    half.add_factor("g1", g1);

    FactorGraph full = mirror_complete(half);
    CHECK(full.is_mirror_pair(MirrorPair{"Y1", "Y1'"}));
    CHECK(full.is_mirror_pair(MirrorPair{"Xs", "Xs'"}));
    const NamedTensor& mirrored = full.factor("g1'").tensor;
    REQUIRE(mirrored.axes()[0].name == "Y1'");
    REQUIRE(mirrored.axes()[1].name == "Xs'");
    for (std::size_t i = 0; i < g1.size(); ++i)
        CHECK(mirrored.flat(i) == std::conj(g1.flat(i)));

    // Real factors mirror into themselves.
    FactorGraph hhalf;
    hhalf.declare("r", 2);
    hhalf.declare("c", 2);
    hhalf.add_factor("h", gates::hadamard("r", "c"));
    FactorGraph hfull = mirror_complete(hhalf);
    CHECK(max_abs_diff(hfull.factor("h'").tensor,
                       gates::hadamard("r'", "c'")) == 0.0);
}

TEST_CASE("mirror_complete rejects graphs that already carry mirrors") {
    FactorGraph half;
    half.declare_pair("X", 2);
    CHECK_THROWS_AS((void)mirror_complete(half), qmf_error);
    // Primed names are reserved for the mirror construction.
    CHECK_THROWS_AS(half.declare("Z'", 2), qmf_error);
}

TEST_CASE("diagonal of a mirrored unitary graph is a probability") {
    std::mt19937_64 rng(55);
    for (int round = 0; round < 8; ++round) {
        FactorGraph half;
        half.declare("X0", 2);
        half.declare("X1", 2);
        half.declare("X2", 2);
        half.add_factor("u1", oracles::random_unitary_tensor(2, "X1", "X0", rng));
        half.add_factor("u2", oracles::random_unitary_tensor(2, "X2", "X1", rng));
        FactorGraph g = mirror_complete(half);
        Pmf p0 = oracles::random_pmf("z", 2, rng);
        NamedTensor init({Axis{"X0", 2}, Axis{"X0'", 2}});
        init.at({0, 0}) = Complex{p0.at({0}), 0};
        init.at({1, 1}) = Complex{p0.at({1}), 0};
        g.add_factor("p0", std::move(init));
        g.terminate(MirrorPair{"X2", "X2'"});

        NamedTensor q = g.exterior({"X1", "X1'"});
        for (std::size_t x = 0; x < 2; ++x) {
            CHECK(q.at({x, x}).imag() == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(q.at({x, x}).real() >= -1e-12);
        }
    }
}

TEST_CASE("terminate adds one identity factor and refuses to repeat") {
    FactorGraph g;
    g.declare_pair("X", 3);
    g.declare_pair("Y", 3);
    g.add_factor("wire", gates::identity("X", "Y", 3));
    g.add_factor("wire'", gates::identity("X'", "Y'", 3));
    g.terminate(MirrorPair{"Y", "Y'"});
    CHECK(g.has_factor("term.Y"));
    CHECK(max_abs_diff(g.factor("term.Y").tensor, gates::identity("Y", "Y'", 3)) == 0.0);
    CHECK_THROWS_AS(g.terminate(MirrorPair{"Y", "Y'"}), qmf_error);
    CHECK_THROWS_AS(g.terminate(MirrorPair{"X", "Y"}), qmf_error);
}

TEST_CASE("forney form is enforced and share() provides the escape hatch") {
    FactorGraph g;
    g.declare("v", 2);
    g.declare("w1", 2);
    g.declare("w2", 2);
    g.declare("w3", 2);
    g.add_factor("f1", gates::identity("v", "w1", 2));
    g.add_factor("f2", gates::identity("v", "w2", 2));
    CHECK_THROWS_AS(g.add_factor("f3", gates::identity("v", "w3", 2)), qmf_error);

    FactorGraph s;
    s.declare("v", 2);
    s.declare("w1", 2);
    s.declare("w2", 2);
    s.declare("w3", 2);
    auto copies = s.share("v", 3);
    REQUIRE(copies.size() == 3);
    s.add_factor("f1", gates::identity(copies[0], "w1", 2));
    s.add_factor("f2", gates::identity(copies[1], "w2", 2));
    s.add_factor("f3", gates::identity(copies[2], "w3", 2));
    // The shared variable behaves like one variable of degree three.
    NamedTensor e = s.exterior({"v", "w1", "w2", "w3"});
    for (std::size_t v = 0; v < 2; ++v)
        CHECK(e.at({v, v, v, v}) == Complex{1, 0});
    CHECK(e.at({0, 0, 0, 1}) == Complex{0, 0});
}

TEST_CASE("spectral decomposition graph rebuilds its matrix") {
    // u, lambda, u^H joined by a three-way equality.
    std::mt19937_64 rng(77);
    const std::size_t n = 3;
    NamedTensor u = oracles::random_unitary_tensor(n, "r", "c", rng);
    std::vector<double> lambda{0.2, 0.5, 0.3};

    FactorGraph g;
    for (const auto* v : {"row", "col", "k1", "k2", "k3"})
        g.declare(v, n);
    g.add_factor("u", renamed_positional(u, {"row", "k1"}));
    NamedTensor diag({Axis{"k3", n}});
    for (std::size_t i = 0; i < n; ++i)
        diag.at({i}) = Complex{lambda[i], 0.0};
    g.add_factor("lambda", std::move(diag));
    g.add_factor("eq", gates::f_eq({"k1", "k2", "k3"}, n));
    NamedTensor uh({Axis{"k2", n}, Axis{"col", n}});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            uh.at({i, j}) = std::conj(u.at({j, i}));
    g.add_factor("uh", std::move(uh));

    NamedTensor a = g.exterior({"row", "col"});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Complex expect{0, 0};
            for (std::size_t k = 0; k < n; ++k)
                expect += u.at({i, k}) * lambda[k] * std::conj(u.at({j, k}));
            CHECK(std::abs(a.at({i, j}) - expect) <= 1e-12);
        }
}

TEST_CASE("unknown boxes are rejected") {
    FactorGraph g;
    g.declare("x", 2);
    g.add_factor("f", gates::point("x", 2, 0));
    CHECK_THROWS_AS((void)g.close_box("nope"), qmf_error);
    CHECK_THROWS_AS(g.add_box(Box{"b", {"missing"}, {"x"}}), qmf_error);
}

TEST_CASE("instantiate rejects cardinality mismatches") {
    FactorGraph g;
    g.declare_pair("X", 3); // gadget below is binary
    g.declare_pair("M", 3);
    Gadget meas = projection_gadget(gates::hadamard("r", "c"));
    std::map<std::string, std::string> binding{
        {"X", "X"}, {"Xt", "M"}, {"X'", "X'"}, {"Xt'", "M'"}};
    CHECK_THROWS_AS(g.instantiate(meas, binding, "m"), qmf_error);
}

TEST_CASE("instantiate rejects reuse and dangling bindings") {
    FactorGraph g;
    g.declare_pair("X", 2);
    g.declare_pair("M", 2);
    Gadget copy = copy_gadget(2);
    std::map<std::string, std::string> binding{
        {"X", "X"}, {"Xt", "M"}, {"Xb", "B"}, {"X'", "X'"}, {"Xt'", "M'"}, {"Xb'", "B'"}};
    CHECK_THROWS_AS(g.instantiate(copy, binding, "c1"), qmf_error); // B undeclared
    g.declare_pair("B", 2);
    g.instantiate(copy, binding, "c1");
    CHECK(g.instantiations().count("c1") == 1);
    CHECK_THROWS_AS(g.instantiate(copy, binding, "c1"), qmf_error); // duplicate prefix

    std::map<std::string, std::string> partial{{"X", "X"}};
    CHECK_THROWS_AS(g.instantiate(copy, partial, "c2"), qmf_error); // dangling boundary

    // A binding that crosses mirror pairs is rejected.
    std::map<std::string, std::string> crossed{
        {"X", "X"}, {"Xt", "M"}, {"Xb", "B"}, {"X'", "M'"}, {"Xt'", "X'"}, {"Xb'", "B'"}};
    CHECK_THROWS_AS(g.instantiate(copy, crossed, "c3"), qmf_error);
}

TEST_SUITE_END();
