#include "qmf/classical.hpp"
#include "qmf/models.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <random>

using namespace qmf;

TEST_SUITE_BEGIN("classical");

namespace {

FactorGraph hadamard_chain(const Pmf& p0) {
    return classicable_example(p0, gates::hadamard("r", "c"), gates::hadamard("r", "c"));
}

Sqmf chain_sqmf(const Pmf& p0) {
    return sqmf_from_graph_or_throw(hadamard_chain(p0), {"X0", "X1", "X2"});
}

} // namespace

TEST_CASE("diagonal uniform function has one valid configuration per value") {
    NamedTensor q({Axis{"x", 2}, Axis{"x'", 2}});
    q.at({0, 0}) = q.at({1, 1}) = Complex{0.5, 0.0};
    std::vector<MirrorPair> pairs{{"x", "x'"}};
    Sqmf sq = certify_sqmf_or_throw(q, pairs);
    ConfigTable t = valid_configurations(sq);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0].assignment == std::vector<std::size_t>{0, 0});
    CHECK(t.rows[1].assignment == std::vector<std::size_t>{1, 1});
    CHECK(t.rows[0].value == Complex{0.5, 0.0});
    CHECK(is_classical(sq, "x"));
}

TEST_CASE("configuration values re-evaluate to the stored value") {
    const FrModel m = fr_model();
    FactorGraph g = fr_table2_graph(m);
    ConfigTable t = graph_configurations(g);
    for (const auto& row : t.rows) {
        Complex v{1.0, 0.0};
        for (const auto& f : g.factors()) {
            std::vector<std::size_t> idx;
            for (const auto& ax : f.tensor.axes()) {
                auto it = std::find(t.variables.begin(), t.variables.end(), ax.name);
                idx.push_back(row.assignment[static_cast<std::size_t>(
                    it - t.variables.begin())]);
            }
            v *= f.tensor.at(std::span<const std::size_t>(idx));
        }
        CHECK(std::abs(v - row.value) <= 1e-12);
    }
}

TEST_CASE("enumeration cap is enforced") {
    NamedTensor q({Axis{"x", 16}, Axis{"x'", 16}});
    CHECK_THROWS_AS((void)valid_configurations(q, 1e-9, 100), qmf_error);
}

TEST_CASE("ends of the chain are classical, the middle is not") {
    std::mt19937_64 rng(12);
    Sqmf q = chain_sqmf(oracles::random_pmf("X0", 2, rng));
    CHECK(is_classical(q, "X0"));
    CHECK(is_classical(q, "X2"));
    CHECK_FALSE(is_classical(q, "X1"));
    // Classicality survives marginals that keep the variable.
    CHECK(is_classical(marginalize(q, {"X0", "X1"}), "X0"));
    CHECK(is_classical(marginalize(q, {"X2"}), "X2"));
}

TEST_CASE("the middle variable is classicable even though it is not classical") {
    std::mt19937_64 rng(13);
    Sqmf q = chain_sqmf(oracles::random_pmf("X0", 2, rng));
    CHECK(is_classicable(q, "X1"));
    CHECK(is_jointly_classicable(q, {"X0", "X1"}));
}

TEST_CASE("X1 with X2 is jointly classicable exactly for the uniform mixture") {
    Sqmf uniform = chain_sqmf(Pmf::uniform("X0", 2));
    CHECK(is_jointly_classicable(uniform, {"X1", "X2"}));

    Sqmf skewed = chain_sqmf(Pmf({Axis{"X0", 2}}, {0.7, 0.3}));
    CHECK_FALSE(is_jointly_classicable(skewed, {"X1", "X2"}));
    std::vector<std::string> pair{"X1", "X2"};
    OffDiagonalWitness w = off_diagonal_witness(skewed, pair);
    CHECK(w.magnitude > 1e-3);
}

TEST_CASE("all three chain variables together are never jointly classicable") {
    std::mt19937_64 rng(14);
    Sqmf q = chain_sqmf(oracles::random_pmf("X0", 2, rng));
    CHECK_FALSE(is_jointly_classicable(q, {"X0", "X1", "X2"}));
}

TEST_CASE("classical variables are jointly classicable together") {
    std::mt19937_64 rng(15);
    for (int round = 0; round < 10; ++round) {
        Sqmf q = chain_sqmf(oracles::random_pmf("X0", 2, rng));
        std::vector<std::string> classicals;
        for (const auto& name : q.unprimed_axes())
            if (is_classical(q, name))
                classicals.push_back(name);
        REQUIRE(!classicals.empty());
        CHECK(is_jointly_classicable(q, classicals));
    }
}

TEST_CASE("jointly classicable variables are classical with their marginal") {
    std::mt19937_64 rng(16);
    Sqmf q = chain_sqmf(oracles::random_pmf("X0", 2, rng));
    std::vector<std::string> pair{"X0", "X1"};
    REQUIRE(is_jointly_classicable(q, pair));
    Sqmf marg = marginalize(q, pair);
    CHECK(is_classical(marg, "X0"));
    CHECK(is_classical(marg, "X1"));
}

TEST_CASE("joint classicability survives refinement") {
    // Append one more unitary stage and marginalize it away again: the
    // refined function must keep {X0, X1} jointly classicable.
    std::mt19937_64 rng(17);
    for (int round = 0; round < 5; ++round) {
        Pmf p0 = oracles::random_pmf("X0", 2, rng);
        NamedTensor u1 = gates::hadamard("r", "c");
        NamedTensor u2 = oracles::random_unitary_tensor(2, "r", "c", rng);

        FactorGraph half;
        for (const auto* v : {"X0", "X1", "X2", "X3"})
            half.declare(v, 2);
        half.add_factor("u1", renamed_positional(u1, {"X1", "X0"}));
        half.add_factor("u2", renamed_positional(u2, {"X2", "X1"}));
        half.add_factor("u3", oracles::random_unitary_tensor(2, "X3", "X2", rng));
        FactorGraph g = mirror_complete(half);
        NamedTensor init({Axis{"X0", 2}, Axis{"X0'", 2}});
        init.at({0, 0}) = Complex{p0.at({0}), 0};
        init.at({1, 1}) = Complex{p0.at({1}), 0};
        g.add_factor("p0", std::move(init));
        g.terminate(MirrorPair{"X3", "X3'"});

        Sqmf refined = sqmf_from_graph_or_throw(g, {"X0", "X1", "X2"});
        Sqmf coarse = marginalize(refined, {"X0", "X1"});
        CHECK(is_jointly_classicable(refined, {"X0", "X1"}));
        CHECK(is_jointly_classicable(coarse, {"X0", "X1"}));
    }
}

TEST_CASE("report lists per-pair flags and maximal jointly classicable subsets") {
    Sqmf q = chain_sqmf(Pmf::uniform("X0", 2));
    ClassicalityReport r = classicality_report(q);
    REQUIRE(r.pairs.size() == 3);
    for (const auto& p : r.pairs) {
        if (p.pair == "X1") {
            CHECK_FALSE(p.classical);
            CHECK(p.classicable);
        } else {
            CHECK(p.classical);
            CHECK(p.classicable);
        }
    }
    // Uniform mixture: {X0, X1} and {X1, X2} and {X0, X2} all pass, the
    // triple does not.
    bool found_triple = false;
    for (const auto& s : r.maximal_jointly_classicable)
        found_triple |= s.size() == 3;
    CHECK_FALSE(found_triple);
    CHECK(r.maximal_jointly_classicable.size() == 3);
}

TEST_CASE("fully diagonal functions report everything classicable") {
    std::mt19937_64 rng(18);
    std::vector<MirrorPair> pairs{{"a", "a'"}, {"b", "b'"}};
    NamedTensor q({Axis{"a", 2}, Axis{"a'", 2}, Axis{"b", 2}, Axis{"b'", 2}});
    Pmf joint = oracles::random_pmf("j", 4, rng);
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b)
            q.at({a, a, b, b}) = Complex{joint.at({a * 2 + b}), 0.0};
    ClassicalityReport r = classicality_report(certify_sqmf_or_throw(q, pairs));
    REQUIRE(r.maximal_jointly_classicable.size() == 1);
    CHECK(r.maximal_jointly_classicable[0].size() == 2);
}

TEST_CASE("the four nested-agents pairs are not jointly classicable") {
    const FrModel m = fr_model();
    Sqmf four = sqmf_from_graph_or_throw(m.full, {"R", "S", "Y1", "Y2"});
    CHECK_FALSE(is_jointly_classicable(four, {"R", "S", "Y1", "Y2"}));
    std::vector<std::string> names{"R", "S", "Y1", "Y2"};
    CHECK(off_diagonal_witness(four, names).magnitude > 1e-3);

    // Each pair is classicable on its own; the report finds no subset of
    // size four.
    ClassicalityReport r = classicality_report(four);
    for (const auto& p : r.pairs)
        CHECK(p.classicable);
    for (const auto& subset : r.maximal_jointly_classicable)
        CHECK(subset.size() < 4);
}

TEST_SUITE_END();
