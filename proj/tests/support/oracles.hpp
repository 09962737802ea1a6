// Independent reference computations for the test suites. Everything here
// avoids the library's contraction machinery so it can serve as an oracle
// for it.
#pragma once

#include "qmf/linalg.hpp"
#include "qmf/qmf.hpp"
#include "qmf/tensor.hpp"

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracles {

using qmf::Axis;
using qmf::Complex;
using qmf::NamedTensor;

// Brute-force exterior function: loop over every joint assignment of every
// axis, multiply all factors, accumulate into the kept cells.
inline NamedTensor naive_contract(std::span<const NamedTensor> factors,
                                  std::span<const std::string> keep) {
    std::map<std::string, std::size_t> cards;
    for (const auto& f : factors)
        for (const auto& ax : f.axes())
            cards.emplace(ax.name, ax.cardinality);

    std::vector<std::string> all_names;
    for (const auto& [name, _] : cards)
        all_names.push_back(name);

    std::vector<Axis> keep_axes;
    for (const auto& k : keep)
        keep_axes.push_back(Axis{k, cards.at(k)});
    NamedTensor out(keep_axes);

    std::vector<std::size_t> assign(all_names.size(), 0);
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < all_names.size(); ++i)
        pos[all_names[i]] = i;

    for (;;) {
        Complex v{1.0, 0.0};
        for (const auto& f : factors) {
            std::vector<std::size_t> idx;
            for (const auto& ax : f.axes())
                idx.push_back(assign[pos.at(ax.name)]);
            v *= f.at(std::span<const std::size_t>(idx));
        }
        std::vector<std::size_t> kidx;
        for (const auto& k : keep)
            kidx.push_back(assign[pos.at(k)]);
        out.at(std::span<const std::size_t>(kidx)) += v;

        std::size_t i = all_names.size();
        for (; i-- > 0;) {
            if (++assign[i] < cards.at(all_names[i]))
                break;
            assign[i] = 0;
        }
        if (i == static_cast<std::size_t>(-1))
            break;
    }
    return out;
}

inline NamedTensor naive_contract(std::span<const NamedTensor> factors,
                                  std::initializer_list<std::string> keep) {
    std::vector<std::string> k(keep);
    return naive_contract(factors, std::span<const std::string>(k));
}

// p(y) = sum_x0 |B(., y)^H U1 U0(., x0)|^2 p(x0), evaluated directly.
inline std::vector<double> born_rule(const qmf::Pmf& p0, const NamedTensor& u0,
                                     const NamedTensor& u1, const NamedTensor& b) {
    const std::size_t m = p0.axes().at(0).cardinality;
    std::vector<double> p(m, 0.0);
    for (std::size_t x0 = 0; x0 < m; ++x0) {
        std::vector<Complex> v0(m), v1(m, Complex{0.0, 0.0});
        for (std::size_t i = 0; i < m; ++i)
            v0[i] = u0.flat(i * m + x0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                v1[i] += u1.flat(i * m + j) * v0[j];
        for (std::size_t y = 0; y < m; ++y) {
            Complex amp{0.0, 0.0};
            for (std::size_t i = 0; i < m; ++i)
                amp += std::conj(b.flat(i * m + y)) * v1[i];
            p[y] += std::norm(amp) * p0.at({x0});
        }
    }
    return p;
}

// kappa by the literal double sum over probe indices.
inline Complex kappa_double_sum(const qmf::Pmf& p_xi, const NamedTensor& u_z,
                                const NamedTensor& u_zp) {
    const std::size_t k = u_z.axes()[0].cardinality;
    Complex acc{0.0, 0.0};
    for (std::size_t xi = 0; xi < k; ++xi)
        for (std::size_t t = 0; t < k; ++t)
            acc += p_xi.at({xi}) * std::conj(u_zp.flat(t * k + xi)) * u_z.flat(t * k + xi);
    return acc;
}

// Deterministic pseudorandom ingredients.

inline Complex random_complex(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    return Complex{g(rng), g(rng)};
}

inline NamedTensor random_tensor(std::vector<Axis> axes, std::mt19937_64& rng) {
    NamedTensor t(std::move(axes));
    for (std::size_t i = 0; i < t.size(); ++i)
        t.flat(i) = random_complex(rng);
    return t;
}

inline NamedTensor random_unitary_tensor(std::size_t n, const std::string& row,
                                         const std::string& col, std::mt19937_64& rng) {
    // Gram-Schmidt on a random complex matrix.
    std::vector<std::vector<Complex>> cols;
    while (cols.size() < n) {
        std::vector<Complex> v(n);
        for (auto& x : v)
            x = random_complex(rng);
        for (const auto& b : cols) {
            Complex overlap{0.0, 0.0};
            for (std::size_t i = 0; i < n; ++i)
                overlap += std::conj(b[i]) * v[i];
            for (std::size_t i = 0; i < n; ++i)
                v[i] -= overlap * b[i];
        }
        double norm = 0.0;
        for (const auto& x : v)
            norm += std::norm(x);
        if (norm < 1e-12)
            continue;
        norm = std::sqrt(norm);
        for (auto& x : v)
            x /= norm;
        cols.push_back(std::move(v));
    }
    NamedTensor t({Axis{row, n}, Axis{col, n}});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            t.at({i, j}) = cols[j][i];
    return t;
}

inline qmf::Pmf random_pmf(const std::string& axis, std::size_t n, std::mt19937_64& rng,
                           double floor = 0.05) {
    std::uniform_real_distribution<double> u(floor, 1.0);
    std::vector<double> p(n);
    double sum = 0.0;
    for (auto& x : p)
        sum += (x = u(rng));
    for (auto& x : p)
        x /= sum;
    // Nudge the largest entry so the values sum to one exactly enough.
    double drift = 1.0;
    for (std::size_t i = 1; i < n; ++i)
        drift -= p[i];
    p[0] = drift;
    return qmf::Pmf({Axis{axis, n}}, std::move(p));
}

// Random mixtures of rank-1 kernels over the given pair structure,
// normalized to total 1: the generic way to produce a certified mass
// function without touching the certification code.
inline NamedTensor random_sqmf_tensor(std::span<const qmf::MirrorPair> pairs,
                                      std::span<const std::size_t> cards, std::size_t terms,
                                      std::mt19937_64& rng) {
    std::vector<Axis> axes;
    std::size_t dim = 1;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        axes.push_back(Axis{pairs[i].unprimed, cards[i]});
        axes.push_back(Axis{pairs[i].primed, cards[i]});
        dim *= cards[i];
    }

    for (;;) {
        std::uniform_real_distribution<double> w(0.1, 1.0);
        std::vector<std::vector<Complex>> fs(terms, std::vector<Complex>(dim));
        std::vector<double> weights(terms);
        for (std::size_t t = 0; t < terms; ++t) {
            weights[t] = w(rng);
            for (auto& x : fs[t])
                x = random_complex(rng);
        }
        Complex total{0.0, 0.0};
        for (std::size_t t = 0; t < terms; ++t) {
            Complex colsum{0.0, 0.0};
            for (const auto& x : fs[t])
                colsum += x;
            total += weights[t] * colsum * std::conj(colsum);
        }
        if (std::abs(total) < 0.05 * static_cast<double>(dim))
            continue; // poorly conditioned normalization, try again

        NamedTensor q(axes);
        qmf::MultiIndex mi(q.axes());
        for (std::size_t flat = 0; !mi.done(); mi.next(), ++flat) {
            // Unprimed members sit at even positions, primed at odd.
            std::size_t row = 0, col = 0;
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                row = row * cards[i] + mi.values()[2 * i];
                col = col * cards[i] + mi.values()[2 * i + 1];
            }
            Complex v{0.0, 0.0};
            for (std::size_t t = 0; t < terms; ++t)
                v += weights[t] * fs[t][row] * std::conj(fs[t][col]);
            q.flat(flat) = v / total;
        }
        return q;
    }
}

} // namespace oracles
