#include "qmf/qmf.hpp"

#include "qmf/classical.hpp"
#include "qmf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qmf {

Pmf::Pmf(std::vector<Axis> axes, std::vector<double> values)
    : axes_(std::move(axes)), values_(std::move(values)) {
    std::size_t n = 1;
    for (const auto& a : axes_)
        n *= a.cardinality;
    if (values_.size() != n)
        throw qmf_error("pmf data length does not match axes");
    double sum = 0.0;
    for (auto& v : values_) {
        if (v < -1e-12)
            throw qmf_error("pmf entry " + std::to_string(v) + " is negative");
        if (v < 0.0)
            v = 0.0;
        sum += v;
    }
    if (std::abs(sum - 1.0) > kDefaultTol)
        throw qmf_error("pmf sums to " + std::to_string(sum) + ", not 1");
}

Pmf Pmf::uniform(const std::string& axis, std::size_t cardinality) {
    return Pmf({Axis{axis, cardinality}},
               std::vector<double>(cardinality, 1.0 / static_cast<double>(cardinality)));
}

double Pmf::at(std::span<const std::size_t> idx) const {
    std::size_t flat = 0;
    if (idx.size() != axes_.size())
        throw qmf_error("pmf index rank mismatch");
    for (std::size_t i = 0; i < axes_.size(); ++i)
        flat = flat * axes_[i].cardinality + idx[i];
    return values_[flat];
}

double Pmf::at(std::initializer_list<std::size_t> idx) const {
    return at(std::span<const std::size_t>(idx.begin(), idx.size()));
}

NamedTensor Pmf::as_tensor() const {
    std::vector<Complex> data(values_.begin(), values_.end());
    return NamedTensor(axes_, std::move(data));
}

const MirrorPair& Sqmf::pair(const std::string& unprimed) const {
    for (const auto& p : pairs_)
        if (p.unprimed == unprimed)
            return p;
    throw qmf_error("no pair named '" + unprimed + "'");
}

bool Sqmf::has_pair(const std::string& unprimed) const {
    return std::any_of(pairs_.begin(), pairs_.end(),
                       [&](const MirrorPair& p) { return p.unprimed == unprimed; });
}

std::vector<std::string> Sqmf::axis_order() const {
    std::vector<std::string> order;
    for (const auto& p : pairs_) {
        order.push_back(p.unprimed);
        order.push_back(p.primed);
    }
    return order;
}

std::vector<std::string> Sqmf::unprimed_axes() const {
    std::vector<std::string> v;
    for (const auto& p : pairs_)
        v.push_back(p.unprimed);
    return v;
}

std::vector<std::string> Sqmf::primed_axes() const {
    std::vector<std::string> v;
    for (const auto& p : pairs_)
        v.push_back(p.primed);
    return v;
}

namespace {

// Validates pairing and returns the tensor in canonical interleaved order.
NamedTensor canonical_order(const NamedTensor& t, std::span<const MirrorPair> pairs,
                            std::string& error) {
    std::vector<std::string> order;
    for (const auto& p : pairs) {
        order.push_back(p.unprimed);
        order.push_back(p.primed);
    }
    if (order.size() != t.rank()) {
        error = "tensor has " + std::to_string(t.rank()) + " axes but " +
                std::to_string(order.size()) + " pair members were named";
        return {};
    }
    for (const auto& p : pairs) {
        if (!t.has_axis(p.unprimed) || !t.has_axis(p.primed)) {
            error = "pair (" + p.unprimed + ", " + p.primed + ") not present in tensor";
            return {};
        }
        if (t.axis(p.unprimed).cardinality != t.axis(p.primed).cardinality) {
            error = "pair (" + p.unprimed + ", " + p.primed + ") has mismatched cardinalities";
            return {};
        }
    }
    try {
        return t.transposed(order);
    } catch (const qmf_error& e) {
        error = e.what();
        return {};
    }
}

// Transpose swapping the members of every pair, then conjugate: the tensor
// equals this image iff it is Hermitian as a kernel.
NamedTensor mirror_swapped(const NamedTensor& canonical, std::span<const MirrorPair> pairs) {
    std::vector<std::pair<std::string, std::string>> swap;
    for (const auto& p : pairs) {
        swap.emplace_back(p.unprimed, p.primed);
        swap.emplace_back(p.primed, p.unprimed);
    }
    std::vector<std::string> order;
    for (const auto& p : pairs) {
        order.push_back(p.unprimed);
        order.push_back(p.primed);
    }
    return canonical.renamed(swap).transposed(order).conjugated();
}

} // namespace

PsdCheck is_psd_kernel(const NamedTensor& t, std::span<const MirrorPair> pairs, double tol) {
    PsdCheck out;
    std::string error;
    NamedTensor canon = canonical_order(t, pairs, error);
    if (!error.empty())
        throw qmf_error("is_psd_kernel: " + error);

    {
        const NamedTensor swapped = mirror_swapped(canon, pairs);
        std::size_t worst = 0;
        for (std::size_t i = 0; i < canon.size(); ++i) {
            const double d = std::abs(canon.flat(i) - swapped.flat(i));
            if (d > out.hermitian_violation) {
                out.hermitian_violation = d;
                worst = i;
            }
        }
        out.hermitian = out.hermitian_violation <= tol;
        if (!out.hermitian) {
            // Decode the offending configuration for the diagnostics.
            std::vector<std::size_t> idx(canon.rank());
            std::size_t rem = worst;
            for (std::size_t i = canon.rank(); i-- > 0;) {
                idx[i] = rem % canon.axes()[i].cardinality;
                rem /= canon.axes()[i].cardinality;
            }
            std::string where;
            for (std::size_t i = 0; i < idx.size(); ++i)
                where += (i ? ", " : "") + canon.axes()[i].name + " = " + std::to_string(idx[i]);
            out.detail = "Hermitian symmetry violated by " +
                         std::to_string(out.hermitian_violation) + " at (" + where + ")";
            return out;
        }
    }

    std::vector<std::string> rows, cols;
    for (const auto& p : pairs) {
        rows.push_back(p.unprimed);
        cols.push_back(p.primed);
    }
    auto eig = linalg::hermitian_eig(linalg::to_matrix(canon, rows, cols));
    out.min_eigenvalue = eig.values.front();
    for (double v : eig.values)
        out.spectral_radius = std::max(out.spectral_radius, std::abs(v));
    out.ok = out.min_eigenvalue >= -tol * out.spectral_radius;
    if (!out.ok)
        out.detail = "smallest eigenvalue " + std::to_string(out.min_eigenvalue) +
                     " below -tol * spectral radius " + std::to_string(out.spectral_radius);
    return out;
}

CertifyResult CertifyResult::success(NamedTensor t, std::vector<MirrorPair> pairs, double total,
                                     bool warning) {
    CertifyResult r;
    r.ok = true;
    r.total = total;
    r.normalization_warning = warning;
    r.sqmf.tensor_ = std::move(t);
    r.sqmf.pairs_ = std::move(pairs);
    return r;
}

CertifyResult certify_sqmf(const NamedTensor& t, std::span<const MirrorPair> pairs, double tol) {
    CertifyResult r;
    std::string error;
    NamedTensor canon = canonical_order(t, pairs, error);
    if (!error.empty()) {
        r.failure = CertifyResult::Failure::pairing;
        r.detail = error;
        return r;
    }

    PsdCheck psd = is_psd_kernel(canon, pairs, tol);
    if (!psd.hermitian) {
        r.failure = CertifyResult::Failure::hermitian;
        r.detail = psd.detail;
        return r;
    }
    if (!psd.ok) {
        r.failure = CertifyResult::Failure::psd;
        r.detail = psd.detail;
        return r;
    }

    Complex sum{0.0, 0.0};
    for (std::size_t i = 0; i < canon.size(); ++i)
        sum += canon.flat(i);
    r.total = sum.real();
    const double drift = std::abs(sum - Complex{1.0, 0.0});
    if (drift > 1e-6) {
        r.failure = CertifyResult::Failure::normalization;
        std::ostringstream os;
        os << "total is " << sum.real();
        if (sum.imag() != 0.0)
            os << (sum.imag() < 0 ? " - " : " + ") << std::abs(sum.imag()) << "i";
        os << ", drift " << drift << " exceeds 1e-6";
        r.detail = os.str();
        return r;
    }
    return CertifyResult::success(std::move(canon),
                                  std::vector<MirrorPair>(pairs.begin(), pairs.end()), r.total,
                                  drift > kDefaultTol);
}

Sqmf certify_sqmf_or_throw(const NamedTensor& t, std::span<const MirrorPair> pairs, double tol) {
    CertifyResult r = certify_sqmf(t, pairs, tol);
    if (!r.ok)
        throw qmf_error("not a simple quantum mass function: " + r.detail);
    return std::move(r.sqmf);
}

CertifyResult sqmf_from_graph(const FactorGraph& g, std::span<const std::string> pair_names,
                              double tol) {
    std::vector<MirrorPair> pairs;
    std::vector<std::string> keep;
    for (const auto& name : pair_names) {
        auto m = g.mirror_of(name);
        if (!m)
            throw qmf_error("variable '" + name + "' has no mirror");
        pairs.push_back(MirrorPair{name, *m});
        keep.push_back(name);
        keep.push_back(*m);
    }
    return certify_sqmf(g.exterior(keep), pairs, tol);
}

CertifyResult sqmf_from_graph(const FactorGraph& g, std::initializer_list<std::string> pair_names,
                              double tol) {
    std::vector<std::string> names(pair_names);
    return sqmf_from_graph(g, std::span<const std::string>(names), tol);
}

Sqmf sqmf_from_graph_or_throw(const FactorGraph& g, std::span<const std::string> pair_names,
                              double tol) {
    CertifyResult r = sqmf_from_graph(g, pair_names, tol);
    if (!r.ok)
        throw qmf_error("graph exterior is not a simple quantum mass function: " + r.detail);
    return std::move(r.sqmf);
}

Sqmf sqmf_from_graph_or_throw(const FactorGraph& g, std::initializer_list<std::string> pair_names,
                              double tol) {
    std::vector<std::string> names(pair_names);
    return sqmf_from_graph_or_throw(g, std::span<const std::string>(names), tol);
}

Sqmf marginalize(const Sqmf& q, std::span<const std::string> keep_pairs, double tol) {
    if (keep_pairs.empty())
        throw qmf_error("marginalize requires at least one kept pair");
    std::vector<MirrorPair> pairs;
    std::vector<std::string> keep;
    for (const auto& name : keep_pairs) {
        pairs.push_back(q.pair(name)); // throws on unknown pair
        keep.push_back(pairs.back().unprimed);
        keep.push_back(pairs.back().primed);
    }
    const NamedTensor t = q.tensor();
    NamedTensor reduced = contract(std::span<const NamedTensor>(&t, 1), keep);
    return certify_sqmf_or_throw(reduced, pairs, tol);
}

Sqmf marginalize(const Sqmf& q, std::initializer_list<std::string> keep_pairs, double tol) {
    std::vector<std::string> names(keep_pairs);
    return marginalize(q, std::span<const std::string>(names), tol);
}

Pmf measurement_pmf(const Sqmf& q, std::span<const std::string> measured_pairs, double tol) {
    if (!is_jointly_classicable(q, measured_pairs, tol)) {
        std::string names;
        for (const auto& n : measured_pairs)
            names += (names.empty() ? "" : ", ") + n;
        throw qmf_error("pairs {" + names + "} are not jointly classicable; no joint "
                        "probability mass function exists for them");
    }
    Sqmf m = marginalize(q, measured_pairs, tol);

    std::vector<Axis> axes;
    for (const auto& p : m.pairs())
        axes.push_back(Axis{p.unprimed, m.tensor().axis(p.unprimed).cardinality});
    std::vector<double> values;
    MultiIndex mi(axes);
    for (; !mi.done(); mi.next()) {
        std::vector<std::size_t> full;
        for (std::size_t v : mi.values()) {
            full.push_back(v);
            full.push_back(v);
        }
        const Complex d = m.tensor().at(std::span<const std::size_t>(full));
        if (std::abs(d.imag()) > tol)
            throw qmf_error("diagonal entry has imaginary part " + std::to_string(d.imag()));
        values.push_back(d.real());
    }
    return Pmf(std::move(axes), std::move(values));
}

Pmf measurement_pmf(const Sqmf& q, std::initializer_list<std::string> measured_pairs,
                    double tol) {
    std::vector<std::string> names(measured_pairs);
    return measurement_pmf(q, std::span<const std::string>(names), tol);
}

} // namespace qmf
