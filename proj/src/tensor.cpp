#include "qmf/tensor.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

namespace qmf {

namespace {

std::size_t checked_product(std::span<const Axis> axes) {
    std::size_t n = 1;
    for (const auto& a : axes) {
        if (a.cardinality == 0)
            throw qmf_error("axis '" + a.name + "' has cardinality 0");
        if (n > std::numeric_limits<std::size_t>::max() / a.cardinality)
            throw qmf_error("tensor too large");
        n *= a.cardinality;
    }
    return n;
}

void check_unique_names(std::span<const Axis> axes) {
    std::set<std::string_view> seen;
    for (const auto& a : axes)
        if (!seen.insert(a.name).second)
            throw qmf_error("duplicate axis name '" + a.name + "'");
}

} // namespace

NamedTensor::NamedTensor(std::vector<Axis> axes)
    : axes_(std::move(axes)), data_(checked_product(axes_), Complex{0.0, 0.0}) {
    check_unique_names(axes_);
}

NamedTensor::NamedTensor(std::vector<Axis> axes, std::vector<Complex> data)
    : axes_(std::move(axes)), data_(std::move(data)) {
    check_unique_names(axes_);
    if (data_.size() != checked_product(axes_))
        throw qmf_error("data length does not match axis cardinalities");
}

NamedTensor NamedTensor::scalar(Complex value) {
    NamedTensor t;
    t.data_[0] = value;
    return t;
}

bool NamedTensor::has_axis(std::string_view name) const {
    return axis_position(name).has_value();
}

std::optional<std::size_t> NamedTensor::axis_position(std::string_view name) const {
    for (std::size_t i = 0; i < axes_.size(); ++i)
        if (axes_[i].name == name)
            return i;
    return std::nullopt;
}

const Axis& NamedTensor::axis(std::string_view name) const {
    auto p = axis_position(name);
    if (!p)
        throw qmf_error("no axis named '" + std::string(name) + "'");
    return axes_[*p];
}

std::vector<std::size_t> NamedTensor::strides() const {
    std::vector<std::size_t> s(axes_.size(), 1);
    for (std::size_t i = axes_.size(); i-- > 1;)
        s[i - 1] = s[i] * axes_[i].cardinality;
    return s;
}

std::size_t NamedTensor::flatten(std::span<const std::size_t> idx) const {
    if (idx.size() != axes_.size())
        throw qmf_error("index rank mismatch");
    std::size_t flat = 0;
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        if (idx[i] >= axes_[i].cardinality)
            throw qmf_error("index out of range on axis '" + axes_[i].name + "'");
        flat = flat * axes_[i].cardinality + idx[i];
    }
    return flat;
}

Complex& NamedTensor::at(std::span<const std::size_t> idx) { return data_[flatten(idx)]; }
Complex NamedTensor::at(std::span<const std::size_t> idx) const { return data_[flatten(idx)]; }

Complex& NamedTensor::at(std::initializer_list<std::size_t> idx) {
    return at(std::span<const std::size_t>(idx.begin(), idx.size()));
}
Complex NamedTensor::at(std::initializer_list<std::size_t> idx) const {
    return at(std::span<const std::size_t>(idx.begin(), idx.size()));
}

NamedTensor NamedTensor::conjugated() const {
    NamedTensor t = *this;
    for (auto& v : t.data_)
        v = std::conj(v);
    return t;
}

NamedTensor NamedTensor::renamed(
    std::span<const std::pair<std::string, std::string>> mapping) const {
    NamedTensor t = *this;
    for (auto& ax : t.axes_) {
        for (const auto& [from, to] : mapping)
            if (ax.name == from) {
                ax.name = to;
                break;
            }
    }
    check_unique_names(t.axes_);
    return t;
}

NamedTensor NamedTensor::transposed(std::span<const std::string> order) const {
    if (order.size() != axes_.size())
        throw qmf_error("transpose order must name every axis");
    std::vector<std::size_t> perm; // perm[i] = old position of new axis i
    perm.reserve(order.size());
    std::vector<Axis> new_axes;
    for (const auto& name : order) {
        auto p = axis_position(name);
        if (!p)
            throw qmf_error("no axis named '" + name + "'");
        if (std::find(perm.begin(), perm.end(), *p) != perm.end())
            throw qmf_error("axis '" + name + "' repeated in transpose order");
        perm.push_back(*p);
        new_axes.push_back(axes_[*p]);
    }
    NamedTensor out(std::move(new_axes));
    const auto old_strides = strides();
    MultiIndex mi(out.axes());
    std::size_t flat_new = 0;
    for (; !mi.done(); mi.next(), ++flat_new) {
        std::size_t flat_old = 0;
        for (std::size_t i = 0; i < perm.size(); ++i)
            flat_old += old_strides[perm[i]] * mi.values()[i];
        out.data_[flat_new] = data_[flat_old];
    }
    return out;
}

bool NamedTensor::same_shape(const NamedTensor& other) const { return axes_ == other.axes_; }

double max_abs_diff(const NamedTensor& a, const NamedTensor& b) {
    if (!a.same_shape(b))
        throw qmf_error("shape mismatch in max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a.flat(i) - b.flat(i)));
    return m;
}

MultiIndex::MultiIndex(std::span<const Axis> axes) : done_(false) {
    cards_.reserve(axes.size());
    for (const auto& a : axes)
        cards_.push_back(a.cardinality);
    idx_.assign(axes.size(), 0);
}

void MultiIndex::next() {
    for (std::size_t i = idx_.size(); i-- > 0;) {
        if (++idx_[i] < cards_[i])
            return;
        idx_[i] = 0;
    }
    done_ = true;
}

namespace {

// Entrywise product over the union of axes; shared names are identified.
NamedTensor product(const NamedTensor& a, const NamedTensor& b) {
    std::vector<Axis> axes = a.axes();
    std::vector<std::size_t> b_source; // for each result axis, position in b or npos
    constexpr std::size_t npos = static_cast<std::size_t>(-1);
    b_source.assign(axes.size(), npos);
    for (std::size_t i = 0; i < axes.size(); ++i)
        if (auto p = b.axis_position(axes[i].name))
            b_source[i] = *p;
    for (std::size_t j = 0; j < b.axes().size(); ++j) {
        if (!a.has_axis(b.axes()[j].name)) {
            axes.push_back(b.axes()[j]);
            b_source.push_back(j);
        }
    }

    NamedTensor out(axes);
    const auto sa = a.strides();
    const auto sb = b.strides();
    std::vector<std::size_t> stride_a(axes.size(), 0), stride_b(axes.size(), 0);
    for (std::size_t i = 0; i < axes.size(); ++i) {
        if (i < a.rank())
            stride_a[i] = sa[i];
        if (b_source[i] != npos)
            stride_b[i] = sb[b_source[i]];
    }

    MultiIndex mi(out.axes());
    std::size_t flat = 0;
    for (; !mi.done(); mi.next(), ++flat) {
        std::size_t fa = 0, fb = 0;
        for (std::size_t i = 0; i < axes.size(); ++i) {
            fa += stride_a[i] * mi.values()[i];
            fb += stride_b[i] * mi.values()[i];
        }
        out.flat(flat) = a.flat(fa) * b.flat(fb);
    }
    return out;
}

NamedTensor sum_out(const NamedTensor& t, const std::string& axis) {
    auto pos = t.axis_position(axis);
    if (!pos)
        throw qmf_error("no axis named '" + axis + "'");
    std::vector<Axis> axes = t.axes();
    const std::size_t card = axes[*pos].cardinality;
    axes.erase(axes.begin() + static_cast<std::ptrdiff_t>(*pos));
    NamedTensor out(axes);

    const auto st = t.strides();
    const std::size_t axis_stride = st[*pos];
    std::vector<std::size_t> keep_strides;
    for (std::size_t i = 0; i < t.rank(); ++i)
        if (i != *pos)
            keep_strides.push_back(st[i]);

    MultiIndex mi(out.axes());
    std::size_t flat = 0;
    for (; !mi.done(); mi.next(), ++flat) {
        std::size_t base = 0;
        for (std::size_t i = 0; i < keep_strides.size(); ++i)
            base += keep_strides[i] * mi.values()[i];
        Complex acc{0.0, 0.0};
        for (std::size_t k = 0; k < card; ++k)
            acc += t.flat(base + k * axis_stride);
        out.flat(flat) = acc;
    }
    return out;
}

// Shared validation for contract and elimination_order.
void validate_network(std::span<const NamedTensor> factors, std::span<const std::string> keep,
                      std::map<std::string, std::size_t>& cards) {
    for (const auto& f : factors) {
        for (const auto& ax : f.axes()) {
            auto [it, inserted] = cards.emplace(ax.name, ax.cardinality);
            if (!inserted && it->second != ax.cardinality)
                throw qmf_error("axis '" + ax.name + "' has mismatched cardinalities " +
                                std::to_string(it->second) + " and " +
                                std::to_string(ax.cardinality));
        }
    }
    std::set<std::string_view> seen;
    for (const auto& k : keep) {
        if (!cards.count(k))
            throw qmf_error("kept axis '" + k + "' does not appear in any factor");
        if (!seen.insert(k).second)
            throw qmf_error("axis '" + k + "' repeated in keep list");
    }
}

} // namespace

std::vector<std::string> elimination_order(std::span<const NamedTensor> factors,
                                           std::span<const std::string> keep) {
    std::map<std::string, std::size_t> cards;
    validate_network(factors, keep, cards);
    const std::set<std::string> kept(keep.begin(), keep.end());

    // Simulate the contraction on axis sets only.
    std::vector<std::set<std::string>> live;
    live.reserve(factors.size());
    for (const auto& f : factors) {
        std::set<std::string> s;
        for (const auto& ax : f.axes())
            s.insert(ax.name);
        live.push_back(std::move(s));
    }

    std::set<std::string> remaining;
    for (const auto& [name, _] : cards)
        if (!kept.count(name))
            remaining.insert(name);

    std::vector<std::string> order;
    order.reserve(remaining.size());
    while (!remaining.empty()) {
        std::string best;
        std::size_t best_size = std::numeric_limits<std::size_t>::max();
        for (const auto& cand : remaining) {
            std::set<std::string> merged;
            for (const auto& s : live)
                if (s.count(cand))
                    merged.insert(s.begin(), s.end());
            std::size_t sz = 1;
            for (const auto& name : merged)
                if (name != cand)
                    sz *= cards.at(name);
            if (sz < best_size) {
                best_size = sz;
                best = cand;
            }
        }
        // Execute the elimination on the simulated sets.
        std::set<std::string> merged;
        std::erase_if(live, [&](const std::set<std::string>& s) {
            if (!s.count(best))
                return false;
            merged.insert(s.begin(), s.end());
            return true;
        });
        merged.erase(best);
        live.push_back(std::move(merged));
        remaining.erase(best);
        order.push_back(best);
    }
    return order;
}

NamedTensor contract(std::span<const NamedTensor> factors, std::span<const std::string> keep,
                     ContractionStats* stats) {
    std::map<std::string, std::size_t> cards;
    validate_network(factors, keep, cards);

    ContractionStats local;
    local.naive_product_entries = 1;
    for (const auto& [_, card] : cards)
        local.naive_product_entries *= card;

    auto note = [&local](const NamedTensor& t) {
        local.peak_intermediate_entries = std::max(local.peak_intermediate_entries, t.size());
    };

    std::vector<NamedTensor> live(factors.begin(), factors.end());
    if (live.empty())
        live.push_back(NamedTensor::scalar({1.0, 0.0}));
    for (const auto& t : live)
        note(t);

    for (const auto& axis : elimination_order(factors, keep)) {
        std::vector<NamedTensor> group;
        std::erase_if(live, [&](const NamedTensor& t) {
            if (!t.has_axis(axis))
                return false;
            group.push_back(t);
            return true;
        });
        NamedTensor prod = std::move(group.front());
        for (std::size_t i = 1; i < group.size(); ++i) {
            prod = product(prod, group[i]);
            note(prod);
        }
        NamedTensor reduced = sum_out(prod, axis);
        note(reduced);
        live.push_back(std::move(reduced));
    }

    NamedTensor result = std::move(live.front());
    for (std::size_t i = 1; i < live.size(); ++i) {
        result = product(result, live[i]);
        note(result);
    }

    if (stats)
        *stats = local;
    return result.transposed(keep);
}

NamedTensor contract(std::span<const NamedTensor> factors,
                     std::initializer_list<std::string> keep, ContractionStats* stats) {
    std::vector<std::string> k(keep);
    return contract(factors, std::span<const std::string>(k), stats);
}

bool is_unitary(const NamedTensor& m, double tol) {
    if (m.rank() != 2)
        throw qmf_error("is_unitary expects a 2-axis tensor");
    const std::size_t n = m.axes()[0].cardinality;
    if (m.axes()[1].cardinality != n)
        throw qmf_error("is_unitary expects a square matrix");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            Complex acc{0.0, 0.0};
            for (std::size_t k = 0; k < n; ++k)
                acc += std::conj(m.flat(k * n + i)) * m.flat(k * n + j);
            const Complex expected = (i == j) ? Complex{1.0, 0.0} : Complex{0.0, 0.0};
            if (std::abs(acc - expected) > tol)
                return false;
        }
    }
    return true;
}

} // namespace qmf
