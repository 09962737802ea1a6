#include "qmf/classical.hpp"

#include "qmf/numfmt.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace qmf {

namespace {

struct Evaluator {
    // Per factor: positions into the global assignment and strides.
    struct Lookup {
        const NamedTensor* tensor;
        std::vector<std::size_t> var_positions;
        std::vector<std::size_t> strides;
    };
    std::vector<Lookup> lookups;

    Complex operator()(std::span<const std::size_t> assignment) const {
        Complex v{1.0, 0.0};
        for (const auto& l : lookups) {
            std::size_t flat = 0;
            for (std::size_t i = 0; i < l.var_positions.size(); ++i)
                flat += l.strides[i] * assignment[l.var_positions[i]];
            v *= l.tensor->flat(flat);
            if (v == Complex{0.0, 0.0})
                return v;
        }
        return v;
    }
};

ConfigTable enumerate(std::vector<std::string> variables, std::vector<std::size_t> cards,
                      const Evaluator& eval, double tol, std::size_t cap) {
    std::size_t total = 1;
    for (std::size_t c : cards) {
        if (total > cap / std::max<std::size_t>(c, 1)) {
            total = cap + 1;
            break;
        }
        total *= c;
    }
    if (total > cap)
        throw qmf_error("configuration space exceeds enumeration cap of " + std::to_string(cap));

    ConfigTable table;
    table.variables = std::move(variables);
    table.cardinalities = std::move(cards);

    std::vector<std::size_t> idx(table.variables.size(), 0);
    bool done = table.variables.empty();
    bool first = true;
    while (first || !done) {
        first = false;
        const Complex v = eval(idx);
        if (std::abs(v) > tol)
            table.rows.push_back(ConfigRow{idx, v});
        if (idx.empty())
            break;
        done = true;
        for (std::size_t i = idx.size(); i-- > 0;) {
            if (++idx[i] < table.cardinalities[i]) {
                done = false;
                break;
            }
            idx[i] = 0;
        }
    }
    return table;
}

} // namespace

std::string ConfigTable::to_text() const {
    // Column widths: variable names above their values, then the value.
    std::vector<std::size_t> widths;
    for (const auto& v : variables)
        widths.push_back(std::max<std::size_t>(v.size(), 1));

    std::ostringstream os;
    for (std::size_t i = 0; i < variables.size(); ++i) {
        os << variables[i];
        os << std::string(widths[i] - variables[i].size() + 2, ' ');
    }
    os << "value\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.assignment.size(); ++i) {
            const std::string cell = std::to_string(row.assignment[i]);
            os << cell << std::string(widths[i] - cell.size() + 2, ' ');
        }
        os << fmt12(row.value) << "\n";
    }
    return os.str();
}

ConfigTable valid_configurations(const NamedTensor& q, double tol, std::size_t cap) {
    std::vector<std::string> vars;
    for (const auto& ax : q.axes())
        vars.push_back(ax.name);
    std::sort(vars.begin(), vars.end());

    std::vector<std::size_t> cards;
    Evaluator eval;
    Evaluator::Lookup lookup;
    lookup.tensor = &q;
    const auto strides = q.strides();
    for (std::size_t pos = 0; pos < vars.size(); ++pos) {
        const auto axis_pos = *q.axis_position(vars[pos]);
        cards.push_back(q.axes()[axis_pos].cardinality);
        lookup.var_positions.push_back(pos);
        lookup.strides.push_back(strides[axis_pos]);
    }
    eval.lookups.push_back(std::move(lookup));
    return enumerate(std::move(vars), std::move(cards), eval, tol, cap);
}

ConfigTable valid_configurations(const Sqmf& q, double tol, std::size_t cap) {
    return valid_configurations(q.tensor(), tol, cap);
}

ConfigTable graph_configurations(const FactorGraph& g, double tol, std::size_t cap) {
    std::vector<std::string> vars;
    std::vector<std::size_t> cards;
    std::map<std::string, std::size_t> position;
    for (const auto& [name, decl] : g.variables()) {
        if (g.degree(name) == 0)
            continue; // declared but unused: not part of the function
        position.emplace(name, vars.size());
        vars.push_back(name);
        cards.push_back(decl.cardinality);
    }
    // std::map iteration is already lexicographic.

    Evaluator eval;
    for (const auto& f : g.factors()) {
        Evaluator::Lookup lookup;
        lookup.tensor = &f.tensor;
        const auto strides = f.tensor.strides();
        for (std::size_t i = 0; i < f.tensor.rank(); ++i) {
            lookup.var_positions.push_back(position.at(f.tensor.axes()[i].name));
            lookup.strides.push_back(strides[i]);
        }
        eval.lookups.push_back(std::move(lookup));
    }
    return enumerate(std::move(vars), std::move(cards), eval, tol, cap);
}

bool is_classical(const Sqmf& q, const std::string& pair_name, double tol) {
    const MirrorPair& pair = q.pair(pair_name);
    const auto pu = *q.tensor().axis_position(pair.unprimed);
    const auto pp = *q.tensor().axis_position(pair.primed);
    MultiIndex mi(q.tensor().axes());
    for (std::size_t flat = 0; !mi.done(); mi.next(), ++flat) {
        if (std::abs(q.tensor().flat(flat)) <= tol)
            continue;
        if (mi.values()[pu] != mi.values()[pp])
            return false;
    }
    return true;
}

OffDiagonalWitness off_diagonal_witness(const Sqmf& q, std::span<const std::string> pair_names) {
    Sqmf m = q;
    if (pair_names.size() != q.pair_count() ||
        !std::equal(pair_names.begin(), pair_names.end(), q.unprimed_axes().begin()))
        m = marginalize(q, pair_names);

    OffDiagonalWitness w;
    MultiIndex mi(m.tensor().axes());
    for (std::size_t flat = 0; !mi.done(); mi.next(), ++flat) {
        bool diagonal = true;
        for (std::size_t k = 0; k + 1 < mi.values().size(); k += 2)
            if (mi.values()[k] != mi.values()[k + 1]) {
                diagonal = false;
                break;
            }
        if (diagonal)
            continue;
        const double mag = std::abs(m.tensor().flat(flat));
        if (mag > w.magnitude) {
            w.magnitude = mag;
            w.assignment = mi.values();
        }
    }
    return w;
}

bool is_jointly_classicable(const Sqmf& q, std::span<const std::string> pair_names, double tol) {
    if (pair_names.empty())
        throw qmf_error("joint classicability requires at least one pair");
    return off_diagonal_witness(q, pair_names).magnitude <= tol;
}

bool is_jointly_classicable(const Sqmf& q, std::initializer_list<std::string> pair_names,
                            double tol) {
    std::vector<std::string> names(pair_names);
    return is_jointly_classicable(q, std::span<const std::string>(names), tol);
}

bool is_classicable(const Sqmf& q, const std::string& pair_name, double tol) {
    return is_jointly_classicable(q, {pair_name}, tol);
}

ClassicalityReport classicality_report(const Sqmf& q, std::size_t subset_size_cap, double tol) {
    ClassicalityReport report;
    report.subset_size_cap = subset_size_cap;
    const std::vector<std::string> names = q.unprimed_axes();
    for (const auto& name : names)
        report.pairs.push_back(
            PairFlags{name, is_classical(q, name, tol), is_classicable(q, name, tol)});

    if (names.size() > 8 * sizeof(std::size_t))
        throw qmf_error("too many pairs for subset enumeration");

    std::vector<std::size_t> passing;
    const std::size_t n = names.size();
    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
        std::vector<std::string> subset;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (std::size_t{1} << i))
                subset.push_back(names[i]);
        if (subset.size() > subset_size_cap)
            continue;
        if (is_jointly_classicable(q, subset, tol))
            passing.push_back(mask);
    }
    // Keep only maximal ones.
    for (std::size_t s : passing) {
        bool contained = false;
        for (std::size_t t : passing)
            if (t != s && (s & t) == s) {
                contained = true;
                break;
            }
        if (contained)
            continue;
        std::vector<std::string> subset;
        for (std::size_t i = 0; i < n; ++i)
            if (s & (std::size_t{1} << i))
                subset.push_back(names[i]);
        report.maximal_jointly_classicable.push_back(std::move(subset));
    }
    return report;
}

} // namespace qmf
