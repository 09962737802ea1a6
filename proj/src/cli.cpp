#include "qmf/cli.hpp"

#include "qmf/classical.hpp"
#include "qmf/measure.hpp"
#include "qmf/model_io.hpp"
#include "qmf/models.hpp"
#include "qmf/numfmt.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <ostream>

namespace qmf::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

// Numbers enter JSON reports re-parsed from their 12-digit rendering so the
// two output forms carry identical numeric content.
double json_num(double v) { return std::strtod(fmt12(v).c_str(), nullptr); }

ordered_json json_complex(Complex v) {
    return ordered_json::array({json_num(v.real()), json_num(v.imag())});
}

double env_tolerance() {
    if (const char* s = std::getenv("QMF_TOL")) {
        char* end = nullptr;
        const double v = std::strtod(s, &end);
        if (end != s && v > 0.0)
            return v;
    }
    return kDefaultTol;
}

ordered_json table_json(const ConfigTable& t) {
    ordered_json rows = ordered_json::array();
    for (const auto& row : t.rows) {
        ordered_json r;
        ordered_json assignment;
        for (std::size_t i = 0; i < t.variables.size(); ++i)
            assignment[t.variables[i]] = row.assignment[i];
        r["assignment"] = std::move(assignment);
        r["value"] = json_complex(row.value);
        rows.push_back(std::move(r));
    }
    ordered_json j;
    j["variables"] = t.variables;
    j["rows"] = std::move(rows);
    return j;
}

std::vector<std::string> split_names(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : csv) {
        if (c == ',') {
            if (!cur.empty())
                out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty())
        out.push_back(cur);
    return out;
}

std::vector<std::string> sqmf_scope(const ModelFile& m) {
    if (m.sqmf_pairs.empty())
        throw qmf_error("model declares no sqmf_pairs");
    return m.sqmf_pairs;
}

int cmd_check(const std::string& path, bool as_json, double tol, std::ostream& out) {
    const ModelFile m = load_model(path);
    const FactorGraph g = build_graph(m);
    std::vector<std::string> scope = sqmf_scope(m);
    const CertifyResult r = sqmf_from_graph(g, scope, tol);

    if (as_json) {
        ordered_json j;
        j["ok"] = r.ok;
        j["total"] = json_num(r.total);
        j["normalization_warning"] = r.normalization_warning;
        if (!r.ok) {
            const char* names[] = {"none", "pairing", "hermitian", "psd", "normalization"};
            j["failed_invariant"] = names[static_cast<int>(r.failure)];
            j["detail"] = r.detail;
        }
        out << j.dump(2) << "\n";
    } else {
        out << "pairs:";
        for (const auto& p : scope)
            out << " (" << p << ", " << primed(p) << ")";
        out << "\n";
        out << "total: " << fmt12(r.total) << "\n";
        if (r.ok) {
            out << "sqmf: ok" << (r.normalization_warning ? " (normalization drift warning)" : "")
                << "\n";
        } else {
            const char* names[] = {"none", "pairing", "hermitian", "psd", "normalization"};
            out << "sqmf: FAILED invariant " << names[static_cast<int>(r.failure)] << ": "
                << r.detail << "\n";
        }
    }
    return r.ok ? 0 : 1;
}

int cmd_marginalize(const std::string& path, const std::string& keep_csv, bool as_json,
                    double tol, std::ostream& out) {
    const ModelFile m = load_model(path);
    const FactorGraph g = build_graph(m);
    Sqmf q = sqmf_from_graph_or_throw(g, sqmf_scope(m), tol);
    Sqmf marg = marginalize(q, split_names(keep_csv), tol);
    ConfigTable t = valid_configurations(marg, tol);
    if (as_json)
        out << table_json(t).dump(2) << "\n";
    else
        out << t.to_text();
    return 0;
}

int cmd_configs(const std::string& path, bool as_json, double tol, std::ostream& out) {
    const ModelFile m = load_model(path);
    const FactorGraph g = build_graph(m);
    ConfigTable t = graph_configurations(g, tol);
    if (as_json)
        out << table_json(t).dump(2) << "\n";
    else
        out << t.to_text();
    return 0;
}

int cmd_pmf(const std::string& path, const std::string& pairs_csv, bool as_json, double tol,
            std::ostream& out) {
    const ModelFile m = load_model(path);
    const FactorGraph g = build_graph(m);
    Sqmf q = sqmf_from_graph_or_throw(g, sqmf_scope(m), tol);
    std::vector<std::string> pairs =
        pairs_csv.empty() ? std::vector<std::string>{} : split_names(pairs_csv);
    if (pairs.empty())
        for (const auto& p : g.measured_pairs())
            pairs.push_back(p.unprimed);
    if (pairs.empty())
        throw qmf_error("no measured pairs given; use --pairs");
    Pmf p = measurement_pmf(q, pairs, tol);

    if (as_json) {
        ordered_json j;
        ordered_json names = ordered_json::array();
        for (const auto& a : p.axes())
            names.push_back(a.name);
        j["pairs"] = std::move(names);
        ordered_json values = ordered_json::array();
        for (double v : p.values())
            values.push_back(json_num(v));
        j["p"] = std::move(values);
        out << j.dump(2) << "\n";
    } else {
        for (const auto& a : p.axes())
            out << a.name << "  ";
        out << "p\n";
        MultiIndex mi(p.axes());
        for (; !mi.done(); mi.next()) {
            for (std::size_t i = 0; i < mi.values().size(); ++i)
                out << mi.values()[i] << std::string(p.axes()[i].name.size() + 1, ' ');
            out << fmt12(p.at(mi.values())) << "\n";
        }
    }
    return 0;
}

void print_kappa(const KappaMatrix& k, bool as_json, std::ostream& out) {
    if (as_json) {
        ordered_json rows = ordered_json::array();
        for (std::size_t z = 0; z < k.n; ++z) {
            ordered_json row = ordered_json::array();
            for (std::size_t zp = 0; zp < k.n; ++zp)
                row.push_back(json_complex(k(z, zp)));
            rows.push_back(std::move(row));
        }
        ordered_json j;
        j["kappa"] = std::move(rows);
        j["max_off_diagonal"] = json_num(k.max_off_diagonal());
        out << j.dump(2) << "\n";
    } else {
        for (std::size_t z = 0; z < k.n; ++z) {
            for (std::size_t zp = 0; zp < k.n; ++zp)
                out << (zp ? "  " : "") << fmt12(k(z, zp));
            out << "\n";
        }
        out << "max off-diagonal: " << fmt12(k.max_off_diagonal()) << "\n";
    }
}

int cmd_kappa(const std::string& path, bool as_json, std::ostream& out) {
    const ModelFile m = load_model(path);
    if (!m.family)
        throw qmf_error("model declares no interaction family");
    print_kappa(kappa(build_family(*m.family)), as_json, out);
    return 0;
}

int cmd_converge(const std::string& path, std::size_t max_n, double threshold, bool as_json,
                 std::ostream& out) {
    const ModelFile m = load_model(path);
    if (!m.family)
        throw qmf_error("model declares no interaction family");
    const KappaMatrix k = kappa(build_family(*m.family));
    const ConvergenceResult r = classicalize(k, threshold, max_n);
    if (as_json) {
        ordered_json j;
        j["converged"] = r.converged;
        j["interactions"] = r.interactions;
        j["max_off_diagonal"] = json_num(r.max_off_diagonal);
        j["threshold"] = json_num(threshold);
        out << j.dump(2) << "\n";
    } else if (r.converged) {
        out << "classicalized after " << r.interactions
            << " interactions (max off-diagonal " << fmt12(r.max_off_diagonal) << " <= "
            << fmt12(threshold) << ")\n";
    } else {
        out << "not classicalized within " << r.interactions
            << " interactions (max off-diagonal " << fmt12(r.max_off_diagonal) << ")\n";
    }
    return 0; // non-convergence is reported, not failed
}

int cmd_undo_check(const std::string& path, bool as_json, double tol, std::ostream& out) {
    const ModelFile m = load_model(path);
    if (!m.undo)
        throw qmf_error("model declares no undo section");
    auto [u, p] = build_undo(*m.undo);
    const bool undone = undo_check(u, p, tol);
    if (as_json) {
        ordered_json j;
        j["undone"] = undone;
        out << j.dump(2) << "\n";
    } else {
        out << "measurement " << (undone ? "undone: exterior equals the identity wires"
                                         : "NOT undone: exterior differs from the identity wires")
            << "\n";
    }
    return undone ? 0 : 1;
}

int cmd_separation_check(const std::string& path, bool as_json, std::ostream& out) {
    const ModelFile m = load_model(path);
    if (!m.separation)
        throw qmf_error("model declares no separation section");
    const FactorGraph g = build_graph(m);
    const bool ok = separation_check(g, m.separation->interaction, m.separation->terminations);
    if (as_json) {
        ordered_json j;
        j["separated"] = ok;
        out << j.dump(2) << "\n";
    } else {
        out << (ok ? "separation condition holds: the measuring system never re-touches the "
                     "system of interest"
                   : "separation condition VIOLATED: a later factor touches both systems")
            << "\n";
    }
    return ok ? 0 : 1;
}

void print_fr_text(const FrReport& r, std::ostream& out) {
    out << "nested-agents model report\n";
    out << "==========================\n\n";
    out << "valid configurations, first measurement pinned to Y1 = 0:\n";
    out << r.table1.to_text();
    out << "\nvalid configurations, second measurement pinned to Y2 = 1:\n";
    out << r.table2.to_text();
    out << "\nsum of the pinned-configuration values: " << fmt12(r.table2_sum)
        << "  (squares to the stopping probability)\n";
    out << "\npsi(S = 0, Y1 = 0) magnitude: " << fmt12(r.psi00_magnitude) << "\n";
    out << "Pr(Rb = 1) = 2/3: " << fmt12(r.pr_rb1) << "\n";
    out << "stopping condition Pr = 1/12 (Y1b = 0 and Y2b = 1): " << fmt12(r.pr_stop) << "\n";
    out << "\nsingle-agent inferences, each inside its own marginal:\n";
    for (const auto* i : {&r.agent_f, &r.agent_wbar, &r.agent_w}) {
        out << "  [" << (i->holds ? "holds" : "FAILS") << "] " << i->description << "  ("
            << i->view << ", " << i->antecedent_rows << " antecedent configurations)\n";
    }
    out << "\njointly classicable {R, S, Y1, Y2}: "
        << (r.four_pairs_jointly_classicable ? "yes" : "no") << "\n";
    if (!r.four_pairs_jointly_classicable) {
        out << "  off-diagonal witness magnitude " << fmt12(r.witness.magnitude)
            << " at configuration (";
        for (std::size_t i = 0; i < r.witness.assignment.size(); ++i)
            out << (i ? ", " : "") << r.witness.assignment[i];
        out << ")\n";
        out << "  the chained inferences share no common classical scope; no contradiction\n";
    }
}

ordered_json fr_json(const FrReport& r) {
    ordered_json j;
    j["table1"] = table_json(r.table1);
    j["table2"] = table_json(r.table2);
    j["table2_sum"] = json_complex(r.table2_sum);
    j["psi00_magnitude"] = json_num(r.psi00_magnitude);
    j["pr_rb1"] = json_num(r.pr_rb1);
    j["pr_stop"] = json_num(r.pr_stop);
    ordered_json impls = ordered_json::array();
    for (const auto* i : {&r.agent_f, &r.agent_wbar, &r.agent_w}) {
        ordered_json e;
        e["description"] = i->description;
        e["view"] = i->view;
        e["holds"] = i->holds;
        e["antecedent_rows"] = i->antecedent_rows;
        impls.push_back(std::move(e));
    }
    j["implications"] = std::move(impls);
    j["four_pairs_jointly_classicable"] = r.four_pairs_jointly_classicable;
    j["witness_magnitude"] = json_num(r.witness.magnitude);
    j["witness_assignment"] = r.witness.assignment;
    return j;
}

int cmd_fr(bool report, bool as_json, std::uint64_t seed, std::ostream& out) {
    const FrModel m = fr_model(seed);
    if (!report) {
        out << "nested-agents model built; pass --report for the full analysis\n";
        return 0;
    }
    const FrReport r = fr_implications(m);
    if (as_json)
        out << fr_json(r).dump(2) << "\n";
    else
        print_fr_text(r, out);
    const bool all_good = r.agent_f.holds && r.agent_wbar.holds && r.agent_w.holds &&
                          !r.four_pairs_jointly_classicable;
    return all_good ? 0 : 1;
}

} // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"quantum mass functions over mirrored factor graphs"};
    app.name("qmf");
    app.require_subcommand(1);

    const double tol = env_tolerance();

    std::string file;
    std::string keep_csv, pairs_csv;
    bool as_json = false;
    std::size_t max_n = 10000;
    double threshold = 1e-6;
    bool fr_report = false;
    std::uint64_t fr_seed = 7;

    auto add_file = [&file](CLI::App* cmd) {
        cmd->add_option("file", file, "model file")->required();
    };
    auto add_json = [&as_json](CLI::App* cmd) {
        cmd->add_flag("--json", as_json, "machine-readable output");
    };

    CLI::App* check = app.add_subcommand("check", "certify the model's mass function");
    add_file(check);
    add_json(check);
    CLI::App* marg = app.add_subcommand("marginalize", "marginalize onto kept pairs");
    add_file(marg);
    add_json(marg);
    marg->add_option("--keep", keep_csv, "comma-separated unprimed pair names")->required();
    CLI::App* configs = app.add_subcommand("configs", "enumerate valid configurations");
    add_file(configs);
    add_json(configs);
    CLI::App* pmf = app.add_subcommand("pmf", "measurement distribution over pairs");
    add_file(pmf);
    add_json(pmf);
    pmf->add_option("--pairs", pairs_csv, "comma-separated unprimed pair names");
    CLI::App* kap = app.add_subcommand("kappa", "interaction family kappa matrix");
    add_file(kap);
    add_json(kap);
    CLI::App* conv = app.add_subcommand("converge", "repeat the interaction until classical");
    add_file(conv);
    add_json(conv);
    conv->add_option("--max-n", max_n, "repetition cap");
    conv->add_option("--threshold", threshold, "off-diagonal threshold");
    CLI::App* undo = app.add_subcommand("undo-check", "does re-feeding the probe undo the measurement");
    add_file(undo);
    add_json(undo);
    CLI::App* sep = app.add_subcommand("separation-check", "post-interaction separation");
    add_file(sep);
    add_json(sep);
    CLI::App* fr = app.add_subcommand("fr", "built-in nested-agents model");
    add_json(fr);
    fr->add_flag("--report", fr_report, "run the full analysis");
    fr->add_option("--seed", fr_seed, "unitary completion seed");

    std::vector<std::string> reversed;
    for (std::size_t i = args.size(); i-- > 1;)
        reversed.push_back(args[i]);
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help and friends
            out << app.help();
            return 0;
        }
        err << e.what() << "\n";
        return 2;
    }

    try {
        if (check->parsed())
            return cmd_check(file, as_json, tol, out);
        if (marg->parsed())
            return cmd_marginalize(file, keep_csv, as_json, tol, out);
        if (configs->parsed())
            return cmd_configs(file, as_json, tol, out);
        if (pmf->parsed())
            return cmd_pmf(file, pairs_csv, as_json, tol, out);
        if (kap->parsed())
            return cmd_kappa(file, as_json, out);
        if (conv->parsed())
            return cmd_converge(file, max_n, threshold, as_json, out);
        if (undo->parsed())
            return cmd_undo_check(file, as_json, tol, out);
        if (sep->parsed())
            return cmd_separation_check(file, as_json, out);
        if (fr->parsed())
            return cmd_fr(fr_report, as_json, fr_seed, out);
    } catch (const qmf_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    err << "no subcommand given\n";
    return 2;
}

} // namespace qmf::cli
