// cli.hpp — command-line front end. Subcommands:
//   sweep         entanglement vs phase data behind the figures
//   scheme        outcome-leaf table for a named or explicit phase set
//   table1        accumulation statistics for the power-of-two set, d=2..16
//   conditions    transfer / index / final-iteration / resource-c reports
//   photonic      interferometer run and projected electron pair
//   ghz           chain accumulation to a multipartite GHZ state
//   perturbation  exchange-coupling entanglement shortfall
//   defects       defect-center effective Hamiltonian reports
//
// Output is CSV (data commands) or plain text with stable section headers
// (report commands); identical flags produce byte-identical output.

#pragma once

#include "qet/conditions.hpp"
#include "qet/csv.hpp"
#include "qet/defects.hpp"
#include "qet/network.hpp"
#include "qet/schemes.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace qet::cli {

inline TwoQubitResource resource_by_name(const std::string& name) {
    if (name == "psi+") return TwoQubitResource::psi_plus();
    if (name == "psi-") return TwoQubitResource::psi_minus();
    if (name == "phi+") return TwoQubitResource::phi_plus();
    if (name == "phi-") return TwoQubitResource::phi_minus();
    if (name == "cluster") return TwoQubitResource::cluster();
    throw std::invalid_argument("unknown resource: " + name);
}

inline Postselect postselect_by_name(const std::string& name) {
    if (name == "none") return Postselect::none;
    if (name == "equal") return Postselect::equal;
    if (name == "unequal") return Postselect::unequal;
    throw std::invalid_argument("unknown postselection rule: " + name);
}

inline std::string record_string(const std::vector<std::pair<int, int>>& record) {
    std::string s;
    for (size_t i = 0; i < record.size(); ++i) {
        if (i) s += '.';
        s += std::to_string(record[i].first);
        s += std::to_string(record[i].second);
    }
    return s;
}

struct CommonOptions {
    int d = 3;
    std::string resource = "psi+";
    double xi = 20.0;
    std::string set_name;
    std::vector<double> phis;
    std::string postselect = "none";
    int points = 361;
    std::string out_path;
};

// Phase list from --set / --phi flags. The d3-constructed set carries its
// own resources, postselection and initial state and is handled separately.
inline std::vector<double> resolve_phases(const CommonOptions& opt) {
    if (!opt.phis.empty()) return opt.phis;
    if (opt.set_name.empty() || opt.set_name == "power2")
        return power_of_two_phase_set(opt.d);
    if (opt.set_name == "deterministic") return deterministic_phase_set(opt.d);
    throw std::invalid_argument("unknown phase set: " + opt.set_name);
}

namespace detail {

struct OutputTarget {
    std::ostream& stream;
    std::unique_ptr<std::ofstream> file;
};

inline OutputTarget open_output(const std::string& path, std::ostream& fallback) {
    if (path.empty()) return {fallback, nullptr};
    auto file = std::make_unique<std::ofstream>(path);
    if (!*file) throw std::runtime_error("cannot open output file: " + path);
    std::ostream& s = *file;
    return {s, std::move(file)};
}

inline std::vector<std::string> all_records(int rounds, Postselect rule) {
    std::vector<std::vector<std::pair<int, int>>> records{{}};
    for (int r = 0; r < rounds; ++r) {
        std::vector<std::vector<std::pair<int, int>>> next;
        for (const auto& rec : records)
            for (int ja = 0; ja < 2; ++ja)
                for (int jb = 0; jb < 2; ++jb) {
                    if (rule == Postselect::equal && ja != jb) continue;
                    if (rule == Postselect::unequal && ja == jb) continue;
                    auto r2 = rec;
                    r2.emplace_back(ja, jb);
                    next.push_back(std::move(r2));
                }
        records = std::move(next);
    }
    std::vector<std::string> names;
    names.reserve(records.size());
    for (const auto& rec : records) names.push_back(record_string(rec));
    std::sort(names.begin(), names.end());
    return names;
}

}  // namespace detail

inline void run_sweep(const CommonOptions& opt, int round, std::ostream& os) {
    const TwoQubitResource res = resource_by_name(opt.resource);
    const Postselect rule = postselect_by_name(opt.postselect);
    std::vector<double> earlier;
    if (round > 1) {
        std::vector<double> named = opt.phis.empty() ? resolve_phases(opt) : opt.phis;
        if (static_cast<int>(named.size()) < round - 1)
            throw std::invalid_argument("sweep: not enough earlier phases for this round");
        earlier.assign(named.begin(), named.begin() + round - 1);
    }
    auto rows = sweep_expected_E(opt.d, res, opt.xi, round, earlier, opt.points, rule);

    const std::vector<std::string> records = detail::all_records(round, rule);
    CsvWriter w(os);
    std::vector<std::string> head = {"phi", "phi_accumulated", "expected_E"};
    for (const auto& r : records) {
        head.push_back("P_" + r);
        head.push_back("E_" + r);
    }
    w.header(head);
    for (const auto& row : rows) {
        std::map<std::string, std::pair<double, double>> by_record;
        for (const auto& leaf : row.leaves)
            by_record[record_string(leaf.record)] = {leaf.probability, leaf.ebits};
        w.field(row.phi).field(row.phi_accumulated).field(row.expected_E);
        for (const auto& r : records) {
            auto it = by_record.find(r);
            if (it == by_record.end()) {
                w.field(0.0).field(0.0);
            } else {
                w.field(it->second.first).field(it->second.second);
            }
        }
        w.end_row();
    }
}

inline void run_scheme(const CommonOptions& opt, std::ostream& os) {
    NodeParams node_a(opt.d, opt.xi), node_b(opt.d, opt.xi);
    std::vector<OutcomeNode> leaves;
    if (opt.set_name == "d3-constructed") {
        if (opt.d != 3) throw std::invalid_argument("d3-constructed requires --d 3");
        ConstructedD3 c = constructed_d3_scheme(opt.xi);
        leaves = outcome_tree(c.initial, c.scheme, node_a, node_b);
    } else {
        const TwoQubitResource res = resource_by_name(opt.resource);
        const Postselect rule = postselect_by_name(opt.postselect);
        leaves = outcome_tree(plus_state(opt.d), uniform_scheme(res, resolve_phases(opt), rule),
                              node_a, node_b);
    }
    std::sort(leaves.begin(), leaves.end(), [](const OutcomeNode& x, const OutcomeNode& y) {
        return record_string(x.record) < record_string(y.record);
    });
    CsvWriter w(os);
    w.header({"record", "probability", "ebits"});
    for (const auto& leaf : leaves) {
        w.field(record_string(leaf.record)).field(leaf.probability).field(leaf.ebits);
        w.end_row();
    }
}

inline void run_table1(const std::string& family_name, std::optional<double> xi,
                       std::ostream& os) {
    ResourceFamily family;
    if (family_name == "bell") family = ResourceFamily::bell;
    else if (family_name == "cluster") family = ResourceFamily::cluster;
    else throw std::invalid_argument("table1: --resource must be bell or cluster");

    CsvWriter w(os);
    w.header({"d", "nu_max", "E_d", "avg_E", "avg_E_over_E_d_pct", "distinct_E", "sigma_E",
              "success_probability", "leaf_count"});
    for (int d = 2; d <= 16; ++d) {
        double row_xi;
        if (xi) {
            row_xi = *xi;
        } else if (family == ResourceFamily::bell) {
            row_xi = 20.0;
        } else {
            // nearest tuned value at or above the default splitting ratio
            const double unit = std::pow(2.0, max_iterations_ceil(d) - 1);
            row_xi = unit * std::ceil(20.0 / unit);
        }
        SchemeStats s = power2_stats_row(d, family, row_xi);
        w.field(d)
            .field(max_iterations_ceil(d))
            .field(s.max_ebits)
            .field(s.expected_ebits)
            .field(100.0 * s.expected_ebits / s.max_ebits)
            .field(s.distinct_E_count)
            .field(s.std_dev)
            .field(s.success_probability)
            .field(s.leaf_count);
        w.end_row();
    }
}

inline void run_conditions(const std::string& check, const CommonOptions& opt,
                           const std::vector<int>& previous, double xi_a, double xi_b,
                           double phi_a, double phi_b, std::ostream& os) {
    std::ostringstream body;
    if (check == "indices") {
        auto allowed = allowed_indices(opt.d, previous);
        body << "[allowed-indices]\n";
        body << "d = " << opt.d << "\n";
        body << "previous =";
        for (int k : previous) body << ' ' << k;
        body << "\nallowed =";
        for (int k : allowed) body << ' ' << k;
        body << "\ncount = " << allowed.size() << "\n";
    } else if (check == "transfer") {
        if (opt.phis.empty())
            throw std::invalid_argument("conditions transfer: give at least one --phi");
        NodeParams node(opt.d, opt.xi);
        TwoQuditState state = plus_state(opt.d);
        const TwoQubitResource res = resource_by_name(opt.resource);
        for (size_t i = 0; i + 1 < opt.phis.size(); ++i) {
            IterationSpec spec(res, opt.phis[i], opt.phis[i], Postselect::none);
            auto leaves = apply_iteration(state, spec, node, node);
            state = leaves.front().state;
        }
        const double phi = opt.phis.back();
        TransferCheck tc = check_complete_transfer(
            state, conditional_unitary(node, 0, phi), conditional_unitary(node, 1, phi),
            conditional_unitary(node, 0, phi), conditional_unitary(node, 1, phi));
        body << "[complete-transfer]\n";
        body << "d = " << opt.d << "\nphi = " << format_float(phi) << "\n";
        body << "rank = " << tc.rank << "\n";
        body << "residual_a = " << format_float(tc.residual_a) << "\n";
        body << "residual_b = " << format_float(tc.residual_b) << "\n";
        body << "complete = " << (tc.ok ? "yes" : "no") << "\n";
        if (!tc.ok) body << "reason = " << tc.reason << "\n";
    } else if (check == "maxent") {
        if (opt.d != 3)
            throw std::invalid_argument("conditions maxent: only the d=3 construction is wired");
        const std::vector<double> s_diag = {2.0 / 3.0, 1.0 / 3.0, 0.0};
        const CMatrix u = d3_final_gate_matrix(opt.xi);
        const TwoQubitResource res = resource_by_name(opt.resource);
        MaxEntReport rep = check_maxent_conditions(s_diag, u, u, res);
        body << "[maxent-conditions]\n";
        body << "d = 3\nxi = " << format_float(opt.xi) << "\n";
        body << "resource_max_entangled = " << (rep.resource_max_entangled ? "yes" : "no")
             << "\n";
        body << "resource_form_ok = " << (rep.resource_form_ok ? "yes" : "no") << "\n";
        body << "c = " << format_float(rep.c) << "\n";
        body << "pairing_ok = " << (rep.pairing.pairing_ok ? "yes" : "no")
             << " (residual " << format_float(rep.pairing.residual) << ")\n";
        body << "antidiagonal_ok = "
             << ((rep.blocks.antidiagonal_ok_a && rep.blocks.antidiagonal_ok_b) ? "yes" : "no")
             << " (leakage " << format_float(std::max(rep.blocks.leakage_a, rep.blocks.leakage_b))
             << ")\n";
        body << "swap_residual = "
             << format_float(std::max(rep.blocks.swap_residual_a, rep.blocks.swap_residual_b))
             << "\n";
        body << "commutator_residual = " << format_float(rep.commutator_residual) << "\n";
        body << "scalar_residual = " << format_float(rep.scalar_residual) << "\n";
        body << "pass = " << (rep.pass ? "yes" : "no") << "\n";
    } else if (check == "resource-c") {
        ResourceCSolution sol = solve_resource_c(xi_a, xi_b, phi_a, phi_b);
        body << "[resource-c]\n";
        body << "xi_a = " << format_float(xi_a) << "\nxi_b = " << format_float(xi_b) << "\n";
        body << "phi_a = " << format_float(phi_a) << "\nphi_b = " << format_float(phi_b)
             << "\n";
        body << "solutions = "
             << (sol.kind == ResourceCKind::none
                     ? "none"
                     : (sol.kind == ResourceCKind::all ? "all" : "one"))
             << "\n";
        if (sol.kind == ResourceCKind::one) body << "c = " << format_float(sol.c) << "\n";
    } else {
        throw std::invalid_argument("conditions: unknown --check " + check);
    }
    os << body.str();
}

inline void run_photonic_cmd(const std::string& a, const std::string& b, std::ostream& os) {
    auto sign = [](const std::string& s) {
        if (s == "+") return QubitSign::plus;
        if (s == "-") return QubitSign::minus;
        throw std::invalid_argument("photonic: init signs must be + or -");
    };
    const QubitSign sa = sign(a), sb = sign(b);
    PhotonicResult r = run_photonic(sa, sb);
    const bool target_minus = (sa == QubitSign::plus) == (sb == QubitSign::plus);
    const TwoQubitResource target =
        target_minus ? TwoQubitResource::psi_minus() : TwoQubitResource::psi_plus();
    cxd overlap = 0.0;
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
            overlap += std::conj(target.phi_ee(j, k)) * r.projected.phi_ee(j, k);
    os << "[photonic]\n";
    os << "init = (" << a << "," << b << ")\n";
    os << "success_probability = " << format_float(r.success_probability) << "\n";
    os << "projected = " << (target_minus ? "psi-" : "psi+") << "\n";
    os << "fidelity = " << format_float(std::norm(overlap)) << "\n";
}

inline void run_ghz(int m, int d, double xi, std::ostream& os) {
    NodeParams node(d, xi);
    std::vector<std::pair<std::pair<int, int>, IterationSpec>> steps;
    for (int link = 0; link + 1 < m; ++link)
        for (double phi : power_of_two_phase_set(d))
            steps.push_back({{link, link + 1},
                             IterationSpec(TwoQubitResource::psi_plus(), phi, phi,
                                           Postselect::equal)});
    auto leaves = run_pair_schedule(all_plus_chain(m, d), steps, node);
    double p = 0.0, fid = 0.0;
    for (const auto& leaf : leaves) {
        p += leaf.probability;
        fid += leaf.probability * ghz_fidelity(leaf.state);
    }
    if (p > 0.0) fid /= p;
    CsvWriter w(os);
    w.header({"m", "d", "success_probability", "ghz_fidelity"});
    w.field(m).field(d).field(p).field(fid);
    w.end_row();
}

inline void run_perturbation(const CommonOptions& opt, double zeta, std::ostream& os) {
    const Postselect rule = postselect_by_name(opt.postselect);
    const TwoQubitResource res = resource_by_name(opt.resource);
    Scheme scheme = uniform_scheme(res, resolve_phases(opt), rule);
    const double shortfall = entanglement_reduction(opt.d, scheme, zeta, opt.xi);
    CsvWriter w(os);
    w.header({"d", "zeta", "shortfall", "shortfall_over_zeta_sq"});
    w.field(opt.d).field(zeta).field(shortfall).field(shortfall / (zeta * zeta));
    w.end_row();
}

inline void run_defects(const std::string& model, double theta, int points,
                        const GeVParams& gev, std::ostream& os) {
    if (model == "vsic") {
        CsvWriter w(os);
        w.header({"theta", "t_xx", "t_yy", "t_zz", "t_xz", "t_zx", "x_constants_provided"});
        const int n = std::max(1, points);
        for (int k = 0; k < n; ++k) {
            VSiCParams p;
            p.theta1 = (n == 1) ? theta : (M_PI / 2) * k / (n - 1);
            VSiCTensor t = vsic_hyperfine(p);
            w.field(p.theta1)
                .field(t.a(0, 0).real())
                .field(t.a(1, 1).real())
                .field(t.a(2, 2).real())
                .field(t.a(0, 2).real())
                .field(t.a(2, 0).real())
                .field(t.x_constants_provided ? 1 : 0);
            w.end_row();
        }
    } else if (model == "gev") {
        GevReport r = gev_effective(gev);
        os << "[gev-effective]\n";
        os << "lambda = " << format_float(gev.lambda) << "\n";
        os << "epsilon = (" << format_float(gev.alpha) << "," << format_float(-gev.beta)
           << ")\n";
        os << "h_norm = " << format_float(r.h_norm) << "\n";
        os << "cross_norm = " << format_float(r.cross_norm) << "\n";
        os << "diag_mismatch = " << format_float(r.diag_mismatch) << "\n";
        os << "residual = " << format_float(r.residual) << "\n";
        os << "regime_ok = " << (r.regime_ok ? "yes" : "no") << "\n";
        if (!r.warning.empty()) os << "warning = " << r.warning << "\n";
    } else if (model == "nv14") {
        NVTypeParams p = NVTypeParams::nv14();
        ConditionalCorrections c = second_order_correction(p);
        os << "[nv14]\n";
        os << "zeta = " << format_float(p.zeta()) << "\n";
        os << "h0_corr_over_Apar =";
        for (double v : c.h0) os << ' ' << format_float(v);
        os << "\nh1_corr_over_Apar =";
        for (double v : c.h1) os << ' ' << format_float(v);
        os << "\n";
    } else {
        throw std::invalid_argument("defects: unknown --model " + model);
    }
}

// Parse argv-style arguments and execute. Returns the process exit code:
// 0 success, 1 domain/physics error, 2 usage error.
inline int run_command(const std::vector<std::string>& args, std::ostream& out,
                       std::ostream& err) {
    CLI::App app{"qudit entanglement transfer toolkit"};
    app.require_subcommand(1);

    CommonOptions opt;
    int round = 1;
    double zeta = 1.2e-3;
    int ghz_m = 3;
    std::string table_family = "bell";
    std::optional<double> table_xi;
    std::string check = "indices";
    std::vector<int> previous;
    double xi_a = 20.0, xi_b = 20.0, phi_a = M_PI / 2, phi_b = M_PI / 2;
    std::string init_a = "+", init_b = "+";
    std::string model = "vsic";
    double theta = 0.0;
    GeVParams gev;

    auto add_common = [&](CLI::App* cmd, bool with_set = true) {
        cmd->add_option("--d", opt.d, "qudit dimension");
        cmd->add_option("--resource", opt.resource,
                        "resource state: psi+ psi- phi+ phi- cluster");
        cmd->add_option("--xi", opt.xi, "splitting ratio (default 20; 0 = idealized)");
        if (with_set) cmd->add_option("--set", opt.set_name,
                                      "phase set: deterministic power2 d3-constructed");
        cmd->add_option("--phi", opt.phis, "explicit phase (repeatable)");
        cmd->add_option("--postselect", opt.postselect, "none equal unequal");
        cmd->add_option("--out", opt.out_path, "output file (default stdout)");
    };

    CLI::App* sweep = app.add_subcommand("sweep", "expected entanglement vs phase");
    add_common(sweep);
    sweep->add_option("--round", round, "iteration whose phase is swept");
    sweep->add_option("--points", opt.points, "grid points over [0, 2pi]");

    CLI::App* scheme = app.add_subcommand("scheme", "outcome table for a phase set");
    add_common(scheme);

    CLI::App* table1 = app.add_subcommand("table1", "phase-set statistics for d = 2..16");
    table1->add_option("--resource", table_family, "resource family: bell or cluster");
    auto* xi_opt = table1->add_option("--xi", "override the per-row splitting ratio");
    table1->add_option("--out", opt.out_path, "output file (default stdout)");

    CLI::App* conditions = app.add_subcommand("conditions", "transferability reports");
    add_common(conditions, false);
    conditions->add_option("--check", check, "indices transfer maxent resource-c");
    conditions->add_option("--previous", previous, "earlier phase index (repeatable)");
    conditions->add_option("--xi-a", xi_a, "node-a splitting ratio (resource-c)");
    conditions->add_option("--xi-b", xi_b, "node-b splitting ratio (resource-c)");
    conditions->add_option("--phi-a", phi_a, "node-a phase (resource-c)");
    conditions->add_option("--phi-b", phi_b, "node-b phase (resource-c)");

    CLI::App* photonic = app.add_subcommand("photonic", "interferometer run");
    photonic->add_option("--init-a", init_a, "qubit a superposition sign: + or -");
    photonic->add_option("--init-b", init_b, "qubit b superposition sign: + or -");
    photonic->add_option("--out", opt.out_path, "output file (default stdout)");

    CLI::App* ghz = app.add_subcommand("ghz", "chain accumulation to a GHZ state");
    ghz->add_option("--m", ghz_m, "node count");
    ghz->add_option("--d", opt.d, "qudit dimension");
    ghz->add_option("--xi", opt.xi, "splitting ratio");
    ghz->add_option("--out", opt.out_path, "output file (default stdout)");

    CLI::App* pert = app.add_subcommand("perturbation", "exchange-coupling shortfall");
    add_common(pert);
    pert->add_option("--zeta", zeta, "dimensionless exchange strength");

    CLI::App* defects = app.add_subcommand("defects", "defect-center models");
    defects->add_option("--model", model, "vsic gev nv14");
    defects->add_option("--theta", theta, "strain mixing angle (vsic)");
    defects->add_option("--points", opt.points, "scan points over [0, pi/2] (vsic)");
    defects->add_option("--lambda", gev.lambda, "spin-orbit splitting (gev)");
    defects->add_option("--alpha", gev.alpha, "Re strain (gev)");
    defects->add_option("--beta", gev.beta, "Im strain (gev)");
    defects->add_option("--gamma-b", gev.gammaB, "electron Zeeman energy (gev)");
    defects->add_option("--a-par", gev.A_par, "Ising hyperfine (gev)");
    defects->add_option("--a-perp", gev.A_perp, "exchange hyperfine (gev)");
    defects->add_option("--nuclear-spin", gev.I, "nuclear spin quantum number (gev)");
    defects->add_option("--out", opt.out_path, "output file (default stdout)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }

    try {
        detail::OutputTarget target = detail::open_output(opt.out_path, out);
        std::ostream& os = target.stream;
        if (sweep->parsed()) {
            run_sweep(opt, round, os);
        } else if (scheme->parsed()) {
            run_scheme(opt, os);
        } else if (table1->parsed()) {
            if (xi_opt->count()) table_xi = xi_opt->as<double>();
            run_table1(table_family, table_xi, os);
        } else if (conditions->parsed()) {
            // The final-iteration report defaults to the cluster resource.
            if (check == "maxent" && !conditions->count("--resource")) opt.resource = "cluster";
            run_conditions(check, opt, previous, xi_a, xi_b, phi_a, phi_b, os);
        } else if (photonic->parsed()) {
            run_photonic_cmd(init_a, init_b, os);
        } else if (ghz->parsed()) {
            run_ghz(ghz_m, opt.d, opt.xi, os);
        } else if (pert->parsed()) {
            if (opt.set_name.empty() && opt.phis.empty()) opt.set_name = "power2";
            run_perturbation(opt, zeta, os);
        } else if (defects->parsed()) {
            run_defects(model, theta, defects->count("--points") ? opt.points : 1, gev, os);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace qet::cli
