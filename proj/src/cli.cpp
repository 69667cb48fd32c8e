#include "pdcfock/cli.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pdcfock/config.hpp"
#include "pdcfock/herald.hpp"
#include "pdcfock/oracle_suite.hpp"
#include "pdcfock/output.hpp"
#include "pdcfock/schmidt.hpp"
#include "pdcfock/solver.hpp"
#include "pdcfock/source.hpp"

namespace pdcfock {

namespace {

using nlohmann::json;

struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    int threads = 0;
    bool force = false;
};

struct RunContext {
    RunConfig cfg;
    std::string hash;
    std::string out_dir;
    int threads = 0;
    bool force = false;
};

RunContext make_context(const CommonOptions& opt) {
    RunContext ctx;
    ctx.cfg = load_run_config(opt.config_path);
    ctx.hash = hash_hex16(fnv1a64(ctx.cfg.config_text));
    ctx.out_dir = opt.out_dir.empty() ? ctx.cfg.out_dir : opt.out_dir;
    ctx.threads = opt.threads;
    ctx.force = opt.force;
    return ctx;
}

std::string csv_preamble(const RunContext& ctx, const std::string& command) {
    return "# config " + ctx.hash + "\n# tool " + tool_version + "\n# command " + command + "\n";
}

json base_metadata(const RunContext& ctx, const std::string& command) {
    json meta;
    meta["command"] = command;
    meta["config"] = ctx.cfg.config_name;
    meta["config_hash"] = ctx.hash;
    meta["tool_version"] = tool_version;
    return meta;
}

void emit(const RunContext& ctx, const std::string& filename, const std::string& content,
          std::ostream& out) {
    out << "wrote " << write_guarded(ctx.out_dir, filename, content, ctx.hash, ctx.force) << "\n";
}

void emit_sidecar(const RunContext& ctx, const std::string& filename, const json& meta,
                  std::ostream& out) {
    emit(ctx, filename, meta.dump(2) + "\n", out);
}

std::string opt_cell(const std::optional<double>& v) {
    return v ? format_full(*v) : "nan";
}

std::string brief_or_na(const std::optional<double>& v) {
    return v ? format_brief(*v) : "n/a";
}

json opt_json(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

const char* filter_kind_name(FilterSpec::Kind kind) {
    switch (kind) {
        case FilterSpec::Kind::None: return "none";
        case FilterSpec::Kind::Gaussian: return "gaussian";
        case FilterSpec::Kind::Delta: return "delta";
        case FilterSpec::Kind::Table: return "table";
    }
    return "unknown";
}

json filter_metadata(const FilterSpec& filter) {
    json meta;
    meta["kind"] = filter_kind_name(filter.kind);
    meta["eta"] = filter.eta;
    if (filter.kind == FilterSpec::Kind::Gaussian || filter.kind == FilterSpec::Kind::Delta) {
        meta["mu_f_rad_s"] = filter.mu_f;
    }
    if (filter.kind == FilterSpec::Kind::Gaussian) {
        meta["sigma_f_rad_s"] = filter.sigma_f;
    }
    if (filter.kind == FilterSpec::Kind::Table) {
        meta["table_points"] = filter.table_omega.size();
    }
    return meta;
}

// Width column for sweep rows: the Delta row sits at zero width and the
// unfiltered row at infinite width so the ladder stays a single ordered axis.
double ladder_width(const FilterSpec& filter) {
    switch (filter.kind) {
        case FilterSpec::Kind::Delta: return 0.0;
        case FilterSpec::Kind::Gaussian: return filter.sigma_f;
        case FilterSpec::Kind::None: return std::numeric_limits<double>::infinity();
        case FilterSpec::Kind::Table: return std::numeric_limits<double>::quiet_NaN();
    }
    return std::numeric_limits<double>::quiet_NaN();
}

JsaGrid build_grid(const RunConfig& cfg) {
    if (!cfg.source) {
        throw ConfigError("this command needs a [source] section in the config");
    }
    if (!cfg.grid) {
        throw ConfigError("this command needs a [grid] section in the config");
    }
    return build_jsa(cfg.source->pump, cfg.source->crystal, *cfg.grid, cfg.source->pmf);
}

double spectral_center(const RunConfig& cfg) {
    if (cfg.filter.kind == FilterSpec::Kind::Gaussian ||
        cfg.filter.kind == FilterSpec::Kind::Delta) {
        return cfg.filter.mu_f;
    }
    if (cfg.grid) {
        return cfg.grid->center;
    }
    if (cfg.source) {
        return cfg.source->pump.mu;
    }
    throw ConfigError("no spectral centre available: set [filter] mu_f or a [grid]/[source]");
}

// ---- jsa -------------------------------------------------------------------

int cmd_jsa(const RunContext& ctx, std::ostream& out) {
    const RunConfig& cfg = ctx.cfg;
    const JsaGrid jsa = build_grid(cfg);
    const int n_i = jsa.idler.size();
    const int n_s = jsa.signal.size();

    std::string csv = csv_preamble(ctx, "jsa");
    csv += "omega_idler,omega_signal,abs_amplitude\n";
    csv.reserve(csv.size() + static_cast<std::size_t>(n_i) * static_cast<std::size_t>(n_s) * 64);
    for (int i = 0; i < n_i; ++i) {
        for (int s = 0; s < n_s; ++s) {
            csv += format_full(jsa.idler.omega[i]);
            csv += ',';
            csv += format_full(jsa.signal.omega[s]);
            csv += ',';
            csv += format_full(std::abs(jsa.amplitude(i, s)));
            csv += '\n';
        }
    }

    json meta = base_metadata(ctx, "jsa");
    meta["n_points"] = cfg.grid->n_points;
    meta["span_rad_s"] = cfg.grid->span;
    meta["center_rad_s"] = cfg.grid->center;
    meta["step_rad_s"] = jsa.idler.step;
    meta["separability_residual"] = separability_residual(cfg.source->pump, cfg.source->crystal);
    meta["columns"] = {"omega_idler", "omega_signal", "abs_amplitude"};
    meta["units"] = {{"omega_idler", "rad/s"},
                     {"omega_signal", "rad/s"},
                     {"abs_amplitude", "1/(rad/s); unit norm under the grid quadrature"}};

    emit(ctx, cfg.config_name + "_jsa.csv", csv, out);
    emit_sidecar(ctx, cfg.config_name + "_jsa.json", meta, out);
    out << "joint amplitude on a " << n_i << " x " << n_s << " grid, step "
        << format_brief(jsa.idler.step) << " rad/s\n";
    return 0;
}

// ---- schmidt ---------------------------------------------------------------

int cmd_schmidt(const RunContext& ctx, std::ostream& out) {
    const RunConfig& cfg = ctx.cfg;
    const JsaGrid jsa = build_grid(cfg);
    const SchmidtDecomposition dec = schmidt_decompose(jsa, cfg.schmidt_cutoff);
    const double entropy = entropy_of_entanglement(dec.b);

    std::string csv = csv_preamble(ctx, "schmidt");
    csv += "mode_index,coefficient\n";
    for (int k = 0; k < dec.mode_count(); ++k) {
        csv += std::to_string(k);
        csv += ',';
        csv += format_full(dec.b[k]);
        csv += '\n';
    }
    emit(ctx, cfg.config_name + "_schmidt.csv", csv, out);

    const int exported = std::min(cfg.mode_export_count, dec.mode_count());
    if (exported > 0) {
        std::string modes = csv_preamble(ctx, "schmidt");
        modes += "omega_idler,omega_signal";
        for (int k = 0; k < exported; ++k) {
            const std::string tag = std::to_string(k);
            modes += ",idler_mode" + tag + "_re,idler_mode" + tag + "_im";
            modes += ",signal_mode" + tag + "_re,signal_mode" + tag + "_im";
        }
        modes += '\n';
        for (int row = 0; row < dec.idler.size(); ++row) {
            modes += format_full(dec.idler.omega[row]);
            modes += ',';
            modes += format_full(dec.signal.omega[row]);
            for (int k = 0; k < exported; ++k) {
                modes += ',';
                modes += format_full(dec.zeta(row, k).real());
                modes += ',';
                modes += format_full(dec.zeta(row, k).imag());
                modes += ',';
                modes += format_full(dec.xi(row, k).real());
                modes += ',';
                modes += format_full(dec.xi(row, k).imag());
            }
            modes += '\n';
        }
        emit(ctx, cfg.config_name + "_modes.csv", modes, out);
    }

    json meta = base_metadata(ctx, "schmidt");
    meta["entropy_of_entanglement_bits"] = entropy;
    meta["mode_count"] = dec.mode_count();
    meta["cutoff"] = cfg.schmidt_cutoff;
    meta["coefficient_power_sum"] = dec.b.squaredNorm();
    meta["exported_mode_functions"] = exported;
    meta["units"] = {{"omega_idler", "rad/s"},
                     {"omega_signal", "rad/s"},
                     {"coefficient", "dimensionless; squares sum to 1 before cutoff"},
                     {"mode_samples", "(rad/s)^-1/2; unit norm under the grid quadrature"}};
    emit_sidecar(ctx, cfg.config_name + "_schmidt.json", meta, out);

    out << "entropy of entanglement " << format_brief(entropy) << " bits over "
        << dec.mode_count() << " modes\n";
    return 0;
}

// ---- herald ----------------------------------------------------------------

int cmd_herald(const RunContext& ctx, std::ostream& out) {
    const RunConfig& cfg = ctx.cfg;
    if (!cfg.chi && !cfg.target_fidelity) {
        throw ConfigError("herald needs [herald] chi or target_fidelity");
    }
    const JsaGrid jsa = build_grid(cfg);
    const SchmidtDecomposition dec = schmidt_decompose(jsa, cfg.schmidt_cutoff);

    HeraldReport report;
    double chi = 0.0;
    std::string status = "fixed_chi";
    std::string detail;
    if (cfg.chi) {
        chi = *cfg.chi;
        report = evaluate_herald(chi, dec, cfg.filter, cfg.herald_n);
    } else {
        const ChiSolution sol = solve_chi_for_fidelity(dec, cfg.filter, cfg.herald_n,
                                                       *cfg.target_fidelity, cfg.chi_max);
        if (sol.status == SolveStatus::Failed) {
            throw std::runtime_error("pump-amplitude solve failed: " + sol.detail);
        }
        chi = sol.chi;
        report = sol.report;
        status = to_string(sol.status);
        detail = sol.detail;
    }

    std::string csv = csv_preamble(ctx, "herald");
    csv += "chi,eta,probability,g2,purity,fidelity\n";
    csv += format_full(chi);
    csv += ',';
    csv += format_full(cfg.filter.eta);
    csv += ',';
    csv += format_full(report.probability);
    csv += ',';
    csv += opt_cell(report.g2);
    csv += ',';
    csv += opt_cell(report.purity);
    csv += ',';
    csv += opt_cell(report.fidelity);
    csv += '\n';
    emit(ctx, cfg.config_name + "_herald.csv", csv, out);

    if (report.mode_weights.size() > 0) {
        std::string modes = csv_preamble(ctx, "herald");
        modes += "mode_index,weight\n";
        for (int m = 0; m < report.mode_weights.size(); ++m) {
            modes += std::to_string(m);
            modes += ',';
            modes += format_full(report.mode_weights[m]);
            modes += '\n';
        }
        emit(ctx, cfg.config_name + "_herald_modes.csv", modes, out);
    }

    json meta = base_metadata(ctx, "herald");
    meta["herald_n"] = cfg.herald_n;
    meta["chi"] = chi;
    meta["status"] = status;
    if (!detail.empty()) {
        meta["detail"] = detail;
    }
    if (cfg.target_fidelity) {
        meta["target_fidelity"] = *cfg.target_fidelity;
        meta["chi_max"] = cfg.chi_max;
    }
    meta["no_click"] = report.no_click;
    meta["filter"] = filter_metadata(cfg.filter);
    meta["entropy_of_entanglement_bits"] = entropy_of_entanglement(dec.b);
    meta["g2"] = opt_json(report.g2);
    meta["purity"] = opt_json(report.purity);
    meta["fidelity"] = opt_json(report.fidelity);
    meta["probability"] = report.probability;
    meta["units"] = {{"chi", "dimensionless pump amplitude"},
                     {"eta", "detector efficiency"},
                     {"probability", "per pulse"},
                     {"g2", "zero-delay conditional autocorrelation"},
                     {"purity", "tr rho^2 of the heralded signal state"},
                     {"fidelity", "overlap with the best single-mode Fock state"}};
    emit_sidecar(ctx, cfg.config_name + "_herald.json", meta, out);

    out << "herald n=" << cfg.herald_n << " [" << status << "]: chi=" << format_brief(chi)
        << " p=" << format_brief(report.probability) << " g2=" << brief_or_na(report.g2)
        << " purity=" << brief_or_na(report.purity)
        << " fidelity=" << brief_or_na(report.fidelity) << "\n";
    if (report.no_click) {
        out << "note: the heralding detector never fires for this filter/efficiency\n";
    }
    return 0;
}

// ---- sweep -----------------------------------------------------------------

int cmd_sweep(const RunContext& ctx, std::ostream& out) {
    const RunConfig& cfg = ctx.cfg;
    if (cfg.sweep_sigma_f.empty()) {
        throw ConfigError("sweep needs [sweep] sigma_f (list or sigma_f_min/max/count)");
    }
    if (!cfg.target_fidelity) {
        throw ConfigError("sweep needs [herald] target_fidelity");
    }
    const JsaGrid jsa = build_grid(cfg);
    const SchmidtDecomposition dec = schmidt_decompose(jsa, cfg.schmidt_cutoff);

    const std::vector<FilterSpec> ladder =
        filter_ladder(spectral_center(cfg), cfg.sweep_sigma_f, cfg.filter.eta,
                      cfg.sweep_include_delta, cfg.sweep_include_unfiltered);
    const std::vector<SweepRow> rows = sweep_filter_width(
        dec, ladder, cfg.herald_n, *cfg.target_fidelity, cfg.chi_max, ctx.threads);

    std::string csv = csv_preamble(ctx, "sweep");
    csv += "sigma_f,eta,status,chi,probability,g2,purity,fidelity,entropy\n";
    json meta_rows = json::array();
    const SweepRow* best = nullptr;
    for (const SweepRow& row : rows) {
        const ChiSolution& sol = row.solution;
        const HeraldReport& rep = sol.report;
        csv += format_full(ladder_width(row.filter));
        csv += ',';
        csv += format_full(row.filter.eta);
        csv += ',';
        csv += to_string(sol.status);
        csv += ',';
        csv += format_full(sol.chi);
        csv += ',';
        csv += format_full(rep.probability);
        csv += ',';
        csv += opt_cell(rep.g2);
        csv += ',';
        csv += opt_cell(rep.purity);
        csv += ',';
        csv += opt_cell(rep.fidelity);
        csv += ',';
        csv += format_full(row.entropy);
        csv += '\n';

        json jrow;
        jrow["filter_kind"] = filter_kind_name(row.filter.kind);
        if (row.filter.kind == FilterSpec::Kind::Gaussian) {
            jrow["sigma_f_rad_s"] = row.filter.sigma_f;
        }
        jrow["status"] = to_string(sol.status);
        if (!sol.detail.empty()) {
            jrow["detail"] = sol.detail;
        }
        jrow["chi"] = sol.chi;
        jrow["probability"] = rep.probability;
        jrow["g2"] = opt_json(rep.g2);
        jrow["purity"] = opt_json(rep.purity);
        jrow["fidelity"] = opt_json(rep.fidelity);
        jrow["entropy_of_entanglement_bits"] = row.entropy;
        meta_rows.push_back(jrow);

        const bool met = sol.status == SolveStatus::Solved ||
                         sol.status == SolveStatus::AtChiBound ||
                         sol.status == SolveStatus::ChiIndependent;
        if (met && !rep.no_click && (best == nullptr ||
                                     rep.probability > best->solution.report.probability)) {
            best = &row;
        }
    }
    emit(ctx, cfg.config_name + "_sweep.csv", csv, out);

    json meta = base_metadata(ctx, "sweep");
    meta["herald_n"] = cfg.herald_n;
    meta["target_fidelity"] = *cfg.target_fidelity;
    meta["chi_max"] = cfg.chi_max;
    meta["eta"] = cfg.filter.eta;
    meta["mu_f_rad_s"] = spectral_center(cfg);
    meta["rows"] = meta_rows;
    meta["units"] = {{"sigma_f", "rad/s; 0 marks the narrow-filter limit, inf no filter"},
                     {"probability", "per pulse"},
                     {"entropy", "bits"}};
    emit_sidecar(ctx, cfg.config_name + "_sweep.json", meta, out);

    out << "swept " << rows.size() << " filter variants at target fidelity "
        << format_brief(*cfg.target_fidelity) << " (eta " << format_brief(cfg.filter.eta)
        << ")\n";
    if (best != nullptr) {
        out << "best count rate at target: sigma_f=" << format_brief(ladder_width(best->filter))
            << " rad/s, chi=" << format_brief(best->solution.chi)
            << ", p=" << format_brief(best->solution.report.probability) << "\n";
    } else {
        out << "no filter in the ladder reaches the fidelity target\n";
    }
    return 0;
}

// ---- surface ---------------------------------------------------------------

int cmd_surface(const RunContext& ctx, std::ostream& out) {
    const RunConfig& cfg = ctx.cfg;
    if (cfg.surface_chi.empty() || cfg.surface_eta.empty()) {
        throw ConfigError("surface needs [surface] chi and eta grids");
    }
    const JsaGrid jsa = build_grid(cfg);
    const SchmidtDecomposition dec = schmidt_decompose(jsa, cfg.schmidt_cutoff);
    const std::vector<SurfaceCell> cells = metric_surface(
        dec, cfg.filter, cfg.surface_chi, cfg.surface_eta, cfg.herald_n, ctx.threads);

    std::string csv = csv_preamble(ctx, "surface");
    csv += "chi,eta,probability,g2,purity,fidelity\n";
    for (const SurfaceCell& cell : cells) {
        csv += format_full(cell.chi);
        csv += ',';
        csv += format_full(cell.eta);
        csv += ',';
        csv += format_full(cell.report.probability);
        csv += ',';
        csv += opt_cell(cell.report.g2);
        csv += ',';
        csv += opt_cell(cell.report.purity);
        csv += ',';
        csv += opt_cell(cell.report.fidelity);
        csv += '\n';
    }
    emit(ctx, cfg.config_name + "_surface.csv", csv, out);

    json meta = base_metadata(ctx, "surface");
    meta["herald_n"] = cfg.herald_n;
    meta["filter"] = filter_metadata(cfg.filter);
    meta["chi_values"] = cfg.surface_chi;
    meta["eta_values"] = cfg.surface_eta;
    meta["row_order"] = "chi outer, eta inner";
    meta["entropy_of_entanglement_bits"] = entropy_of_entanglement(dec.b);
    meta["units"] = {{"chi", "dimensionless pump amplitude"},
                     {"eta", "detector efficiency"},
                     {"probability", "per pulse"}};
    emit_sidecar(ctx, cfg.config_name + "_surface.json", meta, out);

    out << "surface over " << cfg.surface_chi.size() << " x " << cfg.surface_eta.size()
        << " (chi, eta) cells\n";
    return 0;
}

// ---- oracle-check ----------------------------------------------------------

int cmd_oracle_check(const CommonOptions& opt, std::ostream& out) {
    OracleSuiteConfig suite;
    if (!opt.config_path.empty()) {
        suite = load_run_config(opt.config_path).oracle;
    }
    const OracleSuiteReport report = run_oracle_suite(suite);
    for (const OracleCaseResult& result : report.cases) {
        char err_buf[32];
        std::snprintf(err_buf, sizeof(err_buf), "%.3e", result.max_rel_err);
        out << (result.pass ? "pass " : "FAIL ") << result.label << "  max_rel_err=" << err_buf
            << "\n";
    }
    out << "equivalence suite: " << (static_cast<int>(report.cases.size()) - report.failures)
        << "/" << report.cases.size() << " cases within " << format_brief(report.tolerance)
        << " (worst " << format_brief(report.max_rel_err) << ")\n";
    return report.all_pass() ? 0 : 3;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Heralded Fock-state figures of merit for a two-mode-squeezing source"};
    app.require_subcommand(1);

    CommonOptions opt;
    const auto add_common = [&opt](CLI::App* sub, bool config_required) {
        auto* config = sub->add_option("-c,--config", opt.config_path, "run configuration file");
        if (config_required) {
            config->required();
        }
        sub->add_option("-o,--out", opt.out_dir, "output directory (overrides the config)");
        sub->add_option("-j,--threads", opt.threads, "worker threads (0 = hardware)");
        sub->add_flag("-f,--force", opt.force, "overwrite outputs from a different config");
    };

    CLI::App* jsa = app.add_subcommand("jsa", "tabulate the joint spectral amplitude magnitude");
    CLI::App* schmidt =
        app.add_subcommand("schmidt", "mode decomposition: coefficients, entropy, mode shapes");
    CLI::App* herald =
        app.add_subcommand("herald", "heralded-state metrics at fixed chi or a fidelity target");
    CLI::App* sweep =
        app.add_subcommand("sweep", "filter-width ladder: count rate at a fidelity target");
    CLI::App* surface = app.add_subcommand("surface", "metric table over a (chi, eta) grid");
    CLI::App* oracle = app.add_subcommand(
        "oracle-check", "compare closed forms against the brute-force expansion");
    add_common(jsa, true);
    add_common(schmidt, true);
    add_common(herald, true);
    add_common(sweep, true);
    add_common(surface, true);
    add_common(oracle, false);

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (jsa->parsed()) {
            return cmd_jsa(make_context(opt), out);
        }
        if (schmidt->parsed()) {
            return cmd_schmidt(make_context(opt), out);
        }
        if (herald->parsed()) {
            return cmd_herald(make_context(opt), out);
        }
        if (sweep->parsed()) {
            return cmd_sweep(make_context(opt), out);
        }
        if (surface->parsed()) {
            return cmd_surface(make_context(opt), out);
        }
        if (oracle->parsed()) {
            return cmd_oracle_check(opt, out);
        }
        err << "no command selected\n";
        return 1;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace pdcfock
