#include "pdcfock/config.hpp"

#include <algorithm>
#include <cctype>
#include <climits>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pdcfock/dispersion.hpp"
#include "pdcfock/herald.hpp"

namespace pdcfock {

namespace {

std::string trim(const std::string& s) {
    std::size_t first = 0;
    std::size_t last = s.size();
    while (first < last && std::isspace(static_cast<unsigned char>(s[first]))) {
        ++first;
    }
    while (last > first && std::isspace(static_cast<unsigned char>(s[last - 1]))) {
        --last;
    }
    return s.substr(first, last - first);
}

std::string join_path(const std::string& base, const std::string& rel) {
    std::filesystem::path p(rel);
    if (p.is_absolute() || base.empty()) {
        return rel;
    }
    return (std::filesystem::path(base) / p).string();
}

}  // namespace

void IniFile::fail(const std::string& section, const std::string& key,
                   const std::string& what) const {
    const Entry* e = find(section, key);
    std::ostringstream msg;
    msg << name_;
    if (e != nullptr) {
        msg << ':' << e->line;
    }
    msg << ": [" << section << "] " << key << ": " << what;
    throw ConfigError(msg.str());
}

const IniFile::Entry* IniFile::find(const std::string& section, const std::string& key) const {
    const auto it = entries_.find({section, key});
    return it == entries_.end() ? nullptr : &it->second;
}

const IniFile::Entry& IniFile::require(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (e == nullptr) {
        fail(section, key, "missing required key");
    }
    e->used = true;
    return *e;
}

IniFile IniFile::parse_string(const std::string& text, const std::string& name) {
    IniFile ini;
    ini.name_ = name;
    ini.text_ = text;

    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto cut = line.find_first_of("#;"); cut != std::string::npos) {
            line.erase(cut);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw ConfigError(name + ":" + std::to_string(lineno) +
                                  ": malformed section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) {
                throw ConfigError(name + ":" + std::to_string(lineno) + ": empty section name");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(name + ":" + std::to_string(lineno) +
                              ": expected 'key = value' or '[section]'");
        }
        if (section.empty()) {
            throw ConfigError(name + ":" + std::to_string(lineno) +
                              ": key appears before any [section]");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(name + ":" + std::to_string(lineno) + ": empty key");
        }
        if (!ini.entries_.emplace(std::make_pair(section, key), Entry{value, lineno}).second) {
            throw ConfigError(name + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                              "' in [" + section + "]");
        }
    }
    return ini;
}

IniFile IniFile::parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_string(buffer.str(), path);
}

bool IniFile::has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

std::string IniFile::get_string(const std::string& section, const std::string& key) const {
    return require(section, key).value;
}

std::string IniFile::get_string(const std::string& section, const std::string& key,
                                const std::string& fallback) const {
    const Entry* e = find(section, key);
    if (e == nullptr) {
        return fallback;
    }
    e->used = true;
    return e->value;
}

double IniFile::get_number(const std::string& section, const std::string& key) const {
    const Entry& e = require(section, key);
    try {
        std::size_t pos = 0;
        const double v = std::stod(e.value, &pos);
        if (trim(e.value.substr(pos)).empty()) {
            return v;
        }
    } catch (const std::exception&) {
    }
    fail(section, key, "'" + e.value + "' is not a number");
}

double IniFile::get_number(const std::string& section, const std::string& key,
                           double fallback) const {
    return has(section, key) ? get_number(section, key) : fallback;
}

int IniFile::get_int(const std::string& section, const std::string& key) const {
    const Entry& e = require(section, key);
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(e.value, &pos);
        if (trim(e.value.substr(pos)).empty() && v >= INT_MIN && v <= INT_MAX) {
            return static_cast<int>(v);
        }
    } catch (const std::exception&) {
    }
    fail(section, key, "'" + e.value + "' is not an integer");
}

int IniFile::get_int(const std::string& section, const std::string& key, int fallback) const {
    return has(section, key) ? get_int(section, key) : fallback;
}

bool IniFile::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    const Entry* e = find(section, key);
    if (e == nullptr) {
        return fallback;
    }
    e->used = true;
    const std::string& v = e->value;
    if (v == "true" || v == "yes" || v == "on" || v == "1") {
        return true;
    }
    if (v == "false" || v == "no" || v == "off" || v == "0") {
        return false;
    }
    fail(section, key, "'" + v + "' is not a boolean (use true/false)");
}

std::vector<double> IniFile::get_number_list(const std::string& section,
                                             const std::string& key) const {
    const Entry& e = require(section, key);
    std::string normalized = e.value;
    std::replace(normalized.begin(), normalized.end(), ',', ' ');
    std::istringstream in(normalized);
    std::vector<double> values;
    double v = 0.0;
    while (in >> v) {
        values.push_back(v);
    }
    if (!in.eof() || values.empty()) {
        fail(section, key, "'" + e.value + "' is not a list of numbers");
    }
    return values;
}

void IniFile::reject_unused() const {
    std::ostringstream msg;
    int count = 0;
    for (const auto& [sk, entry] : entries_) {
        if (!entry.used) {
            if (count++) {
                msg << "; ";
            }
            msg << name_ << ':' << entry.line << ": [" << sk.first << "] " << sk.second;
        }
    }
    if (count > 0) {
        throw ConfigError("unknown or unused config keys: " + msg.str());
    }
}

namespace {

// ---- [source] --------------------------------------------------------------

double resolve_slowness_role(const IniFile& ini, const std::string& num_key,
                             const std::string& axis_key, const SlownessTable* table,
                             double wavelength_nm) {
    const bool numeric = ini.has("source", num_key);
    const bool by_axis = ini.has("source", axis_key);
    if (numeric && by_axis) {
        throw ConfigError(ini.name() + ": [source]: give " + num_key + " or " + axis_key +
                          ", not both");
    }
    if (numeric) {
        const double v = ini.get_number("source", num_key);
        if (!(v > 0.0)) {
            throw ConfigError(ini.name() + ": [source] " + num_key + ": must be positive");
        }
        return v;
    }
    if (!by_axis) {
        throw ConfigError(ini.name() + ": [source]: need " + num_key + " or " + axis_key);
    }
    if (table == nullptr) {
        throw ConfigError(ini.name() + ": [source] " + axis_key +
                          ": requires dispersion_table to be set");
    }
    try {
        return group_slowness(*table, ini.get_string("source", axis_key), wavelength_nm);
    } catch (const std::exception& e) {
        throw ConfigError(ini.name() + ": [source] " + axis_key + ": " + e.what());
    }
}

SourceBundle resolve_source(const IniFile& ini, const std::string& base_dir) {
    SourceBundle src;

    // Pump: wavelength/FWHM pair or direct carrier/width in angular frequency.
    const bool by_wavelength = ini.has("source", "pump_wavelength_nm");
    const bool by_frequency = ini.has("source", "pump_mu");
    if (by_wavelength == by_frequency) {
        throw ConfigError(ini.name() +
                          ": [source]: give exactly one pump description — "
                          "pump_wavelength_nm + pump_fwhm_nm, or pump_mu + sigma_p");
    }
    double lambda_pump_nm = 0.0;
    if (by_wavelength) {
        lambda_pump_nm = ini.get_number("source", "pump_wavelength_nm");
        const double fwhm = ini.get_number("source", "pump_fwhm_nm");
        if (!(lambda_pump_nm > 0.0) || !(fwhm > 0.0)) {
            throw ConfigError(ini.name() + ": [source]: pump wavelength and FWHM must be positive");
        }
        src.pump.mu = 0.5 * wavelength_nm_to_omega(lambda_pump_nm);
        src.pump.sigma_p = fwhm_nm_to_sigma(lambda_pump_nm, fwhm);
    } else {
        const double pump_mu = ini.get_number("source", "pump_mu");
        src.pump.sigma_p = ini.get_number("source", "sigma_p");
        if (!(pump_mu > 0.0) || !(src.pump.sigma_p > 0.0)) {
            throw ConfigError(ini.name() + ": [source]: pump_mu and sigma_p must be positive");
        }
        src.pump.mu = 0.5 * pump_mu;
        lambda_pump_nm = 2.0 * 3.141592653589793 * speed_of_light / pump_mu * 1e9;
    }
    const double lambda_daughter_nm = 2.0 * lambda_pump_nm;

    // Phase-matching shape and residual mismatch.
    const std::string pmf = ini.get_string("source", "pmf", "sinc");
    if (pmf == "sinc") {
        src.pmf = PmfKind::Sinc;
    } else if (pmf == "gaussian") {
        src.pmf = PmfKind::Gaussian;
    } else {
        throw ConfigError(ini.name() + ": [source] pmf: '" + pmf + "' (use sinc or gaussian)");
    }
    src.crystal.delta0 = ini.get_number("source", "delta0", 0.0);
    src.crystal.gamma = ini.get_number("source", "gamma", 0.193);
    if (!(src.crystal.gamma > 0.0)) {
        throw ConfigError(ini.name() + ": [source] gamma: must be positive");
    }

    // Group slownesses: per role, a direct number or a table axis, with the
    // two group-matching design rules layered on top.
    std::optional<SlownessTable> table;
    if (ini.has("source", "dispersion_table")) {
        const std::string rel = ini.get_string("source", "dispersion_table");
        try {
            table = load_slowness_table(join_path(base_dir, rel));
        } catch (const std::exception& e) {
            throw ConfigError(ini.name() + ": [source] dispersion_table: " + e.what());
        }
    }
    const SlownessTable* tbl = table ? &*table : nullptr;

    const std::string pump_match = ini.get_string("source", "pump_match", "");
    const std::string signal_match = ini.get_string("source", "signal_match", "");
    if (!pump_match.empty() && pump_match != "daughters_mean") {
        throw ConfigError(ini.name() + ": [source] pump_match: use 'daughters_mean' or omit");
    }
    if (!signal_match.empty() && signal_match != "pump") {
        throw ConfigError(ini.name() + ": [source] signal_match: use 'pump' or omit");
    }
    if (pump_match == "daughters_mean" && signal_match == "pump") {
        throw ConfigError(ini.name() +
                          ": [source]: pump_match=daughters_mean and signal_match=pump "
                          "are circular; pick one");
    }

    src.crystal.ki_prime =
        resolve_slowness_role(ini, "ki_prime", "idler_axis", tbl, lambda_daughter_nm);
    if (signal_match != "pump") {
        src.crystal.ks_prime =
            resolve_slowness_role(ini, "ks_prime", "signal_axis", tbl, lambda_daughter_nm);
    }
    if (pump_match == "daughters_mean") {
        src.crystal.kp_prime = 0.5 * (src.crystal.ks_prime + src.crystal.ki_prime);
    } else {
        src.crystal.kp_prime =
            resolve_slowness_role(ini, "kp_prime", "pump_axis", tbl, lambda_pump_nm);
    }
    if (signal_match == "pump") {
        src.crystal.ks_prime = src.crystal.kp_prime;
    }

    // Crystal length: explicit metres or the separability design rule.
    const bool has_length = ini.has("source", "length");
    const std::string rule = ini.get_string("source", "length_rule", "");
    if (!rule.empty() && rule != "symmetric") {
        throw ConfigError(ini.name() + ": [source] length_rule: use 'symmetric' or omit");
    }
    if (has_length == (rule == "symmetric")) {
        throw ConfigError(ini.name() +
                          ": [source]: give exactly one of length / length_rule=symmetric");
    }
    if (rule == "symmetric") {
        if (src.crystal.ks_prime == src.crystal.ki_prime) {
            throw ConfigError(ini.name() +
                              ": [source] length_rule=symmetric needs distinct ks'/ki'");
        }
        src.crystal.length = symmetric_length(src.pump.sigma_p, src.crystal.ks_prime,
                                              src.crystal.ki_prime, src.crystal.gamma);
    } else {
        src.crystal.length = ini.get_number("source", "length");
        if (!(src.crystal.length > 0.0)) {
            throw ConfigError(ini.name() + ": [source] length: must be positive");
        }
    }
    return src;
}

// ---- [filter] ---------------------------------------------------------------

void load_filter_table(const std::string& path, FilterSpec& filter) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open filter table: " + path);
    }
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto cut = line.find('#'); cut != std::string::npos) {
            line.erase(cut);
        }
        std::istringstream row(line);
        double omega = 0.0;
        double value = 0.0;
        if (!(row >> omega)) {
            continue;
        }
        std::string rest;
        if (!(row >> value) || (row >> rest)) {
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": expected 'omega transmission' pairs");
        }
        filter.table_omega.push_back(omega);
        filter.table_value.push_back(value);
    }
}

FilterSpec resolve_filter(const IniFile& ini, const std::string& base_dir,
                          std::optional<double> default_mu) {
    FilterSpec filter;
    const std::string kind = ini.get_string("filter", "kind", "none");
    if (kind == "none") {
        filter.kind = FilterSpec::Kind::None;
    } else if (kind == "gaussian") {
        filter.kind = FilterSpec::Kind::Gaussian;
    } else if (kind == "delta") {
        filter.kind = FilterSpec::Kind::Delta;
    } else if (kind == "table") {
        filter.kind = FilterSpec::Kind::Table;
    } else {
        throw ConfigError(ini.name() + ": [filter] kind: '" + kind +
                          "' (use none, gaussian, delta or table)");
    }

    filter.eta = ini.get_number("filter", "eta", 1.0);
    if (!(filter.eta >= 0.0 && filter.eta <= 1.0)) {
        throw ConfigError(ini.name() + ": [filter] eta: must lie in [0, 1]");
    }

    if (filter.kind == FilterSpec::Kind::Gaussian || filter.kind == FilterSpec::Kind::Delta) {
        if (ini.has("filter", "mu_f")) {
            filter.mu_f = ini.get_number("filter", "mu_f");
        } else if (default_mu) {
            filter.mu_f = *default_mu;
        } else {
            throw ConfigError(ini.name() +
                              ": [filter] mu_f: required (no [source]/[grid] centre to default to)");
        }
    }
    if (filter.kind == FilterSpec::Kind::Gaussian) {
        filter.sigma_f = ini.get_number("filter", "sigma_f");
    }
    if (filter.kind == FilterSpec::Kind::Table) {
        const std::string rel = ini.get_string("filter", "table");
        load_filter_table(join_path(base_dir, rel), filter);
    }

    try {
        filter.validate();
    } catch (const std::exception& e) {
        throw ConfigError(ini.name() + ": [filter]: " + e.what());
    }
    return filter;
}

// ---- grids ------------------------------------------------------------------

std::vector<double> resolve_grid_axis(const IniFile& ini, const std::string& section,
                                      const std::string& stem, bool geometric) {
    if (ini.has(section, stem)) {
        for (const char* suffix : {"_min", "_max", "_count"}) {
            if (ini.has(section, stem + suffix)) {
                throw ConfigError(ini.name() + ": [" + section + "]: give " + stem +
                                  " as a list or as min/max/count, not both");
            }
        }
        return ini.get_number_list(section, stem);
    }
    const double lo = ini.get_number(section, stem + "_min");
    const double hi = ini.get_number(section, stem + "_max");
    const int count = ini.get_int(section, stem + "_count");
    if (count < 1 || hi < lo) {
        throw ConfigError(ini.name() + ": [" + section + "] " + stem +
                          ": need count >= 1 and max >= min");
    }
    if (geometric && !(lo > 0.0)) {
        throw ConfigError(ini.name() + ": [" + section + "] " + stem +
                          "_min: must be positive for a geometric ladder");
    }
    std::vector<double> values(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        values[static_cast<std::size_t>(i)] =
            geometric ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
    }
    return values;
}

RunConfig resolve(const IniFile& ini, const std::string& base_dir) {
    RunConfig cfg;
    cfg.config_text = ini.text();
    const std::string stem = std::filesystem::path(ini.name()).stem().string();
    cfg.config_name = stem.empty() ? "config" : stem;

    if (ini.has("source", "pump_wavelength_nm") || ini.has("source", "pump_mu")) {
        cfg.source = resolve_source(ini, base_dir);
    }

    if (ini.has("grid", "n_points")) {
        GridSpec grid;
        grid.n_points = ini.get_int("grid", "n_points");
        grid.span = ini.get_number("grid", "span");
        if (ini.has("grid", "center")) {
            grid.center = ini.get_number("grid", "center");
        } else if (cfg.source) {
            grid.center = cfg.source->pump.mu;
        } else {
            throw ConfigError(ini.name() + ": [grid] center: required without a [source] section");
        }
        if (grid.n_points < 2 || !(grid.span > 0.0)) {
            throw ConfigError(ini.name() + ": [grid]: need n_points >= 2 and span > 0");
        }
        cfg.grid = grid;
    }

    cfg.schmidt_cutoff = ini.get_number("schmidt", "cutoff", 0.0);
    if (cfg.schmidt_cutoff < 0.0) {
        throw ConfigError(ini.name() + ": [schmidt] cutoff: must be >= 0");
    }
    cfg.mode_export_count = ini.get_int("schmidt", "modes", 5);
    if (cfg.mode_export_count < 0) {
        throw ConfigError(ini.name() + ": [schmidt] modes: must be >= 0");
    }

    std::optional<double> default_mu;
    if (cfg.grid) {
        default_mu = cfg.grid->center;
    } else if (cfg.source) {
        default_mu = cfg.source->pump.mu;
    }
    cfg.filter = resolve_filter(ini, base_dir, default_mu);

    cfg.herald_n = ini.get_int("herald", "n", 1);
    if (cfg.herald_n != 1 && cfg.herald_n != 2) {
        throw ConfigError(ini.name() + ": [herald] n: must be 1 or 2");
    }
    const double chi_cap = max_reporting_chi(cfg.herald_n);
    if (ini.has("herald", "chi")) {
        cfg.chi = ini.get_number("herald", "chi");
        if (!(*cfg.chi >= 0.0 && *cfg.chi <= chi_cap)) {
            throw ConfigError(ini.name() + ": [herald] chi: must lie in [0, " +
                              std::to_string(chi_cap) + "] for n=" + std::to_string(cfg.herald_n));
        }
    }
    if (ini.has("herald", "target_fidelity")) {
        cfg.target_fidelity = ini.get_number("herald", "target_fidelity");
        if (!(*cfg.target_fidelity > 0.0 && *cfg.target_fidelity < 1.0)) {
            throw ConfigError(ini.name() + ": [herald] target_fidelity: must lie in (0, 1)");
        }
    }
    if (cfg.chi && cfg.target_fidelity) {
        throw ConfigError(ini.name() +
                          ": [herald]: chi and target_fidelity are mutually exclusive");
    }
    cfg.chi_max = ini.get_number("herald", "chi_max", chi_cap);
    if (!(cfg.chi_max > 0.0 && cfg.chi_max <= chi_cap)) {
        throw ConfigError(ini.name() + ": [herald] chi_max: must lie in (0, " +
                          std::to_string(chi_cap) + "] for n=" + std::to_string(cfg.herald_n));
    }

    if (ini.has("sweep", "sigma_f") || ini.has("sweep", "sigma_f_min")) {
        cfg.sweep_sigma_f = resolve_grid_axis(ini, "sweep", "sigma_f", /*geometric=*/true);
        for (double s : cfg.sweep_sigma_f) {
            if (!(s > 0.0)) {
                throw ConfigError(ini.name() + ": [sweep] sigma_f: widths must be positive");
            }
        }
    }
    cfg.sweep_include_delta = ini.get_bool("sweep", "include_delta", true);
    cfg.sweep_include_unfiltered = ini.get_bool("sweep", "include_unfiltered", true);

    if (ini.has("surface", "chi") || ini.has("surface", "chi_min")) {
        cfg.surface_chi = resolve_grid_axis(ini, "surface", "chi", /*geometric=*/false);
        for (double chi : cfg.surface_chi) {
            if (!(chi >= 0.0 && chi <= chi_cap)) {
                throw ConfigError(ini.name() + ": [surface] chi: values must lie in [0, " +
                                  std::to_string(chi_cap) + "]");
            }
        }
    }
    if (ini.has("surface", "eta") || ini.has("surface", "eta_min")) {
        cfg.surface_eta = resolve_grid_axis(ini, "surface", "eta", /*geometric=*/false);
        for (double eta : cfg.surface_eta) {
            if (!(eta >= 0.0 && eta <= 1.0)) {
                throw ConfigError(ini.name() + ": [surface] eta: values must lie in [0, 1]");
            }
        }
    }

    cfg.oracle.instances = ini.get_int("oracle", "instances", cfg.oracle.instances);
    cfg.oracle.tolerance = ini.get_number("oracle", "tolerance", cfg.oracle.tolerance);
    cfg.oracle.min_bins = ini.get_int("oracle", "min_bins", cfg.oracle.min_bins);
    cfg.oracle.max_bins = ini.get_int("oracle", "max_bins", cfg.oracle.max_bins);
    if (ini.has("oracle", "seed")) {
        const std::string seed = ini.get_string("oracle", "seed");
        try {
            std::size_t pos = 0;
            cfg.oracle.seed = std::stoull(seed, &pos);
            if (pos != seed.size()) {
                throw std::invalid_argument(seed);
            }
        } catch (const std::exception&) {
            throw ConfigError(ini.name() + ": [oracle] seed: '" + seed +
                              "' is not an unsigned integer");
        }
    }

    cfg.out_dir = ini.get_string("output", "dir", ".");

    ini.reject_unused();
    return cfg;
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
    const IniFile ini = IniFile::parse_file(path);
    const std::string base = std::filesystem::path(path).parent_path().string();
    return resolve(ini, base);
}

RunConfig run_config_from_string(const std::string& text, const std::string& name,
                                 const std::string& base_dir) {
    return resolve(IniFile::parse_string(text, name), base_dir);
}

}  // namespace pdcfock
