#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdcfock/filtering.hpp"
#include "pdcfock/oracle_suite.hpp"
#include "pdcfock/source.hpp"
#include "pdcfock/units.hpp"

namespace pdcfock {

// Schema or syntax problem in a run configuration; messages carry
// file:line anchors where available. Mapped to exit code 1 by the CLI.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Minimal INI reader: [section] headers, key = value pairs, '#' or ';'
// comments, whitespace-insensitive. Keys are tracked so unknown (misspelled)
// entries can be rejected after the schema has consumed what it knows.
class IniFile {
  public:
    static IniFile parse_file(const std::string& path);
    static IniFile parse_string(const std::string& text, const std::string& name);

    bool has(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_number(const std::string& section, const std::string& key) const;
    double get_number(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    // Comma- or space-separated list of numbers.
    std::vector<double> get_number_list(const std::string& section, const std::string& key) const;

    // Throws ConfigError naming every key that was never read.
    void reject_unused() const;

    const std::string& name() const { return name_; }
    const std::string& text() const { return text_; }

  private:
    struct Entry {
        std::string value;
        int line = 0;
        mutable bool used = false;
    };

    [[noreturn]] void fail(const std::string& section, const std::string& key,
                           const std::string& what) const;
    const Entry* find(const std::string& section, const std::string& key) const;
    const Entry& require(const std::string& section, const std::string& key) const;

    std::string name_;
    std::string text_;  // raw bytes, kept for hashing
    std::map<std::pair<std::string, std::string>, Entry> entries_;
};

// Fully resolved run request. Sections not needed by a verb may be absent.
struct SourceBundle {
    PumpSpec pump;
    CrystalSpec crystal;
    PmfKind pmf = PmfKind::Sinc;
};

struct RunConfig {
    std::optional<SourceBundle> source;
    std::optional<GridSpec> grid;

    double schmidt_cutoff = 0.0;
    int mode_export_count = 5;

    FilterSpec filter;  // [filter] section; defaults to no filter, eta = 1

    int herald_n = 1;
    std::optional<double> chi;              // exactly one of chi / target present
    std::optional<double> target_fidelity;  // for herald solve and sweeps
    double chi_max = 0.0;                   // 0 = default for herald_n

    std::vector<double> sweep_sigma_f;
    bool sweep_include_delta = true;
    bool sweep_include_unfiltered = true;

    std::vector<double> surface_chi;
    std::vector<double> surface_eta;

    OracleSuiteConfig oracle;

    std::string out_dir = ".";
    std::string config_name;  // config file stem, used to name outputs
    std::string config_text;  // raw config bytes (hash input)
};

// Parse and validate a config file; paths inside the file resolve relative to
// its directory. All schema violations throw ConfigError.
RunConfig load_run_config(const std::string& path);

// Same from an in-memory string (tests); `name` anchors error messages and
// output naming, `base_dir` resolves relative paths.
RunConfig run_config_from_string(const std::string& text, const std::string& name,
                                 const std::string& base_dir);

}  // namespace pdcfock
