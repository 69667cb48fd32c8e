#pragma once

#include <string>
#include <vector>

namespace pdcfock {

// One row of a group-slowness table: polarization axis label, carrier
// wavelength, and dk/domega at that carrier.
struct SlownessEntry {
    std::string axis;
    double wavelength_nm = 0.0;
    double slowness = 0.0;  // s/m
};

struct SlownessTable {
    std::vector<SlownessEntry> entries;
};

// Parse a plain-text table with one "axis wavelength_nm slowness_s_per_m"
// triple per line; '#' starts a comment, blank lines are skipped.
// Throws std::runtime_error with file:line context on malformed rows.
SlownessTable load_slowness_table(const std::string& path);

// Look up the slowness for an axis at a wavelength (match within 1e-3 nm).
// Throws std::runtime_error listing the available rows when absent.
double group_slowness(const SlownessTable& table, const std::string& axis, double wavelength_nm);

}  // namespace pdcfock
