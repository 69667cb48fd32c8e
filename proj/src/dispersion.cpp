#include "pdcfock/dispersion.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pdcfock {

SlownessTable load_slowness_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open slowness table: " + path);
    }

    SlownessTable table;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream row(line);
        SlownessEntry entry;
        if (!(row >> entry.axis)) {
            continue;  // blank or comment-only line
        }
        std::string rest;
        if (!(row >> entry.wavelength_nm >> entry.slowness) || (row >> rest)) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected 'axis wavelength_nm slowness_s_per_m'");
        }
        if (!(entry.wavelength_nm > 0.0) || !(entry.slowness > 0.0)) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": wavelength and slowness must be positive");
        }
        table.entries.push_back(std::move(entry));
    }
    if (table.entries.empty()) {
        throw std::runtime_error("slowness table has no data rows: " + path);
    }
    return table;
}

double group_slowness(const SlownessTable& table, const std::string& axis, double wavelength_nm) {
    const SlownessEntry* best = nullptr;
    double best_gap = 0.0;
    for (const auto& entry : table.entries) {
        if (entry.axis != axis) {
            continue;
        }
        const double gap = std::abs(entry.wavelength_nm - wavelength_nm);
        if (best == nullptr || gap < best_gap) {
            best = &entry;
            best_gap = gap;
        }
    }
    if (best != nullptr && best_gap <= 1e-3) {
        return best->slowness;
    }

    std::ostringstream msg;
    msg << "no slowness entry for axis '" << axis << "' at " << wavelength_nm
        << " nm; table has:";
    for (const auto& entry : table.entries) {
        msg << ' ' << entry.axis << '@' << entry.wavelength_nm;
    }
    throw std::runtime_error(msg.str());
}

}  // namespace pdcfock
