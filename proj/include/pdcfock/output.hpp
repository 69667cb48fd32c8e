#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pdcfock {

// Version stamp embedded in every data file's metadata sidecar.
inline constexpr const char* tool_version = "1.0.0";

// FNV-1a over raw bytes; used to fingerprint the config text that produced an
// output so reruns with an edited config never silently overwrite old data.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hash_hex16(std::uint64_t h);

// Full precision (17 significant digits, round-trip safe) for data files;
// brief (4 significant digits) for human-facing summaries.
std::string format_full(double v);
std::string format_brief(double v);

// Writes content to dir/filename, creating dir if needed.  If the target
// already exists and does not embed config_hash (every file we emit carries
// it), the write is diverted to a hash-suffixed filename instead, unless
// force is set.  Returns the path actually written.
std::string write_guarded(const std::string& dir, const std::string& filename,
                          const std::string& content, const std::string& config_hash, bool force);

}  // namespace pdcfock
