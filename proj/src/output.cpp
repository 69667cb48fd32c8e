#include "pdcfock/output.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pdcfock {

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hash_hex16(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string format_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_brief(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

namespace {

bool embeds_hash(const std::filesystem::path& path, const std::string& config_hash) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return false;
    }
    std::string head(4096, '\0');
    in.read(head.data(), static_cast<std::streamsize>(head.size()));
    head.resize(static_cast<std::size_t>(in.gcount()));
    return head.find(config_hash) != std::string::npos;
}

}  // namespace

std::string write_guarded(const std::string& dir, const std::string& filename,
                          const std::string& content, const std::string& config_hash, bool force) {
    namespace fs = std::filesystem;
    const fs::path base = dir.empty() ? fs::path(".") : fs::path(dir);
    fs::create_directories(base);

    fs::path target = base / filename;
    if (!force && fs::exists(target) && !embeds_hash(target, config_hash)) {
        const fs::path stem = fs::path(filename).stem();
        const std::string ext = fs::path(filename).extension().string();
        target = base / (stem.string() + "_" + config_hash + ext);
    }

    std::ofstream out(target, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write output file: " + target.string());
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
        throw std::runtime_error("short write on output file: " + target.string());
    }
    return target.string();
}

}  // namespace pdcfock
