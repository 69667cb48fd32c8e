#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "pdcfock/dispersion.hpp"

using namespace pdcfock;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("bundled slowness table loads and looks up") {
    const SlownessTable table =
        load_slowness_table(std::string(PDCFOCK_SOURCE_DIR) + "/data/ktp_group_slowness.txt");
    REQUIRE(table.entries.size() == 12);

    CHECK(group_slowness(table, "y", 800.0) == doctest::Approx(6.022377e-9).epsilon(1e-12));
    CHECK(group_slowness(table, "z", 800.0) == doctest::Approx(6.375317e-9).epsilon(1e-12));
    CHECK(group_slowness(table, "y", 1576.0) == doctest::Approx(5.879778e-9).epsilon(1e-12));

    // Matching tolerates sub-milli-nanometre noise in the requested wavelength.
    CHECK(group_slowness(table, "z", 1930.0 + 5e-4) ==
          doctest::Approx(6.172241e-9).epsilon(1e-12));

    CHECK_THROWS(group_slowness(table, "x", 800.0));
    CHECK_THROWS(group_slowness(table, "y", 801.0));
}

TEST_CASE("slowness table parse errors carry file and line") {
    const auto bad = write_temp("pdcfock_bad_slowness.txt", "y 800 6.0e-9\nz oops 6.3e-9\n");
    try {
        load_slowness_table(bad.string());
        FAIL("expected a parse failure");
    } catch (const std::exception& e) {
        const std::string msg = e.what();
        CHECK(msg.find(":2") != std::string::npos);
    }
    std::filesystem::remove(bad);

    const auto empty = write_temp("pdcfock_empty_slowness.txt", "# only comments\n");
    CHECK_THROWS(load_slowness_table(empty.string()));
    std::filesystem::remove(empty);

    CHECK_THROWS(load_slowness_table("/nonexistent/slowness.txt"));

    const auto extra = write_temp("pdcfock_extra_slowness.txt", "y 800 6.0e-9 stray\n");
    CHECK_THROWS(load_slowness_table(extra.string()));
    std::filesystem::remove(extra);

    const auto negative = write_temp("pdcfock_neg_slowness.txt", "y 800 -6.0e-9\n");
    CHECK_THROWS(load_slowness_table(negative.string()));
    std::filesystem::remove(negative);
}
