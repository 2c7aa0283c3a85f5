#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <fstream>

#include "swagg/config.hpp"
#include "swagg/errors.hpp"

using namespace swagg;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& content) {
        char name[] = "/tmp/swagg_cfg_XXXXXX";
        const int fd = mkstemp(name);
        REQUIRE(fd >= 0);
        close(fd);
        path = name;
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("period parsing sorts and dedups") {
    CHECK(parse_periods("30,7,15,7") == std::vector<int>{7, 15, 30});
    CHECK_THROWS_AS(parse_periods("0,5"), ConfigError);
    CHECK_THROWS_AS(parse_periods("x"), ConfigError);
    CHECK_THROWS_AS(parse_periods(""), ConfigError);
}

TEST_CASE("window and aggregator parsing") {
    CHECK(parse_windows("sum,avg") ==
          std::vector<WindowKind>{WindowKind::Sum, WindowKind::Avg});
    CHECK(parse_windows("avg") == std::vector<WindowKind>{WindowKind::Avg});
    CHECK_THROWS_AS(parse_windows("median"), ConfigError);
    CHECK(parse_aggregators("max,min") ==
          std::vector<Aggregator>{Aggregator::Max, Aggregator::Min});
    CHECK_THROWS_AS(parse_aggregators("sum"), ConfigError);
}

TEST_CASE("config file round trip") {
    const TempFile file(
        "# comment line\n"
        "freq_seconds = 3600\n"
        "periods = 7,15,30,60\n"
        "assumption = poisson\n"
        "m_cap = 10\n"
        "rho = 0.9\n"
        "rho_l = 0.05\n"
        "rho_r = 0.95\n"
        "ensembles = 10\n"
        "trees = 100\n"
        "seed = 7\n");
    RunConfig config;
    apply_config_file(config, file.path);
    CHECK(config.freq_seconds == 3600);
    CHECK(config.periods == std::vector<int>{7, 15, 30, 60});
    REQUIRE(config.assumption.has_value());
    CHECK(*config.assumption == Assumption::Poisson);
    REQUIRE(config.m_cap.has_value());
    CHECK(*config.m_cap == 10);
    CHECK(config.seed == 7);
    CHECK_NOTHROW(config.validate());
}

TEST_CASE("unknown keys and malformed lines are rejected") {
    const TempFile bad_key("nonsense = 1\n");
    RunConfig config;
    CHECK_THROWS_AS(apply_config_file(config, bad_key.path), ConfigError);
    const TempFile bad_line("rho 0.9\n");
    CHECK_THROWS_AS(apply_config_file(config, bad_line.path), ConfigError);
}

TEST_CASE("validation catches bad parameter combinations") {
    RunConfig config;
    CHECK_NOTHROW(config.validate());
    auto bad = config;
    bad.rho = 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = config;
    bad.rho_l = 0.95;
    bad.rho_r = 0.05;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = config;
    bad.ensembles = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = config;
    bad.method = "magic";
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("defaults follow the evaluation protocol") {
    const RunConfig config;
    CHECK(config.rho == 0.9);
    CHECK(config.rho_l == 0.05);
    CHECK(config.rho_r == 0.95);
    CHECK(config.trees == 100);
    CHECK(config.ensembles == 10);
}
