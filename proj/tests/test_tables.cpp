#include <doctest.h>

#include <algorithm>
#include <random>

#include "swagg/csv.hpp"
#include "swagg/errors.hpp"
#include "swagg/tables.hpp"

using namespace swagg;

namespace {
const std::int64_t kDay = 86400;
}

TEST_CASE("resample places single record and pads empty buckets") {
    const auto col = resample({{0, 5.0}}, 0, kDay, 2 * kDay);
    CHECK(col.ell() == 3);
    CHECK(col.counts == std::vector<int>{1, 0, 0});
    REQUIRE(col.values[0].size() == 1);
    CHECK(col.values[0][0] == 5.0);
    CHECK(col.values[1].empty());
}

TEST_CASE("resample collapses same-bucket records") {
    const auto col = resample({{0, 1.0}, {1, 2.0}}, 0, kDay, 1);
    CHECK(col.ell() == 1);
    CHECK(col.counts[0] == 2);
}

TEST_CASE("resample daily grid, one record per day over 3 days") {
    const auto col = resample({{0, 1.0}, {kDay, 1.0}, {2 * kDay, 1.0}}, 0, kDay, 2 * kDay);
    CHECK(col.ell() == 3);
    CHECK(col.counts == std::vector<int>{1, 1, 1});
}

TEST_CASE("resample drops out-of-range records with a count") {
    const auto col = resample({{-1, 9.0}, {0, 1.0}, {3 * kDay, 9.0}}, 0, kDay, 2 * kDay);
    CHECK(col.dropped == 2);
    CHECK(col.total_records() == 1);
}

TEST_CASE("resample errors on empty input") {
    CHECK_THROWS_AS(resample({{-5, 1.0}}, 0, kDay, kDay), EmptyColumnError);
    CHECK_THROWS_AS(resample({}, 0, kDay, kDay), EmptyColumnError);
}

TEST_CASE("resample is order-independent") {
    std::vector<std::pair<Timestamp, double>> records;
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i)
        records.emplace_back(static_cast<Timestamp>(rng() % (10 * kDay)),
                             static_cast<double>(rng() % 1000) / 7.0);
    const auto base = resample(records, 0, kDay, 10 * kDay);
    std::shuffle(records.begin(), records.end(), rng);
    const auto shuffled = resample(records, 0, kDay, 10 * kDay);
    CHECK(base.counts == shuffled.counts);
    CHECK(base.values == shuffled.values);
}

TEST_CASE("fit auto-selects always for constant singleton buckets") {
    ResampledColumn col;
    col.counts = {1, 1, 1};
    col.values = {{10.0}, {10.0}, {10.0}};
    col.freq = kDay;
    const auto params = fit_parameters(col);
    CHECK(params.kind == Assumption::Always);
    CHECK(params.mu == doctest::Approx(10.0));
    CHECK(params.sigma == 0.0);
    CHECK(params.p == 1.0);
    CHECK(params.m == 1);
}

TEST_CASE("fit binomial: 3 singletons out of 10 buckets") {
    ResampledColumn col;
    col.counts.assign(10, 0);
    col.values.assign(10, {});
    col.counts[1] = col.counts[4] = col.counts[8] = 1;
    col.values[1] = {1.0};
    col.values[4] = {2.0};
    col.values[8] = {3.0};
    col.freq = kDay;
    const auto params = fit_parameters(col);
    CHECK(params.kind == Assumption::Binomial);
    CHECK(params.p == doctest::Approx(0.3));
    CHECK(params.mu == doctest::Approx(2.0));
    CHECK(params.sigma == doctest::Approx(1.0));
    CHECK(params.c_min == 1.0);
    CHECK(params.c_max == 3.0);
}

TEST_CASE("fit poisson: counts [2,0,1]") {
    ResampledColumn col;
    col.counts = {2, 0, 1};
    col.values = {{4.0, 6.0}, {}, {5.0}};
    col.freq = kDay;
    const auto params = fit_parameters(col);
    CHECK(params.kind == Assumption::Poisson);
    CHECK(params.p == doctest::Approx(1.0));
    CHECK(params.m == 2);
    CHECK(params.mu == doctest::Approx(5.0));
}

TEST_CASE("fit override violations") {
    ResampledColumn col;
    col.counts = {1, 0, 1};
    col.values = {{1.0}, {}, {2.0}};
    CHECK_THROWS_AS(fit_parameters(col, Assumption::Always), AssumptionViolationError);
    col.counts = {2, 1};
    col.values = {{1.0, 1.5}, {2.0}};
    CHECK_THROWS_AS(fit_parameters(col, Assumption::Binomial), AssumptionViolationError);
    CHECK_NOTHROW(fit_parameters(col, Assumption::Poisson));
}

TEST_CASE("m_cap percentile keeps one outlier bucket from exploding m") {
    ResampledColumn col;
    col.counts.assign(2000, 1);
    col.values.assign(2000, {1.0});
    col.counts[5] = 50;  // single outlier
    col.values[5].assign(50, 1.0);
    const auto params = fit_parameters(col);
    CHECK(params.kind == Assumption::Poisson);
    CHECK(params.m < 50);
    const auto capped = fit_parameters(col, std::nullopt, 3);
    CHECK(capped.m == 3);
}

TEST_CASE("single record fits with sigma zero") {
    ResampledColumn col;
    col.counts = {0, 1, 0};
    col.values = {{}, {4.25}, {}};
    col.freq = kDay;
    const auto params = fit_parameters(col);
    CHECK(params.kind == Assumption::Binomial);
    CHECK(params.sigma == 0.0);
    CHECK(params.mu == 4.25);
    CHECK(params.c_min == 4.25);
    CHECK(params.c_max == 4.25);
}

TEST_CASE("fit is idempotent on re-ingest") {
    std::vector<std::pair<Timestamp, double>> records{
        {0, 1.5}, {kDay, 2.5}, {kDay + 1, 0.25}, {5 * kDay, -3.0}};
    const auto a = fit_parameters(resample(records, 0, kDay, 6 * kDay));
    const auto b = fit_parameters(resample(records, 0, kDay, 6 * kDay));
    CHECK(a.mu == b.mu);
    CHECK(a.sigma == b.sigma);
    CHECK(a.p == b.p);
    CHECK(a.kind == b.kind);
}

TEST_CASE("timestamp parsing: epoch and ISO forms agree") {
    CHECK(parse_timestamp("0") == 0);
    CHECK(parse_timestamp("86400") == kDay);
    CHECK(parse_timestamp("1970-01-01") == 0);
    CHECK(parse_timestamp("1970-01-02") == kDay);
    CHECK(parse_timestamp("1970-01-02T00:00:30") == kDay + 30);
    CHECK(parse_timestamp("1970-01-02 00:00:30Z") == kDay + 30);
    CHECK(parse_timestamp("2020-03-01") == 18322 * kDay);
    CHECK_THROWS_AS(parse_timestamp("not-a-time"), SchemaError);
    CHECK_THROWS_AS(parse_timestamp("1970-13-01"), SchemaError);
}

TEST_CASE("entity table rejects duplicate ids") {
    EntityTable table;
    table.add("a", "0");
    CHECK_THROWS_AS(table.add("a", "1"), SchemaError);
}

TEST_CASE("label kind detection") {
    CHECK(detect_label_kind({"cat", "dog", "cat"}) == LabelKind::Classification);
    CHECK(detect_label_kind({"0", "1", "0", "1"}) == LabelKind::Classification);
    std::vector<std::string> continuous;
    for (int i = 0; i < 100; ++i) continuous.push_back(std::to_string(i * 0.37));
    CHECK(detect_label_kind(continuous) == LabelKind::Regression);
}

TEST_CASE("csv line splitting handles quotes") {
    const auto fields = split_csv_line("a,\"b,c\",\"d\"\"e\",");
    REQUIRE(fields.size() == 4);
    CHECK(fields[0] == "a");
    CHECK(fields[1] == "b,c");
    CHECK(fields[2] == "d\"e");
    CHECK(fields[3].empty());
}
