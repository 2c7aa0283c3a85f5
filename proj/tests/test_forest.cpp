#include <doctest.h>

#include <cmath>

#include "swagg/errors.hpp"
#include "swagg/forest.hpp"
#include "swagg/rng.hpp"

using namespace swagg;

TEST_CASE("planted feature dominates noise") {
    const int rows = 200;
    Rng rng(11);
    std::vector<std::string> labels;
    std::vector<std::vector<double>> columns(10, std::vector<double>(rows));
    for (int r = 0; r < rows; ++r) {
        const int y = r % 2;
        labels.push_back(std::to_string(y));
        columns[0][r] = y + rng.normal(0.0, 0.1);  // the signal column
        for (int f = 1; f < 10; ++f) columns[f][r] = rng.normal(0.0, 1.0);
    }
    const auto data = LabelData::from_strings(labels);
    const auto result = forest_importance(columns, data, 100, 5);
    CHECK(!result.uniform_fallback);
    CHECK(result.importance[0] > 0.5);
    double total = 0.0;
    for (double v : result.importance) {
        CHECK(v >= 0.0);
        total += v;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("all-constant features fall back to uniform importance") {
    std::vector<std::vector<double>> columns(4, std::vector<double>(20, 3.0));
    std::vector<std::string> labels;
    for (int r = 0; r < 20; ++r) labels.push_back(r % 2 ? "a" : "b");
    const auto result = forest_importance(columns, LabelData::from_strings(labels), 20, 1);
    CHECK(result.uniform_fallback);
    for (double v : result.importance) CHECK(v == doctest::Approx(0.25));
}

TEST_CASE("single-class labels fall back to uniform importance") {
    std::vector<std::vector<double>> columns(5, std::vector<double>(10));
    Rng rng(2);
    for (auto& col : columns)
        for (auto& v : col) v = rng.uniform();
    std::vector<std::string> labels(10, "only");
    const auto result = forest_importance(columns, LabelData::from_strings(labels), 10, 1);
    CHECK(result.uniform_fallback);
    for (double v : result.importance) CHECK(v == doctest::Approx(0.2));
}

TEST_CASE("fixed seed gives identical importances; different seeds differ") {
    const int rows = 100;
    Rng rng(4);
    std::vector<std::string> labels;
    std::vector<std::vector<double>> columns(6, std::vector<double>(rows));
    for (int r = 0; r < rows; ++r) {
        labels.push_back(std::to_string(r % 3));
        for (auto& col : columns) col[r] = rng.normal(r % 3, 1.0);
    }
    const auto data = LabelData::from_strings(labels);
    const auto a = forest_importance(columns, data, 50, 42, 2);
    const auto b = forest_importance(columns, data, 50, 42, 1);
    CHECK(a.importance == b.importance);  // thread count must not matter
    const auto c = forest_importance(columns, data, 50, 43);
    CHECK(a.importance != c.importance);
}

TEST_CASE("regression targets use variance splits") {
    const int rows = 200;
    Rng rng(8);
    std::vector<std::string> labels;
    std::vector<std::vector<double>> columns(5, std::vector<double>(rows));
    for (int r = 0; r < rows; ++r) {
        const double x = rng.uniform(-2.0, 2.0);
        columns[0][r] = x;
        for (int f = 1; f < 5; ++f) columns[f][r] = rng.normal(0.0, 1.0);
        labels.push_back(std::to_string(3.0 * x + rng.normal(0.0, 0.05)));
    }
    const auto data = LabelData::from_strings(labels);
    REQUIRE(data.kind == LabelKind::Regression);
    const auto result = forest_importance(columns, data, 60, 3);
    CHECK(result.importance[0] > 0.6);
}

TEST_CASE("many classes are handled") {
    const int rows = 300;
    Rng rng(15);
    std::vector<std::string> labels;
    std::vector<std::vector<double>> columns(4, std::vector<double>(rows));
    for (int r = 0; r < rows; ++r) {
        const int y = static_cast<int>(rng.below(60));  // 60 classes
        labels.push_back("c" + std::to_string(y));
        columns[0][r] = y * 0.5 + rng.normal(0.0, 0.05);
        for (int f = 1; f < 4; ++f) columns[f][r] = rng.normal(0.0, 1.0);
    }
    const auto data = LabelData::from_strings(labels);
    REQUIRE(data.kind == LabelKind::Classification);
    REQUIRE(data.n_classes > 50);
    const auto result = forest_importance(columns, data, 40, 9);
    CHECK(result.importance[0] > 0.5);
}

TEST_CASE("input validation") {
    std::vector<std::vector<double>> empty;
    std::vector<std::string> labels{"a", "b"};
    CHECK_THROWS_AS(forest_importance(empty, LabelData::from_strings(labels), 10, 1),
                    DomainError);
    std::vector<std::vector<double>> one_row(3, std::vector<double>(1, 0.0));
    CHECK_THROWS_AS(
        forest_importance(one_row, LabelData::from_strings({std::string("a")}), 10, 1),
        DomainError);
}
