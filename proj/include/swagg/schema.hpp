#pragma once

#include <string>
#include <vector>

#include "swagg/tables.hpp"
#include "swagg/window_model.hpp"

namespace swagg {

enum class Aggregator { Avg, Max, Min };

const char* to_string(Aggregator a);
std::optional<Aggregator> aggregator_from_string(const std::string& s);

// Shared resampling grid; every entity uses the same t0/horizon so the bucket
// count is uniform across the table.
struct GridSpec {
    Timestamp t0 = 0;
    Timestamp horizon = 0;
    std::int64_t freq = 86400;

    int ell() const { return static_cast<int>((horizon - t0) / freq + 1); }
    static GridSpec from_table(const ActionTable& actions, std::int64_t freq_seconds);
};

// One output column of the feature table.
struct FeatureColumn {
    int feature = 0;  // index into feature names
    WindowKind kind = WindowKind::Sum;
    Aggregator agg = Aggregator::Avg;
    int period = 1;
};

std::string column_name(const std::string& feature, WindowKind kind, Aggregator agg, int period);

// Canonical column order: feature, then window kind, then aggregator, then period.
struct FeatureSchema {
    std::vector<std::string> feature_names;
    std::vector<FeatureColumn> columns;

    static FeatureSchema build(std::vector<std::string> features,
                               const std::vector<WindowKind>& kinds,
                               const std::vector<Aggregator>& aggregators,
                               const std::vector<int>& periods);
    std::vector<std::string> column_names() const;
};

}  // namespace swagg
