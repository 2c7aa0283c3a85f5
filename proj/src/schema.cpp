#include "swagg/schema.hpp"

#include "swagg/errors.hpp"

namespace swagg {

const char* to_string(Aggregator a) {
    switch (a) {
        case Aggregator::Avg: return "avg";
        case Aggregator::Max: return "max";
        case Aggregator::Min: return "min";
    }
    return "?";
}

std::optional<Aggregator> aggregator_from_string(const std::string& s) {
    if (s == "avg") return Aggregator::Avg;
    if (s == "max") return Aggregator::Max;
    if (s == "min") return Aggregator::Min;
    return std::nullopt;
}

GridSpec GridSpec::from_table(const ActionTable& actions, std::int64_t freq_seconds) {
    GridSpec grid;
    grid.freq = freq_seconds;
    grid.t0 = actions.min_ts();
    grid.horizon = actions.max_ts();
    return grid;
}

std::string column_name(const std::string& feature, WindowKind kind, Aggregator agg, int period) {
    return feature + "__" + to_string(kind) + "__" + to_string(agg) + "__" +
           std::to_string(period);
}

FeatureSchema FeatureSchema::build(std::vector<std::string> features,
                                   const std::vector<WindowKind>& kinds,
                                   const std::vector<Aggregator>& aggregators,
                                   const std::vector<int>& periods) {
    if (features.empty()) throw SchemaError("no feature columns");
    if (kinds.empty() || aggregators.empty() || periods.empty())
        throw ConfigError("windows, aggregators and periods must be non-empty");
    FeatureSchema schema;
    schema.feature_names = std::move(features);
    for (int f = 0; f < static_cast<int>(schema.feature_names.size()); ++f)
        for (WindowKind kind : kinds)
            for (Aggregator agg : aggregators)
                for (int w : periods) schema.columns.push_back({f, kind, agg, w});
    return schema;
}

std::vector<std::string> FeatureSchema::column_names() const {
    std::vector<std::string> names;
    names.reserve(columns.size());
    for (const auto& col : columns)
        names.push_back(column_name(feature_names[col.feature], col.kind, col.agg, col.period));
    return names;
}

}  // namespace swagg
