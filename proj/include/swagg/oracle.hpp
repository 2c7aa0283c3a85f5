#pragma once

#include <cstdint>
#include <optional>

#include "swagg/rng.hpp"
#include "swagg/schema.hpp"

namespace swagg {

// Window index range: FullOnly keeps windows whose w buckets all lie on the
// grid; PartialStart also scans positions whose trailing window is cut off at
// the grid start.
enum class EdgePolicy { FullOnly, PartialStart };

const char* to_string(EdgePolicy e);
std::optional<EdgePolicy> edge_policy_from_string(const std::string& s);

// The real feature table: one row per entity, one column per
// <feature>__<window>__<aggregator>__<period>, NaN for entities with no signal.
struct FeatureTable {
    std::vector<std::string> entity_ids;
    std::vector<std::string> columns;
    std::vector<double> cells;  // row-major

    std::size_t index(std::size_t row, std::size_t col) const {
        return row * columns.size() + col;
    }
    double at(std::size_t row, std::size_t col) const { return cells[index(row, col)]; }
    std::string to_csv() const;
};

struct GenerateOptions {
    std::vector<int> periods;
    std::vector<WindowKind> kinds{WindowKind::Sum, WindowKind::Avg};
    std::vector<Aggregator> aggregators{Aggregator::Avg, Aggregator::Max, Aggregator::Min};
    std::int64_t freq_seconds = 86400;
    EdgePolicy edge_policy = EdgePolicy::FullOnly;
    int threads = 0;
};

// Brute-force method 1: materializes the resampled grid and slices every
// window frame. Cost grows with the bucket count.
FeatureTable generate_tf_timecut(const EntityTable& entities, const ActionTable& actions,
                                 const GenerateOptions& options);

// Brute-force method 2: walks the records sorted by (entity, time) and visits
// only window positions that contain a record. Cost grows with the record
// count. Produces output identical to generate_tf_timecut bit for bit.
FeatureTable generate_tf_sparse(const EntityTable& entities, const ActionTable& actions,
                                const GenerateOptions& options);

// One simulated chain realization; length steps - w + 1 full windows.
struct ChainSample {
    std::vector<double> values;
    std::vector<int> counts;  // S(W) per window
    std::uint64_t seed = 0;
    double record_min = 0.0;  // extremes of the generated record values
    double record_max = 0.0;
    std::int64_t record_count = 0;
};

ChainSample simulate_chain(WindowKind kind, const AssumptionParams& params, int w, int steps,
                           std::uint64_t seed);

struct ChainAggregates {
    double avg = 0.0;
    double max = 0.0;
    double min = 0.0;
    std::int64_t populated = 0;  // windows with S > 0
};

// Aggregates over populated windows only; empty when every window is empty.
std::optional<ChainAggregates> aggregate_chain(const ChainSample& sample);

struct HistogramBin {
    double lo = 0.0;
    double hi = 0.0;
    double density = 0.0;     // empirical, windows with S = 0 dropped
    int component_count = 0;  // distinct S values observed inside the bin
    double mixture_density = 0.0;
};

// Empirical density of the populated window values against the stationary
// mixture prediction (zero component dropped, remaining weights renormalized).
std::vector<HistogramBin> chain_histogram(const ChainSample& sample,
                                          const StationaryMixture& mixture, int bins);

}  // namespace swagg
