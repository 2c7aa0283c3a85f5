#include "swagg/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "swagg/csv.hpp"
#include "swagg/errors.hpp"
#include "swagg/parallel.hpp"

namespace swagg {

const char* to_string(EdgePolicy e) {
    return e == EdgePolicy::FullOnly ? "full-only" : "partial-start";
}

std::optional<EdgePolicy> edge_policy_from_string(const std::string& s) {
    if (s == "full-only" || s == "full") return EdgePolicy::FullOnly;
    if (s == "partial-start" || s == "partial") return EdgePolicy::PartialStart;
    return std::nullopt;
}

std::string FeatureTable::to_csv() const {
    std::string out = "entity_id";
    for (const auto& col : columns) {
        out += ',';
        out += csv_escape(col);
    }
    out += '\n';
    for (std::size_t row = 0; row < entity_ids.size(); ++row) {
        out += csv_escape(entity_ids[row]);
        for (std::size_t col = 0; col < columns.size(); ++col) {
            out += ',';
            out += format_double(at(row, col));
        }
        out += '\n';
    }
    return out;
}

namespace {

// Streams window values in ascending position order; both brute-force methods
// push through this so aggregates are computed by the same operations.
struct AggregateAccumulator {
    double sum = 0.0;
    std::int64_t count = 0;
    double max = -std::numeric_limits<double>::infinity();
    double min = std::numeric_limits<double>::infinity();

    void push(double window_value) {
        sum += window_value;
        ++count;
        max = std::max(max, window_value);
        min = std::min(min, window_value);
    }
    double result(Aggregator agg) const {
        if (count == 0) return nan_value();
        switch (agg) {
            case Aggregator::Avg: return sum / static_cast<double>(count);
            case Aggregator::Max: return max;
            case Aggregator::Min: return min;
        }
        return nan_value();
    }
};

struct ColumnLayout {
    FeatureSchema schema;
    std::size_t n_kinds, n_aggs, n_periods;
    std::vector<WindowKind> kinds;
    std::vector<Aggregator> aggs;
    std::vector<int> periods;

    std::size_t column(std::size_t feature, std::size_t ik, std::size_t ia,
                       std::size_t ip) const {
        return ((feature * n_kinds + ik) * n_aggs + ia) * n_periods + ip;
    }
};

ColumnLayout make_layout(const ActionTable& actions, const GenerateOptions& options) {
    ColumnLayout layout;
    layout.schema = FeatureSchema::build(actions.features, options.kinds, options.aggregators,
                                         options.periods);
    layout.kinds = options.kinds;
    layout.aggs = options.aggregators;
    layout.periods = options.periods;
    layout.n_kinds = options.kinds.size();
    layout.n_aggs = options.aggregators.size();
    layout.n_periods = options.periods.size();
    return layout;
}

FeatureTable empty_table(const EntityTable& entities, const ColumnLayout& layout) {
    FeatureTable table;
    table.entity_ids = entities.ids;
    table.columns = layout.schema.column_names();
    table.cells.assign(entities.size() * table.columns.size(), nan_value());
    return table;
}

// Sorted (bucket, value) records of one entity/feature column.
struct SparseColumn {
    std::vector<int> bucket;
    std::vector<double> value;
};

std::vector<std::vector<SparseColumn>> group_sorted(const EntityTable& entities,
                                                    const ActionTable& actions,
                                                    const GridSpec& grid) {
    const auto n_features = actions.features.size();
    std::vector<std::vector<std::vector<std::pair<Timestamp, double>>>> raw(
        n_features,
        std::vector<std::vector<std::pair<Timestamp, double>>>(entities.size()));
    for (std::size_t row = 0; row < actions.rows(); ++row) {
        const Timestamp ts = actions.ts[row];
        if (ts < grid.t0 || ts > grid.horizon) continue;
        for (std::size_t f = 0; f < n_features; ++f) {
            const double v = actions.values[f][row];
            if (std::isnan(v)) continue;
            raw[f][static_cast<std::size_t>(actions.entity[row])].emplace_back(ts, v);
        }
    }
    std::vector<std::vector<SparseColumn>> grouped(
        n_features, std::vector<SparseColumn>(entities.size()));
    for (std::size_t f = 0; f < n_features; ++f) {
        for (std::size_t e = 0; e < entities.size(); ++e) {
            auto& records = raw[f][e];
            std::sort(records.begin(), records.end());  // canonical (ts, value) order
            auto& col = grouped[f][e];
            col.bucket.reserve(records.size());
            col.value.reserve(records.size());
            for (const auto& [ts, v] : records) {
                col.bucket.push_back(static_cast<int>((ts - grid.t0) / grid.freq));
                col.value.push_back(v);
            }
        }
    }
    return grouped;
}

}  // namespace

FeatureTable generate_tf_timecut(const EntityTable& entities, const ActionTable& actions,
                                 const GenerateOptions& options) {
    const ColumnLayout layout = make_layout(actions, options);
    FeatureTable table = empty_table(entities, layout);
    if (actions.rows() == 0) return table;
    const GridSpec grid = GridSpec::from_table(actions, options.freq_seconds);
    const int ell = grid.ell();
    const auto grouped = group_sorted(entities, actions, grid);
    const auto n_features = actions.features.size();

    parallel_for(entities.size() * n_features, options.threads, [&](std::size_t task) {
        const std::size_t entity = task / n_features;
        const std::size_t feature = task % n_features;
        const SparseColumn& sparse = grouped[feature][entity];
        if (sparse.bucket.empty()) return;

        // Materialize the resampled grid for this column.
        std::vector<int> counts(ell, 0);
        std::vector<std::vector<double>> values(ell);
        for (std::size_t r = 0; r < sparse.bucket.size(); ++r) {
            ++counts[static_cast<std::size_t>(sparse.bucket[r])];
            values[static_cast<std::size_t>(sparse.bucket[r])].push_back(sparse.value[r]);
        }

        for (std::size_t ip = 0; ip < layout.n_periods; ++ip) {
            const int w = layout.periods[ip];
            std::vector<AggregateAccumulator> acc(layout.n_kinds);
            const int first_end = options.edge_policy == EdgePolicy::FullOnly ? w - 1 : 0;
            for (int end = first_end; end < ell; ++end) {
                const int start = std::max(0, end - w + 1);
                int window_count = 0;
                double window_sum = 0.0;
                for (int b = start; b <= end; ++b) {
                    window_count += counts[static_cast<std::size_t>(b)];
                    for (double v : values[static_cast<std::size_t>(b)]) window_sum += v;
                }
                if (window_count == 0) continue;  // empty window is not accounted
                for (std::size_t ik = 0; ik < layout.n_kinds; ++ik) {
                    const double window_value = layout.kinds[ik] == WindowKind::Sum
                                                    ? window_sum
                                                    : window_sum / window_count;
                    acc[ik].push(window_value);
                }
            }
            for (std::size_t ik = 0; ik < layout.n_kinds; ++ik)
                for (std::size_t ia = 0; ia < layout.n_aggs; ++ia)
                    table.cells[table.index(entity, layout.column(feature, ik, ia, ip))] =
                        acc[ik].result(layout.aggs[ia]);
        }
    });
    return table;
}

FeatureTable generate_tf_sparse(const EntityTable& entities, const ActionTable& actions,
                                const GenerateOptions& options) {
    const ColumnLayout layout = make_layout(actions, options);
    FeatureTable table = empty_table(entities, layout);
    if (actions.rows() == 0) return table;
    const GridSpec grid = GridSpec::from_table(actions, options.freq_seconds);
    const int ell = grid.ell();
    const auto grouped = group_sorted(entities, actions, grid);
    const auto n_features = actions.features.size();

    parallel_for(entities.size() * n_features, options.threads, [&](std::size_t task) {
        const std::size_t entity = task / n_features;
        const std::size_t feature = task % n_features;
        const SparseColumn& col = grouped[feature][entity];
        if (col.bucket.empty()) return;
        const auto n_records = col.bucket.size();

        for (std::size_t ip = 0; ip < layout.n_periods; ++ip) {
            const int w = layout.periods[ip];
            std::vector<AggregateAccumulator> acc(layout.n_kinds);
            const int first_end = options.edge_policy == EdgePolicy::FullOnly ? w - 1 : 0;
            std::size_t lo = 0;
            std::size_t hi = 0;
            int end = std::max(first_end, col.bucket.front());
            while (end < ell) {
                const int start = std::max(0, end - w + 1);
                while (lo < n_records && col.bucket[lo] < start) ++lo;
                if (hi < lo) hi = lo;
                while (hi < n_records && col.bucket[hi] <= end) ++hi;
                if (hi == lo) {
                    if (hi >= n_records) break;  // no record ever enters again
                    end = std::max(end + 1, col.bucket[hi]);
                    continue;
                }
                // Same summation order as the timecut slice: records sorted by
                // (bucket, timestamp, value).
                double window_sum = 0.0;
                for (std::size_t r = lo; r < hi; ++r) window_sum += col.value[r];
                const int window_count = static_cast<int>(hi - lo);
                for (std::size_t ik = 0; ik < layout.n_kinds; ++ik) {
                    const double window_value = layout.kinds[ik] == WindowKind::Sum
                                                    ? window_sum
                                                    : window_sum / window_count;
                    acc[ik].push(window_value);
                }
                ++end;
            }
            for (std::size_t ik = 0; ik < layout.n_kinds; ++ik)
                for (std::size_t ia = 0; ia < layout.n_aggs; ++ia)
                    table.cells[table.index(entity, layout.column(feature, ik, ia, ip))] =
                        acc[ik].result(layout.aggs[ia]);
        }
    });
    return table;
}

ChainSample simulate_chain(WindowKind kind, const AssumptionParams& params, int w, int steps,
                           std::uint64_t seed) {
    if (w < 1 || steps < w) throw DomainError("simulate_chain needs steps >= w >= 1");
    Rng rng(seed);
    ChainSample sample;
    sample.seed = seed;
    sample.record_min = std::numeric_limits<double>::infinity();
    sample.record_max = -std::numeric_limits<double>::infinity();
    sample.values.reserve(static_cast<std::size_t>(steps - w + 1));
    sample.counts.reserve(static_cast<std::size_t>(steps - w + 1));

    std::vector<int> ring_counts(static_cast<std::size_t>(w), 0);
    std::vector<double> ring_sums(static_cast<std::size_t>(w), 0.0);

    for (int i = 0; i < steps; ++i) {
        int arrivals = 0;
        switch (params.kind) {
            case Assumption::Always: arrivals = 1; break;
            case Assumption::Binomial: arrivals = rng.bernoulli(params.p) ? 1 : 0; break;
            case Assumption::Poisson:
                arrivals = std::min(rng.poisson(params.p), params.m);
                break;
        }
        double bucket_sum = 0.0;
        for (int k = 0; k < arrivals; ++k) {
            const double v = rng.normal(params.mu, params.sigma);
            bucket_sum += v;
            sample.record_min = std::min(sample.record_min, v);
            sample.record_max = std::max(sample.record_max, v);
            ++sample.record_count;
        }
        const auto slot = static_cast<std::size_t>(i % w);
        ring_counts[slot] = arrivals;
        ring_sums[slot] = bucket_sum;
        if (i >= w - 1) {
            int count = 0;
            double sum = 0.0;
            for (int k = 0; k < w; ++k) {
                count += ring_counts[static_cast<std::size_t>(k)];
                sum += ring_sums[static_cast<std::size_t>(k)];
            }
            sample.counts.push_back(count);
            if (count == 0)
                sample.values.push_back(0.0);
            else
                sample.values.push_back(kind == WindowKind::Sum ? sum : sum / count);
        }
    }
    if (sample.record_count == 0) {
        sample.record_min = 0.0;
        sample.record_max = 0.0;
    }
    return sample;
}

std::vector<HistogramBin> chain_histogram(const ChainSample& sample,
                                          const StationaryMixture& mixture, int bins) {
    if (bins < 1) throw DomainError("bins must be >= 1");
    std::vector<double> kept;
    std::vector<int> kept_counts;
    for (std::size_t i = 0; i < sample.values.size(); ++i) {
        if (sample.counts[i] == 0) continue;
        kept.push_back(sample.values[i]);
        kept_counts.push_back(sample.counts[i]);
    }
    if (kept.empty()) return {};

    const auto [lo_it, hi_it] = std::minmax_element(kept.begin(), kept.end());
    const double lo = *lo_it;
    double width = (*hi_it - lo) / bins;
    if (width <= 0.0) width = 1.0;

    std::vector<HistogramBin> rows(static_cast<std::size_t>(bins));
    std::vector<std::vector<bool>> seen(static_cast<std::size_t>(bins));
    const int max_count = *std::max_element(kept_counts.begin(), kept_counts.end());
    for (auto& s : seen) s.assign(static_cast<std::size_t>(max_count) + 1, false);

    for (std::size_t i = 0; i < kept.size(); ++i) {
        auto bin = static_cast<std::size_t>((kept[i] - lo) / width);
        if (bin >= static_cast<std::size_t>(bins)) bin = static_cast<std::size_t>(bins) - 1;
        rows[bin].density += 1.0;
        seen[bin][static_cast<std::size_t>(kept_counts[i])] = true;
    }
    const auto total = static_cast<double>(kept.size());
    for (std::size_t b = 0; b < rows.size(); ++b) {
        rows[b].lo = lo + static_cast<double>(b) * width;
        rows[b].hi = rows[b].lo + width;
        rows[b].density /= total * width;
        for (bool flag : seen[b])
            if (flag) ++rows[b].component_count;
        rows[b].mixture_density = mixture.pdf(0.5 * (rows[b].lo + rows[b].hi), true);
    }
    return rows;
}

std::optional<ChainAggregates> aggregate_chain(const ChainSample& sample) {
    ChainAggregates agg;
    agg.max = -std::numeric_limits<double>::infinity();
    agg.min = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (std::size_t i = 0; i < sample.values.size(); ++i) {
        if (sample.counts[i] == 0) continue;
        sum += sample.values[i];
        agg.max = std::max(agg.max, sample.values[i]);
        agg.min = std::min(agg.min, sample.values[i]);
        ++agg.populated;
    }
    if (agg.populated == 0) return std::nullopt;
    agg.avg = sum / static_cast<double>(agg.populated);
    return agg;
}

}  // namespace swagg
