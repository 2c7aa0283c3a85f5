#pragma once

#include "swagg/bounds.hpp"
#include "swagg/forest.hpp"
#include "swagg/oracle.hpp"

namespace swagg {

// Ranked feature columns with mean importance across the bagging ensemble.
struct ImportanceReport {
    std::vector<std::string> columns;
    std::vector<double> mean_importance;
    std::vector<double> std_importance;
    std::vector<std::vector<double>> per_ensemble;  // [ensemble][column]
    std::vector<int> order;  // order[r] = column index holding rank r+1
    std::vector<int> rank;   // rank[c] = 1-based rank of column c
    bool uniform_fallback = false;

    std::string to_csv() const;            // rank,feature_column,mean_importance,std_importance
    std::string per_ensemble_csv() const;  // wide, one row per ensemble
};

// Cell-wise uniform draw from each bound; exact bounds give the point value,
// null bounds impute 0.
FeatureTable sample_fake_tf(const BoundTable& bounds, std::uint64_t seed);

// Forest importance over a feature table; nulls impute 0.
ForestResult table_importance(const FeatureTable& table, const LabelData& labels, int trees,
                              std::uint64_t seed, int threads = 0);

// Bagging over sampled tables: one fake table per ensemble, ranked by a
// forest, importances averaged.
ImportanceReport ensemble_select(const BoundTable& bounds, const LabelData& labels,
                                 int ensembles, int trees, std::uint64_t master_seed,
                                 int threads = 0);

// Same ensemble averaging but over a fixed (real) feature table.
ImportanceReport ensemble_select_table(const FeatureTable& table,
                                       const std::vector<std::string>& columns,
                                       const LabelData& labels, int ensembles, int trees,
                                       std::uint64_t master_seed, int threads = 0);

// Fraction of the true top-k columns recovered in the estimated top-k,
// k = ceil(top_fraction * columns). Throws SchemaError on column mismatch.
double rank_recall(const ImportanceReport& estimated, const ImportanceReport& actual,
                   double top_fraction);

// Quartiles (25/50/75%) of (estimated - actual)/actual over columns where
// actual importance is nonzero.
struct ErrorQuartiles {
    double q25 = 0.0, q50 = 0.0, q75 = 0.0;
};
ErrorQuartiles relative_error_quartiles(const ImportanceReport& estimated,
                                        const ImportanceReport& actual);

}  // namespace swagg
