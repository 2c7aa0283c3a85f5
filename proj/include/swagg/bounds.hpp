#pragma once

#include <optional>

#include "swagg/schema.hpp"
#include "swagg/spectral.hpp"

namespace swagg {

// Closed confidence interval for one (entity, feature, window, aggregator,
// period) combination.
struct AggregateBound {
    double lo = 0.0;
    double hi = 0.0;
    Aggregator aggregator = Aggregator::Avg;
    bool clipped = false;  // a real bound tightened at least one component
    bool exact = false;    // closed-form special case, lo == hi
    double lambda_used = 0.0;
    double rho = 0.0;
    double rho_l = 0.0;
    double rho_r = 0.0;
    // Diagnostic: concentration half-width after dividing by the populated
    // window count, before any real-bound clipping. Avg aggregator only.
    double unclipped_half_width = 0.0;
};

// Full windows only: a period-w window needs w consecutive buckets.
inline int chain_length(int ell, int w) { return ell - w + 1; }

// Average aggregate over all populated windows, probability at least rho.
// Per-component interval a_n b_n l_w mu +- b_n tau sqrt(2 alpha a_n l_w
// log(2/(1-rho))), clipped into the component real bound when a_n l_w <
// 2 alpha log(2/(1-rho)), summed, then divided by the populated window count.
// Always assumption short-circuits to the exact value (w mu or mu).
// Empty result = no records (p = 0).
std::optional<AggregateBound> avg_bound(const StationaryMixture& mixture,
                                        const SpectralQuantities& spectral,
                                        const AssumptionParams& params, int w, double rho);

// Gumbel-asymptotic interval for the chain maximum: per-component quantiles at
// rho_l/rho_r for components expecting >= 3 windows, real bounds for thinner
// ones, combined by taking the max of the component endpoints.
std::optional<AggregateBound> max_bound(const StationaryMixture& mixture,
                                        const AssumptionParams& params, int w, double rho_l,
                                        double rho_r);

// min(X) = -max(-X): negates the value parameters, delegates to max_bound,
// then flips the interval.
std::optional<AggregateBound> min_bound(const StationaryMixture& mixture,
                                        const AssumptionParams& params, int w, double rho_l,
                                        double rho_r);

AssumptionParams negate_params(const AssumptionParams& params);

struct BoundTable {
    FeatureSchema schema;
    std::vector<std::string> entity_ids;
    std::vector<std::optional<AggregateBound>> cells;  // row-major

    std::size_t index(std::size_t row, std::size_t col) const {
        return row * schema.columns.size() + col;
    }
    const std::optional<AggregateBound>& at(std::size_t row, std::size_t col) const {
        return cells[index(row, col)];
    }
    // Long format: entity_id,feature,window,aggregator,period,lo,hi,clipped,exact
    std::string to_csv() const;
};

struct EstimateOptions {
    std::vector<int> periods;
    std::vector<WindowKind> kinds{WindowKind::Sum, WindowKind::Avg};
    std::vector<Aggregator> aggregators{Aggregator::Avg, Aggregator::Max, Aggregator::Min};
    double rho = 0.9;
    double rho_l = 0.05;
    double rho_r = 0.95;
    std::optional<Assumption> assumption;
    std::optional<int> m_cap;
    LambdaMethod lambda_method = LambdaMethod::Full;
    std::int64_t freq_seconds = 86400;
    int threads = 0;
};

struct EstimateResult {
    BoundTable bounds;
    double fit_seconds = 0.0;
    double estimate_seconds = 0.0;
    std::int64_t dropped_records = 0;
};

// Fits per-(entity, feature) parameters, then estimates every bound in the
// schema cross product. Entities with no records keep null cells.
EstimateResult estimate_all(const EntityTable& entities, const ActionTable& actions,
                            const EstimateOptions& options);

}  // namespace swagg
