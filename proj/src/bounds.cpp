#include "swagg/bounds.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>

#include "swagg/csv.hpp"
#include "swagg/errors.hpp"
#include "swagg/parallel.hpp"

namespace swagg {

namespace {

double positive_weight(const StationaryMixture& mixture) {
    double acc = 0.0;
    for (int n = 1; n < mixture.components(); ++n) acc += mixture.weights[n];
    return acc;
}

double clamp_into(double v, double lo, double hi, bool& changed) {
    if (v < lo) {
        changed = true;
        return lo;
    }
    if (v > hi) {
        changed = true;
        return hi;
    }
    return v;
}

}  // namespace

std::optional<AggregateBound> avg_bound(const StationaryMixture& mixture,
                                        const SpectralQuantities& spectral,
                                        const AssumptionParams& params, int w, double rho) {
    if (rho <= 0.0 || rho >= 1.0) throw DomainError("rho must be inside (0, 1)");
    const int ell_w = chain_length(params.ell, w);
    if (ell_w < 1) throw DomainError("period exceeds grid length");

    AggregateBound bound;
    bound.aggregator = Aggregator::Avg;
    bound.rho = rho;
    bound.lambda_used = spectral.lambda;

    if (params.kind == Assumption::Always) {
        bound.exact = true;
        bound.lo = bound.hi = mixture.kind == WindowKind::Sum ? w * params.mu : params.mu;
        return bound;
    }

    const double populated = positive_weight(mixture);
    if (populated <= 0.0) return std::nullopt;  // no records ever arrive

    const double divisor = populated * ell_w;
    const double log_term = std::log(2.0 / (1.0 - rho));
    const double tau = params.tau();
    const double clip_threshold = 2.0 * spectral.alpha * log_term;

    double lo_sum = 0.0;
    double hi_sum = 0.0;
    double half_sum = 0.0;
    bool clipped = false;
    for (int n = 0; n < mixture.components(); ++n) {
        const double a = mixture.weights[n];
        const double b = mixture.scale_means[n];
        if (a <= 0.0 || b == 0.0) continue;
        const double expected = a * b * ell_w;
        const double center = expected * params.mu;
        const double half =
            spectral.degenerate ? 0.0
                                : b * tau * std::sqrt(2.0 * spectral.alpha * a * ell_w * log_term);
        half_sum += half;
        double lo = center - half;
        double hi = center + half;
        if (spectral.degenerate) {
            // no usable concentration rate: the component real bound is all we have
            lo = expected * params.c_min;
            hi = expected * params.c_max;
            clipped = true;
        } else if (a * ell_w < clip_threshold) {
            lo = clamp_into(lo, expected * params.c_min, expected * params.c_max, clipped);
            hi = clamp_into(hi, expected * params.c_min, expected * params.c_max, clipped);
        }
        lo_sum += lo;
        hi_sum += hi;
    }
    bound.lo = lo_sum / divisor;
    bound.hi = hi_sum / divisor;
    bound.clipped = clipped;
    bound.unclipped_half_width = half_sum / divisor;
    return bound;
}

namespace {

// Gumbel quantile mapped through the asymptotic normalization.
double gumbel_x(double q) { return std::log(1.0 / std::log(1.0 / q)); }

std::optional<AggregateBound> max_bound_core(const StationaryMixture& mixture,
                                             const AssumptionParams& params, int w, double rho_l,
                                             double rho_r) {
    if (!(rho_l > 0.0 && rho_l < rho_r && rho_r < 1.0))
        throw DomainError("need 0 < rho_l < rho_r < 1");
    const int ell_w = chain_length(params.ell, w);
    if (ell_w < 1) throw DomainError("period exceeds grid length");

    const double x_l = gumbel_x(rho_l);
    const double x_r = gumbel_x(rho_r);

    AggregateBound bound;
    bound.aggregator = Aggregator::Max;
    bound.rho_l = rho_l;
    bound.rho_r = rho_r;
    bound.lambda_used = nan_value();

    bool any_positive = false;
    bool any_included = false;
    bool clipped = false;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double envelope_lo = std::numeric_limits<double>::infinity();
    double envelope_hi = -std::numeric_limits<double>::infinity();

    for (int n = 1; n < mixture.components(); ++n) {
        const double a = mixture.weights[n];
        if (a <= 0.0) continue;
        any_positive = true;
        const double b = mixture.scale_means[n];
        const double rb_lo = b * params.c_min;
        const double rb_hi = b * params.c_max;
        envelope_lo = std::min(envelope_lo, rb_lo);
        envelope_hi = std::max(envelope_hi, rb_hi);

        const auto expected_windows = static_cast<long long>(std::llround(a * ell_w));
        if (expected_windows == 0) continue;  // component not expected to appear

        double comp_lo, comp_hi;
        if (expected_windows >= 3) {
            const double log_n = std::log(static_cast<double>(expected_windows));
            const double alpha_n = 1.0 / std::sqrt(2.0 * log_n);
            const double beta_n = std::sqrt(2.0 * log_n) -
                                  0.5 * alpha_n * (std::log(log_n) + std::log(4.0 * M_PI));
            const double scale = std::sqrt(mixture.scale_vars[n]) * params.sigma;
            comp_lo = b * params.mu + scale * (alpha_n * x_l + beta_n);
            comp_hi = b * params.mu + scale * (alpha_n * x_r + beta_n);
            comp_lo = clamp_into(comp_lo, rb_lo, rb_hi, clipped);
            comp_hi = clamp_into(comp_hi, rb_lo, rb_hi, clipped);
        } else {
            comp_lo = rb_lo;  // too thin for the asymptotic; real bound is always valid
            comp_hi = rb_hi;
            clipped = true;
        }
        lo = std::max(lo, comp_lo);
        hi = std::max(hi, comp_hi);
        any_included = true;
    }

    if (!any_positive) return std::nullopt;
    if (!any_included) {
        // Every component rounded to zero expected windows; fall back to the
        // envelope of the real bounds.
        lo = envelope_lo;
        hi = envelope_hi;
        clipped = true;
    }
    bound.lo = lo;
    bound.hi = hi;
    bound.clipped = clipped;
    return bound;
}

}  // namespace

std::optional<AggregateBound> max_bound(const StationaryMixture& mixture,
                                        const AssumptionParams& params, int w, double rho_l,
                                        double rho_r) {
    return max_bound_core(mixture, params, w, rho_l, rho_r);
}

AssumptionParams negate_params(const AssumptionParams& params) {
    AssumptionParams neg = params;
    neg.mu = -params.mu;
    neg.c_min = -params.c_max;
    neg.c_max = -params.c_min;
    return neg;
}

std::optional<AggregateBound> min_bound(const StationaryMixture& mixture,
                                        const AssumptionParams& params, int w, double rho_l,
                                        double rho_r) {
    const AssumptionParams neg = negate_params(params);
    const StationaryMixture neg_mixture = stationary_mixture(mixture.kind, neg, w);
    auto negated = max_bound_core(neg_mixture, neg, w, rho_l, rho_r);
    if (!negated) return std::nullopt;
    AggregateBound bound = *negated;
    bound.aggregator = Aggregator::Min;
    const double lo = -negated->hi;
    const double hi = -negated->lo;
    bound.lo = lo;
    bound.hi = hi;
    return bound;
}

std::string BoundTable::to_csv() const {
    std::string out = "entity_id,feature,window,aggregator,period,lo,hi,clipped,exact\n";
    for (std::size_t row = 0; row < entity_ids.size(); ++row) {
        for (std::size_t col = 0; col < schema.columns.size(); ++col) {
            const auto& spec = schema.columns[col];
            out += csv_escape(entity_ids[row]);
            out += ',';
            out += csv_escape(schema.feature_names[spec.feature]);
            out += ',';
            out += to_string(spec.kind);
            out += ',';
            out += to_string(spec.agg);
            out += ',';
            out += std::to_string(spec.period);
            out += ',';
            const auto& cell = at(row, col);
            if (cell) {
                out += format_double(cell->lo);
                out += ',';
                out += format_double(cell->hi);
                out += ',';
                out += cell->clipped ? "1" : "0";
                out += ',';
                out += cell->exact ? "1" : "0";
            } else {
                out += ",,,";
            }
            out += '\n';
        }
    }
    return out;
}

EstimateResult estimate_all(const EntityTable& entities, const ActionTable& actions,
                            const EstimateOptions& options) {
    if (options.periods.empty()) throw ConfigError("periods must be non-empty");
    const GridSpec grid = GridSpec::from_table(actions, options.freq_seconds);
    for (int w : options.periods)
        if (w < 1 || chain_length(grid.ell(), w) < 1)
            throw ConfigError("period " + std::to_string(w) + " exceeds grid length " +
                              std::to_string(grid.ell()));

    EstimateResult result;
    result.bounds.schema = FeatureSchema::build(actions.features, options.kinds,
                                                options.aggregators, options.periods);
    result.bounds.entity_ids = entities.ids;
    result.bounds.cells.assign(entities.size() * result.bounds.schema.columns.size(),
                               std::nullopt);

    const auto n_entities = entities.size();
    const auto n_features = actions.features.size();

    // Fit phase: group records, resample, fit parameters.
    const auto fit_start = std::chrono::steady_clock::now();
    std::vector<std::vector<std::vector<std::pair<Timestamp, double>>>> grouped(
        n_features, std::vector<std::vector<std::pair<Timestamp, double>>>(n_entities));
    for (std::size_t row = 0; row < actions.rows(); ++row) {
        for (std::size_t f = 0; f < n_features; ++f) {
            const double v = actions.values[f][row];
            if (std::isnan(v)) continue;
            grouped[f][static_cast<std::size_t>(actions.entity[row])].emplace_back(
                actions.ts[row], v);
        }
    }

    struct Fitted {
        bool present = false;
        AssumptionParams params;
    };
    std::vector<Fitted> fits(n_entities * n_features);
    std::atomic<std::int64_t> dropped{0};
    parallel_for(fits.size(), options.threads, [&](std::size_t task) {
        const std::size_t entity = task / n_features;
        const std::size_t feature = task % n_features;
        auto& records = grouped[feature][entity];
        if (records.empty()) return;
        ResampledColumn col = resample(std::move(records), grid.t0, grid.freq, grid.horizon);
        dropped += col.dropped;
        try {
            fits[task].params = fit_parameters(col, options.assumption, options.m_cap);
            fits[task].present = true;
        } catch (const Error& e) {
            throw AssumptionViolationError(std::string(e.what()) + " (entity '" +
                                           entities.ids[entity] + "', feature '" +
                                           actions.features[feature] + "')");
        }
    });
    result.dropped_records = dropped;
    const auto fit_end = std::chrono::steady_clock::now();
    result.fit_seconds = std::chrono::duration<double>(fit_end - fit_start).count();

    // Estimate phase: one mixture + spectral per (entity, feature, kind, period),
    // reused by the three aggregators.
    struct ModelTask {
        std::size_t entity, feature;
        WindowKind kind;
        int period;
        std::vector<std::pair<Aggregator, std::size_t>> slots;  // column indices
    };
    std::vector<ModelTask> tasks;
    {
        // Columns follow the schema's nesting (feature, kind, agg, period), so
        // the slot index is a direct computation.
        const std::size_t n_kinds = options.kinds.size();
        const std::size_t n_aggs = options.aggregators.size();
        const std::size_t n_periods = options.periods.size();
        for (std::size_t entity = 0; entity < n_entities; ++entity) {
            for (std::size_t feature = 0; feature < n_features; ++feature) {
                if (!fits[entity * n_features + feature].present) continue;
                for (std::size_t ik = 0; ik < n_kinds; ++ik) {
                    for (std::size_t ip = 0; ip < n_periods; ++ip) {
                        ModelTask task{entity, feature, options.kinds[ik], options.periods[ip], {}};
                        for (std::size_t ia = 0; ia < n_aggs; ++ia) {
                            const std::size_t col =
                                ((feature * n_kinds + ik) * n_aggs + ia) * n_periods + ip;
                            task.slots.emplace_back(options.aggregators[ia],
                                                    result.bounds.index(entity, col));
                        }
                        tasks.push_back(std::move(task));
                    }
                }
            }
        }
    }

    parallel_for(tasks.size(), options.threads, [&](std::size_t i) {
        const ModelTask& task = tasks[i];
        const AssumptionParams& params = fits[task.entity * n_features + task.feature].params;
        const StationaryMixture mixture = stationary_mixture(task.kind, params, task.period);
        const SpectralQuantities spectral =
            compute_spectral(task.kind, params, mixture, task.period, options.lambda_method);
        for (const auto& [agg, slot] : task.slots) {
            std::optional<AggregateBound> bound;
            switch (agg) {
                case Aggregator::Avg:
                    bound = avg_bound(mixture, spectral, params, task.period, options.rho);
                    break;
                case Aggregator::Max:
                    bound = max_bound(mixture, params, task.period, options.rho_l, options.rho_r);
                    break;
                case Aggregator::Min:
                    bound = min_bound(mixture, params, task.period, options.rho_l, options.rho_r);
                    break;
            }
            result.bounds.cells[slot] = bound;
        }
    });
    const auto estimate_end = std::chrono::steady_clock::now();
    result.estimate_seconds = std::chrono::duration<double>(estimate_end - fit_end).count();
    return result;
}

}  // namespace swagg
