#include "swagg/selector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "swagg/csv.hpp"
#include "swagg/errors.hpp"

namespace swagg {

std::string ImportanceReport::to_csv() const {
    std::string out = "rank,feature_column,mean_importance,std_importance\n";
    for (std::size_t r = 0; r < order.size(); ++r) {
        const auto c = static_cast<std::size_t>(order[r]);
        out += std::to_string(r + 1);
        out += ',';
        out += csv_escape(columns[c]);
        out += ',';
        out += format_double(mean_importance[c]);
        out += ',';
        out += format_double(std_importance[c]);
        out += '\n';
    }
    return out;
}

std::string ImportanceReport::per_ensemble_csv() const {
    std::string out = "ensemble";
    for (const auto& col : columns) {
        out += ',';
        out += csv_escape(col);
    }
    out += '\n';
    for (std::size_t e = 0; e < per_ensemble.size(); ++e) {
        out += std::to_string(e + 1);
        for (double v : per_ensemble[e]) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

FeatureTable sample_fake_tf(const BoundTable& bounds, std::uint64_t seed) {
    FeatureTable table;
    table.entity_ids = bounds.entity_ids;
    table.columns = bounds.schema.column_names();
    table.cells.resize(bounds.cells.size());
    Rng rng(seed);
    for (std::size_t i = 0; i < bounds.cells.size(); ++i) {
        const auto& cell = bounds.cells[i];
        if (!cell) {
            table.cells[i] = 0.0;  // no-action entity: zero aggregate signal
        } else if (cell->exact || cell->lo == cell->hi) {
            table.cells[i] = cell->lo;
        } else {
            table.cells[i] = rng.uniform(cell->lo, cell->hi);
        }
    }
    return table;
}

namespace {

std::vector<std::vector<double>> to_columns(const FeatureTable& table) {
    const auto n_cols = table.columns.size();
    const auto n_rows = table.entity_ids.size();
    std::vector<std::vector<double>> columns(n_cols, std::vector<double>(n_rows));
    for (std::size_t r = 0; r < n_rows; ++r)
        for (std::size_t c = 0; c < n_cols; ++c) {
            const double v = table.at(r, c);
            columns[c][r] = std::isnan(v) ? 0.0 : v;
        }
    return columns;
}

ImportanceReport finalize_report(std::vector<std::string> columns,
                                 std::vector<std::vector<double>> per_ensemble,
                                 bool uniform_fallback) {
    ImportanceReport report;
    report.columns = std::move(columns);
    report.per_ensemble = std::move(per_ensemble);
    report.uniform_fallback = uniform_fallback;
    const auto n_cols = report.columns.size();
    const auto n_ens = report.per_ensemble.size();

    report.mean_importance.assign(n_cols, 0.0);
    for (const auto& ens : report.per_ensemble)
        for (std::size_t c = 0; c < n_cols; ++c) report.mean_importance[c] += ens[c];
    for (auto& v : report.mean_importance) v /= static_cast<double>(n_ens);

    report.std_importance.assign(n_cols, 0.0);
    if (n_ens > 1) {
        for (const auto& ens : report.per_ensemble)
            for (std::size_t c = 0; c < n_cols; ++c) {
                const double d = ens[c] - report.mean_importance[c];
                report.std_importance[c] += d * d;
            }
        for (auto& v : report.std_importance)
            v = std::sqrt(v / static_cast<double>(n_ens - 1));
    }

    report.order.resize(n_cols);
    std::iota(report.order.begin(), report.order.end(), 0);
    std::sort(report.order.begin(), report.order.end(), [&](int l, int r) {
        const double ml = report.mean_importance[static_cast<std::size_t>(l)];
        const double mr = report.mean_importance[static_cast<std::size_t>(r)];
        if (ml != mr) return ml > mr;
        return report.columns[static_cast<std::size_t>(l)] <
               report.columns[static_cast<std::size_t>(r)];  // deterministic ties
    });
    report.rank.assign(n_cols, 0);
    for (std::size_t r = 0; r < n_cols; ++r)
        report.rank[static_cast<std::size_t>(report.order[r])] = static_cast<int>(r) + 1;
    return report;
}

}  // namespace

ForestResult table_importance(const FeatureTable& table, const LabelData& labels, int trees,
                              std::uint64_t seed, int threads) {
    if (labels.size() != table.entity_ids.size())
        throw SchemaError("label count does not match entity rows");
    return forest_importance(to_columns(table), labels, trees, seed, threads);
}

ImportanceReport ensemble_select(const BoundTable& bounds, const LabelData& labels,
                                 int ensembles, int trees, std::uint64_t master_seed,
                                 int threads) {
    if (ensembles < 1) throw DomainError("ensembles must be >= 1");
    std::vector<std::vector<double>> per_ensemble;
    per_ensemble.reserve(static_cast<std::size_t>(ensembles));
    bool uniform = false;
    for (int e = 0; e < ensembles; ++e) {
        const FeatureTable fake = sample_fake_tf(bounds, Rng::derive(master_seed, 2 * e));
        const ForestResult fit =
            table_importance(fake, labels, trees, Rng::derive(master_seed, 2 * e + 1), threads);
        uniform = uniform || fit.uniform_fallback;
        per_ensemble.push_back(fit.importance);
    }
    return finalize_report(bounds.schema.column_names(), std::move(per_ensemble), uniform);
}

ImportanceReport ensemble_select_table(const FeatureTable& table,
                                       const std::vector<std::string>& columns,
                                       const LabelData& labels, int ensembles, int trees,
                                       std::uint64_t master_seed, int threads) {
    if (ensembles < 1) throw DomainError("ensembles must be >= 1");
    std::vector<std::vector<double>> per_ensemble;
    per_ensemble.reserve(static_cast<std::size_t>(ensembles));
    bool uniform = false;
    for (int e = 0; e < ensembles; ++e) {
        const ForestResult fit =
            table_importance(table, labels, trees, Rng::derive(master_seed, 2 * e + 1), threads);
        uniform = uniform || fit.uniform_fallback;
        per_ensemble.push_back(fit.importance);
    }
    return finalize_report(columns, std::move(per_ensemble), uniform);
}

namespace {

void require_same_columns(const ImportanceReport& a, const ImportanceReport& b) {
    if (a.columns.size() != b.columns.size())
        throw SchemaError("importance reports have different column counts");
    std::vector<std::string> sa = a.columns, sb = b.columns;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb) throw SchemaError("importance reports cover different columns");
}

}  // namespace

double rank_recall(const ImportanceReport& estimated, const ImportanceReport& actual,
                   double top_fraction) {
    require_same_columns(estimated, actual);
    if (top_fraction <= 0.0 || top_fraction > 1.0)
        throw DomainError("top_fraction must be in (0, 1]");
    const auto f = estimated.columns.size();
    const auto k = static_cast<std::size_t>(
        std::ceil(top_fraction * static_cast<double>(f)));

    std::vector<std::string> top_est, top_act;
    for (std::size_t r = 0; r < k; ++r) {
        top_est.push_back(estimated.columns[static_cast<std::size_t>(estimated.order[r])]);
        top_act.push_back(actual.columns[static_cast<std::size_t>(actual.order[r])]);
    }
    std::sort(top_est.begin(), top_est.end());
    std::sort(top_act.begin(), top_act.end());
    std::vector<std::string> both;
    std::set_intersection(top_est.begin(), top_est.end(), top_act.begin(), top_act.end(),
                          std::back_inserter(both));
    return static_cast<double>(both.size()) / static_cast<double>(k);
}

ErrorQuartiles relative_error_quartiles(const ImportanceReport& estimated,
                                        const ImportanceReport& actual) {
    require_same_columns(estimated, actual);
    std::unordered_map<std::string, double> actual_by_name;
    for (std::size_t c = 0; c < actual.columns.size(); ++c)
        actual_by_name[actual.columns[c]] = actual.mean_importance[c];

    std::vector<double> errors;
    for (std::size_t c = 0; c < estimated.columns.size(); ++c) {
        const double act = actual_by_name[estimated.columns[c]];
        if (act == 0.0) continue;
        errors.push_back((estimated.mean_importance[c] - act) / act);
    }
    ErrorQuartiles q;
    if (errors.empty()) return q;
    std::sort(errors.begin(), errors.end());
    auto quantile = [&](double p) {
        const double pos = p * static_cast<double>(errors.size() - 1);
        const auto i = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(i);
        if (i + 1 >= errors.size()) return errors.back();
        return errors[i] * (1.0 - frac) + errors[i + 1] * frac;
    };
    q.q25 = quantile(0.25);
    q.q50 = quantile(0.50);
    q.q75 = quantile(0.75);
    return q;
}

}  // namespace swagg
