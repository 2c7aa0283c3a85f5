#include "swagg/forest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>

#include "swagg/errors.hpp"
#include "swagg/parallel.hpp"
#include "swagg/rng.hpp"

namespace swagg {

LabelData LabelData::from_strings(const std::vector<std::string>& labels) {
    LabelData data;
    data.kind = detect_label_kind(labels);
    if (data.kind == LabelKind::Regression) {
        data.targets.reserve(labels.size());
        for (const auto& s : labels) data.targets.push_back(std::strtod(s.c_str(), nullptr));
        return data;
    }
    std::map<std::string, int> ids;  // ordered: class id assignment is stable
    for (const auto& s : labels) ids.emplace(s, 0);
    int next = 0;
    for (auto& [label, id] : ids) id = next++;
    data.n_classes = next;
    data.classes.reserve(labels.size());
    for (const auto& s : labels) data.classes.push_back(ids[s]);
    return data;
}

namespace {

struct SplitResult {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double decrease = 0.0;  // node-weighted impurity decrease
    std::size_t left_size = 0;
};

// Workspace reused across nodes of one tree.
struct TreeScratch {
    std::vector<std::size_t> order;     // sort buffer
    std::vector<int> left_counts;      // classification prefix counts
    std::vector<int> right_counts;
    std::vector<int> candidate_pool;   // feature sampling
};

class TreeBuilder {
public:
    TreeBuilder(const std::vector<std::vector<double>>& columns, const LabelData& labels,
                std::size_t n_rows, Rng& rng, std::vector<double>& importance)
        : columns_(columns),
          labels_(labels),
          n_rows_(n_rows),
          rng_(rng),
          importance_(importance),
          n_candidates_(static_cast<int>(
              std::ceil(std::sqrt(static_cast<double>(columns.size()))))) {
        scratch_.candidate_pool.resize(columns.size());
        for (std::size_t f = 0; f < columns.size(); ++f)
            scratch_.candidate_pool[f] = static_cast<int>(f);
        if (labels.kind == LabelKind::Classification) {
            scratch_.left_counts.resize(static_cast<std::size_t>(labels.n_classes));
            scratch_.right_counts.resize(static_cast<std::size_t>(labels.n_classes));
        }
    }

    void run() {
        std::vector<std::size_t> rows(n_rows_);
        for (auto& r : rows) r = static_cast<std::size_t>(rng_.below(n_rows_));
        grow(rows.data(), rows.size());
    }

private:
    double node_impurity(const std::size_t* rows, std::size_t n) const {
        if (labels_.kind == LabelKind::Classification) {
            std::vector<std::int64_t> counts(static_cast<std::size_t>(labels_.n_classes), 0);
            for (std::size_t i = 0; i < n; ++i)
                ++counts[static_cast<std::size_t>(labels_.classes[rows[i]])];
            double sq = 0.0;
            for (std::int64_t c : counts) sq += static_cast<double>(c) * static_cast<double>(c);
            const auto dn = static_cast<double>(n);
            return 1.0 - sq / (dn * dn);
        }
        double sum = 0.0, sum_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double y = labels_.targets[rows[i]];
            sum += y;
            sum_sq += y * y;
        }
        const auto dn = static_cast<double>(n);
        return std::max(0.0, (sum_sq - sum * sum / dn) / dn);
    }

    SplitResult best_split_classification(const std::size_t* rows, std::size_t n, int feature,
                                          double parent_impurity) {
        const auto& x = columns_[static_cast<std::size_t>(feature)];
        auto& order = scratch_.order;
        order.assign(rows, rows + n);
        std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
            if (x[l] != x[r]) return x[l] < x[r];
            return l < r;
        });
        if (x[order.front()] == x[order.back()]) return {};

        auto& lc = scratch_.left_counts;
        auto& rc = scratch_.right_counts;
        std::fill(lc.begin(), lc.end(), 0);
        std::fill(rc.begin(), rc.end(), 0);
        double right_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            auto& c = rc[static_cast<std::size_t>(labels_.classes[order[i]])];
            right_sq += 2.0 * c + 1.0;
            ++c;
        }
        double left_sq = 0.0;
        const auto dn = static_cast<double>(n);

        SplitResult best;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const auto cls = static_cast<std::size_t>(labels_.classes[order[i]]);
            left_sq += 2.0 * lc[cls] + 1.0;
            ++lc[cls];
            right_sq -= 2.0 * rc[cls] - 1.0;
            --rc[cls];
            if (x[order[i]] == x[order[i + 1]]) continue;
            const auto nl = static_cast<double>(i + 1);
            const double nr = dn - nl;
            const double gini_l = 1.0 - left_sq / (nl * nl);
            const double gini_r = 1.0 - right_sq / (nr * nr);
            const double decrease = parent_impurity - (nl * gini_l + nr * gini_r) / dn;
            if (!best.found || decrease > best.decrease) {
                best.found = true;
                best.feature = feature;
                best.threshold = x[order[i]] + 0.5 * (x[order[i + 1]] - x[order[i]]);
                best.decrease = decrease;
                best.left_size = i + 1;
            }
        }
        return best;
    }

    SplitResult best_split_regression(const std::size_t* rows, std::size_t n, int feature,
                                      double parent_impurity) {
        const auto& x = columns_[static_cast<std::size_t>(feature)];
        auto& order = scratch_.order;
        order.assign(rows, rows + n);
        std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
            if (x[l] != x[r]) return x[l] < x[r];
            return l < r;
        });
        if (x[order.front()] == x[order.back()]) return {};

        double right_sum = 0.0, right_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double y = labels_.targets[order[i]];
            right_sum += y;
            right_sq += y * y;
        }
        double left_sum = 0.0, left_sq = 0.0;
        const auto dn = static_cast<double>(n);

        SplitResult best;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double y = labels_.targets[order[i]];
            left_sum += y;
            left_sq += y * y;
            right_sum -= y;
            right_sq -= y * y;
            if (x[order[i]] == x[order[i + 1]]) continue;
            const auto nl = static_cast<double>(i + 1);
            const double nr = dn - nl;
            const double var_l = std::max(0.0, (left_sq - left_sum * left_sum / nl) / nl);
            const double var_r = std::max(0.0, (right_sq - right_sum * right_sum / nr) / nr);
            const double decrease = parent_impurity - (nl * var_l + nr * var_r) / dn;
            if (!best.found || decrease > best.decrease) {
                best.found = true;
                best.feature = feature;
                best.threshold = x[order[i]] + 0.5 * (x[order[i + 1]] - x[order[i]]);
                best.decrease = decrease;
                best.left_size = i + 1;
            }
        }
        return best;
    }

    void grow(std::size_t* rows, std::size_t n) {
        if (n < 2) return;
        const double impurity = node_impurity(rows, n);
        if (impurity <= 0.0) return;

        // Sample candidate features without replacement (partial Fisher-Yates).
        auto& pool = scratch_.candidate_pool;
        const auto n_features = pool.size();
        const auto k = std::min<std::size_t>(static_cast<std::size_t>(n_candidates_), n_features);
        for (std::size_t i = 0; i < k; ++i) {
            const auto j = i + static_cast<std::size_t>(rng_.below(n_features - i));
            std::swap(pool[i], pool[j]);
        }

        SplitResult best;
        for (std::size_t i = 0; i < k; ++i) {
            const SplitResult split =
                labels_.kind == LabelKind::Classification
                    ? best_split_classification(rows, n, pool[i], impurity)
                    : best_split_regression(rows, n, pool[i], impurity);
            if (split.found && (!best.found || split.decrease > best.decrease)) best = split;
        }
        if (!best.found || best.decrease <= 0.0) return;

        importance_[static_cast<std::size_t>(best.feature)] +=
            static_cast<double>(n) / static_cast<double>(n_rows_) * best.decrease;

        const auto& x = columns_[static_cast<std::size_t>(best.feature)];
        std::stable_partition(rows, rows + n,
                              [&](std::size_t r) { return x[r] <= best.threshold; });
        grow(rows, best.left_size);
        grow(rows + best.left_size, n - best.left_size);
    }

    const std::vector<std::vector<double>>& columns_;
    const LabelData& labels_;
    std::size_t n_rows_;
    Rng& rng_;
    std::vector<double>& importance_;
    int n_candidates_;
    TreeScratch scratch_;
};

}  // namespace

ForestResult forest_importance(const std::vector<std::vector<double>>& columns,
                               const LabelData& labels, int trees, std::uint64_t seed,
                               int threads) {
    const auto n_features = columns.size();
    if (n_features == 0) throw DomainError("forest needs at least one feature");
    const std::size_t n_rows = labels.size();
    if (n_rows < 2) throw DomainError("forest needs at least two rows");
    for (const auto& col : columns)
        if (col.size() != n_rows) throw SchemaError("feature column length mismatch");
    if (trees < 1) throw DomainError("trees must be >= 1");

    ForestResult result;
    result.importance.assign(n_features, 0.0);

    const bool single_class =
        labels.kind == LabelKind::Classification &&
        std::all_of(labels.classes.begin(), labels.classes.end(),
                    [&](int c) { return c == labels.classes.front(); });
    const bool constant_target =
        labels.kind == LabelKind::Regression &&
        std::all_of(labels.targets.begin(), labels.targets.end(),
                    [&](double y) { return y == labels.targets.front(); });
    if (single_class || constant_target) {
        result.uniform_fallback = true;
        for (auto& v : result.importance) v = 1.0 / static_cast<double>(n_features);
        return result;
    }

    std::vector<std::vector<double>> per_tree(static_cast<std::size_t>(trees));
    parallel_for(static_cast<std::size_t>(trees), threads, [&](std::size_t t) {
        per_tree[t].assign(n_features, 0.0);
        Rng rng(Rng::derive(seed, t));
        TreeBuilder builder(columns, labels, n_rows, rng, per_tree[t]);
        builder.run();
    });
    for (const auto& tree : per_tree)
        for (std::size_t f = 0; f < n_features; ++f) result.importance[f] += tree[f];

    double total = 0.0;
    for (double v : result.importance) total += v;
    if (total <= 0.0) {
        result.uniform_fallback = true;  // e.g. all features constant
        for (auto& v : result.importance) v = 1.0 / static_cast<double>(n_features);
        return result;
    }
    for (auto& v : result.importance) v /= total;
    return result;
}

}  // namespace swagg
