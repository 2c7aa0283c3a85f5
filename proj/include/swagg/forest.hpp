#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swagg/tables.hpp"

namespace swagg {

// Training target: class ids for categorical labels, raw values otherwise.
struct LabelData {
    LabelKind kind = LabelKind::Classification;
    std::vector<int> classes;     // classification
    int n_classes = 0;
    std::vector<double> targets;  // regression

    std::size_t size() const {
        return kind == LabelKind::Classification ? classes.size() : targets.size();
    }
    static LabelData from_strings(const std::vector<std::string>& labels);
};

struct ForestResult {
    std::vector<double> importance;  // normalized to sum 1
    bool uniform_fallback = false;   // degenerate target or featureless data
};

// Bagged CART forest. Bootstrap per tree, ceil(sqrt(f)) candidate features per
// split, unlimited depth, leaves pure or singleton. Importance is accumulated
// impurity decrease (Gini for classes, variance for numeric targets) weighted
// by node size, normalized over the whole forest. Fully deterministic for a
// given seed; trees train in parallel but merge in index order.
ForestResult forest_importance(const std::vector<std::vector<double>>& columns,
                               const LabelData& labels, int trees, std::uint64_t seed,
                               int threads = 0);

}  // namespace swagg
