#pragma once

#include <cstdint>

#include "swagg/tables.hpp"

namespace swagg {

// Desk-scale dataset with planted sliding-window signal: informative features
// shift their record values by the (binary) entity label, noise features do
// not. Record counts per bucket are Poisson and label-independent, so every
// informative base feature propagates into each of its aggregate columns.
struct SyntheticSpec {
    int entities = 500;
    int informative = 5;
    int noise = 20;
    int buckets = 120;
    std::int64_t freq_seconds = 86400;
    double rate = 0.5;  // expected records per bucket
    double base = 10.0;
    double sigma = 1.5;
    double shift = 2.5;  // label-1 mean offset of the weakest informative feature
    std::uint64_t seed = 1;
};

struct SyntheticData {
    EntityTable entities;
    ActionTable actions;
};

SyntheticData make_synthetic(const SyntheticSpec& spec);

}  // namespace swagg
