#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace swagg {

using Timestamp = std::int64_t;  // timezone-free epoch seconds

inline double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

// One row per entity with its prediction target.
struct EntityTable {
    std::vector<std::string> ids;
    std::vector<std::string> labels;
    std::unordered_map<std::string, int> index;  // id -> row

    std::size_t size() const { return ids.size(); }
    void add(std::string id, std::string label);
};

// Timestamped per-entity event records; one value slot per feature column,
// NaN marks a missing cell.
struct ActionTable {
    std::vector<std::string> features;
    std::vector<int> entity;    // row -> EntityTable index
    std::vector<Timestamp> ts;  // row -> instant
    std::vector<std::vector<double>> values;  // [feature][row]

    std::size_t rows() const { return ts.size(); }
    Timestamp min_ts() const;
    Timestamp max_ts() const;
};

// One entity/feature column resampled onto a fixed-frequency grid.
struct ResampledColumn {
    std::vector<int> counts;                  // records per bucket, length ell
    std::vector<std::vector<double>> values;  // per-bucket record values
    std::int64_t freq = 0;                    // bucket width, seconds
    std::int64_t dropped = 0;                 // records outside [t0, horizon]

    int ell() const { return static_cast<int>(counts.size()); }
    std::int64_t total_records() const;
};

enum class Assumption { Always, Binomial, Poisson };

const char* to_string(Assumption a);
std::optional<Assumption> assumption_from_string(const std::string& s);

// Fitted per-(entity, feature) distribution parameters.
struct AssumptionParams {
    Assumption kind = Assumption::Binomial;
    double mu = 0.0;     // sample mean of record values
    double sigma = 0.0;  // sample std (n-1 denominator; 0 when n = 1)
    double p = 0.0;      // Binomial: non-empty bucket fraction; Poisson: records per bucket
    int m = 1;           // max records per bucket (capped)
    int ell = 0;         // grid length
    double c_min = 0.0;  // observed min record value
    double c_max = 0.0;  // observed max record value

    double tau() const;  // max(|mu - c_min|, |c_max - mu|)
};

// Bucket index = floor((ts - t0) / freq); grid length floor((horizon - t0)/freq) + 1.
// Records outside [t0, horizon] are dropped and counted. Input order does not
// matter: records are canonicalized by (timestamp, value) before bucketing.
// Throws EmptyColumnError when nothing remains.
ResampledColumn resample(std::vector<std::pair<Timestamp, double>> records, Timestamp t0,
                         std::int64_t freq, Timestamp horizon);

// Default m cap: 99.9th percentile (nearest rank) of bucket counts, at least 1.
int default_m_cap(const ResampledColumn& col);

// Auto-selects the count assumption unless overridden: every bucket holding
// exactly one record -> Always; counts in {0,1} -> Binomial; otherwise Poisson.
// Throws AssumptionViolationError when an override contradicts the counts.
AssumptionParams fit_parameters(const ResampledColumn& col,
                                std::optional<Assumption> override_kind = std::nullopt,
                                std::optional<int> m_cap = std::nullopt);

enum class LabelKind { Classification, Regression };

// Labels are treated as classes unless they all parse as finite reals and
// mostly take distinct values (a continuous target).
LabelKind detect_label_kind(const std::vector<std::string>& labels);

}  // namespace swagg
