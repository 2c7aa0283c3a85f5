#include "swagg/tables.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

#include "swagg/errors.hpp"

namespace swagg {

void EntityTable::add(std::string id, std::string label) {
    if (index.count(id)) throw SchemaError("duplicate entity_id '" + id + "'");
    index.emplace(id, static_cast<int>(ids.size()));
    ids.push_back(std::move(id));
    labels.push_back(std::move(label));
}

Timestamp ActionTable::min_ts() const {
    if (ts.empty()) throw EmptyColumnError("action table has no rows");
    return *std::min_element(ts.begin(), ts.end());
}

Timestamp ActionTable::max_ts() const {
    if (ts.empty()) throw EmptyColumnError("action table has no rows");
    return *std::max_element(ts.begin(), ts.end());
}

std::int64_t ResampledColumn::total_records() const {
    std::int64_t n = 0;
    for (int c : counts) n += c;
    return n;
}

const char* to_string(Assumption a) {
    switch (a) {
        case Assumption::Always: return "always";
        case Assumption::Binomial: return "binomial";
        case Assumption::Poisson: return "poisson";
    }
    return "?";
}

std::optional<Assumption> assumption_from_string(const std::string& s) {
    if (s == "always") return Assumption::Always;
    if (s == "binomial") return Assumption::Binomial;
    if (s == "poisson") return Assumption::Poisson;
    return std::nullopt;
}

double AssumptionParams::tau() const {
    return std::max(std::abs(mu - c_min), std::abs(c_max - mu));
}

ResampledColumn resample(std::vector<std::pair<Timestamp, double>> records, Timestamp t0,
                         std::int64_t freq, Timestamp horizon) {
    if (freq <= 0) throw DomainError("resample freq must be positive");
    if (horizon < t0) throw DomainError("resample horizon before t0");

    // Canonical order makes the result independent of input permutation.
    std::sort(records.begin(), records.end());

    ResampledColumn col;
    col.freq = freq;
    const auto ell = static_cast<std::size_t>((horizon - t0) / freq + 1);
    col.counts.assign(ell, 0);
    col.values.assign(ell, {});

    for (const auto& [ts, value] : records) {
        if (ts < t0 || ts > horizon) {
            ++col.dropped;
            continue;
        }
        const auto bucket = static_cast<std::size_t>((ts - t0) / freq);
        ++col.counts[bucket];
        col.values[bucket].push_back(value);
    }
    if (col.total_records() == 0) throw EmptyColumnError("no records inside [t0, horizon]");
    return col;
}

int default_m_cap(const ResampledColumn& col) {
    std::vector<int> sorted = col.counts;
    std::sort(sorted.begin(), sorted.end());
    const auto n = sorted.size();
    auto rank = static_cast<std::size_t>(std::ceil(0.999 * static_cast<double>(n)));
    if (rank == 0) rank = 1;
    return std::max(1, sorted[rank - 1]);
}

AssumptionParams fit_parameters(const ResampledColumn& col, std::optional<Assumption> override_kind,
                                std::optional<int> m_cap) {
    const int ell = col.ell();
    if (ell < 1 || col.total_records() == 0) throw EmptyColumnError("fit_parameters on empty column");

    int max_count = 0;
    int non_empty = 0;
    std::int64_t total = 0;
    for (int c : col.counts) {
        max_count = std::max(max_count, c);
        if (c > 0) ++non_empty;
        total += c;
    }

    Assumption kind;
    if (override_kind) {
        kind = *override_kind;
        if (kind == Assumption::Always && non_empty != ell)
            throw AssumptionViolationError("always override but some bucket is empty");
        if ((kind == Assumption::Always || kind == Assumption::Binomial) && max_count > 1)
            throw AssumptionViolationError(std::string(to_string(kind)) +
                                           " override but a bucket holds " +
                                           std::to_string(max_count) + " records");
    } else if (max_count <= 1) {
        kind = (non_empty == ell) ? Assumption::Always : Assumption::Binomial;
    } else {
        kind = Assumption::Poisson;
    }

    AssumptionParams params;
    params.kind = kind;
    params.ell = ell;

    double sum = 0.0;
    double c_min = std::numeric_limits<double>::infinity();
    double c_max = -std::numeric_limits<double>::infinity();
    for (const auto& bucket : col.values) {
        for (double v : bucket) {
            sum += v;
            c_min = std::min(c_min, v);
            c_max = std::max(c_max, v);
        }
    }
    const auto n = static_cast<double>(total);
    params.mu = sum / n;
    params.c_min = c_min;
    params.c_max = c_max;
    if (total > 1) {
        double ss = 0.0;
        for (const auto& bucket : col.values)
            for (double v : bucket) ss += (v - params.mu) * (v - params.mu);
        params.sigma = std::sqrt(ss / (n - 1.0));
    }

    switch (kind) {
        case Assumption::Always:
            params.p = 1.0;
            params.m = 1;
            break;
        case Assumption::Binomial:
            params.p = static_cast<double>(non_empty) / static_cast<double>(ell);
            params.m = 1;
            break;
        case Assumption::Poisson:
            params.p = static_cast<double>(total) / static_cast<double>(ell);
            params.m = std::min(max_count, m_cap ? *m_cap : default_m_cap(col));
            params.m = std::max(params.m, 1);
            break;
    }
    return params;
}

LabelKind detect_label_kind(const std::vector<std::string>& labels) {
    std::set<std::string> distinct;
    for (const auto& s : labels) {
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || *end != '\0' || !std::isfinite(v)) return LabelKind::Classification;
        distinct.insert(s);
    }
    if (labels.size() >= 4 &&
        distinct.size() > std::max<std::size_t>(20, labels.size() / 2))
        return LabelKind::Regression;
    return LabelKind::Classification;
}

}  // namespace swagg
