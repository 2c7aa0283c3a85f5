#include "swagg/window_model.hpp"

#include <algorithm>
#include <cmath>

#include "swagg/errors.hpp"

namespace swagg {

const char* to_string(WindowKind k) {
    return k == WindowKind::Sum ? "sum" : "avg";
}

std::optional<WindowKind> window_kind_from_string(const std::string& s) {
    if (s == "sum") return WindowKind::Sum;
    if (s == "avg") return WindowKind::Avg;
    return std::nullopt;
}

double StationaryMixture::b_bar() const {
    double acc = 0.0;
    for (int n = 0; n < components(); ++n) acc += weights[n] * scale_means[n];
    return acc;
}

double StationaryMixture::pdf(double x, bool drop_zero_component) const {
    constexpr double kLogTiny = -745.0;
    double max_log = -std::numeric_limits<double>::infinity();
    std::vector<double> logs;
    logs.reserve(weights.size());
    const int first = drop_zero_component ? 1 : 0;
    double norm = 0.0;
    for (int n = first; n < components(); ++n) {
        norm += weights[n];
        if (weights[n] <= 0.0 || scale_vars[n] * sigma * sigma <= 0.0) continue;
        const double var = scale_vars[n] * sigma * sigma;
        const double d = x - scale_means[n] * mu;
        const double lg = std::log(weights[n]) - 0.5 * std::log(2.0 * M_PI * var) -
                          0.5 * d * d / var;
        logs.push_back(lg);
        max_log = std::max(max_log, lg);
    }
    if (logs.empty() || norm <= 0.0 || max_log < kLogTiny) return 0.0;
    double acc = 0.0;
    for (double lg : logs) acc += std::exp(lg - max_log);
    return std::exp(max_log) * acc / norm;
}

namespace {

double log_binomial_pmf(int w, int n, double p) {
    return std::lgamma(w + 1.0) - std::lgamma(n + 1.0) - std::lgamma(w - n + 1.0) +
           n * std::log(p) + (w - n) * std::log1p(-p);
}

double log_poisson_pmf(int n, double rate) {
    return n * std::log(rate) - rate - std::lgamma(n + 1.0);
}

}  // namespace

std::vector<double> count_distribution(const AssumptionParams& params, int w) {
    if (w < 1) throw DomainError("period must be >= 1");
    const int mw = params.m * w;
    std::vector<double> weights(mw + 1, 0.0);

    if (params.kind == Assumption::Poisson) {
        const double rate = std::clamp(params.p, 0.0, 1e9) * w;
        if (rate == 0.0) {
            weights[0] = 1.0;
            return weights;
        }
        double total = 0.0;
        for (int n = 0; n <= mw; ++n) {
            weights[n] = std::exp(log_poisson_pmf(n, rate));
            total += weights[n];
        }
        for (double& a : weights) a /= total;  // truncation at mw, renormalized
        return weights;
    }

    const double p = std::clamp(params.kind == Assumption::Always ? 1.0 : params.p, 0.0, 1.0);
    if (p == 0.0) {
        weights[0] = 1.0;
    } else if (p == 1.0) {
        weights[w] = 1.0;
    } else {
        for (int n = 0; n <= w; ++n) weights[n] = std::exp(log_binomial_pmf(w, n, p));
    }
    return weights;
}

StationaryMixture stationary_mixture(WindowKind kind, const AssumptionParams& params, int w) {
    StationaryMixture mix;
    mix.kind = kind;
    mix.mu = params.mu;
    mix.sigma = params.sigma;
    mix.w = w;
    mix.m = (params.kind == Assumption::Poisson) ? params.m : 1;
    mix.weights = count_distribution(params, w);
    const int mw = static_cast<int>(mix.weights.size()) - 1;
    mix.scale_means.resize(mw + 1);
    mix.scale_vars.resize(mw + 1);
    mix.scale_means[0] = 0.0;  // empty window: point mass at 0
    mix.scale_vars[0] = 0.0;
    for (int n = 1; n <= mw; ++n) {
        if (kind == WindowKind::Sum) {
            mix.scale_means[n] = n;
            mix.scale_vars[n] = n;
        } else {
            mix.scale_means[n] = 1.0;
            mix.scale_vars[n] = 1.0 / n;
        }
    }
    return mix;
}

double exit_prob(const AssumptionParams& params, int n, int a, int w) {
    if (a < 0 || a > n) throw DomainError("exit_prob requires 0 <= a <= n");
    if (n == 0) return 1.0;
    if (params.kind != Assumption::Poisson) {
        // Binomial (and Always as its p=1 special case): one record may leave.
        if (a > 1) return 0.0;
        const double p1 = static_cast<double>(n) / w;
        return a == 1 ? p1 : 1.0 - p1;
    }
    if (w == 1) return a == n ? 1.0 : 0.0;
    const double lg = std::lgamma(n + 1.0) - std::lgamma(a + 1.0) - std::lgamma(n - a + 1.0) +
                      (n - a) * std::log(static_cast<double>(w - 1)) -
                      n * std::log(static_cast<double>(w));
    return std::exp(lg);
}

double incoming_prob(const AssumptionParams& params, int b) {
    if (b < 0 || b > params.m) throw DomainError("incoming_prob requires 0 <= b <= m");
    if (params.kind != Assumption::Poisson) {
        const double p = params.kind == Assumption::Always ? 1.0 : std::clamp(params.p, 0.0, 1.0);
        return b == 1 ? p : 1.0 - p;
    }
    const double rate = std::max(params.p, 0.0);
    if (rate == 0.0) return b == 0 ? 1.0 : 0.0;
    if (b < params.m) return std::exp(log_poisson_pmf(b, rate));
    double below = 0.0;  // fold the tail into b = m so probabilities sum to 1
    for (int k = 0; k < params.m; ++k) below += std::exp(log_poisson_pmf(k, rate));
    return std::max(0.0, 1.0 - below);
}

TransitionCoeffs next_state_coeffs(WindowKind kind, int n, int a, int b) {
    if (a < 0 || a > n || b < 0) throw DomainError("next_state_coeffs requires 0 <= a <= n, b >= 0");
    if (kind == WindowKind::Sum) {
        const double kx = (n == 0) ? 1.0 : static_cast<double>(n - a) / n;
        return {kx, static_cast<double>(b)};
    }
    const int denom = n - a + b;
    if (denom == 0) return {1.0, 0.0};  // nothing leaves, nothing arrives
    return {static_cast<double>(n - a) / denom, static_cast<double>(b) / denom};
}

}  // namespace swagg
