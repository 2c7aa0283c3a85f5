#pragma once

#include <vector>

#include "swagg/tables.hpp"

namespace swagg {

enum class WindowKind { Sum, Avg };

const char* to_string(WindowKind k);
std::optional<WindowKind> window_kind_from_string(const std::string& s);

// Stationary law of the window chain: the Gaussian mixture
//   sum_n weights[n] * N(scale_means[n] * mu, scale_vars[n] * sigma^2),
// n = 0..m*w, component 0 the point mass at 0 (empty window).
struct StationaryMixture {
    WindowKind kind = WindowKind::Sum;
    std::vector<double> weights;      // a_n
    std::vector<double> scale_means;  // b_n
    std::vector<double> scale_vars;   // c_n
    double mu = 0.0;
    double sigma = 0.0;
    int w = 1;
    int m = 1;

    int components() const { return static_cast<int>(weights.size()); }
    double b_bar() const;               // sum a_n b_n
    double mean() const { return b_bar() * mu; }

    // Density at x. With drop_zero_component the point mass at 0 is removed and
    // the remaining weights renormalized (how simulation histograms are drawn).
    double pdf(double x, bool drop_zero_component) const;
};

// Weights of the record-count law S(W) over one window of w buckets.
// Binomial/Always: Binomial(w, p); Poisson: Poisson(w*p) truncated at m*w and
// renormalized. Evaluated through log-gamma.
std::vector<double> count_distribution(const AssumptionParams& params, int w);

StationaryMixture stationary_mixture(WindowKind kind, const AssumptionParams& params, int w);

// P(departing bucket count = a | window count = n). Throws DomainError if a > n.
double exit_prob(const AssumptionParams& params, int n, int a, int w);

// P(incoming bucket count = b); Poisson tail mass beyond m folds into b = m.
double incoming_prob(const AssumptionParams& params, int b);

struct TransitionCoeffs {
    double x;   // multiplies the current window value
    double mu;  // multiplies the record mean
};

// E[W' | W = x, count n, a leaving, b arriving] = coeffs.x * x + coeffs.mu * mu.
// Sum window: ((n-a)/n, b), with x-coefficient 1 when n = 0. Average window:
// ((n-a)/(n-a+b), b/(n-a+b)), state retained ((1, 0)) when n-a+b = 0.
TransitionCoeffs next_state_coeffs(WindowKind kind, int n, int a, int b);

}  // namespace swagg
