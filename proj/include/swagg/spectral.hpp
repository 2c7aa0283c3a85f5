#pragma once

#include <utility>

#include "swagg/window_model.hpp"

namespace swagg {

enum class LambdaMethod { Full, Degenerate, PaperDegenerate };

const char* to_string(LambdaMethod m);
std::optional<LambdaMethod> lambda_method_from_string(const std::string& s);

// Spectral inputs to the concentration bound. alpha = (1 + lambda)/(1 - lambda)
// for whichever lambda the configured method selects.
struct SpectralQuantities {
    double kappa = 0.0;         // x-coefficient of the one-step conditional mean
    double phi = 0.0;           // mu-coefficient
    double lambda = 0.0;        // ratio in use, clamped into [0, 1 - 1e-9]
    double lambda_full = 0.0;   // full inner-product ratio
    double lambda_lower = 0.0;  // retention-probability lower estimate
    double alpha = 1.0;
    LambdaMethod method = LambdaMethod::Full;
    bool clamped = false;
    bool degenerate = false;  // zero-variance chain; bounds fall back to real bounds
};

constexpr double kLambdaCeiling = 1.0 - 1e-9;

// kappa = sum_n a_n sum_a P(a|n) sum_b P(b) x_coeff(n,a,b); phi likewise with
// the mu coefficient. The b-sums are folded first, so memory stays O(m*w).
std::pair<double, double> kappa_phi(WindowKind kind, const AssumptionParams& params,
                                    const StationaryMixture& mixture, int w);

struct LambdaResult {
    double lambda = 0.0;
    bool clamped = false;
    bool degenerate = false;
};

// lambda = ||kappa x - (b_bar - phi) mu||_pi / ||x - b_bar mu||_pi over the
// mixture. A zero denominator (no dispersion at all) is the degenerate case.
LambdaResult spectral_lambda(const StationaryMixture& mixture, double kappa, double phi);

// Probability-weighted chance that a transition retains the state:
// sum_n a_n P(leave 0 | n) P(arrive 0). Always assumption gives 0.
double degenerate_lambda(const AssumptionParams& params, const StationaryMixture& mixture, int w);

// Verbatim unweighted retention sum with N = w; may exceed 1, kept for
// comparison behind the paper-degenerate debug method.
double paper_degenerate_lambda(const AssumptionParams& params, int w);

SpectralQuantities compute_spectral(WindowKind kind, const AssumptionParams& params,
                                    const StationaryMixture& mixture, int w,
                                    LambdaMethod method = LambdaMethod::Full);

}  // namespace swagg
