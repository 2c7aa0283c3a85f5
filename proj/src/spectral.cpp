#include "swagg/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "swagg/errors.hpp"

namespace swagg {

const char* to_string(LambdaMethod m) {
    switch (m) {
        case LambdaMethod::Full: return "full";
        case LambdaMethod::Degenerate: return "degenerate";
        case LambdaMethod::PaperDegenerate: return "paper-degenerate";
    }
    return "?";
}

std::optional<LambdaMethod> lambda_method_from_string(const std::string& s) {
    if (s == "full") return LambdaMethod::Full;
    if (s == "degenerate") return LambdaMethod::Degenerate;
    if (s == "paper-degenerate") return LambdaMethod::PaperDegenerate;
    return std::nullopt;
}

std::pair<double, double> kappa_phi(WindowKind kind, const AssumptionParams& params,
                                    const StationaryMixture& mixture, int w) {
    const int mw = mixture.components() - 1;
    const int m = mixture.m;

    std::vector<double> in_prob(m + 1);
    double expected_b = 0.0;
    for (int b = 0; b <= m; ++b) {
        in_prob[b] = incoming_prob(params, b);
        expected_b += in_prob[b] * b;
    }

    // Fold the incoming sum per kept-count d = n - a before crossing with a.
    std::vector<double> x_by_kept, mu_by_kept;
    if (kind == WindowKind::Avg) {
        x_by_kept.assign(mw + 1, 0.0);
        mu_by_kept.assign(mw + 1, 0.0);
        for (int d = 0; d <= mw; ++d) {
            for (int b = 0; b <= m; ++b) {
                const auto coeffs = next_state_coeffs(kind, d, 0, b);
                x_by_kept[d] += in_prob[b] * coeffs.x;
                mu_by_kept[d] += in_prob[b] * coeffs.mu;
            }
        }
    }

    double kappa = 0.0;
    double phi = 0.0;
    for (int n = 0; n <= mw; ++n) {
        if (mixture.weights[n] <= 0.0) continue;
        double kx = 0.0;
        double kmu = 0.0;
        for (int a = 0; a <= n; ++a) {
            const double pa = exit_prob(params, n, a, w);
            if (pa == 0.0) continue;
            if (kind == WindowKind::Sum) {
                kx += pa * (n == 0 ? 1.0 : static_cast<double>(n - a) / n);
                kmu += pa * expected_b;
            } else {
                kx += pa * x_by_kept[n - a];
                kmu += pa * mu_by_kept[n - a];
            }
        }
        kappa += mixture.weights[n] * kx;
        phi += mixture.weights[n] * kmu;
    }
    return {kappa, phi};
}

LambdaResult spectral_lambda(const StationaryMixture& mixture, double kappa, double phi) {
    const double mu2 = mixture.mu * mixture.mu;
    const double sigma2 = mixture.sigma * mixture.sigma;
    const double b_bar = mixture.b_bar();
    const double shift = b_bar - phi;

    double num = 0.0;
    double den = 0.0;
    for (int n = 0; n < mixture.components(); ++n) {
        const double a = mixture.weights[n];
        if (a <= 0.0) continue;
        const double b = mixture.scale_means[n];
        const double c = mixture.scale_vars[n];
        num += a * (kappa * kappa * c * sigma2 + (kappa * b - shift) * (kappa * b - shift) * mu2);
        den += a * (c * sigma2 + (b - b_bar) * (b - b_bar) * mu2);
    }

    LambdaResult result;
    if (den <= 0.0) {
        result.lambda = kLambdaCeiling;  // frozen chain, lambda -> 1 pre-clamp
        result.clamped = true;
        result.degenerate = true;
        return result;
    }
    result.lambda = std::sqrt(num / den);
    if (result.lambda > kLambdaCeiling) {
        result.lambda = kLambdaCeiling;
        result.clamped = true;
    }
    return result;
}

double degenerate_lambda(const AssumptionParams& params, const StationaryMixture& mixture,
                         int w) {
    if (params.kind == Assumption::Always) return 0.0;
    const double arrive_none = incoming_prob(params, 0);
    double acc = 0.0;
    for (int n = 0; n < mixture.components(); ++n) {
        if (mixture.weights[n] <= 0.0) continue;
        acc += mixture.weights[n] * exit_prob(params, n, 0, w) * arrive_none;
    }
    return std::clamp(acc, 0.0, 1.0);
}

double paper_degenerate_lambda(const AssumptionParams& params, int w) {
    // Unweighted sum over n = 0..N of (1 - n/N)(1 - p), N taken as w.
    return (1.0 - params.p) * (w + 1.0) / 2.0;
}

SpectralQuantities compute_spectral(WindowKind kind, const AssumptionParams& params,
                                    const StationaryMixture& mixture, int w,
                                    LambdaMethod method) {
    SpectralQuantities q;
    q.method = method;
    std::tie(q.kappa, q.phi) = kappa_phi(kind, params, mixture, w);
    const LambdaResult full = spectral_lambda(mixture, q.kappa, q.phi);
    q.lambda_full = full.lambda;
    q.lambda_lower = degenerate_lambda(params, mixture, w);
    q.degenerate = full.degenerate;

    switch (method) {
        case LambdaMethod::Full:
            q.lambda = full.lambda;
            q.clamped = full.clamped;
            break;
        case LambdaMethod::Degenerate:
            q.lambda = std::min(q.lambda_lower, kLambdaCeiling);
            q.clamped = q.lambda_lower > kLambdaCeiling;
            break;
        case LambdaMethod::PaperDegenerate: {
            const double raw = paper_degenerate_lambda(params, w);
            q.lambda = std::clamp(raw, 0.0, kLambdaCeiling);
            q.clamped = raw != q.lambda;
            break;
        }
    }
    q.alpha = (1.0 + q.lambda) / (1.0 - q.lambda);
    return q;
}

}  // namespace swagg
