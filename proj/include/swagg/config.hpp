#pragma once

#include <optional>
#include <string>
#include <vector>

#include "swagg/bounds.hpp"
#include "swagg/oracle.hpp"

namespace swagg {

// Pipeline settings; defaults follow the reference evaluation protocol
// (rho 0.9, quantiles 0.05/0.95, 100 trees, 10 ensembles).
struct RunConfig {
    std::string entity_csv;
    std::string action_csv;
    std::string out_dir = ".";

    std::int64_t freq_seconds = 86400;
    std::vector<int> periods{7, 15, 30};
    std::vector<WindowKind> windows{WindowKind::Sum, WindowKind::Avg};
    std::vector<Aggregator> aggregators{Aggregator::Avg, Aggregator::Max, Aggregator::Min};
    std::optional<Assumption> assumption;
    std::optional<int> m_cap;
    double rho = 0.9;
    double rho_l = 0.05;
    double rho_r = 0.95;
    int ensembles = 10;
    int trees = 100;
    std::uint64_t seed = 1;
    LambdaMethod lambda_method = LambdaMethod::Full;
    EdgePolicy edge_policy = EdgePolicy::FullOnly;
    std::string method = "sparse";  // generate: timecut | sparse
    bool emit_ensembles = false;
    int threads = 0;

    void validate() const;  // throws ConfigError
    EstimateOptions estimate_options() const;
    GenerateOptions generate_options() const;
};

// Flat key=value file; '#' starts a comment. Unknown keys are ConfigErrors.
void apply_config_file(RunConfig& config, const std::string& path);

// Comma-separated positive integers, sorted ascending, duplicates removed.
std::vector<int> parse_periods(const std::string& text);
std::vector<WindowKind> parse_windows(const std::string& text);
std::vector<Aggregator> parse_aggregators(const std::string& text);

}  // namespace swagg
