#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "swagg/config.hpp"
#include "swagg/csv.hpp"
#include "swagg/errors.hpp"
#include "swagg/selector.hpp"
#include "swagg/synthetic.hpp"

namespace {

using namespace swagg;

std::string out_path(const RunConfig& config, const std::string& name) {
    std::filesystem::create_directories(config.out_dir);
    return (std::filesystem::path(config.out_dir) / name).string();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Raw command-line values; only options the user actually passed are applied,
// so a --config file fills the gaps and explicit flags win over it.
struct CliValues {
    std::string entities, actions, out, config_file;
    std::string periods, windows, aggregators, assumption, lambda_method, edge_policy, method;
    std::int64_t freq_seconds = 0;
    int m_cap = 0;
    double rho = 0, rho_l = 0, rho_r = 0;
    int ensembles = 0, trees = 0, threads = 0;
    std::uint64_t seed = 0;
    bool emit_ensembles = false;

    CLI::App* cmd = nullptr;

    void add_to(CLI::App* sub, bool needs_inputs) {
        cmd = sub;
        if (needs_inputs) {
            sub->add_option("--entities", entities, "Entity CSV (entity_id,label)")->required();
            sub->add_option("--actions", actions,
                            "Action CSV (entity_id,timestamp,<feature...>)")
                ->required();
        }
        sub->add_option("--out", out, "Output directory");
        sub->add_option("--config", config_file, "key=value config file");
        sub->add_option("--freq-seconds", freq_seconds, "Resample bucket width in seconds");
        sub->add_option("--periods", periods, "Comma-separated window periods, e.g. 7,15,30");
        sub->add_option("--windows", windows, "Window kinds: sum,avg");
        sub->add_option("--aggregators", aggregators, "Aggregators: avg,max,min");
        sub->add_option("--assumption", assumption, "always | binomial | poisson");
        sub->add_option("--m-cap", m_cap, "Cap on max records per bucket");
        sub->add_option("--rho", rho, "Average-bound confidence");
        sub->add_option("--rho-l", rho_l, "Lower extreme quantile");
        sub->add_option("--rho-r", rho_r, "Upper extreme quantile");
        sub->add_option("--ensembles", ensembles, "Bagging ensemble count");
        sub->add_option("--trees", trees, "Trees per forest");
        sub->add_option("--seed", seed, "Master seed");
        sub->add_option("--threads", threads, "Worker threads (0 = auto)");
        sub->add_option("--lambda-method", lambda_method,
                        "Spectral ratio: full | degenerate | paper-degenerate");
    }

    bool given(const std::string& name) const {
        if (!cmd) return false;
        const auto* option = cmd->get_option_no_throw(name);
        return option && option->count() > 0;
    }

    RunConfig build() const {
        RunConfig config;
        config.entity_csv = entities;
        config.action_csv = actions;
        if (!config_file.empty()) apply_config_file(config, config_file);
        if (given("--out")) config.out_dir = out;
        if (given("--freq-seconds")) config.freq_seconds = freq_seconds;
        if (given("--periods")) config.periods = parse_periods(periods);
        if (given("--windows")) config.windows = parse_windows(windows);
        if (given("--aggregators")) config.aggregators = parse_aggregators(aggregators);
        if (given("--assumption")) {
            const auto kind = assumption_from_string(assumption);
            if (!kind) throw ConfigError("unknown assumption '" + assumption + "'");
            config.assumption = kind;
        }
        if (given("--m-cap")) config.m_cap = m_cap;
        if (given("--rho")) config.rho = rho;
        if (given("--rho-l")) config.rho_l = rho_l;
        if (given("--rho-r")) config.rho_r = rho_r;
        if (given("--ensembles")) config.ensembles = ensembles;
        if (given("--trees")) config.trees = trees;
        if (given("--seed")) config.seed = seed;
        if (given("--threads")) config.threads = threads;
        if (given("--lambda-method")) {
            const auto method = lambda_method_from_string(lambda_method);
            if (!method) throw ConfigError("unknown lambda method '" + lambda_method + "'");
            config.lambda_method = *method;
        }
        if (given("--method")) config.method = method;
        if (given("--edge-policy")) {
            const auto policy = edge_policy_from_string(edge_policy);
            if (!policy) throw ConfigError("unknown edge policy '" + edge_policy + "'");
            config.edge_policy = *policy;
        }
        config.emit_ensembles = emit_ensembles;
        config.validate();
        return config;
    }
};

struct LoadedTables {
    EntityTable entities;
    ActionTable actions;
};

LoadedTables load_tables(const RunConfig& config) {
    LoadedTables tables;
    tables.entities = load_entity_table(config.entity_csv);
    tables.actions = load_action_table(config.action_csv, tables.entities);
    return tables;
}

int run_estimate(const RunConfig& config) {
    const LoadedTables tables = load_tables(config);
    const EstimateResult estimated =
        estimate_all(tables.entities, tables.actions, config.estimate_options());
    write_file(out_path(config, "bounds.csv"), estimated.bounds.to_csv());

    const auto select_start = std::chrono::steady_clock::now();
    const LabelData labels = LabelData::from_strings(tables.entities.labels);
    const ImportanceReport report = ensemble_select(estimated.bounds, labels, config.ensembles,
                                                    config.trees, config.seed, config.threads);
    write_file(out_path(config, "importance.csv"), report.to_csv());
    if (config.emit_ensembles)
        write_file(out_path(config, "ensembles.csv"), report.per_ensemble_csv());
    const double select_seconds = seconds_since(select_start);

    if (estimated.dropped_records > 0)
        std::cerr << "warning: dropped " << estimated.dropped_records
                  << " records outside the grid\n";
    if (report.uniform_fallback)
        std::cerr << "warning: uniform importance fallback (degenerate target)\n";
    std::printf("fit %.3fs estimate %.3fs select %.3fs\n", estimated.fit_seconds,
                estimated.estimate_seconds, select_seconds);
    return 0;
}

int run_generate(const RunConfig& config) {
    const LoadedTables tables = load_tables(config);
    const GenerateOptions options = config.generate_options();
    const auto start = std::chrono::steady_clock::now();
    const FeatureTable table = config.method == "timecut"
                                   ? generate_tf_timecut(tables.entities, tables.actions, options)
                                   : generate_tf_sparse(tables.entities, tables.actions, options);
    write_file(out_path(config, "features.csv"), table.to_csv());
    bool any = false;
    for (double v : table.cells)
        if (!std::isnan(v)) any = true;
    if (!any) std::cerr << "warning: feature table is all-null\n";
    std::printf("generate(%s) %.3fs, %zu columns\n", config.method.c_str(),
                seconds_since(start), table.columns.size());
    return 0;
}

int run_compare(const RunConfig& config) {
    const LoadedTables tables = load_tables(config);
    const LabelData labels = LabelData::from_strings(tables.entities.labels);

    const EstimateResult estimated =
        estimate_all(tables.entities, tables.actions, config.estimate_options());
    write_file(out_path(config, "bounds.csv"), estimated.bounds.to_csv());
    const ImportanceReport report_est = ensemble_select(
        estimated.bounds, labels, config.ensembles, config.trees, config.seed, config.threads);
    write_file(out_path(config, "importance_estimated.csv"), report_est.to_csv());

    GenerateOptions gen = config.generate_options();
    gen.edge_policy = EdgePolicy::FullOnly;  // match the estimator's chain
    const FeatureTable real = config.method == "timecut"
                                  ? generate_tf_timecut(tables.entities, tables.actions, gen)
                                  : generate_tf_sparse(tables.entities, tables.actions, gen);
    write_file(out_path(config, "features.csv"), real.to_csv());
    const ImportanceReport report_act =
        ensemble_select_table(real, real.columns, labels, config.ensembles, config.trees,
                              Rng::derive(config.seed, 0x5eedULL), config.threads);
    write_file(out_path(config, "importance_actual.csv"), report_act.to_csv());

    std::string recall_csv = "fraction,recall\n";
    for (int step = 1; step <= 20; ++step) {
        const double fraction = 0.05 * step;
        recall_csv += format_double(fraction) + "," +
                      format_double(rank_recall(report_est, report_act, fraction)) + "\n";
    }
    write_file(out_path(config, "recall.csv"), recall_csv);

    const ErrorQuartiles q = relative_error_quartiles(report_est, report_act);
    write_file(out_path(config, "error_quartiles.csv"),
               "q25,q50,q75\n" + format_double(q.q25) + "," + format_double(q.q50) + "," +
                   format_double(q.q75) + "\n");
    std::printf("recall@20%% %.3f, error quartiles %.3f / %.3f / %.3f\n",
                rank_recall(report_est, report_act, 0.20), q.q25, q.q50, q.q75);
    return 0;
}

struct SimulateValues {
    std::string window = "sum";
    std::string assumption = "binomial";
    double mu = 10.0;
    double sigma = 1.0;
    double p = 0.3;
    int m = 1;
    int w = 10;
    int steps = 500000;
    int trials = 100;
    int bins = 80;
};

int run_simulate(const RunConfig& config, const SimulateValues& sim) {
    const auto kind = window_kind_from_string(sim.window);
    if (!kind) throw ConfigError("unknown window '" + sim.window + "'");
    const auto assumption = assumption_from_string(sim.assumption);
    if (!assumption) throw ConfigError("unknown assumption '" + sim.assumption + "'");
    if (sim.w < 1 || sim.steps < sim.w) throw ConfigError("need steps >= w >= 1");
    if (sim.trials < 1) throw ConfigError("trials must be >= 1");
    if (sim.m < 1) throw ConfigError("m must be >= 1");

    AssumptionParams params;
    params.kind = *assumption;
    params.mu = sim.mu;
    params.sigma = sim.sigma;
    params.p = *assumption == Assumption::Always ? 1.0 : sim.p;
    params.m = *assumption == Assumption::Poisson ? sim.m : 1;
    params.ell = sim.steps;
    params.c_min = sim.mu;
    params.c_max = sim.mu;

    const StationaryMixture mixture = stationary_mixture(*kind, params, sim.w);

    const ChainSample first = simulate_chain(*kind, params, sim.w, sim.steps, config.seed);
    std::string histogram_csv = "bin_lo,bin_hi,density,component_count\n";
    std::string mixture_csv = "bin_lo,bin_hi,mixture_density\n";
    for (const auto& bin : chain_histogram(first, mixture, sim.bins)) {
        histogram_csv += format_double(bin.lo) + "," + format_double(bin.hi) + "," +
                         format_double(bin.density) + "," + std::to_string(bin.component_count) +
                         "\n";
        mixture_csv += format_double(bin.lo) + "," + format_double(bin.hi) + "," +
                       format_double(bin.mixture_density) + "\n";
    }
    write_file(out_path(config, "histogram.csv"), histogram_csv);
    write_file(out_path(config, "mixture_density.csv"), mixture_csv);

    long covered_avg = 0, covered_max = 0, covered_min = 0, populated_trials = 0;
    for (int t = 0; t < sim.trials; ++t) {
        const ChainSample chain =
            simulate_chain(*kind, params, sim.w, sim.steps, Rng::derive(config.seed, t));
        const auto aggregates = aggregate_chain(chain);
        if (!aggregates) continue;
        ++populated_trials;
        AssumptionParams sample_params = params;
        sample_params.c_min = chain.record_min;
        sample_params.c_max = chain.record_max;
        const StationaryMixture mix = stationary_mixture(*kind, sample_params, sim.w);
        const SpectralQuantities spectral =
            compute_spectral(*kind, sample_params, mix, sim.w, config.lambda_method);
        const auto b_avg = avg_bound(mix, spectral, sample_params, sim.w, config.rho);
        const auto b_max = max_bound(mix, sample_params, sim.w, config.rho_l, config.rho_r);
        const auto b_min = min_bound(mix, sample_params, sim.w, config.rho_l, config.rho_r);
        if (b_avg && aggregates->avg >= b_avg->lo && aggregates->avg <= b_avg->hi) ++covered_avg;
        if (b_max && aggregates->max >= b_max->lo && aggregates->max <= b_max->hi) ++covered_max;
        if (b_min && aggregates->min >= b_min->lo && aggregates->min <= b_min->hi) ++covered_min;
    }

    std::string coverage_csv = "window,aggregator,trials,covered,rate,status\n";
    auto coverage_row = [&](const char* agg, long covered) {
        coverage_csv += sim.window + "," + agg + "," + std::to_string(populated_trials) + ",";
        if (populated_trials == 0)
            coverage_csv += "0,,NoRecords\n";
        else
            coverage_csv += std::to_string(covered) + "," +
                            format_double(static_cast<double>(covered) / populated_trials) +
                            ",ok\n";
    };
    coverage_row("avg", covered_avg);
    coverage_row("max", covered_max);
    coverage_row("min", covered_min);
    write_file(out_path(config, "coverage.csv"), coverage_csv);

    if (populated_trials == 0)
        std::printf("simulate: NoRecords (no populated windows)\n");
    else
        std::printf("simulate: %ld trials, coverage avg %.3f max %.3f min %.3f\n",
                    populated_trials, static_cast<double>(covered_avg) / populated_trials,
                    static_cast<double>(covered_max) / populated_trials,
                    static_cast<double>(covered_min) / populated_trials);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "swagg: sliding-window aggregate feature selection straight from the action table"};
    app.require_subcommand(0, 1);

    CliValues estimate_values, generate_values, compare_values, simulate_values;
    SimulateValues sim;

    auto* cmd_estimate =
        app.add_subcommand("estimate", "Estimate bounds and rank features from the action table");
    estimate_values.add_to(cmd_estimate, true);
    cmd_estimate->add_flag("--emit-ensembles", estimate_values.emit_ensembles,
                           "Also write per-ensemble importances");

    auto* cmd_generate =
        app.add_subcommand("generate", "Generate the real feature table by brute force");
    generate_values.add_to(cmd_generate, true);
    cmd_generate->add_option("--method", generate_values.method, "timecut | sparse");
    cmd_generate->add_option("--edge-policy", generate_values.edge_policy,
                             "full | partial (include cut-off windows at the grid start)");

    auto* cmd_compare = app.add_subcommand(
        "compare", "Estimate, generate, and score estimated ranks against actual ranks");
    compare_values.add_to(cmd_compare, true);
    cmd_compare->add_option("--method", compare_values.method, "timecut | sparse");

    auto* cmd_simulate = app.add_subcommand(
        "simulate", "Monte-Carlo chain simulation: histogram, mixture density, bound coverage");
    simulate_values.add_to(cmd_simulate, false);
    cmd_simulate->add_option("--window", sim.window, "sum | avg");
    cmd_simulate->add_option("--sim-assumption", sim.assumption, "always | binomial | poisson");
    cmd_simulate->add_option("--mu", sim.mu, "Record value mean");
    cmd_simulate->add_option("--sigma", sim.sigma, "Record value std");
    cmd_simulate->add_option("--p", sim.p, "Existence probability / bucket rate");
    cmd_simulate->add_option("--m", sim.m, "Max records per bucket (poisson)");
    cmd_simulate->add_option("--w", sim.w, "Window period");
    cmd_simulate->add_option("--steps", sim.steps, "Chain bucket count");
    cmd_simulate->add_option("--trials", sim.trials, "Independent chains for coverage");
    cmd_simulate->add_option("--bins", sim.bins, "Histogram bins");

    std::vector<int> synth_shape;
    SyntheticSpec synth;
    std::string synth_out = ".";
    app.add_option("--make-synthetic", synth_shape,
                   "Write a planted synthetic dataset: n_entities n_informative n_noise")
        ->expected(3);
    app.add_option("--out", synth_out, "Output directory (synthetic mode)");
    app.add_option("--seed", synth.seed, "Seed (synthetic mode)");
    app.add_option("--freq-seconds", synth.freq_seconds, "Bucket width (synthetic mode)");
    app.add_option("--synth-buckets", synth.buckets, "Grid length (synthetic mode)");
    app.add_option("--synth-rate", synth.rate, "Records per bucket (synthetic mode)");
    app.add_option("--synth-shift", synth.shift, "Planted label shift (synthetic mode)");

    try {
        app.parse(argc, argv);

        if (!synth_shape.empty()) {
            synth.entities = synth_shape[0];
            synth.informative = synth_shape[1];
            synth.noise = synth_shape[2];
            const SyntheticData data = make_synthetic(synth);
            std::filesystem::create_directories(synth_out);
            std::string entity_csv = "entity_id,label\n";
            for (std::size_t i = 0; i < data.entities.size(); ++i)
                entity_csv += csv_escape(data.entities.ids[i]) + "," +
                              csv_escape(data.entities.labels[i]) + "\n";
            write_file((std::filesystem::path(synth_out) / "entity.csv").string(), entity_csv);
            std::string action_csv = "entity_id,timestamp";
            for (const auto& f : data.actions.features) action_csv += "," + csv_escape(f);
            action_csv += '\n';
            for (std::size_t row = 0; row < data.actions.rows(); ++row) {
                action_csv += csv_escape(data.entities.ids[static_cast<std::size_t>(
                    data.actions.entity[row])]);
                action_csv += ',' + std::to_string(data.actions.ts[row]);
                for (const auto& col : data.actions.values)
                    action_csv += ',' + format_double(col[row]);
                action_csv += '\n';
            }
            write_file((std::filesystem::path(synth_out) / "action.csv").string(), action_csv);
            std::printf("synthetic: %zu entities, %zu rows, %zu features\n",
                        data.entities.size(), data.actions.rows(),
                        data.actions.features.size());
            return 0;
        }

        if (cmd_estimate->parsed()) return run_estimate(estimate_values.build());
        if (cmd_generate->parsed()) return run_generate(generate_values.build());
        if (cmd_compare->parsed()) return run_compare(compare_values.build());
        if (cmd_simulate->parsed()) return run_simulate(simulate_values.build(), sim);
        std::cout << app.help() << std::endl;
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 3;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
}
