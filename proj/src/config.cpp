#include "swagg/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

#include "swagg/errors.hpp"

namespace swagg {

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            parts.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

long parse_long(const std::string& text, const std::string& key) {
    char* end = nullptr;
    const long v = std::strtol(text.c_str(), &end, 10);
    if (end == text.c_str() || *end != '\0')
        throw ConfigError(key + ": '" + text + "' is not an integer");
    return v;
}

double parse_real(const std::string& text, const std::string& key) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0')
        throw ConfigError(key + ": '" + text + "' is not a number");
    return v;
}

}  // namespace

std::vector<int> parse_periods(const std::string& text) {
    std::vector<int> periods;
    for (const auto& part : split_list(text)) {
        if (part.empty()) continue;
        const long v = parse_long(part, "periods");
        if (v < 1) throw ConfigError("periods must be positive, got " + part);
        periods.push_back(static_cast<int>(v));
    }
    std::sort(periods.begin(), periods.end());
    periods.erase(std::unique(periods.begin(), periods.end()), periods.end());
    if (periods.empty()) throw ConfigError("periods must be non-empty");
    return periods;
}

std::vector<WindowKind> parse_windows(const std::string& text) {
    std::vector<WindowKind> kinds;
    for (const auto& part : split_list(text)) {
        if (part.empty()) continue;
        const auto kind = window_kind_from_string(part);
        if (!kind) throw ConfigError("unknown window '" + part + "'");
        if (std::find(kinds.begin(), kinds.end(), *kind) == kinds.end()) kinds.push_back(*kind);
    }
    if (kinds.empty()) throw ConfigError("windows must be non-empty");
    return kinds;
}

std::vector<Aggregator> parse_aggregators(const std::string& text) {
    std::vector<Aggregator> aggs;
    for (const auto& part : split_list(text)) {
        if (part.empty()) continue;
        const auto agg = aggregator_from_string(part);
        if (!agg) throw ConfigError("unknown aggregator '" + part + "'");
        if (std::find(aggs.begin(), aggs.end(), *agg) == aggs.end()) aggs.push_back(*agg);
    }
    if (aggs.empty()) throw ConfigError("aggregators must be non-empty");
    return aggs;
}

void RunConfig::validate() const {
    if (freq_seconds < 1) throw ConfigError("freq_seconds must be positive");
    if (periods.empty()) throw ConfigError("periods must be non-empty");
    if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("rho must be inside (0, 1)");
    if (!(rho_l > 0.0 && rho_l < rho_r && rho_r < 1.0))
        throw ConfigError("need 0 < rho_l < rho_r < 1");
    if (ensembles < 1) throw ConfigError("ensembles must be >= 1");
    if (trees < 1) throw ConfigError("trees must be >= 1");
    if (m_cap && *m_cap < 1) throw ConfigError("m_cap must be >= 1");
    if (method != "timecut" && method != "sparse")
        throw ConfigError("method must be timecut or sparse");
}

EstimateOptions RunConfig::estimate_options() const {
    EstimateOptions options;
    options.periods = periods;
    options.kinds = windows;
    options.aggregators = aggregators;
    options.rho = rho;
    options.rho_l = rho_l;
    options.rho_r = rho_r;
    options.assumption = assumption;
    options.m_cap = m_cap;
    options.lambda_method = lambda_method;
    options.freq_seconds = freq_seconds;
    options.threads = threads;
    return options;
}

GenerateOptions RunConfig::generate_options() const {
    GenerateOptions options;
    options.periods = periods;
    options.kinds = windows;
    options.aggregators = aggregators;
    options.freq_seconds = freq_seconds;
    options.edge_policy = edge_policy;
    options.threads = threads;
    return options;
}

void apply_config_file(RunConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        // trim
        const auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        const auto end = line.find_last_not_of(" \t\r");
        line = line.substr(begin, end - begin + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key=value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t");
            return s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "freq_seconds") {
            config.freq_seconds = parse_long(value, key);
        } else if (key == "assumption") {
            const auto kind = assumption_from_string(value);
            if (!kind) throw ConfigError("unknown assumption '" + value + "'");
            config.assumption = kind;
        } else if (key == "m_cap") {
            config.m_cap = static_cast<int>(parse_long(value, key));
        } else if (key == "periods") {
            config.periods = parse_periods(value);
        } else if (key == "windows") {
            config.windows = parse_windows(value);
        } else if (key == "aggregators") {
            config.aggregators = parse_aggregators(value);
        } else if (key == "rho") {
            config.rho = parse_real(value, key);
        } else if (key == "rho_l") {
            config.rho_l = parse_real(value, key);
        } else if (key == "rho_r") {
            config.rho_r = parse_real(value, key);
        } else if (key == "ensembles") {
            config.ensembles = static_cast<int>(parse_long(value, key));
        } else if (key == "trees") {
            config.trees = static_cast<int>(parse_long(value, key));
        } else if (key == "seed") {
            config.seed = static_cast<std::uint64_t>(parse_long(value, key));
        } else if (key == "lambda_method") {
            const auto method = lambda_method_from_string(value);
            if (!method) throw ConfigError("unknown lambda_method '" + value + "'");
            config.lambda_method = *method;
        } else {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": unknown key '" + key +
                              "'");
        }
    }
}

}  // namespace swagg
