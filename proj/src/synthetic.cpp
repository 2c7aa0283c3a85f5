#include "swagg/synthetic.hpp"

#include <string>

#include "swagg/errors.hpp"
#include "swagg/rng.hpp"

namespace swagg {

SyntheticData make_synthetic(const SyntheticSpec& spec) {
    if (spec.entities < 2 || spec.informative < 0 || spec.noise < 0 ||
        spec.informative + spec.noise < 1 || spec.buckets < 1)
        throw ConfigError("synthetic spec needs >= 2 entities and >= 1 feature");

    SyntheticData data;
    Rng rng(spec.seed);
    const int n_features = spec.informative + spec.noise;

    for (int f = 0; f < spec.informative; ++f)
        data.actions.features.push_back("inf" + std::to_string(f));
    for (int f = 0; f < spec.noise; ++f)
        data.actions.features.push_back("noise" + std::to_string(f));
    data.actions.values.assign(static_cast<std::size_t>(n_features), {});

    for (int e = 0; e < spec.entities; ++e) {
        const int label = e % 2;
        data.entities.add("e" + std::to_string(e), std::to_string(label));
        for (int b = 0; b < spec.buckets; ++b) {
            const int records = rng.poisson(spec.rate);
            for (int r = 0; r < records; ++r) {
                data.actions.entity.push_back(e);
                data.actions.ts.push_back(static_cast<Timestamp>(b) * spec.freq_seconds +
                                          (r * 997) % spec.freq_seconds);
                for (int f = 0; f < n_features; ++f) {
                    double mean = spec.base;
                    if (f < spec.informative && label == 1)
                        mean += spec.shift + 0.5 * static_cast<double>(f);
                    data.actions.values[static_cast<std::size_t>(f)].push_back(
                        rng.normal(mean, spec.sigma));
                }
            }
        }
    }
    return data;
}

}  // namespace swagg
