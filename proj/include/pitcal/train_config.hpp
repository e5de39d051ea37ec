#pragma once

#include <cstdint>
#include <vector>

namespace pitcal {

/// Shared fit settings for both map estimators. Fitting is single-threaded
/// and fully determined by (data, config, seed).
struct TrainConfig {
    double learning_rate = 1e-3;
    /// Decoupled weight decay applied to weight matrices only (never biases,
    /// never the softplus-mapped monotone blocks). Shrinks covariate
    /// dependence toward a constant map unless the data earn it, which keeps
    /// small-sample fits stable.
    double weight_decay = 5.0;
    std::size_t epochs = 300;
    /// Full batch when n < batch_size, otherwise deterministic shuffled
    /// minibatches of this size.
    std::size_t batch_size = 512;
    std::uint64_t seed = 0;
    /// Hidden layer widths. Empty means estimator-specific default (the
    /// nonparametric fit then picks its width from the capacity schedule).
    std::vector<std::size_t> hidden_sizes = {64, 64, 64};
    /// Lower bound added to softplus outputs so family parameters stay
    /// strictly positive.
    double parameter_floor = 1e-3;
    /// Temporal mixing front stage: number of timesteps in the input block
    /// (0 disables) and learned filters per predictor channel.
    std::size_t mixer_steps = 0;
    std::size_t mixer_filters = 3;

    void validate() const;
};

} // namespace pitcal
