#ifndef QUATNN_TRAIN_HPP
#define QUATNN_TRAIN_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "quatnn/data.hpp"
#include "quatnn/network.hpp"

namespace quatnn {

struct TrainConfig {
    std::size_t epochs = 250;
    double lr = 0.1;
    std::size_t batch_size = 32;
    std::vector<std::size_t> shape{3, 3, 2, 2};
    Activation activation = Activation::Tanhshrink;
    std::uint64_t seed_teacher = 72;
    std::uint64_t seed_student = 344;
    std::uint64_t seed_data = 3;
    std::uint64_t seed_shuffle = 4;

    /// Throws std::invalid_argument when epochs < 1, lr <= 0, batch_size < 1
    /// or the shape has fewer than two entries.
    void validate() const;
};

/// One row of the training trajectory. The weight-difference statistics
/// compare student and reference parameters positionally (same layer, same
/// slot) and are NaN when no reference network is supplied.
struct EpochMetrics {
    std::size_t epoch = 0;  // 1-based
    double train_loss = 0.0;  // mean per-sample loss seen during the epoch
    double val_loss = 0.0;    // mean per-sample loss over the validation set
    double wdiff_mean = 0.0;
    double wdiff_min = 0.0;
    double wdiff_max = 0.0;
};

struct WeightDifference {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
};

/// Quaternion-norm distance per parameter between two same-shape networks,
/// over all weights and biases, measured against the function-equivalent
/// relabeling of `b` closest to `a`.
///
/// Split activations commute with permuting a hidden layer's units and with
/// left-multiplying a unit's row and bias by any of {+-1, +-i, +-j, +-k}
/// (compensated by right-multiplying its outgoing column by the inverse), so
/// two parameter sets related by such a relabeling compute the same function.
/// A student recovers a teacher only up to this group; the raw positional
/// distance stays O(1) even at machine-zero loss. The search enumerates the
/// group exactly (it is finite), which is exponential in the hidden-unit
/// counts and therefore guarded: shapes beyond ~10M relabelings are
/// rejected. Networks without hidden layers compare positionally.
WeightDifference weight_difference(const Network& a, const Network& b);

/// Mean per-sample loss of the network over a dataset.
double evaluate(const Network& net, const Dataset& ds);

struct TrainResult {
    Network net;
    std::vector<EpochMetrics> history;
};

/// Plain SGD over shuffled mini-batches. Shuffling is Fisher-Yates seeded
/// with seed_shuffle + epoch index; the last partial batch is kept and its
/// gradient averaged over its actual size. Throws std::runtime_error with
/// epoch/batch context if the loss turns non-finite.
TrainResult train(Network student, const Dataset& train_ds, const Dataset& val_ds,
                  const TrainConfig& cfg, const Network* reference = nullptr,
                  std::ostream* progress = nullptr);

/// CSV with header epoch,train_loss,val_loss,wdiff_mean,wdiff_min,wdiff_max
/// and 17-significant-digit values, so equal runs serialize byte-identically.
std::string metrics_to_csv(const std::vector<EpochMetrics>& history);

std::vector<std::size_t> parse_shape(const std::string& text);  // "3,3,2,2"

}  // namespace quatnn

#endif
