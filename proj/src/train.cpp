#include "quatnn/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "quatnn/rng.hpp"

namespace quatnn {

void TrainConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("quatnn: epochs must be >= 1");
    if (!(lr > 0.0)) throw std::invalid_argument("quatnn: learning rate must be > 0");
    if (batch_size < 1) throw std::invalid_argument("quatnn: batch size must be >= 1");
    if (shape.size() < 2) {
        throw std::invalid_argument("quatnn: shape needs at least two entries");
    }
}

namespace {

// Unit factors whose left action on a hidden unit preserves the network
// function: +-1, +-i, +-j, +-k. Their matrices are signed component
// permutations, which commute with every split odd activation.
constexpr Quaternion kUnitFactors[8] = {
    {1, 0, 0, 0}, {-1, 0, 0, 0}, {0, 1, 0, 0}, {0, -1, 0, 0},
    {0, 0, 1, 0}, {0, 0, -1, 0}, {0, 0, 0, 1}, {0, 0, 0, -1}};

// A chosen relabeling of one hidden layer: student unit u corresponds to
// reference unit perm[u] with left factor kUnitFactors[mu[u]].
struct LayerRelabel {
    std::vector<std::size_t> perm;
    std::vector<int> mu;
};

// Squared distance contribution of layer l under its own relabeling `cur`
// and the relabeling `prev` of the layer feeding it. Stops early once the
// running total passes `bound`.
double layer_distance_sq(const Network& a, const Network& b, std::size_t l,
                         const LayerRelabel* cur, const LayerRelabel* prev,
                         double acc, double bound) {
    const DenseLayer& la = a.layers[l];
    const DenseLayer& lb = b.layers[l];
    const std::size_t m = la.outputs();
    const std::size_t n = la.inputs();
    for (std::size_t u = 0; u < m && acc < bound; ++u) {
        const std::size_t ru = cur ? cur->perm[u] : u;
        const Quaternion fu = cur ? kUnitFactors[cur->mu[u]] : Quaternion::one();
        for (std::size_t j = 0; j < n; ++j) {
            Quaternion ref = lb.weights(ru, prev ? prev->perm[j] : j);
            if (cur) ref = fu * ref;
            if (prev) ref = ref * conj(kUnitFactors[prev->mu[j]]);
            acc += norm_sq(la.weights(u, j) - ref);
        }
        acc += norm_sq(la.bias[u] - (cur ? fu * lb.bias[ru] : lb.bias[ru]));
    }
    return acc;
}

struct RelabelSearch {
    const Network* a = nullptr;
    const Network* b = nullptr;
    std::size_t hidden = 0;  // all layers but the last carry a relabeling
    double best = std::numeric_limits<double>::infinity();
    std::vector<LayerRelabel> current;
    std::vector<LayerRelabel> best_config;

    void descend(std::size_t l, double acc) {
        if (acc >= best) return;
        if (l == hidden) {
            acc = layer_distance_sq(*a, *b, l, nullptr,
                                    hidden ? &current[l - 1] : nullptr, acc, best);
            if (acc < best) {
                best = acc;
                best_config = current;
            }
            return;
        }
        const std::size_t m = a->layers[l].outputs();
        LayerRelabel& relabel = current[l];
        relabel.perm.resize(m);
        std::iota(relabel.perm.begin(), relabel.perm.end(), 0);
        relabel.mu.assign(m, 0);
        do {
            // mixed-radix walk over the 8^m factor assignments
            std::fill(relabel.mu.begin(), relabel.mu.end(), 0);
            for (;;) {
                const double here =
                    layer_distance_sq(*a, *b, l, &relabel,
                                      l ? &current[l - 1] : nullptr, acc, best);
                if (here < best) descend(l + 1, here);
                std::size_t digit = 0;
                while (digit < m && ++relabel.mu[digit] == 8) {
                    relabel.mu[digit] = 0;
                    ++digit;
                }
                if (digit == m) break;
            }
        } while (std::next_permutation(relabel.perm.begin(), relabel.perm.end()));
    }
};

double factorial(std::size_t n) {
    double f = 1.0;
    for (std::size_t i = 2; i <= n; ++i) f *= static_cast<double>(i);
    return f;
}

}  // namespace

WeightDifference weight_difference(const Network& a, const Network& b) {
    if (a.layers.size() != b.layers.size()) {
        throw std::invalid_argument("quatnn: weight difference needs same-shape networks");
    }
    double configs = 1.0;
    for (std::size_t l = 0; l + 1 < a.layers.size(); ++l) {
        const DenseLayer& la = a.layers[l];
        const DenseLayer& lb = b.layers[l];
        if (la.weights.rows() != lb.weights.rows() ||
            la.weights.cols() != lb.weights.cols()) {
            throw std::invalid_argument(
                "quatnn: weight difference needs same-shape networks");
        }
        configs *= factorial(la.outputs()) * std::pow(8.0, double(la.outputs()));
    }
    {
        const DenseLayer& la = a.layers.back();
        const DenseLayer& lb = b.layers.back();
        if (la.weights.rows() != lb.weights.rows() ||
            la.weights.cols() != lb.weights.cols()) {
            throw std::invalid_argument(
                "quatnn: weight difference needs same-shape networks");
        }
    }
    if (configs > 1e7) {
        throw std::invalid_argument(
            "quatnn: weight difference relabeling search too large for this shape");
    }

    RelabelSearch search;
    search.a = &a;
    search.b = &b;
    search.hidden = a.layers.size() - 1;
    search.current.resize(search.hidden);
    search.descend(0, 0.0);

    // Per-parameter statistics at the optimal relabeling.
    WeightDifference d;
    d.min = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    std::size_t count = 0;
    auto take = [&](const Quaternion& x, const Quaternion& y) {
        const double n = norm(x - y);
        sum += n;
        d.min = std::min(d.min, n);
        d.max = std::max(d.max, n);
        ++count;
    };
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        const DenseLayer& la = a.layers[l];
        const DenseLayer& lb = b.layers[l];
        const LayerRelabel* cur =
            (l < search.hidden) ? &search.best_config[l] : nullptr;
        const LayerRelabel* prev = (l > 0) ? &search.best_config[l - 1] : nullptr;
        for (std::size_t u = 0; u < la.outputs(); ++u) {
            const std::size_t ru = cur ? cur->perm[u] : u;
            const Quaternion fu = cur ? kUnitFactors[cur->mu[u]] : Quaternion::one();
            for (std::size_t j = 0; j < la.inputs(); ++j) {
                Quaternion ref = lb.weights(ru, prev ? prev->perm[j] : j);
                if (cur) ref = fu * ref;
                if (prev) ref = ref * conj(kUnitFactors[prev->mu[j]]);
                take(la.weights(u, j), ref);
            }
            take(la.bias[u], cur ? fu * lb.bias[ru] : lb.bias[ru]);
        }
    }
    d.mean = sum / static_cast<double>(count);
    return d;
}

double evaluate(const Network& net, const Dataset& ds) {
    double sum = 0.0;
    for (std::size_t s = 0; s < ds.size(); ++s) {
        sum += loss(forward(net, ds.inputs[s]).output(), ds.targets[s]);
    }
    return sum / static_cast<double>(ds.size());
}

TrainResult train(Network student, const Dataset& train_ds, const Dataset& val_ds,
                  const TrainConfig& cfg, const Network* reference,
                  std::ostream* progress) {
    cfg.validate();
    student.validate();
    if (train_ds.input_size != student.input_size() ||
        train_ds.output_size != student.output_size() ||
        val_ds.input_size != student.input_size() ||
        val_ds.output_size != student.output_size()) {
        throw std::invalid_argument(
            "quatnn: dataset dimensions do not match the network");
    }
    if (train_ds.size() == 0 || val_ds.size() == 0) {
        throw std::invalid_argument("quatnn: empty dataset");
    }

    const std::size_t n = train_ds.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    TrainResult result;
    result.history.reserve(cfg.epochs);

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        Rng shuffle_rng(cfg.seed_shuffle + epoch);
        std::iota(order.begin(), order.end(), 0);
        shuffle_rng.shuffle(order);

        double epoch_loss_sum = 0.0;
        for (std::size_t start = 0, batch = 0; start < n;
             start += cfg.batch_size, ++batch) {
            const std::size_t count = std::min(cfg.batch_size, n - start);
            double batch_loss = 0.0;
            const std::vector<LayerGradients> grads =
                batch_gradients(student, train_ds.inputs, train_ds.targets,
                                order.data() + start, count, &batch_loss);
            if (!std::isfinite(batch_loss)) {
                std::ostringstream msg;
                msg << "quatnn: non-finite loss " << batch_loss << " at epoch "
                    << epoch << ", batch " << batch;
                throw std::runtime_error(msg.str());
            }
            epoch_loss_sum += batch_loss * static_cast<double>(count);
            student = sgd_step(std::move(student), grads, cfg.lr);
        }

        EpochMetrics m;
        m.epoch = epoch;
        m.train_loss = epoch_loss_sum / static_cast<double>(n);
        m.val_loss = evaluate(student, val_ds);
        if (reference) {
            const WeightDifference d = weight_difference(student, *reference);
            m.wdiff_mean = d.mean;
            m.wdiff_min = d.min;
            m.wdiff_max = d.max;
        } else {
            m.wdiff_mean = m.wdiff_min = m.wdiff_max =
                std::numeric_limits<double>::quiet_NaN();
        }
        result.history.push_back(m);
        if (progress) {
            *progress << "epoch " << epoch << " train_loss " << m.train_loss
                      << " val_loss " << m.val_loss << "\n";
        }
    }
    result.net = std::move(student);
    return result;
}

std::string metrics_to_csv(const std::vector<EpochMetrics>& history) {
    std::string out = "epoch,train_loss,val_loss,wdiff_mean,wdiff_min,wdiff_max\n";
    char buf[160];
    for (const EpochMetrics& m : history) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", m.epoch,
                      m.train_loss, m.val_loss, m.wdiff_mean, m.wdiff_min, m.wdiff_max);
        out += buf;
    }
    return out;
}

std::vector<std::size_t> parse_shape(const std::string& text) {
    std::vector<std::size_t> shape;
    std::istringstream is(text);
    std::string part;
    while (std::getline(is, part, ',')) {
        if (part.empty()) {
            throw std::invalid_argument("quatnn: empty entry in shape '" + text + "'");
        }
        const long v = std::stol(part);
        if (v < 1) {
            throw std::invalid_argument("quatnn: shape entries must be >= 1");
        }
        shape.push_back(static_cast<std::size_t>(v));
    }
    if (shape.size() < 2) {
        throw std::invalid_argument("quatnn: shape needs at least two entries");
    }
    return shape;
}

}  // namespace quatnn
