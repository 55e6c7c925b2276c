#ifndef QUATNN_NETWORK_HPP
#define QUATNN_NETWORK_HPP

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "quatnn/linalg.hpp"
#include "quatnn/quaternion.hpp"

namespace quatnn {

/// Scalar activations applied split-wise, i.e. independently to each of the
/// four components of a pre-activation quaternion.
enum class Activation { Identity, Tanhshrink };

double activate_scalar(Activation act, double v);
double activate_prime_scalar(Activation act, double v);

/// sigma(z) applied to each component.
Quaternion activate(Activation act, const Quaternion& z);
/// sigma'(z) applied to each component.
Quaternion activate_prime(Activation act, const Quaternion& z);

const char* activation_name(Activation act);
Activation activation_from_name(const std::string& name);  // throws on unknown

/// Fully connected quaternion layer: m x n weights, m biases.
struct DenseLayer {
    QMatrix weights;
    QVector bias;
    Activation activation = Activation::Identity;

    std::size_t inputs() const { return weights.cols(); }
    std::size_t outputs() const { return weights.rows(); }
};

/// Stack of dense layers. The last layer always acts as Identity: the loss
/// derivations for the output assume a bare affine map, and a non-trivial
/// final activation is rejected at validation.
struct Network {
    std::vector<DenseLayer> layers;

    std::size_t input_size() const { return layers.front().inputs(); }
    std::size_t output_size() const { return layers.back().outputs(); }

    /// Throws std::invalid_argument when layer dimensions do not chain or
    /// the final layer has a non-Identity activation.
    void validate() const;
};

/// Everything the backward pass needs from one forward evaluation.
struct ForwardTrace {
    QVector input;
    std::vector<QVector> pre_activations;  // z per layer
    std::vector<QVector> activations;      // a per layer; back() is the output

    const QVector& output() const { return activations.back(); }
    /// a^(l-1): the vector fed into layer l.
    const QVector& layer_input(std::size_t l) const {
        return l == 0 ? input : activations[l - 1];
    }
};

/// Gradients of the loss with respect to the conjugated parameters of one
/// layer (dL/dW*, dL/db*) -- the steepest-descent direction.
struct LayerGradients {
    QMatrix dw;
    QVector db;
};

/// The loss derivative dL/da arriving at a layer from the layer above.
using BackpropSignal = QVector;

struct LayerBackward {
    LayerGradients grads;
    BackpropSignal p_out;  // dL/da for the previous layer
};

ForwardTrace forward(const Network& net, const QVector& input);

/// Sum over outputs of the squared error norm ||d_i - y_i||^2. Computed as
/// the quaternion sum e* e per element, whose vector part cancels exactly;
/// asserts that and returns the real part.
double loss(const QVector& output, const QVector& target);

/// Output layer (Identity activation, checked):
///   dW(i,j) = -1/2 e_i a_j*, db(i) = -1/2 e_i,
///   p_out(j) = sum_i -1/2 e_i* w(i,j), with e = d - y.
LayerBackward backward_output_layer(const DenseLayer& layer,
                                    const QVector& layer_input,
                                    const QVector& output,
                                    const QVector& target);

/// Hidden layer: per output i, q_i = p_i o sigma'(z_i), then
///   dW(i,j) = q_i* a_j*, db(i) = q_i*, p_out(j) = sum_i q_i w(i,j).
LayerBackward backward_hidden_layer(const DenseLayer& layer,
                                    const QVector& layer_input,
                                    const QVector& pre_activation,
                                    const BackpropSignal& p_in);

/// Full backward sweep; gradients returned per layer, front to back.
std::vector<LayerGradients> backward(const Network& net, const ForwardTrace& trace,
                                     const QVector& target);

/// One descent step: every parameter moves by -lr * dL/dparam*.
Network sgd_step(Network net, const std::vector<LayerGradients>& grads, double lr);

/// Gradients averaged over a batch of samples (mean, so the learning rate is
/// independent of the batch size). Accumulation order is the sample order.
/// Returns the mean per-sample loss through `mean_loss` when non-null.
std::vector<LayerGradients> batch_gradients(const Network& net,
                                            const std::vector<QVector>& inputs,
                                            const std::vector<QVector>& targets,
                                            const std::size_t* indices,
                                            std::size_t count,
                                            double* mean_loss);

// --- model persistence ------------------------------------------------
//
// Text format, one token stream:
//   qnn v1 layers=<L>
//   layer <idx> in=<n> out=<m> activation=<identity|tanhshrink>
//   w <i> <j> <q0> <q1> <q2> <q3>     (row-major, m*n lines)
//   b <i> <q0> <q1> <q2> <q3>         (m lines)
// Components are written with 17 significant digits, so save/load
// round-trips bit-exactly.

std::string save_network(const Network& net);
Network load_network(const std::string& text);  // throws std::runtime_error

void save_network_file(const Network& net, const std::string& path);
Network load_network_file(const std::string& path);

}  // namespace quatnn

#endif
