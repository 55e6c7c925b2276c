#ifndef QUATNN_DATA_HPP
#define QUATNN_DATA_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "quatnn/network.hpp"

namespace quatnn {

/// Input/target pairs plus the provenance needed to regenerate them.
struct Dataset {
    std::vector<QVector> inputs;
    std::vector<QVector> targets;
    std::size_t input_size = 0;
    std::size_t output_size = 0;
    std::uint64_t seed = 0;
    std::string teacher_description;  // in-memory provenance note, not persisted

    std::size_t size() const { return inputs.size(); }
};

/// Builds a network of the given shape (input size followed by the output
/// size of every layer) with every weight an independently drawn random unit
/// quaternion and all biases zero. Hidden layers use `act`; the final layer
/// is Identity. Deterministic for a given seed.
Network make_teacher(const std::vector<std::size_t>& shape, Activation act,
                     std::uint64_t seed);

/// Samples n inputs with every quaternion component i.i.d. uniform on
/// [-1, 1) and labels them with the teacher's outputs, so the mapping is
/// exact by construction.
Dataset gen_dataset(const Network& teacher, std::size_t n, std::uint64_t seed);

// --- dataset persistence ------------------------------------------------
//
// UTF-8 text. Header line:
//   qds v1 n=<count> in=<n_in> out=<n_out> seed=<seed>
// then one record per line: the 4*n_in input components followed by the
// 4*n_out target components, space-separated, 17 significant digits.

void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);  // throws std::runtime_error

}  // namespace quatnn

#endif
