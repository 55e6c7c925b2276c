#include "quatnn/data.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "quatnn/rng.hpp"

namespace quatnn {

Network make_teacher(const std::vector<std::size_t>& shape, Activation act,
                     std::uint64_t seed) {
    if (shape.size() < 2) {
        throw std::invalid_argument("quatnn: network shape needs at least two entries");
    }
    Rng rng(seed);
    Network net;
    net.layers.reserve(shape.size() - 1);
    for (std::size_t l = 1; l < shape.size(); ++l) {
        DenseLayer layer;
        layer.weights = QMatrix(shape[l], shape[l - 1]);
        layer.bias = QVector(shape[l], Quaternion::zero());
        layer.activation = (l + 1 < shape.size()) ? act : Activation::Identity;
        for (Quaternion& w : layer.weights.entries()) {
            w = rng.unit_quaternion();
        }
        net.layers.push_back(std::move(layer));
    }
    net.validate();
    return net;
}

Dataset gen_dataset(const Network& teacher, std::size_t n, std::uint64_t seed) {
    if (n == 0) {
        throw std::invalid_argument("quatnn: dataset size must be positive");
    }
    teacher.validate();
    Rng rng(seed);
    Dataset ds;
    ds.input_size = teacher.input_size();
    ds.output_size = teacher.output_size();
    ds.seed = seed;
    {
        std::ostringstream desc;
        desc << "teacher with " << teacher.layers.size() << " layers, shape "
             << teacher.input_size();
        for (const DenseLayer& layer : teacher.layers) desc << "x" << layer.outputs();
        ds.teacher_description = desc.str();
    }
    ds.inputs.reserve(n);
    ds.targets.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
        QVector in(ds.input_size);
        for (Quaternion& q : in) q = rng.quaternion_box(-1.0, 1.0);
        ds.targets.push_back(forward(teacher, in).output());
        ds.inputs.push_back(std::move(in));
    }
    return ds;
}

namespace {

void append_value(std::string& line, double v, bool first) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    if (!first) line += ' ';
    line += buf;
}

}  // namespace

void save_dataset(const Dataset& ds, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("quatnn: cannot open '" + path + "' for writing");
    os << "qds v1 n=" << ds.size() << " in=" << ds.input_size
       << " out=" << ds.output_size << " seed=" << ds.seed << "\n";
    std::string line;
    for (std::size_t s = 0; s < ds.size(); ++s) {
        line.clear();
        bool first = true;
        for (const Quaternion& q : ds.inputs[s]) {
            for (int a = 0; a < 4; ++a) {
                append_value(line, q[a], first);
                first = false;
            }
        }
        for (const Quaternion& q : ds.targets[s]) {
            for (int a = 0; a < 4; ++a) {
                append_value(line, q[a], false);
            }
        }
        os << line << "\n";
    }
    if (!os) throw std::runtime_error("quatnn: failed writing '" + path + "'");
}

Dataset load_dataset(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("quatnn: cannot open '" + path + "' for reading");

    std::string header;
    if (!std::getline(is, header)) {
        throw std::runtime_error("quatnn: dataset '" + path + "' is empty");
    }
    std::istringstream hs(header);
    std::string tag, version, n_field, in_field, out_field, seed_field;
    if (!(hs >> tag >> version >> n_field >> in_field >> out_field >> seed_field) ||
        tag != "qds" || version != "v1" || n_field.rfind("n=", 0) != 0 ||
        in_field.rfind("in=", 0) != 0 || out_field.rfind("out=", 0) != 0 ||
        seed_field.rfind("seed=", 0) != 0) {
        throw std::runtime_error("quatnn: dataset '" + path + "' has a malformed header");
    }

    Dataset ds;
    const std::size_t n = std::stoul(n_field.substr(2));
    ds.input_size = std::stoul(in_field.substr(3));
    ds.output_size = std::stoul(out_field.substr(4));
    ds.seed = std::stoull(seed_field.substr(5));
    if (ds.input_size == 0 || ds.output_size == 0) {
        throw std::runtime_error("quatnn: dataset '" + path + "' declares zero dimensions");
    }

    ds.inputs.reserve(n);
    ds.targets.reserve(n);
    std::string line;
    std::size_t record = 0;
    while (record < n && std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        QVector in(ds.input_size), tgt(ds.output_size);
        bool ok = true;
        for (Quaternion& q : in) {
            for (int a = 0; a < 4 && ok; ++a) ok = static_cast<bool>(ls >> q[a]);
        }
        for (Quaternion& q : tgt) {
            for (int a = 0; a < 4 && ok; ++a) ok = static_cast<bool>(ls >> q[a]);
        }
        double extra;
        if (!ok || (ls >> extra)) {
            throw std::runtime_error("quatnn: dataset '" + path +
                                     "' parse error in record " + std::to_string(record) +
                                     " (line " + std::to_string(record + 2) + ")");
        }
        ds.inputs.push_back(std::move(in));
        ds.targets.push_back(std::move(tgt));
        ++record;
    }
    if (record != n) {
        throw std::runtime_error("quatnn: dataset '" + path + "' header declares " +
                                 std::to_string(n) + " records but the body holds " +
                                 std::to_string(record));
    }
    return ds;
}

}  // namespace quatnn
