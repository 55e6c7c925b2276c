#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "quatnn/data.hpp"
#include "quatnn/gradcheck.hpp"
#include "quatnn/network.hpp"
#include "quatnn/rng.hpp"
#include "quatnn/train.hpp"
#include "quatnn/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace quatnn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerificationFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct SharedOptions {
    std::string shape_text = "3,3,2,2";
    std::string activation_text = "tanhshrink";
};

void add_shape_options(CLI::App* cmd, SharedOptions& opts) {
    cmd->add_option("--shape", opts.shape_text,
                    "Layer sizes: input followed by each layer's outputs");
    cmd->add_option("--activation", opts.activation_text,
                    "Hidden activation: identity or tanhshrink");
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    os << content;
    if (!os) throw std::runtime_error("failed writing '" + path + "'");
}

int run_gen_data(const SharedOptions& shared, const std::string& out_dir,
                 std::size_t train_size, std::size_t val_size,
                 std::uint64_t seed_teacher, std::uint64_t seed_data) {
    const std::vector<std::size_t> shape = parse_shape(shared.shape_text);
    const Activation act = activation_from_name(shared.activation_text);

    fs::create_directories(out_dir);
    const Network teacher = make_teacher(shape, act, seed_teacher);
    save_network_file(teacher, (fs::path(out_dir) / "teacher.qnn").string());

    const Dataset train_ds = gen_dataset(teacher, train_size, seed_data);
    save_dataset(train_ds, (fs::path(out_dir) / "train.qds").string());
    // A distinct stream for validation so the two sets never overlap.
    const Dataset val_ds = gen_dataset(teacher, val_size, seed_data + 1);
    save_dataset(val_ds, (fs::path(out_dir) / "val.qds").string());

    std::cout << "wrote " << train_ds.size() << " training and " << val_ds.size()
              << " validation samples plus the teacher model to " << out_dir << "\n";
    return kExitOk;
}

int run_train(const SharedOptions& shared, const TrainConfig& base_cfg,
              const std::string& train_path, const std::string& val_path,
              const std::string& teacher_path, const std::string& out_dir,
              bool progress) {
    TrainConfig cfg = base_cfg;
    cfg.shape = parse_shape(shared.shape_text);
    cfg.activation = activation_from_name(shared.activation_text);
    cfg.validate();

    const Dataset train_ds = load_dataset(train_path);
    const Dataset val_ds = load_dataset(val_path);
    if (train_ds.input_size != cfg.shape.front() ||
        train_ds.output_size != cfg.shape.back() ||
        val_ds.input_size != cfg.shape.front() ||
        val_ds.output_size != cfg.shape.back()) {
        throw std::invalid_argument("dataset dimensions do not match --shape");
    }

    Network teacher;
    const Network* reference = nullptr;
    if (!teacher_path.empty()) {
        teacher = load_network_file(teacher_path);
        reference = &teacher;
    }

    const Network student = make_teacher(cfg.shape, cfg.activation, cfg.seed_student);
    const TrainResult result = train(student, train_ds, val_ds, cfg, reference,
                                     progress ? &std::cerr : nullptr);

    fs::create_directories(out_dir);
    write_text_file((fs::path(out_dir) / "metrics.csv").string(),
                    metrics_to_csv(result.history));
    save_network_file(result.net, (fs::path(out_dir) / "student.qnn").string());

    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", result.history.back().val_loss);
    std::cout << "final validation loss " << buf << "\n";
    return kExitOk;
}

int run_verify_calculus(std::uint64_t seed, std::size_t points, bool as_json) {
    const FailureReport report = demonstrate_rule_failures(seed, points);
    const auto identities = involution_identity_suite(seed, 1000);

    bool identities_ok = true;
    for (const IdentityCheck& c : identities) {
        identities_ok = identities_ok && c.max_abs_error <= 1e-12;
    }
    const bool ok = report.all_as_expected() && identities_ok;

    if (as_json) {
        json j;
        j["seed"] = seed;
        j["points"] = points;
        j["routes"] = json::array();
        for (const RouteResult& r : report.routes) {
            j["routes"].push_back({{"route", r.route},
                                   {"expect_mismatch", r.expect_mismatch},
                                   {"mismatch_min", r.mismatch_min},
                                   {"mismatch_max", r.mismatch_max},
                                   {"degenerate_points", r.degenerate_points},
                                   {"verdict", r.verdict()}});
        }
        j["involution_identities"] = json::array();
        for (const IdentityCheck& c : identities) {
            j["involution_identities"].push_back({{"name", c.name},
                                                  {"samples", c.samples},
                                                  {"max_abs_error", c.max_abs_error}});
        }
        j["passed"] = ok;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << report.to_text() << "\n";
        std::cout << "involution identities over 1000 samples:\n";
        for (const IdentityCheck& c : identities) {
            std::cout << "  " << (c.max_abs_error <= 1e-12 ? "[OK]     " : "[BROKEN] ")
                      << c.name << " max |error| = " << c.max_abs_error << "\n";
        }
        std::cout << (ok ? "\nall checks behaved as expected\n"
                         : "\nsome checks did NOT behave as expected\n");
    }
    return ok ? kExitOk : kExitVerificationFailed;
}

int run_grad_check(const SharedOptions& shared, std::uint64_t seed, double h,
                   bool as_json) {
    const std::vector<std::size_t> shape = parse_shape(shared.shape_text);
    const Activation act = activation_from_name(shared.activation_text);

    Network net = make_teacher(shape, act, seed);
    Rng rng(seed ^ 0x6b43a9b5d2f8e01dull);
    for (DenseLayer& layer : net.layers) {
        for (Quaternion& b : layer.bias) b = rng.quaternion_box(-0.5, 0.5);
    }
    QVector input(shape.front());
    for (Quaternion& q : input) q = rng.quaternion_box(-1.0, 1.0);
    QVector target(shape.back());
    for (Quaternion& q : target) q = rng.quaternion_box(-1.0, 1.0);

    const GradCheckReport report = gradient_check(net, input, target, h);
    const bool ok = report.passed(1e-5);

    if (as_json) {
        json j{{"seed", seed},
               {"h", h},
               {"parameters", report.parameters},
               {"max_abs_error", report.max_abs_error},
               {"max_rel_error", report.max_rel_error},
               {"passed", ok}};
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << report.summary() << "\n"
                  << (ok ? "PASS" : "FAIL") << " (threshold 1e-5)\n";
    }
    return ok ? kExitOk : kExitVerificationFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quaternion neural network trainer and calculus checks"};
    app.require_subcommand(1);

    TrainConfig defaults;

    // gen-data
    SharedOptions gen_shared;
    std::string gen_out = "data";
    std::size_t train_size = 40000, val_size = 10000;
    std::uint64_t gen_seed_teacher = defaults.seed_teacher;
    std::uint64_t gen_seed_data = defaults.seed_data;
    CLI::App* gen = app.add_subcommand("gen-data",
                                       "Generate a teacher network and datasets");
    add_shape_options(gen, gen_shared);
    gen->add_option("--out", gen_out, "Output directory");
    gen->add_option("--train-size", train_size, "Training sample count");
    gen->add_option("--val-size", val_size, "Validation sample count");
    gen->add_option("--seed-teacher", gen_seed_teacher, "Teacher init seed");
    gen->add_option("--seed-data", gen_seed_data, "Dataset sampling seed");

    // train
    SharedOptions train_shared;
    TrainConfig cfg;
    std::string train_path, val_path, teacher_path, train_out = "run";
    bool progress = false;
    CLI::App* tr = app.add_subcommand("train", "Train a student on dataset files");
    add_shape_options(tr, train_shared);
    tr->add_option("--train", train_path, "Training dataset file")->required();
    tr->add_option("--val", val_path, "Validation dataset file")->required();
    tr->add_option("--teacher", teacher_path,
                   "Teacher model file for weight-difference metrics");
    tr->add_option("--out", train_out, "Output directory");
    tr->add_option("--epochs", cfg.epochs, "Training epochs");
    tr->add_option("--lr", cfg.lr, "Learning rate");
    tr->add_option("--batch-size", cfg.batch_size, "Mini-batch size");
    tr->add_option("--seed-student", cfg.seed_student, "Student init seed");
    tr->add_option("--seed-shuffle", cfg.seed_shuffle, "Shuffle seed base");
    tr->add_flag("--progress", progress, "Print per-epoch losses to stderr");

    // verify-calculus
    std::uint64_t verify_seed = 12345;
    std::size_t verify_points = 100;
    bool verify_json = false;
    CLI::App* vc = app.add_subcommand(
        "verify-calculus",
        "Demonstrate which derivative rules fail and which hold");
    vc->add_option("--seed", verify_seed, "Random seed");
    vc->add_option("--points", verify_points, "Sample points per route");
    vc->add_flag("--json", verify_json, "Machine-readable output");

    // grad-check
    SharedOptions check_shared;
    std::uint64_t check_seed = 2024;
    double check_h = 1e-5;
    bool check_json = false;
    CLI::App* gc = app.add_subcommand(
        "grad-check", "Compare analytic backprop against numeric gradients");
    gc->set_help_flag("--help", "Print this help message and exit");  // frees -h
    add_shape_options(gc, check_shared);
    gc->add_option("--seed", check_seed, "Random seed");
    gc->add_option("--h", check_h, "Finite-difference step");
    gc->add_flag("--json", check_json, "Machine-readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (gen->parsed()) {
            return run_gen_data(gen_shared, gen_out, train_size, val_size,
                                gen_seed_teacher, gen_seed_data);
        }
        if (tr->parsed()) {
            return run_train(train_shared, cfg, train_path, val_path, teacher_path,
                             train_out, progress);
        }
        if (vc->parsed()) {
            return run_verify_calculus(verify_seed, verify_points, verify_json);
        }
        if (gc->parsed()) {
            return run_grad_check(check_shared, check_seed, check_h, check_json);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
