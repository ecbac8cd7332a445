#include <cblas.h>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "httplib.h"
#include "txnn/txnn.hpp"

namespace {

using namespace txnn;

ActivationKind parse_activation(const std::string& name) {
    if (name == "relu") return ActivationKind::relu();
    if (name == "swish") return ActivationKind::swish();
    if (name == "mish") return ActivationKind::mish();
    if (name == "tanhexp") return ActivationKind::tanhexp();
    throw ArgumentError("unknown activation: " + name);
}

std::vector<ActivationKind> parse_activation_set(const std::string& name) {
    if (name == "all")
        return {ActivationKind::tanhexp(), ActivationKind::relu(), ActivationKind::mish(),
                ActivationKind::swish()};
    return {parse_activation(name)};
}

DatasetName parse_dataset(const std::string& name) {
    if (name == "mnist") return DatasetName::mnist;
    if (name == "fashion") return DatasetName::fashion;
    if (name == "kmnist") return DatasetName::kmnist;
    throw ArgumentError("unknown dataset: " + name);
}

// metrics.csv + "tanhexp" -> metrics_tanhexp.csv
std::string suffixed_path(const std::string& base, const std::string& suffix) {
    std::filesystem::path p(base);
    return (p.parent_path() / (p.stem().string() + "_" + suffix + p.extension().string()))
        .string();
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw FormatError("cannot write " + path);
    return f;
}

struct TrainOpts {
    std::string dataset = "mnist";
    std::string data_dir;  // default data/<dataset>
    std::string activation = "tanhexp";
    std::size_t blocks = 12;
    long epochs = 20;
    std::size_t batch_size = 128;
    double learning_rate = 1e-3;
    std::string optimizer = "adam";
    std::string noise = "none";
    double alpha_rate = 0.2;
    std::uint64_t seed = 42;
    std::size_t subset = 0;  // 0 = full training set
    std::string out = "metrics.csv";
    std::string save_model_path;
};

int cmd_train(const TrainOpts& o) {
    const std::string data_dir = o.data_dir.empty() ? "data/" + o.dataset : o.data_dir;
    Provenance prov{
        {"subcommand", "train"},
        {"dataset", o.dataset},
        {"data_dir", data_dir},
        {"activation", o.activation},
        {"blocks", std::to_string(o.blocks)},
        {"epochs", std::to_string(o.epochs)},
        {"batch_size", std::to_string(o.batch_size)},
        {"learning_rate", fmt_double(o.learning_rate)},
        {"optimizer", o.optimizer},
        {"noise", o.noise},
        {"alpha_rate", fmt_double(o.alpha_rate)},
        {"seed", std::to_string(o.seed)},
        {"subset", std::to_string(o.subset)},
        {"out", o.out},
    };

    if (o.noise == "alpha" && o.alpha_rate >= 0.25)
        std::cerr << "warning: alpha-dropout rate " << fmt_double(o.alpha_rate)
                  << " >= 0.25 tends to keep the net from converging; proceeding anyway\n";

    std::ofstream csv = open_out(o.out);
    write_csv_provenance(csv, prov);
    csv << "epoch,train_loss,test_loss,test_accuracy,wall_seconds\n";
    csv.flush();
    if (o.epochs == 0) {
        std::cout << "0 epochs requested; wrote header-only " << o.out << "\n";
        return 0;
    }

    DatasetName ds_name = parse_dataset(o.dataset);
    Dataset train_set = load_dataset_split(ds_name, data_dir, true);
    Dataset test_set = load_dataset_split(ds_name, data_dir, false);
    if (o.subset > 0) train_set = dataset_head(train_set, o.subset);

    NoiseMode noise = o.noise == "gaussian" ? NoiseMode::gaussian
                      : o.noise == "alpha" ? NoiseMode::alpha
                                           : NoiseMode::none;
    Rng rng(o.seed);
    Model net =
        build_mnist_net(parse_activation(o.activation), o.blocks, rng, noise, o.alpha_rate);
    TrainState state(o.optimizer == "sgd" ? OptimizerKind::sgd : OptimizerKind::adam,
                     o.learning_rate);

    std::cout << "training " << o.activation << " on " << o.dataset << ": " << train_set.size()
              << " samples, " << net.num_trainable_params() << " parameters" << std::endl;

    double final_acc = 0.0;
    for (long epoch = 1; epoch <= o.epochs; ++epoch) {
        MetricsRecord rec = train_epoch(net, train_set, state, rng, o.batch_size);
        rec.epoch = static_cast<std::size_t>(epoch);
        EvalResult ev = evaluate(net, test_set);
        rec.test_loss = ev.loss;
        rec.test_accuracy = ev.accuracy;
        final_acc = ev.accuracy;
        csv << rec.epoch << "," << fmt_double(rec.train_loss) << "," << fmt_double(rec.test_loss)
            << "," << fmt_double(rec.test_accuracy) << "," << fmt_double(rec.wall_seconds)
            << "\n";
        csv.flush();
        std::cout << "epoch " << epoch << "/" << o.epochs
                  << " train_loss=" << fmt_double(rec.train_loss)
                  << " test_loss=" << fmt_double(rec.test_loss)
                  << " test_accuracy=" << fmt_double(rec.test_accuracy)
                  << " wall=" << fmt_double(rec.wall_seconds) << "s" << std::endl;
    }
    std::cout << "final accuracy " << fmt_double(final_acc) << std::endl;
    if (!o.save_model_path.empty()) {
        save_model(net, o.save_model_path);
        std::cout << "saved model to " << o.save_model_path << std::endl;
    }
    return 0;
}

struct BenchOpts {
    std::size_t iters = 100000;
    std::uint64_t seed = 42;
    std::string out = "bench.csv";
};

int cmd_bench(const BenchOpts& o) {
    Provenance prov{
        {"subcommand", "bench"},
        {"iters", std::to_string(o.iters)},
        {"seed", std::to_string(o.seed)},
        {"out", o.out},
    };
    std::vector<BenchResult> results = bench_suite(o.iters, o.seed);
    std::ofstream csv = open_out(o.out);
    write_bench_csv(csv, results, prov);
    for (const BenchResult& r : results)
        std::cout << r.function_name << " " << bench_variant_str(r.variant)
                  << " mean_ns=" << fmt_double(r.mean_ns)
                  << " stddev_ns=" << fmt_double(r.stddev_ns) << std::endl;
    std::cout << "wrote " << o.out << std::endl;
    return 0;
}

struct GradcheckOpts {
    std::string activation = "all";
    std::uint64_t seed = 42;
    double inject = 0.0;
};

int cmd_gradcheck(const GradcheckOpts& o) {
    bool all_pass = true;
    for (const ActivationKind& kind : parse_activation_set(o.activation)) {
        GradCheckReport rep = run_gradcheck(kind, o.seed, o.inject);
        std::cout << rep.activation
                  << ": scalar max dev = " << fmt_double(rep.scalar_max_dev) << " (tol "
                  << fmt_double(kScalarGradTol)
                  << "), network max rel dev = " << fmt_double(rep.network_max_rel_dev)
                  << " (tol " << fmt_double(kNetworkGradTol) << ") -> "
                  << (rep.pass ? "ok" : "FAIL") << std::endl;
        all_pass = all_pass && rep.pass;
        if (kind.fn() == ActivationKind::kMish) {
            double dev = mish_form_agreement();
            bool ok = dev < kMishFormTol;
            std::cout << "mish: gated vs rational derivative max dev = " << fmt_double(dev)
                      << " (tol " << fmt_double(kMishFormTol) << ") -> " << (ok ? "ok" : "FAIL")
                      << std::endl;
            all_pass = all_pass && ok;
        }
    }
    if (!all_pass) {
        std::cerr << "gradient check failed" << std::endl;
        return 3;
    }
    std::cout << "all gradient checks passed" << std::endl;
    return 0;
}

struct LandscapeOpts {
    std::string activation = "all";
    int grid = 64;
    std::uint64_t seed = 42;
    std::string out = "landscape.csv";
};

int cmd_landscape(const LandscapeOpts& o) {
    if (o.grid < 2) throw ArgumentError("landscape: grid must be >= 2");
    std::vector<ActivationKind> kinds = parse_activation_set(o.activation);
    for (const ActivationKind& kind : kinds) {
        Rng rng(o.seed);
        Model net = build_landscape_net(kind, rng);
        const int n = o.grid;
        Matrix pts(static_cast<std::size_t>(n) * n, 2);
        for (int i = 0; i < n; ++i) {
            const double x = -3.0 + 6.0 * i / (n - 1);
            for (int j = 0; j < n; ++j) {
                const double y = -3.0 + 6.0 * j / (n - 1);
                pts(static_cast<std::size_t>(i) * n + j, 0) = x;
                pts(static_cast<std::size_t>(i) * n + j, 1) = y;
            }
        }
        Matrix z = net.forward(pts);
        const std::string path = kinds.size() == 1 ? o.out : suffixed_path(o.out, kind.name());
        Provenance prov{
            {"subcommand", "landscape"}, {"activation", kind.name()},
            {"grid", std::to_string(o.grid)}, {"seed", std::to_string(o.seed)},
            {"out", path},
        };
        std::ofstream csv = open_out(path);
        write_csv_provenance(csv, prov);
        csv << "x,y,z\n";
        for (std::size_t r = 0; r < pts.rows(); ++r)
            csv << fmt_double(pts(r, 0)) << "," << fmt_double(pts(r, 1)) << ","
                << fmt_double(z(r, 0)) << "\n";
        std::cout << "wrote " << path << std::endl;
    }
    return 0;
}

struct FetchOpts {
    std::string dataset = "mnist";
    std::string data_dir;
    std::string mirror;
    bool dry_run = false;
};

std::string default_mirror(const std::string& dataset) {
    if (const char* env = std::getenv("TANHEXP_DATA_MIRROR")) return env;
    if (dataset == "fashion") return "http://fashion-mnist.s3-website.eu-central-1.amazonaws.com";
    if (dataset == "kmnist") return "http://codh.rois.ac.jp/kmnist/dataset/kmnist";
    return "https://ossci-datasets.s3.amazonaws.com/mnist";
}

int cmd_fetch(const FetchOpts& o) {
    namespace fs = std::filesystem;
    const std::string data_dir = o.data_dir.empty() ? "data/" + o.dataset : o.data_dir;
    const std::string mirror = !o.mirror.empty() ? o.mirror : default_mirror(o.dataset);
    static const char* kFiles[] = {"train-images-idx3-ubyte.gz", "train-labels-idx1-ubyte.gz",
                                   "t10k-images-idx3-ubyte.gz", "t10k-labels-idx1-ubyte.gz"};

    // split the mirror into scheme://host and an optional path prefix
    std::string host = mirror, prefix;
    const auto scheme_end = mirror.find("://");
    if (scheme_end != std::string::npos) {
        const auto slash = mirror.find('/', scheme_end + 3);
        if (slash != std::string::npos) {
            host = mirror.substr(0, slash);
            prefix = mirror.substr(slash);
        }
    }

    if (!o.dry_run) fs::create_directories(data_dir);
    for (const char* file : kFiles) {
        const std::string url = mirror + "/" + file;
        const std::string dest = (fs::path(data_dir) / file).string();
        if (o.dry_run) {
            std::cout << "would fetch " << url << " -> " << dest << std::endl;
            continue;
        }
        std::cout << "fetching " << url << std::endl;
        httplib::Client client(host);
        client.set_follow_location(true);
        auto res = client.Get(prefix + "/" + file);
        if (!res || res->status != 200)
            throw FormatError("download failed for " + url +
                              (res ? " (http " + std::to_string(res->status) + ")"
                                   : " (no response)"));
        std::ofstream out(dest, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError("cannot write " + dest);
        out.write(res->body.data(), static_cast<std::streamsize>(res->body.size()));
        std::cout << "wrote " << dest << " (" << res->body.size() << " bytes)" << std::endl;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    openblas_set_num_threads(1);  // bit-reproducible math, honest single-core timings

    CLI::App app{
        "tanhexp activation micro-framework: train MNIST-family MLPs, benchmark activation "
        "kernels, verify derivatives, sample network landscapes"};
    app.require_subcommand(1);

    TrainOpts train_o;
    auto* train_cmd = app.add_subcommand("train", "Train an MLP and write per-epoch metrics CSV");
    train_cmd->add_option("--dataset", train_o.dataset, "Dataset family")
        ->check(CLI::IsMember({"mnist", "fashion", "kmnist"}));
    train_cmd->add_option("--data-dir", train_o.data_dir,
                          "Directory with the IDX files (default data/<dataset>)");
    train_cmd->add_option("--activation", train_o.activation, "Nonlinearity")
        ->check(CLI::IsMember({"tanhexp", "relu", "swish", "mish"}));
    train_cmd->add_option("--blocks", train_o.blocks, "Number of batchnorm/act/dropout/dense blocks")
        ->check(CLI::Range(std::size_t(1), std::size_t(64)));
    train_cmd->add_option("--epochs", train_o.epochs, "Training epochs (0 = header-only CSV)")
        ->check(CLI::Range(0L, 10000L));
    train_cmd->add_option("--batch-size", train_o.batch_size, "Minibatch size")
        ->check(CLI::Range(std::size_t(2), std::size_t(4096)));
    train_cmd->add_option("--lr", train_o.learning_rate, "Learning rate")
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--optimizer", train_o.optimizer, "Update rule")
        ->check(CLI::IsMember({"adam", "sgd"}));
    train_cmd->add_option("--noise", train_o.noise, "Dropout variant in every block")
        ->check(CLI::IsMember({"none", "gaussian", "alpha"}));
    train_cmd->add_option("--alpha-rate", train_o.alpha_rate,
                          "Alpha-dropout rate (with --noise alpha)");
    train_cmd->add_option("--seed", train_o.seed, "RNG seed");
    train_cmd->add_option("--subset", train_o.subset,
                          "Train on only the first N samples (0 = all)");
    train_cmd->add_option("--out", train_o.out, "Metrics CSV path");
    train_cmd->add_option("--save-model", train_o.save_model_path,
                          "Write the trained model to this checkpoint path");

    BenchOpts bench_o;
    auto* bench_cmd =
        app.add_subcommand("bench", "Time activation kernels and write a benchmark CSV");
    bench_cmd->add_option("--iters", bench_o.iters, "Evaluations per timed pass")
        ->check(CLI::Range(std::size_t(1), std::size_t(1) << 30));
    bench_cmd->add_option("--seed", bench_o.seed, "RNG seed for the input stream");
    bench_cmd->add_option("--out", bench_o.out, "Benchmark CSV path");

    GradcheckOpts grad_o;
    auto* grad_cmd = app.add_subcommand(
        "gradcheck", "Verify analytic derivatives against finite differences");
    grad_cmd->add_option("--activation", grad_o.activation, "Which activation (or all)")
        ->check(CLI::IsMember({"all", "tanhexp", "relu", "swish", "mish"}));
    grad_cmd->add_option("--seed", grad_o.seed, "RNG seed for the end-to-end check");
    grad_cmd->add_option("--inject-derivative-error", grad_o.inject,
                         "Bias added to analytic derivatives (harness self-test)")
        ->group("");

    LandscapeOpts land_o;
    auto* land_cmd = app.add_subcommand(
        "landscape", "Sample a small net's scalar output over a 2-D input grid");
    land_cmd->add_option("--activation", land_o.activation, "Which activation (or all)")
        ->check(CLI::IsMember({"all", "tanhexp", "relu", "swish", "mish"}));
    land_cmd->add_option("--grid", land_o.grid, "Grid points per axis over [-3,3]")
        ->check(CLI::Range(2, 4096));
    land_cmd->add_option("--seed", land_o.seed, "RNG seed for the weight init");
    land_cmd->add_option("--out", land_o.out,
                         "Output CSV path (suffixed per activation when several run)");

    FetchOpts fetch_o;
    auto* fetch_cmd =
        app.add_subcommand("fetch", "Download a dataset's four IDX files from a mirror");
    fetch_cmd->add_option("--dataset", fetch_o.dataset, "Dataset family")
        ->check(CLI::IsMember({"mnist", "fashion", "kmnist"}));
    fetch_cmd->add_option("--data-dir", fetch_o.data_dir,
                          "Destination directory (default data/<dataset>)");
    fetch_cmd->add_option("--mirror", fetch_o.mirror,
                          "Base URL (default: TANHEXP_DATA_MIRROR env var, then the canonical "
                          "mirror)");
    fetch_cmd->add_flag("--dry-run", fetch_o.dry_run, "Print resolved URLs without downloading");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (train_cmd->parsed()) return cmd_train(train_o);
        if (bench_cmd->parsed()) return cmd_bench(bench_o);
        if (grad_cmd->parsed()) return cmd_gradcheck(grad_o);
        if (land_cmd->parsed()) return cmd_landscape(land_o);
        if (fetch_cmd->parsed()) return cmd_fetch(fetch_o);
    } catch (const txnn::ArgumentError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    }
    return 1;
}
