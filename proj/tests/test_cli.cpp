#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

using Catch::Approx;

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream f(path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(f, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, sep)) parts.push_back(part);
    return parts;
}

// Runs the installed binary with the given arguments, capturing exit code
// and both output streams.
RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path tmp = fs::temp_directory_path();
    const std::string out = (tmp / ("txnn_cli_out_" + std::to_string(counter))).string();
    const std::string err = (tmp / ("txnn_cli_err_" + std::to_string(counter))).string();
    ++counter;
    const std::string cmd =
        std::string(TXNN_CLI_PATH) + " " + args + " > " + out + " 2> " + err;
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    fs::remove(out);
    fs::remove(err);
    return r;
}

// Scratch directory shared by one test case.
struct ScratchDir {
    fs::path dir;
    ScratchDir() {
        static int counter = 0;
        dir = fs::temp_directory_path() / ("txnn_cli_case_" + std::to_string(counter++));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~ScratchDir() { fs::remove_all(dir); }
    std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

const std::string kMnistDir = std::string(TXNN_DATA_DIR) + "/mnist";

// Provenance comments, then the header, then data rows.
struct Csv {
    std::vector<std::string> provenance;
    std::string header;
    std::vector<std::string> rows;
};

Csv parse_csv(const std::string& path) {
    Csv csv;
    bool in_header = true;
    for (const std::string& line : read_lines(path)) {
        if (in_header && line.rfind("# ", 0) == 0) {
            csv.provenance.push_back(line);
        } else if (in_header) {
            csv.header = line;
            in_header = false;
        } else {
            csv.rows.push_back(line);
        }
    }
    return csv;
}

}  // namespace

TEST_CASE("cli: usage errors exit 1, help exits 0") {
    REQUIRE(run_cli("").code == 1);                      // subcommand required
    REQUIRE(run_cli("frobnicate").code == 1);            // unknown subcommand
    REQUIRE(run_cli("train --bogus-flag 3").code == 1);  // unknown flag
    REQUIRE(run_cli("train --blocks 0").code == 1);      // range violation
    REQUIRE(run_cli("train --batch-size 1").code == 1);
    REQUIRE(run_cli("landscape --grid 1").code == 1);
    REQUIRE(run_cli("train --activation elu").code == 1);

    RunResult help = run_cli("--help");
    REQUIRE(help.code == 0);
    REQUIRE(help.out.find("train") != std::string::npos);
    REQUIRE(help.out.find("bench") != std::string::npos);
    REQUIRE(run_cli("train --help").code == 0);
}

TEST_CASE("cli train: zero epochs writes a header-only csv without touching data") {
    ScratchDir tmp;
    const std::string out = tmp / "metrics.csv";
    RunResult r = run_cli("train --epochs 0 --data-dir /nonexistent_txnn_dir --out " + out);
    REQUIRE(r.code == 0);  // data dir never consulted
    REQUIRE(r.out.find("header-only") != std::string::npos);

    Csv csv = parse_csv(out);
    REQUIRE(csv.header == "epoch,train_loss,test_loss,test_accuracy,wall_seconds");
    REQUIRE(csv.rows.empty());

    // provenance keys in their fixed order
    const std::vector<std::string> expected_keys = {
        "subcommand", "dataset",   "data_dir", "activation", "blocks",
        "epochs",     "batch_size", "learning_rate", "optimizer", "noise",
        "alpha_rate", "seed",      "subset",   "out"};
    REQUIRE(csv.provenance.size() == expected_keys.size());
    for (std::size_t i = 0; i < expected_keys.size(); ++i) {
        CAPTURE(csv.provenance[i]);
        REQUIRE(csv.provenance[i].rfind("# " + expected_keys[i] + "=", 0) == 0);
    }
    REQUIRE(csv.provenance[5] == "# epochs=0");
    REQUIRE(csv.provenance[0] == "# subcommand=train");
}

TEST_CASE("cli train: missing data directory exits 2 and names the expected file") {
    ScratchDir tmp;
    RunResult r = run_cli("train --epochs 1 --data-dir /nonexistent_txnn_dir --out " +
                          (tmp / "m.csv"));
    REQUIRE(r.code == 2);
    REQUIRE(r.err.find("error:") != std::string::npos);
    REQUIRE(r.err.find("/nonexistent_txnn_dir/train-images-idx3-ubyte") != std::string::npos);
}

TEST_CASE("cli train: short real run is deterministic apart from wall time") {
    ScratchDir tmp;
    const std::string base_args =
        "train --dataset mnist --data-dir " + kMnistDir +
        " --activation tanhexp --blocks 1 --subset 512 --epochs 2 --batch-size 64 --seed 5 "
        "--out ";
    const std::string out_a = tmp / "a.csv";
    const std::string out_b = tmp / "b.csv";

    RunResult ra = run_cli(base_args + out_a);
    REQUIRE(ra.code == 0);
    REQUIRE(ra.out.find("512 samples") != std::string::npos);
    REQUIRE(ra.out.find("398510 parameters") != std::string::npos);
    REQUIRE(ra.out.find("final accuracy") != std::string::npos);

    RunResult rb = run_cli(base_args + out_b);
    REQUIRE(rb.code == 0);

    Csv a = parse_csv(out_a);
    Csv b = parse_csv(out_b);
    REQUIRE(a.rows.size() == 2);
    REQUIRE(b.rows.size() == 2);
    REQUIRE(a.header == b.header);

    // identical provenance apart from the output path itself
    REQUIRE(a.provenance.size() == b.provenance.size());
    for (std::size_t i = 0; i < a.provenance.size(); ++i)
        if (a.provenance[i].rfind("# out=", 0) != 0) REQUIRE(a.provenance[i] == b.provenance[i]);

    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        auto fa = split(a.rows[i], ',');
        auto fb = split(b.rows[i], ',');
        REQUIRE(fa.size() == 5);
        REQUIRE(fb.size() == 5);
        for (std::size_t c = 0; c + 1 < fa.size(); ++c)  // all but wall_seconds
            REQUIRE(fa[c] == fb[c]);
    }

    // epoch numbering and a plausible accuracy from 512 samples
    REQUIRE(split(a.rows[0], ',')[0] == "1");
    REQUIRE(split(a.rows[1], ',')[0] == "2");
    const double acc = std::stod(split(a.rows[1], ',')[3]);
    REQUIRE(acc >= 0.5);
    REQUIRE(acc <= 1.0);
    const double loss = std::stod(split(a.rows[1], ',')[1]);
    REQUIRE(loss > 0.0);
    REQUIRE(loss < 2.5);
}

TEST_CASE("cli gradcheck: passes cleanly, fails loudly when a bias is injected") {
    RunResult ok = run_cli("gradcheck --activation tanhexp");
    REQUIRE(ok.code == 0);
    REQUIRE(ok.out.find("tanhexp: scalar max dev") != std::string::npos);
    REQUIRE(ok.out.find("-> ok") != std::string::npos);
    REQUIRE(ok.out.find("all gradient checks passed") != std::string::npos);

    RunResult mish = run_cli("gradcheck --activation mish");
    REQUIRE(mish.code == 0);
    REQUIRE(mish.out.find("gated vs rational derivative") != std::string::npos);

    RunResult bad = run_cli("gradcheck --activation tanhexp --inject-derivative-error 1e-4");
    REQUIRE(bad.code == 3);
    REQUIRE(bad.out.find("FAIL") != std::string::npos);
    REQUIRE(bad.err.find("gradient check failed") != std::string::npos);
}

TEST_CASE("cli landscape: grid layout, per-activation files, reruns byte-identical") {
    ScratchDir tmp;
    const std::string out = tmp / "land.csv";

    RunResult tiny = run_cli("landscape --activation tanhexp --grid 2 --seed 3 --out " + out);
    REQUIRE(tiny.code == 0);
    Csv csv = parse_csv(out);
    REQUIRE(csv.header == "x,y,z");
    REQUIRE(csv.rows.size() == 4);
    REQUIRE(split(csv.rows[0], ',')[0] == "-3");  // x outer, y inner
    REQUIRE(split(csv.rows[0], ',')[1] == "-3");
    REQUIRE(split(csv.rows[1], ',')[0] == "-3");
    REQUIRE(split(csv.rows[1], ',')[1] == "3");
    REQUIRE(split(csv.rows[3], ',')[0] == "3");

    // rerun to the same path: bytes identical (no wall-time column here)
    const std::string before = slurp(out);
    REQUIRE(run_cli("landscape --activation tanhexp --grid 2 --seed 3 --out " + out).code == 0);
    REQUIRE(slurp(out) == before);

    // --activation all fans out into suffixed files
    const std::string multi = tmp / "multi.csv";
    RunResult all = run_cli("landscape --grid 4 --seed 3 --out " + multi);
    REQUIRE(all.code == 0);
    for (const std::string& name : {"multi_tanhexp.csv", "multi_relu.csv", "multi_mish.csv",
                                    "multi_swish.csv"})
        REQUIRE(fs::exists(tmp.dir / name));
    REQUIRE_FALSE(fs::exists(multi));
    REQUIRE(parse_csv(tmp / "multi_relu.csv").rows.size() == 16);
}

TEST_CASE("cli landscape: relu surface is piecewise planar, tanhexp is not") {
    ScratchDir tmp;
    const int n = 64;
    REQUIRE(run_cli("landscape --activation relu --grid 64 --seed 3 --out " +
                    (tmp / "relu.csv")).code == 0);
    REQUIRE(run_cli("landscape --activation tanhexp --grid 64 --seed 3 --out " +
                    (tmp / "tanhexp.csv")).code == 0);

    auto z_column = [&](const std::string& path) {
        std::vector<double> z;
        for (const std::string& row : parse_csv(path).rows) z.push_back(std::stod(split(row, ',')[2]));
        return z;
    };
    std::vector<double> zr = z_column(tmp / "relu.csv");
    std::vector<double> zt = z_column(tmp / "tanhexp.csv");
    REQUIRE(zr.size() == n * n);
    REQUIRE(zt.size() == n * n);
    REQUIRE(zr != zt);  // different activations induce different surfaces

    // second differences along each y scan line; relu is exactly planar
    // between its fold lines (second difference ~ rounding noise), tanhexp
    // carries curvature at essentially every interior point
    auto flat_and_kinks = [&](const std::vector<double>& z, int line) {
        int flat = 0, kinks = 0;
        for (int j = 1; j + 1 < n; ++j) {
            double d2 = z[line * n + j + 1] - 2.0 * z[line * n + j] + z[line * n + j - 1];
            (std::abs(d2) < 1e-8 ? flat : kinks)++;
        }
        return std::pair{flat, kinks};
    };
    int relu_flat = 0, tanhexp_flat = 0;
    for (int line = 0; line < n; ++line) {
        auto [rf, rk] = flat_and_kinks(zr, line);
        REQUIRE(rk <= 56);  // each of the 64 hidden units folds a scan line a few times at most
        relu_flat += rf;
        tanhexp_flat += flat_and_kinks(zt, line).first;
    }
    REQUIRE(relu_flat >= 800);     // measured 1499 of 3968 triples exactly planar
    REQUIRE(tanhexp_flat <= 100);  // measured 0
}

TEST_CASE("cli bench: csv shape and seed-stable checksums") {
    ScratchDir tmp;
    const std::string out_a = tmp / "bench_a.csv";
    const std::string out_b = tmp / "bench_b.csv";

    RunResult ra = run_cli("bench --iters 50 --seed 4 --out " + out_a);
    REQUIRE(ra.code == 0);
    REQUIRE(ra.out.find("tanhexp forward mean_ns=") != std::string::npos);

    Csv a = parse_csv(out_a);
    REQUIRE(a.header == "function,variant,iterations,mean_ns,stddev_ns,checksum");
    REQUIRE(a.rows.size() == 11);
    REQUIRE(split(a.rows[0], ',')[0] == "tanhexp");
    REQUIRE(split(a.rows[10], ',')[1] == "second_derivative");
    for (const std::string& row : a.rows) REQUIRE(split(row, ',')[2] == "50");

    REQUIRE(run_cli("bench --iters 50 --seed 4 --out " + out_b).code == 0);
    Csv b = parse_csv(out_b);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        auto fa = split(a.rows[i], ',');
        auto fb = split(b.rows[i], ',');
        REQUIRE(fa[0] == fb[0]);
        REQUIRE(fa[1] == fb[1]);
        REQUIRE(fa[5] == fb[5]);  // checksum survives the rerun bit for bit
    }
}

TEST_CASE("cli fetch: dry run resolves mirror precedence without network") {
    ScratchDir tmp;
    const std::string dest = tmp / "mnist";
    unsetenv("TANHEXP_DATA_MIRROR");

    // canonical default
    RunResult canon = run_cli("fetch --dataset mnist --dry-run --data-dir " + dest);
    REQUIRE(canon.code == 0);
    REQUIRE(canon.out.find("would fetch https://ossci-datasets.s3.amazonaws.com/mnist/"
                           "train-images-idx3-ubyte.gz -> " +
                           dest) != std::string::npos);
    std::vector<std::string> lines;
    {
        std::stringstream ss(canon.out);
        std::string line;
        while (std::getline(ss, line)) lines.push_back(line);
    }
    REQUIRE(lines.size() == 4);
    REQUIRE(lines[3].find("t10k-labels-idx1-ubyte.gz") != std::string::npos);
    REQUIRE_FALSE(fs::exists(dest));  // dry run creates nothing

    // environment override
    setenv("TANHEXP_DATA_MIRROR", "http://mirror.internal/mnist-cache", 1);
    RunResult env = run_cli("fetch --dataset mnist --dry-run --data-dir " + dest);
    REQUIRE(env.code == 0);
    REQUIRE(env.out.find("would fetch http://mirror.internal/mnist-cache/"
                         "train-labels-idx1-ubyte.gz") != std::string::npos);

    // the explicit flag beats the environment
    RunResult flag = run_cli("fetch --dataset mnist --dry-run --mirror http://flag.example/m "
                             "--data-dir " +
                             dest);
    REQUIRE(flag.code == 0);
    REQUIRE(flag.out.find("would fetch http://flag.example/m/train-images-idx3-ubyte.gz") !=
            std::string::npos);
    REQUIRE(flag.out.find("mirror.internal") == std::string::npos);
    unsetenv("TANHEXP_DATA_MIRROR");

    // per-dataset defaults differ
    RunResult fash = run_cli("fetch --dataset fashion --dry-run --data-dir " + dest);
    REQUIRE(fash.code == 0);
    REQUIRE(fash.out.find("fashion-mnist.s3-website") != std::string::npos);
}
