#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const std::string kBin = GARMANET_BIN_PATH;

// Runs the tool, appending stdout+stderr to log.txt inside `dir`, and returns
// the process exit code.
int run_tool(const fs::path& dir, const std::string& args) {
    const std::string cmd =
        kBin + " " + args + " >> " + (dir / "log.txt").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Fresh scratch directory per test case.
fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("garmanet_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<std::string> csv_lines(const fs::path& p) {
    std::vector<std::string> lines;
    std::ifstream in(p);
    REQUIRE(in.good());
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) lines.push_back(line);
    return lines;
}

// value column of a t,value / timestamp,value CSV
std::vector<double> csv_values(const fs::path& p) {
    auto lines = csv_lines(p);
    std::vector<double> out;
    for (std::size_t i = 1; i < lines.size(); ++i)
        out.push_back(std::stod(lines[i].substr(lines[i].find(',') + 1)));
    return out;
}

// Simulates a small seasonal series into dir/sim/series.csv and returns its path.
fs::path make_series(const fs::path& dir, const std::string& extra = "") {
    const int code = run_tool(
        dir, "simulate --garma \"mu=0,ar=0.5,nu=0.966,d=0.3,truncation=600\" --n 800 "
             "--seed 7 --output " + (dir / "sim").string() + extra);
    REQUIRE(code == 0);
    return dir / "sim" / "series.csv";
}

} // namespace

// ===== simulate =====

TEST_CASE("simulate is byte-identical under a fixed seed") {
    const auto dir = fresh_dir("simulate");
    const std::string args = "simulate --garma \"nu=0.966,d=0.3\" --n 2000 --seed 7 --output ";
    CHECK(run_tool(dir, args + (dir / "a").string()) == 0);
    CHECK(run_tool(dir, args + (dir / "b").string()) == 0);
    const auto a = slurp(dir / "a" / "series.csv");
    CHECK(a == slurp(dir / "b" / "series.csv"));

    auto lines = csv_lines(dir / "a" / "series.csv");
    REQUIRE(lines.size() == 2001);
    CHECK(lines[0] == "timestamp,value");
    CHECK(lines[1].substr(0, 20) == "2000-01-01T00:00:00,");
    CHECK(lines[2].substr(0, 20) == "2000-01-01T01:00:00,"); // hourly grid
    CHECK(fs::is_regular_file(dir / "a" / "manifest.json"));

    // a different seed must actually change the data
    CHECK(run_tool(dir, "simulate --garma \"nu=0.966,d=0.3\" --n 2000 --seed 8 --output " +
                            (dir / "c").string()) == 0);
    CHECK(a != slurp(dir / "c" / "series.csv"));
}

TEST_CASE("simulate rejects malformed model descriptions") {
    const auto dir = fresh_dir("simulate_bad");
    CHECK(run_tool(dir, "simulate --garma \"banana=1\" --n 10 --output " +
                            (dir / "o").string()) == 1);
    CHECK(run_tool(dir, "simulate --garma \"nu=0.9\" --n 10 --output " +
                            (dir / "o2").string()) == 1); // nu without d
}

// ===== output directory protocol =====

TEST_CASE("output directory must be empty unless forced") {
    const auto dir = fresh_dir("outdir");
    const std::string args =
        "simulate --garma \"nu=0.9,d=0.2\" --n 50 --seed 1 --output " + (dir / "o").string();
    CHECK(run_tool(dir, args) == 0);
    CHECK(run_tool(dir, args) == 1);            // refuses to reuse
    CHECK(run_tool(dir, args + " --force") == 0); // explicit consent
}

// ===== decompose =====

TEST_CASE("decompose writes additive components") {
    const auto dir = fresh_dir("decompose");
    const auto series = make_series(dir);
    CHECK(run_tool(dir, "decompose --input " + series.string() +
                            " --value-col value --filter haar --levels 3 --output " +
                            (dir / "dec").string()) == 0);
    for (const char* name : {"D1.csv", "D2.csv", "D3.csv", "S3.csv", "manifest.json"})
        CHECK(fs::is_regular_file(dir / "dec" / name));

    const auto x = csv_values(series);
    const auto d1 = csv_values(dir / "dec" / "D1.csv");
    const auto d2 = csv_values(dir / "dec" / "D2.csv");
    const auto d3 = csv_values(dir / "dec" / "D3.csv");
    const auto s3 = csv_values(dir / "dec" / "S3.csv");
    REQUIRE(d1.size() == x.size());
    double worst = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t)
        worst = std::max(worst, std::abs(d1[t] + d2[t] + d3[t] + s3[t] - x[t]));
    CHECK(worst < 1e-8);
}

// ===== diagnose =====

TEST_CASE("diagnose emits the periodogram and the estimator table") {
    const auto dir = fresh_dir("diagnose");
    const auto series = make_series(dir);
    CHECK(run_tool(dir, "diagnose --input " + series.string() +
                            " --value-col value --output " + (dir / "dia").string()) == 0);
    auto pg = csv_lines(dir / "dia" / "periodogram.csv");
    CHECK(pg[0] == "freq,power");
    CHECK(pg.size() == 401); // header + N/2 frequencies

    auto lm = csv_lines(dir / "dia" / "longmem.csv");
    REQUIRE(lm.size() == 9); // header + 2 methods x 4 bandwidth exponents
    CHECK(lm[0] == "method,bandwidth,d_hat,std_error,p_value");
    int gph = 0, lw = 0;
    for (std::size_t i = 1; i < lm.size(); ++i) {
        if (lm[i].rfind("gph,", 0) == 0) ++gph;
        if (lm[i].rfind("local_whittle,", 0) == 0) ++lw;
    }
    CHECK(gph == 4);
    CHECK(lw == 4);
}

// ===== fit-garma =====

TEST_CASE("fit-garma writes a model document and repeats byte-identically") {
    const auto dir = fresh_dir("fitgarma");
    const auto series = make_series(dir);
    const std::string args = "fit-garma --input " + series.string() +
                             " --value-col value --p 1 --freqs 0.0416666666666667 "
                             "--truncation 300 --n-starts 2 --seed 5 --output ";
    CHECK(run_tool(dir, args + (dir / "a").string()) == 0);
    CHECK(run_tool(dir, args + (dir / "b").string()) == 0);
    const auto a = slurp(dir / "a" / "garma_model.json");
    CHECK(a == slurp(dir / "b" / "garma_model.json"));
    CHECK(a.find("\"factors\"") != std::string::npos);
}

TEST_CASE("fit-garma on fifty points with a three-factor model exits with the data code") {
    const auto dir = fresh_dir("fitgarma_short");
    const auto series = make_series(dir);
    // keep the header plus the first 50 observations
    {
        auto lines = csv_lines(series);
        std::ofstream out(dir / "short.csv");
        for (std::size_t i = 0; i <= 50; ++i) out << lines[i] << "\n";
    }
    const int code = run_tool(dir, "fit-garma --input " + (dir / "short.csv").string() +
                                       " --value-col value --k 3 --p 1 --q 1 "
                                       "--freqs 0.05,0.15,0.25 --output " +
                                       (dir / "o").string());
    CHECK(code == 2);
    CHECK(slurp(dir / "log.txt").find("too short") != std::string::npos);
}

// ===== train / forecast chain =====

TEST_CASE("train then forecast composes the saved stages") {
    const auto dir = fresh_dir("trainfc");
    const auto series = make_series(dir);
    CHECK(run_tool(dir, "train --input " + series.string() +
                            " --value-col value --mean garma --p 1 "
                            "--freqs 0.0416666666666667 --truncation 300 --n-starts 1 "
                            "--burn 100 --lags 3 --levels 1 --filter haar --min-prefix 20 "
                            "--units 4 --algo bp --lr 0.05 --epochs 40 --seed 3 --output " +
                            (dir / "tr").string()) == 0);
    CHECK(fs::is_regular_file(dir / "tr" / "model.json"));

    CHECK(run_tool(dir, "forecast --input " + series.string() +
                            " --value-col value --model " +
                            (dir / "tr" / "model.json").string() + " --horizon 6 --output " +
                            (dir / "fc").string()) == 0);
    auto lines = csv_lines(dir / "fc" / "forecast.csv");
    REQUIRE(lines.size() == 7);
    CHECK(lines[0] == "h,mean,residual,total");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::stringstream ss(lines[i]);
        std::string h, mean, resid, total;
        std::getline(ss, h, ',');
        std::getline(ss, mean, ',');
        std::getline(ss, resid, ',');
        std::getline(ss, total, ',');
        CHECK(std::stod(total) ==
              doctest::Approx(std::stod(mean) + std::stod(resid)).epsilon(1e-12));
    }

    // a bare mean-model document forecasts too, with a zero residual path
    CHECK(run_tool(dir, "fit-garma --input " + series.string() +
                            " --value-col value --p 1 --freqs 0.0416666666666667 "
                            "--truncation 300 --n-starts 1 --output " +
                            (dir / "fg").string()) == 0);
    CHECK(run_tool(dir, "forecast --input " + series.string() +
                            " --value-col value --model " +
                            (dir / "fg" / "garma_model.json").string() +
                            " --horizon 4 --output " + (dir / "fc2").string()) == 0);
    auto bare = csv_lines(dir / "fc2" / "forecast.csv");
    REQUIRE(bare.size() == 5);
    for (std::size_t i = 1; i < bare.size(); ++i) {
        const auto first = bare[i].find(',');
        const auto second = bare[i].find(',', first + 1);
        const auto third = bare[i].find(',', second + 1);
        CHECK(bare[i].substr(second + 1, third - second - 1) == "0");
    }
}

// ===== fit-ggarch =====

TEST_CASE("fit-ggarch consumes mean-model residuals") {
    const auto dir = fresh_dir("fitgg");
    const auto series = make_series(dir);
    CHECK(run_tool(dir, "fit-garma --input " + series.string() +
                            " --value-col value --p 1 --freqs 0.0416666666666667 "
                            "--truncation 300 --n-starts 1 --output " +
                            (dir / "fg").string()) == 0);
    CHECK(run_tool(dir, "fit-ggarch --input " + series.string() +
                            " --value-col value --garma-model " +
                            (dir / "fg" / "garma_model.json").string() +
                            " --burn 100 --truncation 300 --n-starts 2 --output " +
                            (dir / "gg").string()) == 0);
    const auto doc = slurp(dir / "gg" / "ggarch_model.json");
    CHECK(doc.find("\"gamma\"") != std::string::npos);
    CHECK(doc.find("\"tau\"") != std::string::npos);
}

// ===== backtest =====

TEST_CASE("backtest emits one row per model and horizon") {
    const auto dir = fresh_dir("backtest");
    const auto series = make_series(dir);
    const int code = run_tool(
        dir, "backtest --input " + series.string() +
                 " --value-col value --init 128 --train 600 --test 72 "
                 "--freqs 0.0416666666666667 --truncation 300 --n-starts 1 "
                 "--lags 3 --levels 1 --filter haar --min-prefix 20 --units 4 "
                 "--lr 0.05 --epochs 40 --pop 10 --gens 30 "
                 "--ggarch-truncation 300 --ggarch-n-starts 2 --seed 5 --report-dir " +
                 (dir / "bt").string());
    REQUIRE(code == 0);

    auto lines = csv_lines(dir / "bt" / "report.csv");
    REQUIRE(lines.size() == 46); // header + 9 models x 5 horizons
    CHECK(lines[0] == "model,horizon,mae,mse,rmse");
    std::map<std::string, std::set<std::string>> horizons_of;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto first = lines[i].find(',');
        const auto second = lines[i].find(',', first + 1);
        horizons_of[lines[i].substr(0, first)].insert(
            lines[i].substr(first + 1, second - first - 1));
    }
    REQUIRE(horizons_of.size() == 9);
    const std::set<std::string> expected = {"6", "12", "24", "48", "72"};
    for (const auto& [model, hs] : horizons_of) {
        CAPTURE(model);
        CHECK(hs == expected);
    }
    for (const char* name : {"llwnn-bp", "llwnn-pso", "garma-llwnn-bp", "garma-llwnn-pso",
                             "wllwnn-bp", "wllwnn-pso", "garma-wllwnn-bp",
                             "garma-wllwnn-pso", "garma-ggarch"})
        CHECK(horizons_of.count(name) == 1);

    CHECK(fs::is_regular_file(dir / "bt" / "forecasts.json"));
    CHECK(fs::is_regular_file(dir / "bt" / "manifest.json"));
}

// ===== configuration file =====

TEST_CASE("options load from an INI file and flags override it") {
    const auto dir = fresh_dir("config");
    const auto series = make_series(dir);
    {
        std::ofstream cfg(dir / "run.ini");
        cfg << "[fit-garma]\np=1\nfreqs=0.0416666666666667\ntruncation=300\nn-starts=1\n"
               "seed=5\n";
    }
    CHECK(run_tool(dir, "fit-garma --config " + (dir / "run.ini").string() + " --input " +
                            series.string() + " --value-col value --output " +
                            (dir / "a").string()) == 0);
    // the flag run with identical settings produces the identical model
    CHECK(run_tool(dir, "fit-garma --input " + series.string() +
                            " --value-col value --p 1 --freqs 0.0416666666666667 "
                            "--truncation 300 --n-starts 1 --seed 5 --output " +
                            (dir / "b").string()) == 0);
    CHECK(slurp(dir / "a" / "garma_model.json") == slurp(dir / "b" / "garma_model.json"));

    // a flag takes precedence over the file value: a different seed moves the
    // manifest's recorded seed
    CHECK(run_tool(dir, "fit-garma --config " + (dir / "run.ini").string() + " --input " +
                            series.string() + " --value-col value --seed 9 --output " +
                            (dir / "c").string()) == 0);
    CHECK(slurp(dir / "c" / "manifest.json").find("\"seed\": 9") != std::string::npos);
}
