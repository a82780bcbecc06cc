#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include <unistd.h>

#include "fracops/errors.hpp"
#include "fracops/experiments/experiments.hpp"

namespace fs = std::filesystem;
using namespace fracops;
using namespace fracops::experiments;

namespace {

// Fresh scratch directory, removed on scope exit.
struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("fracops_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Code and message of the Error raised by fn.
std::pair<ErrorCode, std::string> error_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return {e.code(), e.what()};
    }
    FAIL("no error raised");
    return {ErrorCode::InvalidArgument, ""};
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

const char* kSmallSpectrum = "experiment = spectrum\nalpha = 1.5\ngrids = 32, 64, 128\nmodes = 3\n";

}  // namespace

TEST_CASE("config parsing skips comments and blank lines, trims whitespace") {
    const auto c = ExperimentConfig::parse("# header\n\n  experiment =  spectrum \n\talpha=1.5\r\n", "cfg");
    CHECK(c.experiment() == "spectrum");
    CHECK(c.entries().size() == 2);
    CHECK(c.get_string("alpha") == "1.5");
    CHECK(c.source() == "cfg");
    CHECK(ExperimentConfig::parse("experiment = x").source() == "<string>");
}

TEST_CASE("config parse errors name source and line") {
    auto [c1, m1] = error_of([] { ExperimentConfig::parse("experiment = a\nnot a pair\n", "f.cfg"); });
    CHECK(c1 == ErrorCode::ConfigParse);
    CHECK(contains(m1, "f.cfg:2"));
    CHECK(contains(m1, "expected 'key = value'"));

    auto [c2, m2] = error_of([] { ExperimentConfig::parse("experiment = a\n = 3\n", "f.cfg"); });
    CHECK(c2 == ErrorCode::ConfigParse);
    CHECK(contains(m2, "f.cfg:2: empty key"));

    auto [c3, m3] = error_of([] { ExperimentConfig::parse("experiment = a\nalpha =\n", "f.cfg"); });
    CHECK(contains(m3, "key 'alpha' has no value"));

    auto [c4, m4] = error_of([] { ExperimentConfig::parse("experiment = a\nalpha = 1\n# c\nalpha = 2\n", "f.cfg"); });
    CHECK(contains(m4, "f.cfg:4"));
    CHECK(contains(m4, "key 'alpha' is repeated"));

    auto [c5, m5] = error_of([] { ExperimentConfig::parse("alpha = 1\n", "f.cfg"); });
    CHECK(c5 == ErrorCode::ConfigParse);
    CHECK(contains(m5, "key 'experiment' is missing"));
}

TEST_CASE("loading a missing config is an Io error") {
    CHECK(error_of([] { ExperimentConfig::load("/nonexistent/dir/x.cfg"); }).first == ErrorCode::Io);
    TempDir d("load");
    write_file(d.path / "a.cfg", kSmallSpectrum);
    const auto c = ExperimentConfig::load(d.path / "a.cfg");
    CHECK(c.source() == (d.path / "a.cfg").string());
    CHECK(c.get_sizes("grids") == std::vector<std::size_t>{32, 64, 128});
}

TEST_CASE("typed getters") {
    const auto c = ExperimentConfig::parse(
        "experiment = e\nd = 2.5e-3\nn = 1e6\nm = 42\nfrac = 1.5\nneg = -3\nseed = 18446744073709551615\n"
        "yes = true\nno = false\nbad = maybe\nlist = 1, 2.5 ,3\nsizes = 4,8\nword = abc\n");
    CHECK(c.get_double("d") == doctest::Approx(2.5e-3));
    CHECK(c.get_size("n") == 1000000);
    CHECK(c.get_size("m") == 42);
    CHECK(c.get_seed("seed") == 18446744073709551615ull);
    CHECK(c.get_bool("yes"));
    CHECK_FALSE(c.get_bool("no"));
    CHECK(c.get_doubles("list") == std::vector<double>{1.0, 2.5, 3.0});
    CHECK(c.get_sizes("sizes") == std::vector<std::size_t>{4, 8});

    CHECK(c.get_double("absent", 7.0) == 7.0);
    CHECK(c.get_size("absent", 3) == 3);
    CHECK(c.get_bool("absent", true));
    CHECK(c.get_string("absent", std::string("z")) == "z");
    CHECK(c.get_doubles("absent", std::vector<double>{1.0}).size() == 1);

    auto [code, msg] = error_of([&] { c.get_double("absent"); });
    CHECK(code == ErrorCode::ConfigParse);
    CHECK(contains(msg, "key 'absent': required"));
    CHECK(contains(error_of([&] { c.get_double("word"); }).second, "'abc' is not a number"));
    CHECK(contains(error_of([&] { c.get_size("frac"); }).second, "not a nonnegative integer"));
    CHECK(contains(error_of([&] { c.get_size("neg"); }).second, "not a nonnegative integer"));
    CHECK(contains(error_of([&] { c.get_seed("neg"); }).second, "unsigned 64-bit"));
    CHECK(contains(error_of([&] { c.get_bool("bad"); }).second, "'maybe' is not true or false"));
    CHECK(contains(error_of([&] { c.get_doubles("word"); }).second, "'abc' is not a number"));
    CHECK(contains(error_of([&] { c.get_sizes("list"); }).second, "'2.5' is not a nonnegative integer"));
}

TEST_CASE("validate rejects unknown keys and experiments") {
    auto [c1, m1] = error_of([] { validate(ExperimentConfig::parse("experiment = spectrum\nalhpa = 1.5\n", "s.cfg")); });
    CHECK(c1 == ErrorCode::ConfigParse);
    CHECK(contains(m1, "s.cfg: key 'alhpa'"));
    CHECK(contains(m1, "unknown key"));

    auto [c2, m2] = error_of([] { validate(ExperimentConfig::parse("experiment = nope\n")); });
    CHECK(c2 == ErrorCode::ConfigParse);
    CHECK(contains(m2, "unknown experiment 'nope'"));
    for (const auto& e : list_experiments()) CHECK(contains(m2, e.name));

    // Common keys are accepted everywhere.
    CHECK_NOTHROW(validate(ExperimentConfig::parse(std::string(kSmallSpectrum) + "seed = 3\noutput = x\n")));
}

TEST_CASE("validate rejects bad parameters with the key named") {
    struct Case {
        std::string text, key, what;
    };
    const std::vector<Case> cases{
        {"experiment = spectrum\nalpha = 2.5\n", "alpha", "(0,2)"},
        {"experiment = spectrum\nalpha = 0.5\n", "alpha", "outside the range"},
        {"experiment = spectrum\nalpha = x\n", "alpha", "not a number"},
        {"experiment = spectrum\ngrids = 64, 32\nmodes = 3\n", "grids", "strictly increasing"},
        {"experiment = spectrum\ngrids = 8, 16\nmodes = 10\n", "modes", "exceeds the smallest grid"},
        {"experiment = spectrum\nl = -1\n", "l", "positive"},
        {"experiment = equivalence\nwindow = 0.5\n", "window", "[0, 0.5)"},
        {"experiment = equivalence\nalphas = 0.5\n", "alphas", "outside the admissible range"},
        {"experiment = theorem2\npower = 1\n", "power", "domain-error"},
        {"experiment = theorem2\nalpha = 1\n", "alpha", "integer orders"},
        {"experiment = theorem2\nwindow_lo = 0.5\nwindow_hi = 0.2\n", "window_hi", "must exceed"},
        {"experiment = powers\nalphas = 1.5\n", "alphas", "outside the admissible range"},
        {"experiment = powers\nn = 1\n", "n", "at least 2"},
        {"experiment = levy\nfunction = cosine\n", "function", "not one of"},
        {"experiment = levy\nalpha = 0.8\nfunction = linear\n", "function", "finite mean"},
        {"experiment = levy\ncount = 1\n", "count", "at least 2"},
        {"experiment = levy\nh_ladder = 0.1, -1\n", "h_ladder", "positive"},
        {"experiment = levy\nseed = -1\n", "seed", "unsigned"},
        {"experiment = solve\nmode = sideways\n", "mode", "not one of"},
        {"experiment = solve\nmode = anomalous\nalphas = 1.5, 1.2\n", "alphas", "increasing"},
        {"experiment = solve\nmode = anomalous\nT = 0.02\ndt = 3e-3\n", "dt", "does not divide"},
        {"experiment = solve\nmode = convergence\noperator = magic\n", "operator", "not one of"},
        {"experiment = sobolev\ns = 1.5\n", "s", "(0,1)"},
        {"experiment = sobolev\np = 0.5\n", "p", "at least 1"},
        {"experiment = sobolev\ngrids = 100\n", "grids", "two grids"},
    };
    for (const auto& cs : cases) {
        CAPTURE(cs.text);
        auto [code, msg] = error_of([&] { validate(ExperimentConfig::parse(cs.text, "c.cfg")); });
        CHECK(code == ErrorCode::ConfigParse);
        CHECK(contains(msg, "key '" + cs.key + "'"));
        CHECK(contains(msg, cs.what));
    }
}

TEST_CASE("every experiment validates with its defaults") {
    for (const auto& e : list_experiments()) {
        CAPTURE(e.name);
        CHECK_FALSE(e.description.empty());
        CHECK_NOTHROW(validate(ExperimentConfig::parse("experiment = " + e.name + "\n")));
    }
    CHECK(list_experiments().size() == 7);
}

TEST_CASE("output_dir_for") {
    RunOptions o;
    o.output_root = "root";
    CHECK(output_dir_for(ExperimentConfig::parse("experiment = levy\n"), o) == fs::path("root/levy"));
    CHECK(output_dir_for(ExperimentConfig::parse("experiment = levy\n", "dir/my_run.cfg"), o) ==
          fs::path("root/my_run"));
    CHECK(output_dir_for(ExperimentConfig::parse("experiment = levy\noutput = a/b\n"), o) == fs::path("root/a/b"));

    auto [c1, m1] = error_of([&] { output_dir_for(ExperimentConfig::parse("experiment = levy\noutput = ../x\n"), o); });
    CHECK(c1 == ErrorCode::ConfigParse);
    CHECK(contains(m1, "'..'"));
    CHECK(contains(error_of([&] { output_dir_for(ExperimentConfig::parse("experiment = levy\noutput = a/../../x\n"), o); })
                       .second,
                   "'..'"));
    CHECK(contains(error_of([&] { output_dir_for(ExperimentConfig::parse("experiment = levy\noutput = /tmp/x\n"), o); })
                       .second,
                   "relative path"));
}

TEST_CASE("default output root follows the environment") {
    const char* old = std::getenv("FRACOPS_OUTPUT_ROOT");
    const std::string saved = old ? old : "";
    ::setenv("FRACOPS_OUTPUT_ROOT", "/tmp/somewhere", 1);
    CHECK(default_output_root() == fs::path("/tmp/somewhere"));
    ::setenv("FRACOPS_OUTPUT_ROOT", "", 1);
    CHECK(default_output_root() == fs::path("results"));
    ::unsetenv("FRACOPS_OUTPUT_ROOT");
    CHECK(default_output_root() == fs::path("results"));
    if (old) ::setenv("FRACOPS_OUTPUT_ROOT", saved.c_str(), 1);
}

TEST_CASE("version") { CHECK(version() == FRACOPS_VERSION); }

TEST_CASE("format_double and CsvTable") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(format_double(INFINITY) == "inf");

    CsvTable t{"t", {"a", "b", "c"}, {}};
    t.add({1.5, 2LL, std::string("x")});
    t.add({0.1, -3LL, std::string("")});
    CHECK(t.render() == "a,b,c\n1.5,2,x\n0.10000000000000001,-3,\n");
    auto [code, msg] = error_of([&] { t.add({1.0}); });
    CHECK(code == ErrorCode::InvalidArgument);
    CHECK(contains(msg, "row width"));
}

TEST_CASE("report JSON keeps non-finite values as strings") {
    ExperimentReport r;
    r.experiment = "e";
    r.assertions.push_back({"a", true, 1.0, 2.0, ""});
    r.assertions.push_back({"b", false, NAN, INFINITY, "d"});
    const auto j = r.to_json();
    CHECK(j["passed"] == false);
    CHECK(j["assertions"][0]["value"] == 1.0);
    CHECK(j["assertions"][1]["value"] == "nan");
    CHECK(j["assertions"][1]["threshold"] == "inf");
    CHECK(j["assertions"][1]["detail"] == "d");
    r.assertions.pop_back();
    CHECK(r.to_json()["passed"] == true);
    CHECK(ExperimentReport{}.passed());
}

TEST_CASE("run writes tables and report.json") {
    TempDir d("run");
    RunOptions o;
    o.output_root = d.path;
    const auto rep = run(ExperimentConfig::parse(kSmallSpectrum, "small.cfg"), o);
    CHECK(rep.passed());
    CHECK(rep.output_dir == d.path / "small");
    CHECK(rep.version == version());
    CHECK(rep.tables == std::vector<std::string>{"spectrum.csv", "spectrum_grids.csv"});
    for (const auto& f : rep.tables) CHECK(fs::exists(rep.output_dir / f));

    const auto j = nlohmann::json::parse(slurp(rep.output_dir / "report.json"));
    CHECK(j["experiment"] == "spectrum");
    CHECK(j["passed"] == true);
    CHECK(j["config"]["grids"] == "32, 64, 128");
    CHECK(j["tables"].size() == 2);
    CHECK(j["summary"].contains("lambda1_numeric"));
    CHECK(j["assertions"].size() >= 4);

    const auto csv = slurp(rep.output_dir / "spectrum.csv");
    CHECK(csv.rfind("n,numeric,asymptotic,frac_power,gap,scaled_gap\n", 0) == 0);
    std::size_t lines = 0;
    for (char ch : csv) lines += ch == '\n';
    CHECK(lines == 4);
}

TEST_CASE("run records the seed") {
    TempDir d("seed");
    RunOptions o;
    o.output_root = d.path;
    const auto lv = run(ExperimentConfig::parse(
                            "experiment = levy\ncount = 1000\nhalving_check = false\nh_ladder = 0.1\nseed = 77\n"),
                        o);
    CHECK(lv.seed == 77);
    const auto dflt = run(ExperimentConfig::parse(
                              "experiment = levy\ncount = 1000\nhalving_check = false\nh_ladder = 0.1\noutput = d\n"),
                          o);
    CHECK(dflt.seed != 0);
}

TEST_CASE("run turns computation errors into a failed assertion") {
    TempDir d("completed");
    RunOptions o;
    o.output_root = d.path;
    // A coarse quadrature step cannot meet the accuracy target.
    const auto rep = run(ExperimentConfig::parse("experiment = powers\nn = 16\nquad_step = 3\n"), o);
    CHECK_FALSE(rep.passed());
    REQUIRE(rep.assertions.size() >= 1);
    CHECK(rep.assertions.back().name == "completed");
    CHECK(contains(rep.assertions.back().detail, "accuracy-not-met"));
    CHECK(fs::exists(rep.output_dir / "report.json"));

    // Config errors propagate instead.
    CHECK(error_of([&] { run(ExperimentConfig::parse("experiment = spectrum\nalpha = 2.5\n"), o); }).first ==
          ErrorCode::ConfigParse);
}

TEST_CASE("run_all on an empty or missing directory") {
    TempDir d("empty");
    RunOptions o;
    o.output_root = d.path / "out";
    const auto s = run_all(d.path, o);
    CHECK(s.entries.empty());
    REQUIRE(s.warnings.size() == 1);
    CHECK(contains(s.warnings[0], "no *.cfg files"));
    CHECK(s.exit_code() == 0);

    CHECK(error_of([&] { run_all(d.path / "missing", o); }).first == ErrorCode::Io);
}

TEST_CASE("run_all statuses, ordering and exit codes") {
    TempDir d("suite");
    const fs::path suite = d.path / "suite";
    fs::create_directories(suite);
    write_file(suite / "b_pass.cfg", kSmallSpectrum);
    // Scaled-gap ratios are at least 1, so 0.5 must fail.
    write_file(suite / "c_fail.cfg", std::string(kSmallSpectrum) + "gap_ratio_max = 0.5\n");
    write_file(suite / "notes.txt", "ignored");
    RunOptions o;
    o.output_root = d.path / "out";

    for (unsigned jobs : {1u, 3u}) {
        CAPTURE(jobs);
        const auto s = run_all(suite, o, jobs);
        REQUIRE(s.entries.size() == 2);
        CHECK(s.entries[0].config.filename() == "b_pass.cfg");
        CHECK(s.entries[0].status == RunStatus::Passed);
        CHECK(s.entries[0].experiment == "spectrum");
        CHECK(s.entries[1].status == RunStatus::Failed);
        CHECK(contains(s.entries[1].message, "scaled_gap_bounded"));
        CHECK(s.exit_code() == 1);
    }

    write_file(suite / "a_bad.cfg", "experiment = spectrum\nalpha = 2.5\n");
    const auto s = run_all(suite, o, 2);
    REQUIRE(s.entries.size() == 3);
    CHECK(s.entries[0].config.filename() == "a_bad.cfg");
    CHECK(s.entries[0].status == RunStatus::ConfigError);
    CHECK(contains(s.entries[0].message, "(0,2)"));
    CHECK(s.exit_code() == 2);

    const auto j = s.to_json();
    CHECK(j["exit_code"] == 2);
    CHECK(j["configs"][0]["status"] == "config-error");
    CHECK(j["configs"][1]["status"] == "pass");
    CHECK(j["configs"][2]["status"] == "fail");
    CHECK(j["version"] == version());
}

TEST_CASE("levy tables are identical across reruns and worker counts") {
    TempDir d("det");
    const std::string base = "experiment = levy\ncount = 20000\nh_ladder = 0.1, 0.01\nseed = 5\n";
    std::vector<std::string> tables;
    for (const char* w : {"workers = 1\noutput = w1\n", "workers = 3\noutput = w3\n", "workers = 3\noutput = again\n"}) {
        RunOptions o;
        o.output_root = d.path;
        const auto rep = run(ExperimentConfig::parse(base + w), o);
        CHECK(rep.passed());
        tables.push_back(slurp(rep.output_dir / "levy.csv") + slurp(rep.output_dir / "levy_convergence.csv"));
    }
    CHECK(tables[0] == tables[1]);
    CHECK(tables[1] == tables[2]);

    RunOptions o;
    o.output_root = d.path;
    const auto other = run(ExperimentConfig::parse("experiment = levy\ncount = 20000\nh_ladder = 0.1, 0.01\nseed = 6\n"), o);
    CHECK(slurp(other.output_dir / "levy.csv") != slurp(d.path / "w1" / "levy.csv"));
}
