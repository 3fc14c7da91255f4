#include "test_support.hpp"

#include "hzreach/cli.hpp"

#include <filesystem>
#include <sstream>

#include <unistd.h>

using namespace hzreach;
using namespace hzreach::testing;
namespace fs = std::filesystem;

namespace
{

struct TempDir
{
    fs::path path;

    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("hzreach_test_" + tag + "_" + std::to_string(::getpid())))
    {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }

    std::string str() const { return path.string(); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int count_lines(const std::string& text)
{
    return static_cast<int>(std::count(text.begin(), text.end(), '\n'));
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

ExperimentConfig small_benchmark()
{
    ExperimentConfig c = benchmark_config();
    c.reach.horizon = 2;
    c.reach.polygon_directions = 16;
    return c;
}

} // namespace

TEST_CASE("support polygon of a box")
{
    const Matrix v = cli::support_polygon(box(vec({1, 0}), vec({1, 2})), 4);
    REQUIRE(v.cols() == 4);
    for (Index i = 0; i < 4; ++i)
    {
        CHECK(std::abs(std::abs(v(0, i) - 1.0) - 1.0) <= 1e-9);
        CHECK(std::abs(std::abs(v(1, i)) - 2.0) <= 1e-9);
    }
}

TEST_CASE("timing statistics")
{
    const cli::TimingStats s = cli::timing_stats(UpdateMethod::gi, {4.0, 1.0, 3.0, 2.0});
    CHECK(s.mean == doctest::Approx(2.5));
    CHECK(s.median == doctest::Approx(2.5));
    CHECK(s.variance == doctest::Approx(5.0 / 3.0));
    CHECK(s.stddev == doctest::Approx(std::sqrt(5.0 / 3.0)));
    CHECK(s.min == 1.0);
    CHECK(s.max == 4.0);
    CHECK_THROWS_AS(cli::timing_stats(UpdateMethod::gi, {}), std::invalid_argument);
}

TEST_CASE("identify recovers noiseless benchmark dynamics and writes models")
{
    TempDir dir("identify");
    ExperimentConfig c = small_benchmark();
    c.system.noise_w = Zonotope::point(Vector::Zero(2));
    std::ostringstream log;
    cli::cmd_simulate(c, dir.str(), log);
    const auto models = cli::cmd_identify(c, dir.str(), log);
    REQUIRE(models.size() == 2);
    for (std::size_t i = 0; i < 2; ++i)
    {
        Matrix ab(2, 3);
        ab << c.system.modes[i].a, c.system.modes[i].b;
        CHECK((models[i].center() - ab).norm() <= 1e-8);
    }
    CHECK(log.str().find("smallest singular value") != std::string::npos);
    const io::json j = io::read_json_file(dir.file("models.json"));
    CHECK(j.at("models").size() == 2);
}

TEST_CASE("identify with a mode that never sees data exits with code 2")
{
    TempDir dir("empty_mode");
    ExperimentConfig c = benchmark_config();
    // the first region covers everything, so ties leave the second mode without data
    c.system.regions[0] = PolyhedralRegion::whole_space(2);
    c.system.regions[1] = PolyhedralRegion(Matrix::Identity(2, 2), Vector::Constant(2, -50.0));
    io::write_json_file(dir.file("config.json"), config_to_json(c));
    std::ostringstream log, err;
    CHECK(cli::run("identify", dir.file("config.json"), dir.str(), {}, log, err) == cli::kExitIdentification);
    CHECK(!err.str().empty());
}

TEST_CASE("reach emits one record per step, polygons, sizes and containment")
{
    TempDir dir("reach");
    const ExperimentConfig c = small_benchmark();
    std::ostringstream log;
    cli::cmd_simulate(c, dir.str(), log);
    const cli::ReachOutput out = cli::cmd_reach(c, dir.str(), log, 100);
    CHECK(out.containment_violations == 0);
    CHECK(out.containment_samples == 200);

    const io::json sets = io::read_json_file(dir.file("reach_sets.json"));
    REQUIRE(sets.at("data_driven").size() == 3);
    REQUIRE(sets.at("model_based").size() == 3);
    // serialized sets reproduce their support functions
    for (std::size_t k = 0; k < 3; ++k)
    {
        const HybridZonotope back = io::hybrid_zonotope_from_json(sets["data_driven"][k]["union"]);
        CHECK(max_support_gap(back, out.data_driven.families[k].union_set) <= 1e-12);
    }

    const std::string sizes = read_text_file(dir.file("sizes.csv"));
    CHECK(first_line(sizes) == "source,step,continuous,binary,constraints,total");
    CHECK(count_lines(sizes) == 1 + 2 * 3);
    const std::string polys = read_text_file(dir.file("polygons.csv"));
    CHECK(count_lines(polys) == 1 + 2 * 3 * 16);
    CHECK(fs::exists(dir.file("reach_timing.csv")));
}

TEST_CASE("estimate with one method emits no equivalence report")
{
    TempDir dir("estimate_rm");
    ExperimentConfig c = estimation_config();
    c.estimation.method = Method::rm;
    c.estimation.steps = 3;
    std::ostringstream log;
    const cli::EstimateOutput out = cli::cmd_estimate(c, dir.str(), log);
    REQUIRE(out.runs.size() == 1);
    CHECK(out.max_gap.empty());
    CHECK(!fs::exists(dir.file("equivalence.csv")));
    CHECK(count_lines(read_text_file(dir.file("bounds.csv"))) == 1 + 4);
}

TEST_CASE("estimate with all methods reports pairwise gaps")
{
    TempDir dir("estimate_all");
    ExperimentConfig c = estimation_config();
    c.estimation.steps = 2;
    std::ostringstream log;
    const cli::EstimateOutput out = cli::cmd_estimate(c, dir.str(), log);
    REQUIRE(out.runs.size() == 3);
    CHECK(out.max_gap.size() == 3);
    const std::string rep = read_text_file(dir.file("equivalence.csv"));
    CHECK(first_line(rep) == "step,a,b,max_gap,samples,a_in_b,b_in_a");
    CHECK(count_lines(rep) == 1 + 3 * 3);
}

TEST_CASE("contradictory measurements exit with code 3")
{
    TempDir dir("infeasible");
    ExperimentConfig c = estimation_config();
    c.estimation.method = Method::gi;
    c.estimation.steps = 3;
    io::write_json_file(dir.file("config.json"), config_to_json(c));
    std::ostringstream log, err;
    REQUIRE(cli::run("simulate", dir.file("config.json"), dir.str(), {}, log, err) == cli::kExitOk);
    auto stream = parse_measurements_csv(read_text_file(dir.file("measurements.csv")));
    stream[1].readings[0].y(0) += 100.0;
    io::write_text_file(dir.file("measurements.csv"), measurements_csv(stream, 1, 2));
    CHECK(cli::run("estimate", dir.file("config.json"), dir.str(), {}, log, err) == cli::kExitInfeasible);
    CHECK(err.str().find("step 1") != std::string::npos);
}

TEST_CASE("bench writes three rows per repeat and the stats table")
{
    TempDir dir("bench");
    ExperimentConfig c = estimation_config();
    c.bench.repeats = 30;
    std::ostringstream log;
    const cli::BenchOutput out = cli::cmd_bench(c, dir.str(), log);
    CHECK(out.records.size() == 90);
    CHECK(out.stats.size() == 3);
    CHECK(count_lines(read_text_file(dir.file("bench_timings.csv"))) == 1 + 90);
    const std::string stats = read_text_file(dir.file("bench_stats.csv"));
    CHECK(first_line(stats) == "method,mean,median,variance,stddev,min,max");
    CHECK(count_lines(stats) == 4);
    for (const auto& r : out.records)
        CHECK(r.seconds >= 0.0);

    c.bench.repeats = 29;
    CHECK_THROWS_AS(cli::cmd_bench(c, dir.str(), log), std::invalid_argument);
}

TEST_CASE("bad invocations exit with code 1")
{
    TempDir dir("errors");
    std::ostringstream log, err;
    CHECK(cli::run("simulate", dir.file("missing.json"), dir.str(), {}, log, err) == cli::kExitError);
    io::write_json_file(dir.file("config.json"), config_to_json(benchmark_config()));
    CHECK(cli::run("launch", dir.file("config.json"), dir.str(), {}, log, err) == cli::kExitError);
    CHECK(cli::run("estimate", dir.file("config.json"), dir.str(), {}, log, err) == cli::kExitError);
}

TEST_CASE("overrides replace config values")
{
    ExperimentConfig c = benchmark_config();
    cli::Overrides o;
    o.steps = 3;
    o.method = Method::in;
    o.repeats = 40;
    o.seed = 99;
    cli::apply_overrides(c, o);
    CHECK(c.reach.horizon == 3);
    CHECK(c.estimation.steps == 3);
    CHECK(c.estimation.method == Method::in);
    CHECK(c.bench.repeats == 40);
    CHECK(c.seed == 99);
}
