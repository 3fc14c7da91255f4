#pragma once

#include "hzreach/config.hpp"
#include "hzreach/estimate.hpp"
#include "hzreach/simulate.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace hzreach::cli
{

/// Command-line overrides applied on top of the config file.
struct Overrides
{
    std::optional<int> steps;
    std::optional<Method> method;
    std::optional<int> repeats;
    std::optional<std::uint64_t> seed;
};

void apply_overrides(ExperimentConfig& cfg, const Overrides& o);

/// Exit codes of the command runners.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitIdentification = 2;
inline constexpr int kExitInfeasible = 3;

/// Outputs of `simulate`: trajectory.csv (identification data), truth.csv and, with sensors, measurements.csv.
struct SimulationOutput
{
    std::vector<Episode> data;
    Episode truth;
    std::vector<MeasurementStep> stream;
};

SimulationOutput cmd_simulate(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log);

/// Writes models.json. Data comes from out_dir/trajectory.csv when present, else is simulated.
std::vector<MatrixZonotope> cmd_identify(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log);

struct ReachRun
{
    std::vector<ReachFamily> families;
    std::vector<double> step_seconds; // index k: time to compute step k (0 for the initial family)
};

struct ReachOutput
{
    ReachRun data_driven;
    ReachRun model_based; // empty when the dynamics are unknown
    int containment_samples = 0;
    int containment_violations = 0;
};

/// Times each step of a reach run; the first family holds the initial set.
ReachRun timed_reach(const HybridZonotope& initial, const std::vector<MatrixZonotope>& models,
                     const std::vector<PolyhedralRegion>& regions, const std::vector<HybridZonotope>& input_sets,
                     const Zonotope& noise, int n, const ReachOptions& opt = {});

/**
 * Writes reach_sets.json, polygons.csv, sizes.csv and reach_timing.csv. Models come from
 * out_dir/models.json when present, else from identification.
 */
ReachOutput cmd_reach(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log,
                      int samples_per_step = 500);

struct EstimateOutput
{
    std::vector<EstimationRun> runs;
    Episode truth;
    /// per step, the largest pairwise support gap (ALL only)
    std::vector<double> max_gap;
    std::vector<double> max_stationarity;
};

/**
 * Writes estimates.json and bounds.csv; with method ALL also equivalence.csv. Readings come
 * from out_dir/measurements.csv when present, else from simulation. Throws
 * EstimationInfeasibleError at an empty corrected set.
 */
EstimateOutput cmd_estimate(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log);

struct TimingRecord
{
    UpdateMethod method = UpdateMethod::rm;
    int run = 0;
    std::uint64_t seed = 0;
    double seconds = 0.0;
};

struct TimingStats
{
    UpdateMethod method = UpdateMethod::rm;
    double mean = 0.0;
    double median = 0.0;
    double variance = 0.0;
    double stddev = 0.0;
    double min = 0.0;
    double max = 0.0;
};

TimingStats timing_stats(UpdateMethod m, const std::vector<double>& seconds);

struct BenchOutput
{
    std::vector<TimingRecord> records;
    std::vector<TimingStats> stats;
};

/**
 * Times one measurement update of every method on the same predicted set (the first time
 * update of the estimation scenario). Writes bench_timings.csv and bench_stats.csv.
 * Throws std::invalid_argument for fewer than 30 repeats.
 */
BenchOutput cmd_bench(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log);

/// Vertices of the polygon bounded by the supporting lines in `count` evenly spread directions (2-D sets only).
Matrix support_polygon(const HybridZonotope& z, int count, const oracle::Options& opt = {});

/// Runs one command by name and maps errors to exit codes; messages go to err.
int run(const std::string& command, const std::string& config_path, const std::string& out_dir,
        const Overrides& overrides, std::ostream& log, std::ostream& err);

} // namespace hzreach::cli
