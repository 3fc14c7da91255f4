#pragma once

#include "hzreach/config.hpp"
#include "hzreach/estimate.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace hzreach
{

/// The simulated state left every region.
class SimulationError : public std::runtime_error
{
  public:
    SimulationError(int step, const std::string& what) : std::runtime_error(what), step_(step) {}
    int step() const { return step_; }

  private:
    int step_;
};

/// One simulated run: x has length+1 entries, u has length; y (stacked outputs) is empty without sensors.
struct Episode
{
    std::vector<Vector> x;
    std::vector<Vector> u;
    std::vector<Vector> y;
    std::vector<int> mode;

    int length() const { return static_cast<int>(u.size()); }
};

/// Uniform draw from the factor box of z: c + G xi with xi uniform in [-1, 1]^g.
Vector draw_from_factor_box(const Zonotope& z, std::mt19937_64& rng);

/**
 * Simulates `length` steps from x0. Inputs, process noise and sensor noise are drawn from the
 * factor boxes of their zonotopes; the active mode is the lowest-index region containing x.
 * Throws SimulationError when the state leaves every region.
 */
Episode simulate_episode(const PwaSystemSpec& spec, const Zonotope& input_set, const Vector& x0, int length,
                         std::uint64_t seed);

/// The identification data set: episodes starting from draws of the data initial set.
std::vector<Episode> simulate_data(const ExperimentConfig& cfg);

/// The estimation run from the configured true initial state (or a draw of the initial set).
Episode simulate_truth(const ExperimentConfig& cfg, int steps);

/// Consecutive (x, u, x+) pairs within each episode.
std::vector<Transition> transitions(const std::vector<Episode>& episodes);

/// Header `k,x1..xn,u1..um,y1..yp,mode`; blank line between episodes; the final row's inputs are nan.
std::string trajectory_csv(const std::vector<Episode>& episodes);
/// Columns are found by header name; missing mode columns are left empty.
std::vector<Episode> parse_trajectory_csv(const std::string& text);

/// Splits the stacked outputs of an episode into per-sensor readings.
std::vector<MeasurementStep> measurement_stream(const Episode& e, const std::vector<Sensor>& sensors);

/// Rows `k,u1..um,j,y1..yp_j`; y columns beyond the sensor's dimension are left empty.
std::string measurements_csv(const std::vector<MeasurementStep>& stream, Index input_dim, Index max_output_dim);
std::vector<MeasurementStep> parse_measurements_csv(const std::string& text);

/// Rows `k,x1..xn,mode` of the true run.
std::string truth_csv(const Episode& e);

std::string read_text_file(const std::string& path);

} // namespace hzreach
