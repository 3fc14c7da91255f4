#pragma once

#include "hzreach/ident.hpp"
#include "hzreach/io.hpp"
#include "hzreach/reach.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace hzreach
{

enum class Method
{
    rm,
    in,
    gi,
    all,
};

Method parse_method(const std::string& s);
std::string method_name(Method m);

/// Where the estimator's time-update model sets come from.
enum class ModelSource
{
    outputs, // identified from recorded outputs (default)
    states,  // identified from recorded states (ablation)
    known,   // the true dynamics
};

struct DataSettings
{
    int episodes = 2;
    int length = 25;
    /// initial states of the recorded episodes are drawn from this set (default: the initial set)
    std::optional<Zonotope> initial_set;
};

struct IdentSettings
{
    /// upper bound on ||A_i||_inf used by the output-based model set
    double a_bound = 1.2;
};

struct EstimationSettings
{
    Method method = Method::all;
    double alpha = 1.0;
    /// null-space extent of the reverse-mapped zonotopes; <= 0 selects 2 max|IH(pred)| + 1 per step
    double m_value = 0.0;
    int steps = 20;
    ModelSource model_source = ModelSource::outputs;
    /// the simulated true trajectory starts here
    Vector true_initial_state;
    int report_directions = 32;
    double report_tolerance = 1e-4;
};

struct ReachSettings
{
    int horizon = 5;
    UnionStrategy union_strategy = UnionStrategy::selector;
    bool hull_relaxation = false;
    int polygon_directions = 64;
};

struct BenchSettings
{
    int repeats = 100;
    int warmup = 5;
};

struct ExperimentConfig
{
    std::string name;
    std::uint64_t seed = 1;
    PwaSystemSpec system;
    Zonotope initial_set;
    Zonotope input_set;
    DataSettings data;
    IdentSettings identification;
    EstimationSettings estimation;
    ReachSettings reach;
    BenchSettings bench;

    /// Throws DimensionError / std::invalid_argument on inconsistent settings.
    void validate() const;
};

ExperimentConfig config_from_json(const io::json& j);
io::json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::string& path);

/// Two-mode guard-switching benchmark (x1 <= 0 / x1 >= 0) with its initial zonotope.
ExperimentConfig benchmark_config();
/// Single-mode rotation system observed by three sensors, X0 = <0, 15 I>, x(0) = (-10, 10).
ExperimentConfig estimation_config();

} // namespace hzreach
