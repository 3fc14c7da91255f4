#include "test_support.hpp"

#include "hzreach/config.hpp"
#include "hzreach/estimate.hpp"
#include "hzreach/simulate.hpp"

using namespace hzreach;
using namespace hzreach::testing;

namespace
{

Matrix row(std::initializer_list<double> v)
{
    const Vector x = vec(v);
    return x.transpose();
}

Sensor sensor(const Matrix& c, double noise)
{
    const Index p = c.rows();
    if (noise == 0.0)
        return {c, Zonotope::point(Vector::Zero(p))};
    return {c, Zonotope(Vector::Zero(p), noise * Matrix::Identity(p, p))};
}

std::vector<SensorReading> one_reading(const Vector& y) { return {{0, 0, y}}; }

std::vector<SensorReading> readings_at(const MeasurementStep& s) { return s.readings; }

struct Scenario
{
    ExperimentConfig cfg;
    Episode truth;
    std::vector<MeasurementStep> stream;
    std::vector<MatrixZonotope> models;
};

Scenario three_sensor_scenario(std::uint64_t seed, int steps)
{
    Scenario s;
    s.cfg = estimation_config();
    s.cfg.seed = seed;
    s.models = identify_models_from_outputs(transitions(simulate_data(s.cfg)), s.cfg.system,
                                            s.cfg.identification.a_bound);
    s.truth = simulate_truth(s.cfg, steps);
    s.stream = measurement_stream(s.truth, s.cfg.system.sensors);
    return s;
}

} // namespace

TEST_CASE("reverse_map_zonotope examples")
{
    const MeasurementZonotope point = reverse_map_zonotope(sensor(Matrix::Identity(2, 2), 0.0), vec({1, 2}), 10.0);
    check_hull(lift_zonotope(point.zonotope()), vec({1, 2}), vec({1, 2}), 1e-12);

    const MeasurementZonotope line = reverse_map_zonotope(sensor(row({1, 0}), 0.0), vec({3}), 10.0);
    check_hull(lift_zonotope(line.zonotope()), vec({3, -10}), vec({3, 10}), 1e-12);

    const MeasurementZonotope strip = reverse_map_zonotope(sensor(row({1, 0}), 0.5), vec({3}), 10.0);
    check_hull(lift_zonotope(strip.zonotope()), vec({2.5, -10}), vec({3.5, 10}), 1e-12);

    CHECK_THROWS_AS(reverse_map_zonotope(sensor(Matrix::Zero(1, 2), 0.0), vec({1}), 1.0), RankError);
    CHECK_THROWS_AS(reverse_map_zonotope(sensor(row({1, 0}), 0.0), vec({1}), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(reverse_map_zonotope(sensor(row({1, 0}), 0.0), vec({1, 2}), 1.0), DimensionError);
}

TEST_CASE("reverse-mapped centers reproduce the reading")
{
    std::mt19937_64 rng(11);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 30; ++trial)
    {
        const Index p = 1 + trial % 3;
        Matrix c(p, 3);
        for (Index i = 0; i < c.size(); ++i)
            c(i) = normal(rng);
        Sensor s{c, Zonotope(Vector::Constant(p, normal(rng)), 0.1 * Matrix::Identity(p, p))};
        Vector y(p);
        for (Index i = 0; i < p; ++i)
            y(i) = normal(rng);
        const MeasurementZonotope z = reverse_map_zonotope(s, y, 5.0);
        CHECK((c * z.center + s.noise.center() - y).cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("update_rm examples")
{
    const HybridZonotope exact =
        update_rm(unit_box(2), one_reading(vec({0.25, -0.5})), {sensor(Matrix::Identity(2, 2), 0.0)}, 10.0);
    check_hull(exact, vec({0.25, -0.5}), vec({0.25, -0.5}), 1e-9);

    const HybridZonotope strip = update_rm(unit_box(2), one_reading(vec({0.5})), {sensor(row({1, 0}), 0.1)}, 10.0);
    check_hull(strip, vec({0.4, -1}), vec({0.6, 1}));
}

TEST_CASE("update_in examples")
{
    // exact full observation: the weights are the identity
    const HybridZonotope pred = box(vec({0.2, -0.1}), vec({1.0, 2.0}));
    const ImplicitUpdate exact =
        update_in_detail(pred, one_reading(vec({0.5, 0.3})), {sensor(Matrix::Identity(2, 2), 0.0)}, 1.0);
    CHECK((exact.lambda - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((exact.set.center() - vec({0.5, 0.3})).cwiseAbs().maxCoeff() <= 1e-9);
    check_hull(exact.set, vec({0.5, 0.3}), vec({0.5, 0.3}), 1e-9);
    CHECK(exact.stationarity <= 1e-8);

    // a sensor that sees nothing leaves the set alone
    const ImplicitUpdate blind = update_in_detail(pred, one_reading(vec({4.0})), {sensor(Matrix::Zero(1, 2), 0.1)}, 1.0);
    CHECK(blind.lambda.cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(max_support_gap(blind.set, pred) <= 1e-12);

    // zero weights reproduce the predicted set
    const Sensor s = sensor(row({1, 0}), 0.1);
    const HybridZonotope same = update_in_with_weights(pred, one_reading(vec({0.5})), {s}, Matrix::Zero(2, 1));
    CHECK(same.center() == pred.center());
    CHECK(max_support_gap(same, pred) <= 1e-12);

    CHECK_THROWS_AS(update_in(pred, one_reading(vec({0.5})), {s}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(update_in_with_weights(pred, one_reading(vec({0.5})), {s}, Matrix::Zero(2, 2)), DimensionError);
}

TEST_CASE("implicit weights are stationary and the result covers the exact intersection")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial)
    {
        const HybridZonotope pred = random_hz(rng, 2, 4, 1, 1);
        const auto hull = oracle::interval_hull(pred);
        REQUIRE(hull);
        const Vector x = oracle::sample(pred, 1, static_cast<std::uint64_t>(trial)).front();
        const std::vector<Sensor> sensors = {sensor(row({1, 0.4}), 0.05), sensor(row({0.9, -1.2}), 0.05)};
        const std::vector<SensorReading> readings = {{0, 0, sensors[0].c * x}, {1, 0, sensors[1].c * x}};
        const ImplicitUpdate in = update_in_detail(pred, readings, sensors, 1.0);
        CHECK(in.stationarity <= 1e-8);
        CHECK(implicit_gradient(pred, readings, sensors, 1.0, in.lambda).cwiseAbs().maxCoeff() <= 1e-8);
        const HybridZonotope gi = update_gi(pred, readings, sensors);
        CHECK(oracle::membership(in.set, x));
        for (const auto& p : oracle::sample(gi, 20, static_cast<std::uint64_t>(trial)))
            CHECK(oracle::membership(in.set, p));
    }
}

TEST_CASE("update_gi examples")
{
    const HybridZonotope exact =
        update_gi(unit_box(2), one_reading(vec({0.25, -0.5})), {sensor(Matrix::Identity(2, 2), 0.0)});
    check_hull(exact, vec({0.25, -0.5}), vec({0.25, -0.5}), 1e-9);

    const std::vector<Sensor> strip_sensor = {sensor(row({1, 0}), 0.1)};
    const HybridZonotope strip = update_gi(unit_box(2), one_reading(vec({0.5})), strip_sensor);
    check_hull(strip, vec({0.4, -1}), vec({0.6, 1}));
    const HybridZonotope rm = update_rm(unit_box(2), one_reading(vec({0.5})), strip_sensor, 10.0);
    CHECK(equivalence_report(strip, rm, 16, 1e-9).max_gap <= 1e-9);

    // the reading selects one box of a union; the other branch becomes infeasible
    const HybridZonotope two = set_union(box(vec({-2, 0}), vec({1, 1})), box(vec({2, 0}), vec({1, 1})));
    const HybridZonotope picked = update_gi(two, one_reading(vec({2.5})), strip_sensor);
    check_hull(picked, vec({2.4, -1}), vec({2.6, 1}));

    // appending constraints never adds points
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 10; ++trial)
    {
        const HybridZonotope pred = random_hz(rng, 2, 4, 1, 1);
        const Vector x = oracle::sample(pred, 1, static_cast<std::uint64_t>(trial)).front();
        const HybridZonotope gi = update_gi(pred, one_reading(strip_sensor[0].c * x), strip_sensor);
        for (const auto& p : oracle::sample(gi, 20, 3))
            CHECK(oracle::membership(pred, p));
    }
}

TEST_CASE("equivalence_report examples")
{
    const HybridZonotope z = box(vec({0.5, 0}), vec({1, 2}));
    const EquivalenceReport same = equivalence_report(z, z, 32, 1e-9);
    CHECK(same.max_gap == 0.0);
    CHECK(same.equivalent(1e-9));

    // zero weights are not optimal: the predicted set is returned unchanged
    const std::vector<Sensor> s = {sensor(row({1, 0}), 0.1)};
    const HybridZonotope rm = update_rm(unit_box(2), one_reading(vec({0.5})), s, 10.0);
    const HybridZonotope lazy = update_in_with_weights(unit_box(2), one_reading(vec({0.5})), s, Matrix::Zero(2, 1));
    const EquivalenceReport gap = equivalence_report(rm, lazy, 32, 1e-4);
    CHECK(gap.max_gap > 0.1);
    CHECK(gap.a_in_b == gap.samples);
    CHECK(gap.b_in_a < gap.samples);

    CHECK_THROWS_AS(equivalence_report(z, HybridZonotope::empty(2), 8, 1e-4), EmptySetError);
}

TEST_CASE("time_update examples")
{
    const Scenario s = three_sensor_scenario(7, 1);
    const HybridZonotope prev = box(vec({-10, 10}), vec({0.1, 0.1}));
    const std::vector<HybridZonotope> u = {lift_zonotope(Zonotope::point(vec({0.3})))};
    const ReachFamily fam = time_update(prev, s.models, s.cfg.system.regions, u, s.cfg.system.noise_w);
    CHECK(fam.step == 1);
    CHECK(max_support_gap(fam.union_set, propagate_mode(s.models[0], prev, u[0], s.cfg.system.noise_w)) <= 1e-9);

    // the output-identified step contains the known-model step
    const ReachFamily known = time_update(prev, known_models(s.cfg.system), s.cfg.system.regions, u,
                                          s.cfg.system.noise_w);
    for (const auto& p : oracle::sample(known.union_set, 200, 4))
        CHECK(oracle::membership(fam.union_set, p));

    // a point without noise moves to a point
    const Vector x = vec({1, -2});
    const ReachFamily point = time_update(lift_zonotope(Zonotope::point(x)), known_models(s.cfg.system),
                                          s.cfg.system.regions, u, Zonotope::point(Vector::Zero(2)));
    const Vector next = s.cfg.system.modes[0].a * x + s.cfg.system.modes[0].b * vec({0.3});
    check_hull(point.union_set, next, next, 1e-12);
}

TEST_CASE("noise-free invertible sensing pins the estimate to the trajectory")
{
    ExperimentConfig cfg = estimation_config();
    cfg.system.noise_w = Zonotope::point(Vector::Zero(2));
    for (auto& s : cfg.system.sensors)
        s.noise = Zonotope::point(Vector::Zero(s.c.rows()));
    const Episode truth = simulate_truth(cfg, 5);
    const auto stream = measurement_stream(truth, cfg.system.sensors);
    const auto runs = estimate_online(lift_zonotope(cfg.initial_set), stream, known_models(cfg.system),
                                      cfg.system.regions, cfg.system.sensors, {lift_zonotope(cfg.input_set)},
                                      cfg.system.noise_w, {UpdateMethod::rm, UpdateMethod::in, UpdateMethod::gi}, 5);
    for (const auto& run : runs)
        for (int k = 0; k <= 5; ++k)
            check_hull(run.corrected[static_cast<std::size_t>(k)], truth.x[static_cast<std::size_t>(k)],
                       truth.x[static_cast<std::size_t>(k)], 1e-6);
}

TEST_CASE("three-sensor estimation contains the true state and RM matches GI")
{
    const int steps = 20;
    const Scenario s = three_sensor_scenario(7, steps);
    const auto runs = estimate_online(lift_zonotope(s.cfg.initial_set), s.stream, s.models, s.cfg.system.regions,
                                      s.cfg.system.sensors, {lift_zonotope(s.cfg.input_set)}, s.cfg.system.noise_w,
                                      {UpdateMethod::rm, UpdateMethod::in, UpdateMethod::gi}, steps);
    REQUIRE(runs.size() == 3);
    for (const auto& run : runs)
    {
        REQUIRE(run.corrected.size() == static_cast<std::size_t>(steps) + 1);
        for (int k = 0; k <= steps; ++k)
            CHECK(oracle::membership(run.corrected[static_cast<std::size_t>(k)], s.truth.x[static_cast<std::size_t>(k)]));
    }
    for (double st : runs[1].stationarity)
        CHECK(st <= 1e-8);
    for (int k = 0; k <= steps; k += 4)
        CHECK(equivalence_report(runs[0].corrected[static_cast<std::size_t>(k)],
                                 runs[2].corrected[static_cast<std::size_t>(k)], 32, 1e-4, 10)
                  .equivalent(1e-4));
}

// The implicit intersection is a zonotope containing the exact intersection, which is a
// polytope with more faces; at this noise level their supports differ by about 1e-2.
TEST_CASE("three-sensor step: implicit intersection matches reverse mapping" * doctest::should_fail())
{
    const Scenario s = three_sensor_scenario(7, 1);
    const HybridZonotope pred = lift_zonotope(s.cfg.initial_set);
    const auto& readings = readings_at(s.stream[0]);
    const HybridZonotope rm = update_rm(pred, readings, s.cfg.system.sensors, default_null_space_extent(pred));
    const HybridZonotope in = update_in(pred, readings, s.cfg.system.sensors, 1.0);
    CHECK(equivalence_report(rm, in, 32, 1e-4, 0).max_gap <= 1e-4);
}

TEST_CASE("three-sensor step: the implicit intersection covers reverse mapping")
{
    const Scenario s = three_sensor_scenario(7, 1);
    const HybridZonotope pred = lift_zonotope(s.cfg.initial_set);
    const auto& readings = readings_at(s.stream[0]);
    const HybridZonotope rm = update_rm(pred, readings, s.cfg.system.sensors, default_null_space_extent(pred));
    const HybridZonotope in = update_in(pred, readings, s.cfg.system.sensors, 1.0);
    const EquivalenceReport r = equivalence_report(rm, in, 32, 1e-4, 30);
    CHECK(r.a_in_b == r.samples);
    const Matrix dirs = oracle::spread_directions(2, 32);
    const auto hr = oracle::support_batch(rm, dirs);
    const auto hi = oracle::support_batch(in, dirs);
    for (std::size_t i = 0; i < hr.size(); ++i)
        CHECK(hr[i] <= hi[i] + 1e-9);
}

TEST_CASE("inconsistent readings are reported with their step")
{
    ExperimentConfig cfg = estimation_config();
    const Episode truth = simulate_truth(cfg, 3);
    auto stream = measurement_stream(truth, cfg.system.sensors);
    stream[2].readings[0].y(0) += 50.0;
    try
    {
        estimate_online(lift_zonotope(cfg.initial_set), stream, known_models(cfg.system), cfg.system.regions,
                        cfg.system.sensors, {lift_zonotope(cfg.input_set)}, cfg.system.noise_w, {UpdateMethod::gi}, 3);
        FAIL("expected an infeasibility error");
    }
    catch (const EstimationInfeasibleError& e)
    {
        CHECK(e.step() == 2);
    }
    CHECK_THROWS_AS(estimate_online(lift_zonotope(cfg.initial_set), stream, known_models(cfg.system),
                                    cfg.system.regions, cfg.system.sensors, {lift_zonotope(cfg.input_set)},
                                    cfg.system.noise_w, {UpdateMethod::gi}, 10),
                    std::invalid_argument);
}
