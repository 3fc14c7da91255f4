#include "hzreach/cli.hpp"

#include "hzreach/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <sstream>

namespace hzreach::cli
{

namespace
{

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

std::string path_in(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string join(const std::vector<std::string>& cells)
{
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i)
    {
        if (i)
            out += ',';
        out += cells[i];
    }
    return out;
}

std::string model_source_name(ModelSource s)
{
    switch (s)
    {
    case ModelSource::outputs:
        return "outputs";
    case ModelSource::states:
        return "states";
    case ModelSource::known:
        return "known";
    }
    return "unknown";
}

std::vector<Episode> load_or_simulate_data(const ExperimentConfig& cfg, const std::string& out_dir)
{
    const std::string path = path_in(out_dir, "trajectory.csv");
    if (fs::exists(path))
        return parse_trajectory_csv(read_text_file(path));
    return simulate_data(cfg);
}

std::vector<MatrixZonotope> identify(const ExperimentConfig& cfg, const std::vector<Episode>& data)
{
    switch (cfg.estimation.model_source)
    {
    case ModelSource::known:
        return known_models(cfg.system);
    case ModelSource::states:
        return identify_models(transitions(data), cfg.system);
    case ModelSource::outputs:
        return identify_models_from_outputs(transitions(data), cfg.system, cfg.identification.a_bound);
    }
    throw std::logic_error("identify: unknown model source");
}

std::vector<MatrixZonotope> load_or_identify(const ExperimentConfig& cfg, const std::string& out_dir)
{
    const std::string path = path_in(out_dir, "models.json");
    if (fs::exists(path))
    {
        const io::json doc = io::read_json_file(path);
        std::vector<MatrixZonotope> models;
        for (const auto& m : doc.at("models"))
            models.push_back(io::matrix_zonotope_from_json(m));
        return models;
    }
    return identify(cfg, load_or_simulate_data(cfg, out_dir));
}

std::vector<HybridZonotope> input_sets_of(const ExperimentConfig& cfg) { return {lift_zonotope(cfg.input_set)}; }

ReachOptions reach_options(const ExperimentConfig& cfg)
{
    ReachOptions opt;
    opt.union_strategy = cfg.reach.union_strategy;
    opt.hull_relaxation = cfg.reach.hull_relaxation;
    return opt;
}

io::json family_json(const ReachFamily& f)
{
    io::json j;
    j["step"] = f.step;
    j["union"] = io::to_json(f.union_set);
    j["per_mode"] = io::json::array();
    for (std::size_t i = 0; i < f.per_mode.size(); ++i)
    {
        io::json m;
        m["mode"] = i;
        m["empty"] = static_cast<bool>(f.empty[i]);
        m["set"] = io::to_json(f.per_mode[i]);
        j["per_mode"].push_back(std::move(m));
    }
    return j;
}

double quantile_sorted(const std::vector<double>& s, double q)
{
    const double pos = q * static_cast<double>(s.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

std::vector<MeasurementStep> load_or_build_stream(const ExperimentConfig& cfg, const std::string& out_dir,
                                                  const Episode& truth)
{
    const std::string path = path_in(out_dir, "measurements.csv");
    if (fs::exists(path))
        return parse_measurements_csv(read_text_file(path));
    return measurement_stream(truth, cfg.system.sensors);
}

std::vector<UpdateMethod> methods_of(Method m)
{
    switch (m)
    {
    case Method::rm:
        return {UpdateMethod::rm};
    case Method::in:
        return {UpdateMethod::in};
    case Method::gi:
        return {UpdateMethod::gi};
    case Method::all:
        return {UpdateMethod::rm, UpdateMethod::in, UpdateMethod::gi};
    }
    return {};
}

} // namespace

void apply_overrides(ExperimentConfig& cfg, const Overrides& o)
{
    if (o.steps)
    {
        cfg.estimation.steps = *o.steps;
        cfg.reach.horizon = *o.steps;
    }
    if (o.method)
        cfg.estimation.method = *o.method;
    if (o.repeats)
        cfg.bench.repeats = *o.repeats;
    if (o.seed)
        cfg.seed = *o.seed;
}

SimulationOutput cmd_simulate(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log)
{
    if (cfg.system.modes.empty())
        throw std::invalid_argument("simulate: the config has no known dynamics");
    SimulationOutput out;
    out.data = simulate_data(cfg);
    out.truth = simulate_truth(cfg, cfg.estimation.steps);
    io::write_text_file(path_in(out_dir, "trajectory.csv"), trajectory_csv(out.data));
    io::write_text_file(path_in(out_dir, "truth.csv"), truth_csv(out.truth));
    if (!cfg.system.sensors.empty())
    {
        out.stream = measurement_stream(out.truth, cfg.system.sensors);
        Index maxp = 0;
        for (const auto& s : cfg.system.sensors)
            maxp = std::max(maxp, s.c.rows());
        io::write_text_file(path_in(out_dir, "measurements.csv"),
                            measurements_csv(out.stream, cfg.input_set.dim(), maxp));
    }
    std::vector<int> counts(cfg.system.regions.size(), 0);
    for (const auto& e : out.data)
        for (int k = 0; k < e.length(); ++k)
            ++counts[static_cast<std::size_t>(e.mode[static_cast<std::size_t>(k)])];
    log << "simulated " << out.data.size() << " episodes of " << cfg.data.length << " steps; transitions per mode:";
    for (int c : counts)
        log << ' ' << c;
    log << "\ntrue run: " << out.truth.length() << " steps\n";
    return out;
}

std::vector<MatrixZonotope> cmd_identify(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log)
{
    const std::vector<Episode> data = load_or_simulate_data(cfg, out_dir);
    const auto raw = transitions(data);
    if (cfg.estimation.model_source != ModelSource::known)
    {
        const auto parts = partition_trajectories(raw, cfg.system.regions);
        for (const auto& d : parts)
        {
            Matrix stacked(d.x_minus.rows() + d.u_minus.rows(), d.size());
            stacked << d.x_minus, d.u_minus;
            const Eigen::JacobiSVD<Matrix> svd(stacked);
            const Vector& s = svd.singularValues();
            log << "mode " << d.mode_index << ": " << d.size() << " transitions, [X-; U-] is " << stacked.rows()
                << " x " << stacked.cols() << ", smallest singular value " << (s.size() ? s(s.size() - 1) : 0.0)
                << '\n';
        }
    }
    const auto models = identify(cfg, data);
    io::json j;
    j["source"] = model_source_name(cfg.estimation.model_source);
    j["models"] = io::json::array();
    for (const auto& m : models)
        j["models"].push_back(io::to_json(m));
    io::write_json_file(path_in(out_dir, "models.json"), j);
    for (std::size_t i = 0; i < models.size(); ++i)
        log << "mode " << i << ": model set with " << models[i].num_generators() << " generators\n";
    return models;
}

ReachRun timed_reach(const HybridZonotope& initial, const std::vector<MatrixZonotope>& models,
                     const std::vector<PolyhedralRegion>& regions, const std::vector<HybridZonotope>& input_sets,
                     const Zonotope& noise, int n, const ReachOptions& opt)
{
    if (n < 0)
        throw std::invalid_argument("timed_reach: negative horizon");
    ReachRun run;
    auto t0 = Clock::now();
    run.families.push_back(make_family(0, initial, regions, opt.oracle));
    run.step_seconds.push_back(seconds_since(t0));
    for (int k = 0; k < n; ++k)
    {
        t0 = Clock::now();
        run.families.push_back(reach_step(run.families.back(), models, regions, input_sets, noise, opt));
        run.step_seconds.push_back(seconds_since(t0));
    }
    return run;
}

Matrix support_polygon(const HybridZonotope& z, int count, const oracle::Options& opt)
{
    if (z.dim() != 2)
        throw DimensionError("support_polygon: the set is not two-dimensional");
    const Matrix dirs = oracle::spread_directions(2, count);
    const auto h = oracle::support_batch(z, dirs, opt);
    Matrix vertices(2, count);
    for (int i = 0; i < count; ++i)
    {
        const int j = (i + 1) % count;
        Eigen::Matrix2d a;
        a.row(0) = dirs.col(i).transpose();
        a.row(1) = dirs.col(j).transpose();
        vertices.col(i) = a.inverse() * Eigen::Vector2d(h[static_cast<std::size_t>(i)], h[static_cast<std::size_t>(j)]);
    }
    return vertices;
}

ReachOutput cmd_reach(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log,
                      int samples_per_step)
{
    const auto models = load_or_identify(cfg, out_dir);
    const HybridZonotope initial = lift_zonotope(cfg.initial_set);
    const ReachOptions opt = reach_options(cfg);
    const int n = cfg.reach.horizon;

    ReachOutput out;
    out.data_driven = timed_reach(initial, models, cfg.system.regions, input_sets_of(cfg), cfg.system.noise_w, n, opt);
    const bool have_model = !cfg.system.modes.empty();
    if (have_model)
        out.model_based = timed_reach(initial, known_models(cfg.system), cfg.system.regions, input_sets_of(cfg),
                                      cfg.system.noise_w, n, opt);

    io::json sets;
    sets["horizon"] = n;
    sets["data_driven"] = io::json::array();
    for (const auto& f : out.data_driven.families)
        sets["data_driven"].push_back(family_json(f));
    sets["model_based"] = io::json::array();
    for (const auto& f : out.model_based.families)
        sets["model_based"].push_back(family_json(f));

    if (have_model)
    {
        io::json checks = io::json::array();
        for (int k = 1; k <= n; ++k)
        {
            const auto& inner = out.model_based.families[static_cast<std::size_t>(k)].union_set;
            const auto& outer = out.data_driven.families[static_cast<std::size_t>(k)].union_set;
            const auto pts = oracle::sample(inner, samples_per_step,
                                            detail::mix_seed(cfg.seed, 0x4000 + static_cast<std::uint64_t>(k)));
            Matrix p(inner.dim(), static_cast<Index>(pts.size()));
            for (std::size_t i = 0; i < pts.size(); ++i)
                p.col(static_cast<Index>(i)) = pts[i];
            const auto inside = oracle::membership_batch(outer, p, 1e-7);
            const int bad = static_cast<int>(std::count(inside.begin(), inside.end(), 0));
            out.containment_samples += static_cast<int>(pts.size());
            out.containment_violations += bad;
            checks.push_back({{"step", k}, {"samples", pts.size()}, {"violations", bad}});
        }
        sets["containment"] = checks;
    }
    io::write_json_file(path_in(out_dir, "reach_sets.json"), sets);

    std::ostringstream sizes;
    std::ostringstream timing;
    std::ostringstream polys;
    sizes << "source,step,continuous,binary,constraints,total\n";
    timing << "source,step,seconds\n";
    polys << "source,step,vertex,x1,x2\n";
    const bool planar = cfg.system.state_dim() == 2;
    auto emit = [&](const char* source, const ReachRun& run) {
        for (std::size_t k = 0; k < run.families.size(); ++k)
        {
            const HybridZonotope& u = run.families[k].union_set;
            sizes << join({source, std::to_string(k), std::to_string(u.num_continuous()),
                           std::to_string(u.num_binary()), std::to_string(u.num_constraints()),
                           std::to_string(u.representation_size())})
                  << '\n';
            timing << source << ',' << k << ',' << io::format_double(run.step_seconds[k]) << '\n';
            if (planar && !oracle::is_empty(u))
            {
                const Matrix v = support_polygon(u, cfg.reach.polygon_directions);
                for (Index i = 0; i < v.cols(); ++i)
                    polys << join({source, std::to_string(k), std::to_string(i), io::format_double(v(0, i)),
                                   io::format_double(v(1, i))})
                          << '\n';
            }
        }
    };
    emit("data_driven", out.data_driven);
    if (have_model)
        emit("model_based", out.model_based);
    io::write_text_file(path_in(out_dir, "sizes.csv"), sizes.str());
    io::write_text_file(path_in(out_dir, "reach_timing.csv"), timing.str());
    if (planar)
        io::write_text_file(path_in(out_dir, "polygons.csv"), polys.str());

    for (std::size_t k = 0; k < out.data_driven.families.size(); ++k)
        log << "step " << k << ": size " << out.data_driven.families[k].union_set.representation_size() << ", "
            << out.data_driven.step_seconds[k] << " s\n";
    if (have_model)
        log << "containment: " << out.containment_samples - out.containment_violations << '/'
            << out.containment_samples << " model-based samples inside the data-driven sets\n";
    return out;
}

EstimateOutput cmd_estimate(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log)
{
    if (cfg.system.sensors.empty())
        throw std::invalid_argument("estimate: the config has no sensors");
    EstimateOutput out;
    const auto models = load_or_identify(cfg, out_dir);
    const int steps = cfg.estimation.steps;
    out.truth = simulate_truth(cfg, steps);
    const auto stream = load_or_build_stream(cfg, out_dir, out.truth);

    EstimationOptions opt;
    opt.alpha = cfg.estimation.alpha;
    opt.m_value = cfg.estimation.m_value;
    opt.reach = reach_options(cfg);
    const auto methods = methods_of(cfg.estimation.method);
    out.runs = estimate_online(lift_zonotope(cfg.initial_set), stream, models, cfg.system.regions, cfg.system.sensors,
                               input_sets_of(cfg), cfg.system.noise_w, methods, steps, opt);

    io::json sets;
    sets["steps"] = steps;
    sets["methods"] = io::json::array();
    std::ostringstream bounds;
    const Index n = cfg.system.state_dim();
    {
        std::vector<std::string> head = {"method", "step"};
        for (Index i = 0; i < n; ++i)
            head.push_back("lower" + std::to_string(i + 1));
        for (Index i = 0; i < n; ++i)
            head.push_back("upper" + std::to_string(i + 1));
        for (Index i = 0; i < n; ++i)
            head.push_back("x" + std::to_string(i + 1));
        head.push_back("contained");
        bounds << join(head) << '\n';
    }
    for (const auto& run : out.runs)
    {
        io::json m;
        m["method"] = update_method_name(run.method);
        m["corrected"] = io::json::array();
        for (std::size_t k = 0; k < run.corrected.size(); ++k)
        {
            io::json s;
            s["step"] = k;
            s["set"] = io::to_json(run.corrected[k]);
            if (!run.m_values.empty())
                s["M"] = run.m_values[k];
            if (!run.stationarity.empty())
                s["stationarity"] = run.stationarity[k];
            m["corrected"].push_back(std::move(s));

            const auto hull = oracle::interval_hull(run.corrected[k]);
            const Vector& x = out.truth.x[k];
            std::vector<std::string> cells = {update_method_name(run.method), std::to_string(k)};
            for (Index i = 0; i < n; ++i)
                cells.push_back(io::format_double(hull->lower(i)));
            for (Index i = 0; i < n; ++i)
                cells.push_back(io::format_double(hull->upper(i)));
            for (Index i = 0; i < n; ++i)
                cells.push_back(io::format_double(x(i)));
            cells.push_back(oracle::membership(run.corrected[k], x) ? "1" : "0");
            bounds << join(cells) << '\n';
        }
        sets["methods"].push_back(std::move(m));
        if (run.method == UpdateMethod::in)
            out.max_stationarity = run.stationarity;
    }
    io::write_json_file(path_in(out_dir, "estimates.json"), sets);
    io::write_text_file(path_in(out_dir, "bounds.csv"), bounds.str());

    if (cfg.estimation.method == Method::all)
    {
        std::ostringstream rep;
        rep << "step,a,b,max_gap,samples,a_in_b,b_in_a\n";
        out.max_gap.assign(static_cast<std::size_t>(steps) + 1, 0.0);
        for (int k = 0; k <= steps; ++k)
            for (std::size_t a = 0; a < out.runs.size(); ++a)
                for (std::size_t b = a + 1; b < out.runs.size(); ++b)
                {
                    const auto r = equivalence_report(out.runs[a].corrected[static_cast<std::size_t>(k)],
                                                      out.runs[b].corrected[static_cast<std::size_t>(k)],
                                                      cfg.estimation.report_directions,
                                                      cfg.estimation.report_tolerance, 20,
                                                      detail::mix_seed(cfg.seed, 0x5000 + static_cast<std::uint64_t>(k)));
                    auto& g = out.max_gap[static_cast<std::size_t>(k)];
                    g = std::max(g, r.max_gap);
                    rep << join({std::to_string(k), update_method_name(out.runs[a].method),
                                 update_method_name(out.runs[b].method), io::format_double(r.max_gap),
                                 std::to_string(r.samples), std::to_string(r.a_in_b), std::to_string(r.b_in_a)})
                        << '\n';
                }
        io::write_text_file(path_in(out_dir, "equivalence.csv"), rep.str());
        log << "largest support gap between methods: "
            << *std::max_element(out.max_gap.begin(), out.max_gap.end()) << '\n';
    }
    for (const auto& run : out.runs)
    {
        int inside = 0;
        for (std::size_t k = 0; k < run.corrected.size(); ++k)
            inside += oracle::membership(run.corrected[k], out.truth.x[k]) ? 1 : 0;
        log << update_method_name(run.method) << ": true state inside " << inside << '/' << run.corrected.size()
            << " corrected sets\n";
    }
    return out;
}

TimingStats timing_stats(UpdateMethod m, const std::vector<double>& seconds)
{
    if (seconds.empty())
        throw std::invalid_argument("timing_stats: no samples");
    TimingStats s;
    s.method = m;
    std::vector<double> sorted = seconds;
    std::sort(sorted.begin(), sorted.end());
    const double count = static_cast<double>(sorted.size());
    s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / count;
    s.median = quantile_sorted(sorted, 0.5);
    double ss = 0.0;
    for (double v : sorted)
        ss += (v - s.mean) * (v - s.mean);
    s.variance = sorted.size() > 1 ? ss / (count - 1.0) : 0.0;
    s.stddev = std::sqrt(s.variance);
    s.min = sorted.front();
    s.max = sorted.back();
    return s;
}

BenchOutput cmd_bench(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log)
{
    if (cfg.bench.repeats < 30)
        throw std::invalid_argument("bench: at least 30 repeats are required");
    if (cfg.system.sensors.empty())
        throw std::invalid_argument("bench: the config has no sensors");
    const auto models = load_or_identify(cfg, out_dir);
    const Episode truth = simulate_truth(cfg, 1);
    const auto stream = measurement_stream(truth, cfg.system.sensors);

    // workload: the measurement update at step 1 of the scenario
    const HybridZonotope first = update_gi(lift_zonotope(cfg.initial_set), stream[0].readings, cfg.system.sensors);
    const std::vector<HybridZonotope> u0 = {lift_zonotope(Zonotope::point(stream[0].u))};
    const HybridZonotope pred =
        time_update(first, models, cfg.system.regions, u0, cfg.system.noise_w, reach_options(cfg), 1).union_set;
    const auto& readings = stream[1].readings;
    const double m = cfg.estimation.m_value > 0 ? cfg.estimation.m_value : default_null_space_extent(pred);

    const std::vector<UpdateMethod> methods = {UpdateMethod::rm, UpdateMethod::in, UpdateMethod::gi};
    double sink = 0.0;
    auto once = [&](UpdateMethod method) {
        const auto t0 = Clock::now();
        HybridZonotope z;
        switch (method)
        {
        case UpdateMethod::rm:
            z = update_rm(pred, readings, cfg.system.sensors, m);
            break;
        case UpdateMethod::in:
            z = update_in(pred, readings, cfg.system.sensors, cfg.estimation.alpha);
            break;
        case UpdateMethod::gi:
            z = update_gi(pred, readings, cfg.system.sensors);
            break;
        }
        const double t = seconds_since(t0);
        sink += z.center().sum();
        return t;
    };

    for (int w = 0; w < cfg.bench.warmup; ++w)
        for (auto method : methods)
            once(method);
    BenchOutput out;
    std::vector<std::vector<double>> per(methods.size());
    for (int r = 0; r < cfg.bench.repeats; ++r)
        for (std::size_t i = 0; i < methods.size(); ++i)
        {
            const double t = once(methods[i]);
            per[i].push_back(t);
            out.records.push_back({methods[i], r, cfg.seed, t});
        }
    if (!std::isfinite(sink))
        throw std::runtime_error("bench: non-finite update result");

    std::ostringstream rows;
    rows << "method,run,seed,seconds\n";
    for (const auto& rec : out.records)
        rows << join({update_method_name(rec.method), std::to_string(rec.run), std::to_string(rec.seed),
                      io::format_double(rec.seconds)})
             << '\n';
    std::ostringstream table;
    table << "method,mean,median,variance,stddev,min,max\n";
    log << "method      mean      median    variance  stddev    min       max\n";
    for (std::size_t i = 0; i < methods.size(); ++i)
    {
        const TimingStats s = timing_stats(methods[i], per[i]);
        out.stats.push_back(s);
        table << join({update_method_name(s.method), io::format_double(s.mean), io::format_double(s.median),
                       io::format_double(s.variance), io::format_double(s.stddev), io::format_double(s.min),
                       io::format_double(s.max)})
              << '\n';
        char line[160];
        std::snprintf(line, sizeof line, "%-6s %9.3e %9.3e %9.3e %9.3e %9.3e %9.3e\n", update_method_name(s.method),
                      s.mean, s.median, s.variance, s.stddev, s.min, s.max);
        log << line;
    }
    io::write_text_file(path_in(out_dir, "bench_timings.csv"), rows.str());
    io::write_text_file(path_in(out_dir, "bench_stats.csv"), table.str());
    return out;
}

int run(const std::string& command, const std::string& config_path, const std::string& out_dir,
        const Overrides& overrides, std::ostream& log, std::ostream& err)
{
    try
    {
        ExperimentConfig cfg = load_config(config_path);
        apply_overrides(cfg, overrides);
        cfg.validate();
        fs::create_directories(out_dir);
        if (command == "simulate")
            cmd_simulate(cfg, out_dir, log);
        else if (command == "identify")
            cmd_identify(cfg, out_dir, log);
        else if (command == "reach")
            cmd_reach(cfg, out_dir, log);
        else if (command == "estimate")
            cmd_estimate(cfg, out_dir, log);
        else if (command == "bench")
            cmd_bench(cfg, out_dir, log);
        else
            throw std::invalid_argument("unknown command '" + command + "'");
        return kExitOk;
    }
    catch (const IdentificationError& e)
    {
        err << "identification failed: " << e.what() << '\n';
        return kExitIdentification;
    }
    catch (const EstimationInfeasibleError& e)
    {
        err << "estimation infeasible at step " << e.step() << ": " << e.what() << '\n';
        return kExitInfeasible;
    }
    catch (const SimulationError& e)
    {
        err << "simulation failed at step " << e.step() << ": " << e.what() << '\n';
        return kExitError;
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
}

} // namespace hzreach::cli
