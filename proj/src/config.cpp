#include "hzreach/config.hpp"

#include <stdexcept>

namespace hzreach
{

using io::json;

Method parse_method(const std::string& s)
{
    if (s == "rm" || s == "RM")
        return Method::rm;
    if (s == "in" || s == "IN")
        return Method::in;
    if (s == "gi" || s == "GI")
        return Method::gi;
    if (s == "all" || s == "ALL")
        return Method::all;
    throw std::invalid_argument("unknown method '" + s + "' (expected rm, in, gi or all)");
}

std::string method_name(Method m)
{
    switch (m)
    {
    case Method::rm:
        return "rm";
    case Method::in:
        return "in";
    case Method::gi:
        return "gi";
    case Method::all:
        return "all";
    }
    return "all";
}

namespace
{

ModelSource parse_model_source(const std::string& s)
{
    if (s == "outputs")
        return ModelSource::outputs;
    if (s == "states")
        return ModelSource::states;
    if (s == "known")
        return ModelSource::known;
    throw std::invalid_argument("unknown model_source '" + s + "' (expected outputs, states or known)");
}

std::string model_source_name(ModelSource m)
{
    switch (m)
    {
    case ModelSource::outputs:
        return "outputs";
    case ModelSource::states:
        return "states";
    case ModelSource::known:
        return "known";
    }
    return "outputs";
}

UnionStrategy parse_union(const std::string& s)
{
    if (s == "selector")
        return UnionStrategy::selector;
    if (s == "fold")
        return UnionStrategy::fold;
    throw std::invalid_argument("unknown union strategy '" + s + "' (expected selector or fold)");
}

Matrix mat(std::initializer_list<std::initializer_list<double>> rows)
{
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
    Index i = 0;
    for (const auto& r : rows)
    {
        Index j = 0;
        for (double v : r)
            m(i, j++) = v;
        ++i;
    }
    return m;
}

Vector vec(std::initializer_list<double> v)
{
    Vector out(static_cast<Index>(v.size()));
    Index i = 0;
    for (double x : v)
        out(i++) = x;
    return out;
}

} // namespace

void ExperimentConfig::validate() const
{
    system.validate();
    const Index n = system.state_dim();
    if (system.regions.empty())
        throw DimensionError("config: at least one region is required");
    if (initial_set.dim() != n)
        throw DimensionError("config: initial set dimension differs from the state dimension");
    if (!system.modes.empty() && input_set.dim() != system.input_dim())
        throw DimensionError("config: input set dimension differs from the mode input matrices");
    if (data.initial_set && data.initial_set->dim() != n)
        throw DimensionError("config: data initial set has the wrong dimension");
    if (estimation.true_initial_state.size() != 0 && estimation.true_initial_state.size() != n)
        throw DimensionError("config: true initial state has the wrong dimension");
    if (data.episodes < 1 || data.length < 1)
        throw std::invalid_argument("config: data episodes and length must be positive");
    if (reach.horizon < 0 || estimation.steps < 1)
        throw std::invalid_argument("config: horizon must be nonnegative and estimation steps positive");
    if (estimation.alpha <= 0.0)
        throw std::invalid_argument("config: alpha must be positive");
    if (reach.polygon_directions < 3)
        throw std::invalid_argument("config: at least three polygon directions are needed");
}

ExperimentConfig config_from_json(const json& j)
{
    ExperimentConfig c;
    c.name = j.value("name", std::string("experiment"));
    if (!j.contains("seed"))
        throw std::invalid_argument("config: a seed is required");
    c.seed = j.at("seed").get<std::uint64_t>();

    const json& sys = j.at("system");
    c.system.noise_w = io::zonotope_from_json(sys.at("noise_w"));
    const Index n = c.system.noise_w.dim();
    if (sys.contains("modes"))
        for (const auto& m : sys.at("modes"))
            c.system.modes.push_back({io::matrix_from_json(m.at("A")), io::matrix_from_json(m.at("B"))});
    for (const auto& r : sys.at("regions"))
        c.system.regions.push_back(io::region_from_json(r, n));
    if (sys.contains("sensors"))
        for (const auto& s : sys.at("sensors"))
            c.system.sensors.push_back({io::matrix_from_json(s.at("C")), io::zonotope_from_json(s.at("noise"))});

    c.initial_set = io::zonotope_from_json(j.at("initial_set"));
    c.input_set = io::zonotope_from_json(j.at("input_set"));

    if (j.contains("data"))
    {
        const json& d = j.at("data");
        c.data.episodes = d.value("episodes", c.data.episodes);
        c.data.length = d.value("length", c.data.length);
        if (d.contains("initial_set"))
            c.data.initial_set = io::zonotope_from_json(d.at("initial_set"));
    }
    if (j.contains("identification"))
        c.identification.a_bound = j.at("identification").value("a_bound", c.identification.a_bound);
    if (j.contains("estimation"))
    {
        const json& e = j.at("estimation");
        c.estimation.method = parse_method(e.value("method", std::string("all")));
        c.estimation.alpha = e.value("alpha", c.estimation.alpha);
        c.estimation.m_value = e.value("M", c.estimation.m_value);
        c.estimation.steps = e.value("steps", c.estimation.steps);
        c.estimation.model_source = parse_model_source(e.value("model_source", std::string("outputs")));
        if (e.contains("true_initial_state"))
            c.estimation.true_initial_state = io::vector_from_json(e.at("true_initial_state"));
        c.estimation.report_directions = e.value("report_directions", c.estimation.report_directions);
        c.estimation.report_tolerance = e.value("report_tolerance", c.estimation.report_tolerance);
    }
    if (j.contains("reach"))
    {
        const json& r = j.at("reach");
        c.reach.horizon = r.value("horizon", c.reach.horizon);
        c.reach.union_strategy = parse_union(r.value("union", std::string("selector")));
        c.reach.hull_relaxation = r.value("hull_relaxation", c.reach.hull_relaxation);
        c.reach.polygon_directions = r.value("polygon_directions", c.reach.polygon_directions);
    }
    if (j.contains("bench"))
    {
        c.bench.repeats = j.at("bench").value("repeats", c.bench.repeats);
        c.bench.warmup = j.at("bench").value("warmup", c.bench.warmup);
    }
    c.validate();
    return c;
}

json config_to_json(const ExperimentConfig& c)
{
    json sys;
    json modes = json::array();
    for (const auto& m : c.system.modes)
        modes.push_back({{"A", io::to_json(m.a)}, {"B", io::to_json(m.b)}});
    json regions = json::array();
    for (const auto& r : c.system.regions)
        regions.push_back(io::to_json(r));
    json sensors = json::array();
    for (const auto& s : c.system.sensors)
        sensors.push_back({{"C", io::to_json(s.c)}, {"noise", io::to_json(s.noise)}});
    sys["modes"] = std::move(modes);
    sys["regions"] = std::move(regions);
    sys["noise_w"] = io::to_json(c.system.noise_w);
    sys["sensors"] = std::move(sensors);

    json data{{"episodes", c.data.episodes}, {"length", c.data.length}};
    if (c.data.initial_set)
        data["initial_set"] = io::to_json(*c.data.initial_set);

    json est{{"method", method_name(c.estimation.method)},
             {"alpha", c.estimation.alpha},
             {"M", c.estimation.m_value},
             {"steps", c.estimation.steps},
             {"model_source", model_source_name(c.estimation.model_source)},
             {"report_directions", c.estimation.report_directions},
             {"report_tolerance", c.estimation.report_tolerance}};
    if (c.estimation.true_initial_state.size() > 0)
        est["true_initial_state"] = io::to_json(c.estimation.true_initial_state);

    return json{{"name", c.name},
                {"seed", c.seed},
                {"system", std::move(sys)},
                {"initial_set", io::to_json(c.initial_set)},
                {"input_set", io::to_json(c.input_set)},
                {"data", std::move(data)},
                {"identification", {{"a_bound", c.identification.a_bound}}},
                {"estimation", std::move(est)},
                {"reach",
                 {{"horizon", c.reach.horizon},
                  {"union", c.reach.union_strategy == UnionStrategy::fold ? "fold" : "selector"},
                  {"hull_relaxation", c.reach.hull_relaxation},
                  {"polygon_directions", c.reach.polygon_directions}}},
                {"bench", {{"repeats", c.bench.repeats}, {"warmup", c.bench.warmup}}}};
}

ExperimentConfig load_config(const std::string& path) { return config_from_json(io::read_json_file(path)); }

ExperimentConfig benchmark_config()
{
    ExperimentConfig c;
    c.name = "pwa_benchmark";
    c.seed = 1;
    c.system.modes = {{mat({{0.75, 0.25}, {-0.25, 0.75}}), mat({{-0.25}, {-0.25}})},
                      {mat({{0.75, -0.25}, {0.25, 0.75}}), mat({{0.25}, {-0.25}})}};
    // closed halfplanes on both sides of the guard x1 = 0; ties resolve to the first mode
    c.system.regions = {PolyhedralRegion(mat({{1.0, 0.0}}), vec({0.0})),
                        PolyhedralRegion(mat({{-1.0, 0.0}}), vec({0.0}))};
    c.system.noise_w = Zonotope(Vector::Zero(2), 0.01 * Matrix::Identity(2, 2));
    c.initial_set = Zonotope(vec({-1.51, 2.55}), mat({{0.25, -0.19}, {0.19, 0.25}}));
    c.input_set = Zonotope(vec({0.0}), mat({{1.0}}));
    c.data.episodes = 2;
    c.data.length = 25;
    c.reach.horizon = 5;
    c.estimation.model_source = ModelSource::states;
    return c;
}

ExperimentConfig estimation_config()
{
    ExperimentConfig c;
    c.name = "three_sensor_estimation";
    c.seed = 7;
    c.system.modes = {{mat({{0.9455, -0.2426}, {0.2486, 0.9455}}), mat({{0.1}, {0.0}})}};
    c.system.regions = {PolyhedralRegion::whole_space(2)};
    c.system.noise_w = Zonotope(Vector::Zero(2), 0.02 * Matrix::Identity(2, 2));
    c.system.sensors = {{mat({{1.0, 0.4}}), Zonotope(vec({0.0}), mat({{0.02}}))},
                        {mat({{0.9, -1.2}}), Zonotope(vec({0.0}), mat({{0.02}}))},
                        {mat({{-0.8, 0.2}, {0.0, 0.7}}), Zonotope(Vector::Zero(2), 0.02 * Matrix::Identity(2, 2))}};
    c.initial_set = Zonotope(Vector::Zero(2), 15.0 * Matrix::Identity(2, 2));
    c.input_set = Zonotope(vec({0.0}), mat({{1.0}}));
    c.data.episodes = 2;
    c.data.length = 25;
    c.identification.a_bound = 1.2;
    c.estimation.method = Method::all;
    c.estimation.alpha = 1.0;
    c.estimation.steps = 20;
    c.estimation.true_initial_state = vec({-10.0, 10.0});
    c.reach.horizon = 5;
    return c;
}

} // namespace hzreach
