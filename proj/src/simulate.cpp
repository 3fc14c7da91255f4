#include "hzreach/simulate.hpp"

#include "hzreach/ident.hpp"
#include "hzreach/io.hpp"
#include "hzreach/parallel.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace hzreach
{

namespace
{

// seed streams of one experiment
constexpr std::uint64_t kInitialStream = 0x1000;
constexpr std::uint64_t kEpisodeStream = 0x2000;
constexpr std::uint64_t kTruthStream = 0x3000;

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, sep))
        out.push_back(cell);
    if (!line.empty() && line.back() == sep)
        out.emplace_back();
    return out;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& cell, int line)
{
    const std::string s = trim(cell);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::runtime_error("line " + std::to_string(line) + ": cannot parse number '" + s + "'");
    return v;
}

// indices of columns named prefix1, prefix2, ... in order
std::vector<std::size_t> numbered_columns(const std::vector<std::string>& header, const std::string& prefix)
{
    std::map<int, std::size_t> found;
    for (std::size_t i = 0; i < header.size(); ++i)
    {
        const std::string h = trim(header[i]);
        if (h.size() <= prefix.size() || h.compare(0, prefix.size(), prefix) != 0)
            continue;
        int idx = 0;
        const auto res = std::from_chars(h.data() + prefix.size(), h.data() + h.size(), idx);
        if (res.ec == std::errc() && res.ptr == h.data() + h.size())
            found[idx] = i;
    }
    std::vector<std::size_t> out;
    for (int k = 1; found.count(k); ++k)
        out.push_back(found[k]);
    return out;
}

int find_column(const std::vector<std::string>& header, const std::string& name)
{
    for (std::size_t i = 0; i < header.size(); ++i)
        if (trim(header[i]) == name)
            return static_cast<int>(i);
    return -1;
}

void append_row(std::string& out, const std::vector<std::string>& cells)
{
    for (std::size_t i = 0; i < cells.size(); ++i)
    {
        if (i)
            out += ',';
        out += cells[i];
    }
    out += '\n';
}

void append_vector(std::vector<std::string>& cells, const Vector& v)
{
    for (Index i = 0; i < v.size(); ++i)
        cells.push_back(io::format_double(v(i)));
}

Vector read_vector(const std::vector<std::string>& cells, const std::vector<std::size_t>& cols, int line)
{
    Vector v(static_cast<Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i)
    {
        if (cols[i] >= cells.size())
            throw std::runtime_error("line " + std::to_string(line) + ": too few columns");
        v(static_cast<Index>(i)) = parse_double(cells[cols[i]], line);
    }
    return v;
}

Vector stacked_output(const std::vector<Sensor>& sensors, const Vector& x, std::mt19937_64& rng)
{
    if (sensors.empty())
        return Vector(0);
    Index p = 0;
    for (const auto& s : sensors)
        p += s.c.rows();
    Vector y(p);
    Index row = 0;
    for (const auto& s : sensors)
    {
        y.segment(row, s.c.rows()) = s.c * x + draw_from_factor_box(s.noise, rng);
        row += s.c.rows();
    }
    return y;
}

} // namespace

Vector draw_from_factor_box(const Zonotope& z, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Vector xi(z.num_generators());
    for (Index i = 0; i < xi.size(); ++i)
        xi(i) = unit(rng);
    return z.center() + z.generators() * xi;
}

Episode simulate_episode(const PwaSystemSpec& spec, const Zonotope& input_set, const Vector& x0, int length,
                         std::uint64_t seed)
{
    if (spec.modes.empty())
        throw std::invalid_argument("simulation needs the mode dynamics");
    if (x0.size() != spec.state_dim())
        throw DimensionError("simulation: initial state has the wrong dimension");
    std::mt19937_64 rng(seed);
    Episode e;
    Vector x = x0;
    for (int k = 0;; ++k)
    {
        const int mode = spec.region_of(x);
        if (mode < 0)
            throw SimulationError(k, "state left every region at step " + std::to_string(k));
        e.x.push_back(x);
        e.mode.push_back(mode);
        e.y.push_back(stacked_output(spec.sensors, x, rng));
        if (k == length)
            break;
        const Vector u = draw_from_factor_box(input_set, rng);
        const Vector w = draw_from_factor_box(spec.noise_w, rng);
        const auto& m = spec.modes[static_cast<std::size_t>(mode)];
        x = m.a * x + m.b * u + w;
        e.u.push_back(u);
    }
    if (spec.sensors.empty())
        e.y.clear();
    return e;
}

std::vector<Episode> simulate_data(const ExperimentConfig& cfg)
{
    const Zonotope& start = cfg.data.initial_set ? *cfg.data.initial_set : cfg.initial_set;
    std::vector<Episode> out;
    for (int i = 0; i < cfg.data.episodes; ++i)
    {
        std::mt19937_64 rng(detail::mix_seed(cfg.seed, kInitialStream + static_cast<std::uint64_t>(i)));
        const Vector x0 = draw_from_factor_box(start, rng);
        out.push_back(simulate_episode(cfg.system, cfg.input_set, x0, cfg.data.length,
                                       detail::mix_seed(cfg.seed, kEpisodeStream + static_cast<std::uint64_t>(i))));
    }
    return out;
}

Episode simulate_truth(const ExperimentConfig& cfg, int steps)
{
    Vector x0 = cfg.estimation.true_initial_state;
    if (x0.size() == 0)
    {
        std::mt19937_64 rng(detail::mix_seed(cfg.seed, kTruthStream + 1));
        x0 = draw_from_factor_box(cfg.initial_set, rng);
    }
    return simulate_episode(cfg.system, cfg.input_set, x0, steps, detail::mix_seed(cfg.seed, kTruthStream));
}

std::vector<Transition> transitions(const std::vector<Episode>& episodes)
{
    std::vector<Transition> out;
    for (const auto& e : episodes)
        for (int k = 0; k < e.length(); ++k)
        {
            Transition t;
            t.x = e.x[static_cast<std::size_t>(k)];
            t.u = e.u[static_cast<std::size_t>(k)];
            t.x_next = e.x[static_cast<std::size_t>(k) + 1];
            if (!e.y.empty())
            {
                t.y = e.y[static_cast<std::size_t>(k)];
                t.y_next = e.y[static_cast<std::size_t>(k) + 1];
            }
            out.push_back(std::move(t));
        }
    return out;
}

std::string trajectory_csv(const std::vector<Episode>& episodes)
{
    if (episodes.empty())
        return {};
    const Episode& first = episodes.front();
    const Index n = first.x.front().size();
    const Index m = first.u.empty() ? 0 : first.u.front().size();
    const Index p = first.y.empty() ? 0 : first.y.front().size();
    std::vector<std::string> header{"k"};
    for (Index i = 1; i <= n; ++i)
        header.push_back("x" + std::to_string(i));
    for (Index i = 1; i <= m; ++i)
        header.push_back("u" + std::to_string(i));
    for (Index i = 1; i <= p; ++i)
        header.push_back("y" + std::to_string(i));
    header.emplace_back("mode");
    std::string out;
    append_row(out, header);
    for (std::size_t ei = 0; ei < episodes.size(); ++ei)
    {
        const Episode& e = episodes[ei];
        if (ei)
            out += '\n';
        for (std::size_t k = 0; k < e.x.size(); ++k)
        {
            std::vector<std::string> cells{std::to_string(k)};
            append_vector(cells, e.x[k]);
            if (k < e.u.size())
                append_vector(cells, e.u[k]);
            else
                cells.insert(cells.end(), static_cast<std::size_t>(m), "nan");
            if (p > 0)
                append_vector(cells, e.y[k]);
            cells.push_back(std::to_string(e.mode[k]));
            append_row(out, cells);
        }
    }
    return out;
}

std::vector<Episode> parse_trajectory_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    std::vector<std::string> header;
    while (header.empty() && std::getline(in, line))
    {
        ++line_no;
        if (!trim(line).empty())
            header = split(line, ',');
    }
    if (header.empty())
        throw std::runtime_error("trajectory file has no header");
    const auto xs = numbered_columns(header, "x");
    const auto us = numbered_columns(header, "u");
    const auto ys = numbered_columns(header, "y");
    const int mode_col = find_column(header, "mode");
    if (xs.empty())
        throw std::runtime_error("trajectory header has no x1 column");

    std::vector<Episode> out;
    Episode cur;
    auto flush = [&] {
        if (!cur.x.empty())
        {
            // the last row carries no input
            if (cur.u.size() == cur.x.size())
                cur.u.pop_back();
            out.push_back(std::move(cur));
        }
        cur = Episode{};
    };
    while (std::getline(in, line))
    {
        ++line_no;
        if (trim(line).empty())
        {
            flush();
            continue;
        }
        const auto cells = split(line, ',');
        cur.x.push_back(read_vector(cells, xs, line_no));
        if (!us.empty())
        {
            const Vector u = read_vector(cells, us, line_no);
            if (!u.hasNaN())
            {
                if (cur.u.size() + 1 != cur.x.size())
                    throw std::runtime_error("line " + std::to_string(line_no) + ": input after a missing input");
                cur.u.push_back(u);
            }
        }
        else
            cur.u.push_back(Vector(0));
        if (!ys.empty())
            cur.y.push_back(read_vector(cells, ys, line_no));
        cur.mode.push_back(mode_col >= 0 && static_cast<std::size_t>(mode_col) < cells.size()
                               ? static_cast<int>(parse_double(cells[static_cast<std::size_t>(mode_col)], line_no))
                               : -1);
    }
    flush();
    for (const auto& e : out)
        if (e.u.size() + 1 != e.x.size())
            throw std::runtime_error("trajectory episode has missing inputs");
    return out;
}

std::vector<MeasurementStep> measurement_stream(const Episode& e, const std::vector<Sensor>& sensors)
{
    std::vector<MeasurementStep> out;
    const Index m = e.u.empty() ? 0 : e.u.front().size();
    for (std::size_t k = 0; k < e.x.size(); ++k)
    {
        MeasurementStep s;
        s.step = static_cast<int>(k);
        s.u = k < e.u.size() ? e.u[k] : Vector::Constant(m, std::numeric_limits<double>::quiet_NaN());
        Index row = 0;
        for (std::size_t j = 0; j < sensors.size(); ++j)
        {
            const Index p = sensors[j].c.rows();
            s.readings.push_back({static_cast<int>(j), s.step, e.y[k].segment(row, p)});
            row += p;
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::string measurements_csv(const std::vector<MeasurementStep>& stream, Index input_dim, Index max_output_dim)
{
    std::vector<std::string> header{"k"};
    for (Index i = 1; i <= input_dim; ++i)
        header.push_back("u" + std::to_string(i));
    header.emplace_back("j");
    for (Index i = 1; i <= max_output_dim; ++i)
        header.push_back("y" + std::to_string(i));
    std::string out;
    append_row(out, header);
    for (const auto& s : stream)
        for (const auto& r : s.readings)
        {
            std::vector<std::string> cells{std::to_string(s.step)};
            for (Index i = 0; i < input_dim; ++i)
                cells.push_back(std::isnan(s.u(i)) ? "nan" : io::format_double(s.u(i)));
            cells.push_back(std::to_string(r.sensor));
            append_vector(cells, r.y);
            cells.resize(cells.size() + static_cast<std::size_t>(max_output_dim - r.y.size()));
            append_row(out, cells);
        }
    return out;
}

std::vector<MeasurementStep> parse_measurements_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    std::vector<std::string> header;
    while (header.empty() && std::getline(in, line))
    {
        ++line_no;
        if (!trim(line).empty())
            header = split(line, ',');
    }
    const int k_col = find_column(header, "k");
    const int j_col = find_column(header, "j");
    if (k_col < 0 || j_col < 0)
        throw std::runtime_error("measurement header needs k and j columns");
    const auto us = numbered_columns(header, "u");
    const auto ys = numbered_columns(header, "y");

    std::vector<MeasurementStep> out;
    while (std::getline(in, line))
    {
        ++line_no;
        if (trim(line).empty())
            continue;
        const auto cells = split(line, ',');
        const int k = static_cast<int>(parse_double(cells.at(static_cast<std::size_t>(k_col)), line_no));
        const int j = static_cast<int>(parse_double(cells.at(static_cast<std::size_t>(j_col)), line_no));
        if (out.empty() || out.back().step != k)
        {
            if (!out.empty() && k < out.back().step)
                throw std::runtime_error("line " + std::to_string(line_no) + ": steps must be nondecreasing");
            MeasurementStep s;
            s.step = k;
            s.u = read_vector(cells, us, line_no);
            out.push_back(std::move(s));
        }
        std::vector<double> y;
        for (std::size_t c : ys)
        {
            if (c >= cells.size() || trim(cells[c]).empty())
                break;
            y.push_back(parse_double(cells[c], line_no));
        }
        out.back().readings.push_back({j, k, Eigen::Map<const Vector>(y.data(), static_cast<Index>(y.size()))});
    }
    return out;
}

std::string truth_csv(const Episode& e)
{
    const Index n = e.x.empty() ? 0 : e.x.front().size();
    std::vector<std::string> header{"k"};
    for (Index i = 1; i <= n; ++i)
        header.push_back("x" + std::to_string(i));
    header.emplace_back("mode");
    std::string out;
    append_row(out, header);
    for (std::size_t k = 0; k < e.x.size(); ++k)
    {
        std::vector<std::string> cells{std::to_string(k)};
        append_vector(cells, e.x[k]);
        cells.push_back(std::to_string(e.mode[k]));
        append_row(out, cells);
    }
    return out;
}

std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace hzreach
