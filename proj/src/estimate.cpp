#include "hzreach/estimate.hpp"

#include "hzreach/matrix_utils.hpp"
#include "hzreach/parallel.hpp"
#include "hzreach/setops.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace hzreach
{
namespace
{

struct StackedReadings
{
    Matrix c;      // sum p_j x n
    Matrix gv;     // block diagonal noise generators
    Vector cv;     // stacked noise centers
    Vector y;      // stacked readings
};

const Sensor& sensor_for(const SensorReading& r, const std::vector<Sensor>& sensors)
{
    if (r.sensor < 0 || static_cast<std::size_t>(r.sensor) >= sensors.size())
        throw DimensionError("reading refers to unknown sensor " + std::to_string(r.sensor));
    const Sensor& s = sensors[static_cast<std::size_t>(r.sensor)];
    if (r.y.size() != s.c.rows())
        throw DimensionError("reading of sensor " + std::to_string(r.sensor) + " has the wrong dimension");
    return s;
}

StackedReadings stack(const std::vector<SensorReading>& readings, const std::vector<Sensor>& sensors, Index n)
{
    Index p = 0, g = 0;
    for (const auto& r : readings)
    {
        const Sensor& s = sensor_for(r, sensors);
        if (s.c.cols() != n)
            throw DimensionError("sensor matrix does not match the state dimension");
        p += s.c.rows();
        g += s.noise.num_generators();
    }
    StackedReadings out;
    out.c.resize(p, n);
    out.gv = Matrix::Zero(p, g);
    out.cv.resize(p);
    out.y.resize(p);
    Index row = 0, col = 0;
    for (const auto& r : readings)
    {
        const Sensor& s = sensors[static_cast<std::size_t>(r.sensor)];
        const Index pj = s.c.rows(), gj = s.noise.num_generators();
        out.c.middleRows(row, pj) = s.c;
        out.gv.block(row, col, pj, gj) = s.noise.generators();
        out.cv.segment(row, pj) = s.noise.center();
        out.y.segment(row, pj) = r.y;
        row += pj;
        col += gj;
    }
    return out;
}

bool has_nan(const Vector& v) { return v.hasNaN(); }

} // namespace

const char* update_method_name(UpdateMethod m)
{
    switch (m)
    {
    case UpdateMethod::rm:
        return "rm";
    case UpdateMethod::in:
        return "in";
    case UpdateMethod::gi:
        return "gi";
    }
    return "gi";
}

MeasurementZonotope reverse_map_zonotope(const Sensor& sensor, const Vector& y, double m)
{
    if (!(m > 0.0))
        throw std::invalid_argument("reverse_map_zonotope: M must be positive");
    const Matrix& c = sensor.c;
    const Index p = c.rows(), n = c.cols();
    if (y.size() != p || sensor.noise.dim() != p)
        throw DimensionError("reverse_map_zonotope: reading or noise dimension differs from the sensor");
    Eigen::JacobiSVD<Matrix> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    if (p > n || sv.size() < p || !(sv(p - 1) > 1e-8 * sv(0)))
        throw RankError("reverse_map_zonotope: sensor matrix lacks full row rank");
    const Matrix p1 = svd.matrixU();
    const Matrix v1 = svd.matrixV().leftCols(p);
    const Matrix v2 = svd.matrixV().rightCols(n - p);
    const Matrix back = v1 * svd.singularValues().cwiseInverse().asDiagonal() * p1.transpose();

    MeasurementZonotope out;
    out.center = back * (y - sensor.noise.center());
    const Matrix mapped = back * sensor.noise.generators();
    const Matrix null_box = m * v2;
    out.generators = detail::hstack(n, {&mapped, &null_box});
    return out;
}

double default_null_space_extent(const HybridZonotope& pred, const oracle::Options& opt)
{
    const auto hull = oracle::interval_hull(pred, opt);
    if (!hull)
        throw EmptySetError("null-space extent: predicted set is empty");
    return 2.0 * (hull->magnitude().size() ? hull->magnitude().maxCoeff() : 0.0) + 1.0;
}

HybridZonotope update_rm(const HybridZonotope& pred, const std::vector<SensorReading>& readings,
                         const std::vector<Sensor>& sensors, double m)
{
    const Index n = pred.dim();
    std::vector<MeasurementZonotope> zs;
    zs.reserve(readings.size());
    Index extra = 0;
    for (const auto& r : readings)
    {
        const Sensor& s = sensor_for(r, sensors);
        if (s.c.cols() != n)
            throw DimensionError("update_rm: sensor matrix does not match the state dimension");
        zs.push_back(reverse_map_zonotope(s, r.y, m));
        extra += zs.back().generators.cols();
    }

    // all intersections with the identity map at once: one coupling block per reading
    const Index g = pred.num_continuous(), q = pred.num_binary(), c = pred.num_constraints();
    const Index rows = c + n * static_cast<Index>(zs.size());
    Matrix gc = Matrix::Zero(n, g + extra);
    gc.leftCols(g) = pred.gc();
    Matrix ac = Matrix::Zero(rows, g + extra);
    ac.topLeftCorner(c, g) = pred.ac();
    Matrix ab(rows, q);
    ab.topRows(c) = pred.ab();
    Vector b(rows);
    b.head(c) = pred.b();
    Index row = c, col = g;
    for (const auto& z : zs)
    {
        ac.block(row, 0, n, g) = pred.gc();
        ac.block(row, col, n, z.generators.cols()) = -z.generators;
        ab.middleRows(row, n) = pred.gb();
        b.segment(row, n) = z.center - pred.center();
        row += n;
        col += z.generators.cols();
    }
    return HybridZonotope(std::move(gc), pred.gb(), pred.center(), std::move(ac), std::move(ab), std::move(b));
}

HybridZonotope update_in_with_weights(const HybridZonotope& pred, const std::vector<SensorReading>& readings,
                                      const std::vector<Sensor>& sensors, const Matrix& lambda)
{
    const Index n = pred.dim();
    const StackedReadings st = stack(readings, sensors, n);
    if (lambda.rows() != n || lambda.cols() != st.c.rows())
        throw DimensionError("update_in: weight matrix has the wrong shape");
    const Matrix keep = Matrix::Identity(n, n) - lambda * st.c;
    const Matrix kept = keep * pred.gc();
    const Matrix noise = -lambda * st.gv;
    const Matrix zero = Matrix::Zero(pred.num_constraints(), st.gv.cols());
    Matrix gc = detail::hstack(n, {&kept, &noise});
    Matrix ac = detail::hstack(pred.num_constraints(), {&pred.ac(), &zero});
    Vector c = pred.center() + lambda * (st.y - st.c * pred.center() - st.cv);
    return HybridZonotope(std::move(gc), keep * pred.gb(), std::move(c), std::move(ac), pred.ab(), pred.b());
}

Matrix implicit_gradient(const HybridZonotope& pred, const std::vector<SensorReading>& readings,
                         const std::vector<Sensor>& sensors, double alpha, const Matrix& lambda)
{
    const Index n = pred.dim();
    const StackedReadings st = stack(readings, sensors, n);
    const Matrix p = pred.gc() * pred.gc().transpose() + alpha * pred.gb() * pred.gb().transpose();
    const Matrix v = st.gv * st.gv.transpose();
    return -2.0 * (Matrix::Identity(n, n) - lambda * st.c) * p * st.c.transpose() + 2.0 * lambda * v;
}

ImplicitUpdate update_in_detail(const HybridZonotope& pred, const std::vector<SensorReading>& readings,
                                const std::vector<Sensor>& sensors, double alpha)
{
    if (!(alpha > 0.0))
        throw std::invalid_argument("update_in: alpha must be positive");
    const Index n = pred.dim();
    const StackedReadings st = stack(readings, sensors, n);
    const Matrix p = pred.gc() * pred.gc().transpose() + alpha * pred.gb() * pred.gb().transpose();
    const Matrix v = st.gv * st.gv.transpose();
    const Matrix normal = st.c * p * st.c.transpose() + v;

    ImplicitUpdate out;
    const Matrix target = p * st.c.transpose();
    const Matrix inv = detail::pinv(normal, 1e-12);
    out.lambda = target * inv;
    // the gradient is -2 (P C' - L (C P C' + V)); refine against it to remove roundoff
    for (int it = 0; it < 3; ++it)
        out.lambda += (target - out.lambda * normal) * inv;
    const Vector sv = detail::singular_values(normal);
    out.condition = sv.size() == 0 ? 1.0
                    : sv.minCoeff() > 0.0 ? sv.maxCoeff() / sv.minCoeff()
                                          : std::numeric_limits<double>::infinity();
    const Matrix grad = -2.0 * (Matrix::Identity(n, n) - out.lambda * st.c) * p * st.c.transpose() +
                        2.0 * out.lambda * v;
    out.stationarity = grad.size() ? grad.cwiseAbs().maxCoeff() : 0.0;
    out.set = update_in_with_weights(pred, readings, sensors, out.lambda);
    return out;
}

HybridZonotope update_in(const HybridZonotope& pred, const std::vector<SensorReading>& readings,
                         const std::vector<Sensor>& sensors, double alpha)
{
    return update_in_detail(pred, readings, sensors, alpha).set;
}

HybridZonotope update_gi(const HybridZonotope& pred, const std::vector<SensorReading>& readings,
                         const std::vector<Sensor>& sensors)
{
    HybridZonotope out = pred;
    for (const auto& r : readings)
    {
        const Sensor& s = sensor_for(r, sensors);
        if (s.c.cols() != pred.dim())
            throw DimensionError("update_gi: sensor matrix does not match the state dimension");
        // y - v = < y - c_v, -G_v >
        const Zonotope slab(r.y - s.noise.center(), -s.noise.generators());
        out = generalized_intersection(out, s.c, lift_zonotope(slab));
    }
    return out;
}

ReachFamily time_update(const HybridZonotope& prev, const std::vector<MatrixZonotope>& models_y,
                        const std::vector<PolyhedralRegion>& regions, const std::vector<HybridZonotope>& input_sets,
                        const Zonotope& noise, const ReachOptions& opt, int step)
{
    return reach_step(make_family(step, prev, regions, opt.oracle), models_y, regions, input_sets, noise, opt);
}

std::vector<EstimationRun> estimate_online(const HybridZonotope& x0, const std::vector<MeasurementStep>& stream,
                                           const std::vector<MatrixZonotope>& models_y,
                                           const std::vector<PolyhedralRegion>& regions,
                                           const std::vector<Sensor>& sensors,
                                           const std::vector<HybridZonotope>& input_sets, const Zonotope& noise,
                                           const std::vector<UpdateMethod>& methods, int steps,
                                           const EstimationOptions& opt)
{
    if (steps < 0)
        throw std::invalid_argument("estimate_online: negative step count");
    if (static_cast<int>(stream.size()) < steps + 1)
        throw std::invalid_argument("estimate_online: measurement stream shorter than the horizon");
    for (int k = 0; k <= steps; ++k)
        if (stream[static_cast<std::size_t>(k)].step != k)
            throw std::invalid_argument("estimate_online: measurement stream must list steps 0, 1, ... in order");

    std::vector<EstimationRun> runs(methods.size());
    detail::parallel_for(static_cast<long>(methods.size()), [&](long mi) {
        EstimationRun& run = runs[static_cast<std::size_t>(mi)];
        run.method = methods[static_cast<std::size_t>(mi)];
        auto correct = [&](const HybridZonotope& pred, int k) {
            const auto& readings = stream[static_cast<std::size_t>(k)].readings;
            HybridZonotope out;
            switch (run.method)
            {
            case UpdateMethod::rm:
            {
                const double m = opt.m_value > 0.0 ? opt.m_value : default_null_space_extent(pred, opt.reach.oracle);
                run.m_values.push_back(m);
                out = update_rm(pred, readings, sensors, m);
                break;
            }
            case UpdateMethod::in:
            {
                ImplicitUpdate u = update_in_detail(pred, readings, sensors, opt.alpha);
                run.stationarity.push_back(u.stationarity);
                out = std::move(u.set);
                break;
            }
            case UpdateMethod::gi:
                out = update_gi(pred, readings, sensors);
                break;
            }
            if (oracle::is_empty(out, opt.reach.oracle))
                throw EstimationInfeasibleError(k, std::string(update_method_name(run.method)) +
                                                       ": corrected set is empty at step " + std::to_string(k));
            return out;
        };

        run.corrected.push_back(correct(x0, 0));
        for (int k = 1; k <= steps; ++k)
        {
            const Vector& u = stream[static_cast<std::size_t>(k) - 1].u;
            std::vector<HybridZonotope> inputs = input_sets;
            if (u.size() > 0 && !has_nan(u))
                inputs = {lift_zonotope(Zonotope::point(u))};
            const ReachFamily pred =
                time_update(run.corrected.back(), models_y, regions, inputs, noise, opt.reach, k - 1);
            run.corrected.push_back(correct(pred.union_set, k));
        }
    });
    return runs;
}

EquivalenceReport equivalence_report(const HybridZonotope& a, const HybridZonotope& b, int directions, double tol,
                                     int samples, std::uint64_t seed, const oracle::Options& opt)
{
    if (a.dim() != b.dim())
        throw DimensionError("equivalence_report: dimension mismatch");
    const Matrix dirs = oracle::spread_directions(a.dim(), directions);
    const auto ha = oracle::support_batch(a, dirs, opt);
    const auto hb = oracle::support_batch(b, dirs, opt);
    EquivalenceReport r;
    for (std::size_t i = 0; i < ha.size(); ++i)
    {
        if (!std::isfinite(ha[i]) || !std::isfinite(hb[i]))
            throw EmptySetError("equivalence_report: empty set");
        r.max_gap = std::max(r.max_gap, std::abs(ha[i] - hb[i]));
    }
    r.samples = samples;
    const double mtol = std::max(tol, 1e-7);
    auto contained = [&](const HybridZonotope& from, const HybridZonotope& into, std::uint64_t s) {
        const auto pts = oracle::sample(from, samples, s, opt);
        Matrix m(from.dim(), static_cast<Index>(pts.size()));
        for (std::size_t i = 0; i < pts.size(); ++i)
            m.col(static_cast<Index>(i)) = pts[i];
        const auto in = oracle::membership_batch(into, m, mtol, opt);
        return static_cast<int>(std::count(in.begin(), in.end(), 1));
    };
    if (samples > 0)
    {
        r.a_in_b = contained(a, b, detail::mix_seed(seed, 0));
        r.b_in_a = contained(b, a, detail::mix_seed(seed, 1));
    }
    return r;
}

} // namespace hzreach
