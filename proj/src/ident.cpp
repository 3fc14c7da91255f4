#include "hzreach/ident.hpp"

#include "hzreach/matrix_utils.hpp"
#include "hzreach/parallel.hpp"

#include <string>

namespace hzreach
{

int PwaSystemSpec::region_of(const Vector& x, double tol) const
{
    for (std::size_t i = 0; i < regions.size(); ++i)
        if (regions[i].contains(x, tol))
            return static_cast<int>(i);
    return -1;
}

void PwaSystemSpec::validate() const
{
    const Index n = state_dim();
    if (n == 0)
        throw DimensionError("system: process noise zonotope fixes the state dimension and must be nonempty");
    if (!modes.empty() && modes.size() != regions.size())
        throw DimensionError("system: mode count differs from region count");
    for (const auto& r : regions)
        if (r.dim() != n)
            throw DimensionError("system: region dimension differs from the state dimension");
    for (const auto& m : modes)
        if (m.a.rows() != n || m.a.cols() != n || m.b.rows() != n || m.b.cols() != input_dim())
            throw DimensionError("system: mode matrices have inconsistent shapes");
    for (const auto& s : sensors)
        if (s.c.cols() != n || s.noise.dim() != s.c.rows())
            throw DimensionError("system: sensor matrix or noise has inconsistent shape");
}

Matrix stacked_output_matrix(const std::vector<Sensor>& sensors)
{
    if (sensors.empty())
        throw DimensionError("stacked_output_matrix: no sensors");
    Index rows = 0;
    for (const auto& s : sensors)
        rows += s.c.rows();
    Matrix c(rows, sensors.front().c.cols());
    Index r = 0;
    for (const auto& s : sensors)
    {
        if (s.c.cols() != c.cols())
            throw DimensionError("stacked_output_matrix: sensors observe different state dimensions");
        c.middleRows(r, s.c.rows()) = s.c;
        r += s.c.rows();
    }
    return c;
}

Matrix stacked_noise_generators(const std::vector<Sensor>& sensors)
{
    std::vector<Matrix> blocks;
    for (const auto& s : sensors)
        blocks.push_back(s.noise.generators());
    return detail::blkdiag(blocks);
}

Vector stacked_noise_center(const std::vector<Sensor>& sensors)
{
    Index rows = 0;
    for (const auto& s : sensors)
        rows += s.noise.dim();
    Vector c(rows);
    Index r = 0;
    for (const auto& s : sensors)
    {
        c.segment(r, s.noise.dim()) = s.noise.center();
        r += s.noise.dim();
    }
    return c;
}

std::vector<ModeDataset> partition_trajectories(const std::vector<Transition>& raw,
                                                const std::vector<PolyhedralRegion>& regions, double tol)
{
    if (raw.empty())
        throw IdentificationError("partition_trajectories: no transitions");
    const Index n = raw.front().x.size();
    const Index m = raw.front().u.size();
    const Index p = raw.front().y.size();
    std::vector<std::vector<std::size_t>> members(regions.size());
    for (std::size_t t = 0; t < raw.size(); ++t)
    {
        const auto& tr = raw[t];
        if (tr.x.size() != n || tr.u.size() != m || tr.x_next.size() != n || tr.y.size() != p ||
            tr.y_next.size() != p)
            throw DimensionError("partition_trajectories: transitions have inconsistent dimensions");
        int region = -1;
        for (std::size_t i = 0; i < regions.size() && region < 0; ++i)
            if (regions[i].contains(tr.x, tol))
                region = static_cast<int>(i);
        if (region < 0)
            throw IdentificationError("partition_trajectories: transition " + std::to_string(t) +
                                      " starts outside every region");
        members[static_cast<std::size_t>(region)].push_back(t);
    }

    std::vector<ModeDataset> out;
    for (std::size_t i = 0; i < regions.size(); ++i)
    {
        const auto& idx = members[i];
        if (idx.empty())
            throw IdentificationError("partition_trajectories: mode " + std::to_string(i + 1) + " has no data");
        const Index count = static_cast<Index>(idx.size());
        ModeDataset d;
        d.mode_index = static_cast<int>(i);
        d.x_plus.resize(n, count);
        d.x_minus.resize(n, count);
        d.u_minus.resize(m, count);
        d.y_plus.resize(p, count);
        d.y_minus.resize(p, count);
        for (Index k = 0; k < count; ++k)
        {
            const auto& tr = raw[idx[static_cast<std::size_t>(k)]];
            d.x_minus.col(k) = tr.x;
            d.x_plus.col(k) = tr.x_next;
            d.u_minus.col(k) = tr.u;
            d.y_minus.col(k) = tr.y;
            d.y_plus.col(k) = tr.y_next;
        }
        out.push_back(std::move(d));
    }
    return out;
}

MatrixZonotope noise_matrix_zonotope(const Zonotope& noise, Index horizon)
{
    if (horizon < 1)
        throw std::invalid_argument("noise_matrix_zonotope: horizon must be positive");
    const Index n = noise.dim();
    Matrix center = noise.center().replicate(1, horizon);
    std::vector<Matrix> gens;
    gens.reserve(static_cast<std::size_t>(horizon * noise.num_generators()));
    for (Index t = 0; t < horizon; ++t)
        for (Index j = 0; j < noise.num_generators(); ++j)
        {
            Matrix g = Matrix::Zero(n, horizon);
            g.col(t) = noise.generators().col(j);
            gens.push_back(std::move(g));
        }
    return MatrixZonotope(std::move(center), std::move(gens));
}

MatrixZonotope build_model_set(const ModeDataset& d, const MatrixZonotope& mw)
{
    const Index n = d.x_minus.rows();
    const Index t = d.size();
    if (d.x_plus.rows() != n || d.x_plus.cols() != t || d.u_minus.cols() != t)
        throw DimensionError("build_model_set: data matrices have inconsistent shapes");
    if (mw.rows() != n || mw.cols() != t)
        throw DimensionError("build_model_set: noise matrix zonotope must be n x T");
    const Matrix data = detail::vstack(t, {&d.x_minus, &d.u_minus});
    const Index rank = detail::numerical_rank(data, 1e-8);
    if (rank != data.rows())
        throw RankError("build_model_set: mode " + std::to_string(d.mode_index + 1) + " data has rank " +
                        std::to_string(rank) + ", needs " + std::to_string(data.rows()));
    const Matrix dp = detail::pinv(data, 1e-10);
    std::vector<Matrix> gens;
    gens.reserve(mw.generators().size());
    for (const auto& g : mw.generators())
        gens.push_back(-g * dp);
    return MatrixZonotope((d.x_plus - mw.center()) * dp, std::move(gens));
}

MatrixZonotope output_noise_matrix_zonotope(const std::vector<Sensor>& sensors, const MatrixZonotope& mw,
                                            double a_bound)
{
    if (a_bound < 0.0)
        throw std::invalid_argument("output model set: a_bound must be nonnegative");
    const Matrix c = stacked_output_matrix(sensors);
    const Index n = c.cols();
    if (mw.rows() != n)
        throw DimensionError("output model set: noise matrix zonotope has the wrong row count");
    if (detail::numerical_rank(c, 1e-8) != n)
        throw RankError("output model set: stacked sensor matrix lacks full column rank");
    const Matrix cp = detail::pinv(c, 1e-10);
    const Matrix ge = cp * stacked_noise_generators(sensors);
    const Index horizon = mw.cols();

    // keep only nonzero reconstruction-error generators
    Index kept = 0;
    for (Index j = 0; j < ge.cols(); ++j)
        if (ge.col(j).cwiseAbs().maxCoeff() > 0.0)
            ++kept;
    Matrix ge_nonzero(n, kept);
    for (Index j = 0, k = 0; j < ge.cols(); ++j)
        if (ge.col(j).cwiseAbs().maxCoeff() > 0.0)
            ge_nonzero.col(k++) = ge.col(j);

    MatrixZonotope total = mw;
    if (kept == 0)
        return total;
    total = total + noise_matrix_zonotope(Zonotope(Vector::Zero(n), ge_nonzero), horizon);
    const double radius = a_bound * ge_nonzero.cwiseAbs().rowwise().sum().maxCoeff();
    if (radius > 0.0)
        total = total + noise_matrix_zonotope(Zonotope(Vector::Zero(n), radius * Matrix::Identity(n, n)), horizon);
    return total;
}

MatrixZonotope build_model_set_from_outputs(const ModeDataset& d, const std::vector<Sensor>& sensors,
                                            const MatrixZonotope& mw, double a_bound)
{
    const Matrix c = stacked_output_matrix(sensors);
    const Index n = c.cols();
    if (d.y_plus.rows() != c.rows() || d.y_minus.rows() != c.rows())
        throw DimensionError("build_model_set_from_outputs: recorded outputs do not match the sensors");
    const MatrixZonotope total = output_noise_matrix_zonotope(sensors, mw, a_bound);
    const Matrix cp = detail::pinv(c, 1e-10);
    const Vector cv = stacked_noise_center(sensors);

    ModeDataset rec = d;
    rec.x_plus = cp * (d.y_plus.colwise() - cv);
    rec.x_minus = cp * (d.y_minus.colwise() - cv);
    if (rec.x_plus.rows() != n)
        throw DimensionError("build_model_set_from_outputs: reconstruction has the wrong dimension");
    return build_model_set(rec, total);
}

std::vector<MatrixZonotope> identify_models(const std::vector<Transition>& raw, const PwaSystemSpec& spec)
{
    const auto data = partition_trajectories(raw, spec.regions);
    std::vector<MatrixZonotope> out(data.size());
    detail::parallel_for(static_cast<long>(data.size()), [&](long i) {
        const auto& d = data[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(i)] = build_model_set(d, noise_matrix_zonotope(spec.noise_w, d.size()));
    });
    return out;
}

std::vector<MatrixZonotope> identify_models_from_outputs(const std::vector<Transition>& raw,
                                                         const PwaSystemSpec& spec, double a_bound)
{
    const auto data = partition_trajectories(raw, spec.regions);
    std::vector<MatrixZonotope> out(data.size());
    detail::parallel_for(static_cast<long>(data.size()), [&](long i) {
        const auto& d = data[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(i)] = build_model_set_from_outputs(
            d, spec.sensors, noise_matrix_zonotope(spec.noise_w, d.size()), a_bound);
    });
    return out;
}

} // namespace hzreach
