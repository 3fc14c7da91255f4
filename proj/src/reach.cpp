#include "hzreach/reach.hpp"

#include "hzreach/parallel.hpp"
#include "hzreach/setops.hpp"

#include <algorithm>
#include <string>

namespace hzreach
{
namespace
{

bool same_set_representation(const HybridZonotope& a, const HybridZonotope& b)
{
    return a.dim() == b.dim() && a.num_continuous() == b.num_continuous() && a.num_binary() == b.num_binary() &&
           a.num_constraints() == b.num_constraints() && a.gc() == b.gc() && a.gb() == b.gb() &&
           a.center() == b.center() && a.ac() == b.ac() && a.ab() == b.ab() && a.b() == b.b();
}

const HybridZonotope& input_for(const std::vector<HybridZonotope>& input_sets, std::size_t mode)
{
    return input_sets.size() == 1 ? input_sets.front() : input_sets[mode];
}

HybridZonotope box_set(const Box& box) { return lift_zonotope(Zonotope::box(box.midpoint(), box.radius())); }

struct Branch
{
    std::size_t mode;
    Box hull;     // IH(P_a) x IH(U)
    Vector h;     // scaling of the branch copy z_a
    Vector radius; // matrix-generator box radius r_a
};

/*
 * Selector encoding of the union over s >= 2 active branches; see reach_step.
 *
 * Continuous factors: [Q | per branch (zeta, lower slacks, upper slacks, region slacks) | eta, box slacks | W]
 * Binary factors:     [Q | beta]
 * with Q = R_k x U and branch weights delta = d0 + D beta.
 */
HybridZonotope selector_union(const HybridZonotope& q, Index n, const std::vector<Branch>& branches,
                              const std::vector<MatrixZonotope>& models,
                              const std::vector<PolyhedralRegion>& regions, const Zonotope& noise)
{
    const Index nq = q.dim();
    const Index s = static_cast<Index>(branches.size());
    const Index nbeta = s == 2 ? 1 : s;
    Vector d0(s);
    Matrix dsel = Matrix::Zero(s, nbeta);
    if (s == 2)
    {
        d0 << 0.5, 0.5;
        dsel << 0.5, -0.5;
    }
    else
    {
        d0.setConstant(0.5);
        dsel.diagonal().setConstant(0.5);
    }

    Vector rbar = Vector::Zero(n);
    for (const auto& br : branches)
        rbar = rbar.cwiseMax(br.radius);
    std::vector<Index> box_rows;
    for (Index k = 0; k < n; ++k)
        if (rbar(k) > 0.0)
            box_rows.push_back(k);
    const Index nk = static_cast<Index>(box_rows.size());

    Index ng = q.num_continuous();
    Index nc = q.num_constraints() + nq;
    for (const auto& br : branches)
    {
        const Index mi = regions[br.mode].num_rows();
        ng += 3 * nq + mi;
        nc += 2 * nq + mi;
    }
    ng += 3 * nk + noise.num_generators();
    nc += 2 * nk + (s > 2 ? 1 : 0);
    const Index nb = q.num_binary() + nbeta;
    const Index beta0 = q.num_binary();

    Matrix gc = Matrix::Zero(n, ng);
    Matrix ac = Matrix::Zero(nc, ng);
    Matrix ab = Matrix::Zero(nc, nb);
    Vector b = Vector::Zero(nc);

    // Q's own constraints
    Index row = 0, col = 0;
    ac.block(0, 0, q.num_constraints(), q.num_continuous()) = q.ac();
    ab.block(0, 0, q.num_constraints(), q.num_binary()) = q.ab();
    b.head(q.num_constraints()) = q.b();
    row = q.num_constraints();
    col = q.num_continuous();

    // sum row: sum_a h_a zeta_a - GQc xi - GQb xib = cQ
    const Index sum_row = row;
    ac.block(sum_row, 0, nq, q.num_continuous()) = -q.gc();
    ab.block(sum_row, 0, nq, q.num_binary()) = -q.gb();
    b.segment(sum_row, nq) = q.center();
    row += nq;

    for (Index a = 0; a < s; ++a)
    {
        const Branch& br = branches[static_cast<std::size_t>(a)];
        const MatrixZonotope& model = models[br.mode];
        const PolyhedralRegion& region = regions[br.mode];
        const Eigen::RowVectorXd da = dsel.row(a);
        const Index zeta = col;
        col += nq;

        gc.middleCols(zeta, nq) = model.center() * br.h.asDiagonal();
        ac.block(sum_row, zeta, nq, nq) = br.h.asDiagonal();

        // lo delta <= z <= hi delta, each side with a slack in [0, hi - lo]
        for (Index k = 0; k < nq; ++k)
        {
            const double lo = br.hull.lower(k), hi = br.hull.upper(k);
            const double half = 0.5 * (hi - lo);
            ac(row, zeta + k) = br.h(k);
            ab.block(row, beta0, 1, nbeta) = -lo * da;
            ac(row, col) = -half;
            b(row) = half + lo * d0(a);
            ++row;
            ++col;
            ac(row, zeta + k) = -br.h(k);
            ab.block(row, beta0, 1, nbeta) = hi * da;
            ac(row, col) = -half;
            b(row) = half - hi * d0(a);
            ++row;
            ++col;
        }

        // region: L z^x <= rho delta, slack range from the branch hull
        for (Index j = 0; j < region.num_rows(); ++j)
        {
            const Eigen::RowVectorXd l = region.l().row(j);
            double lmin = 0.0;
            for (Index k = 0; k < n; ++k)
                lmin += std::min(l(k) * br.hull.lower(k), l(k) * br.hull.upper(k));
            const double rho = region.rho()(j);
            const double half = 0.5 * std::max(0.0, rho - lmin);
            for (Index k = 0; k < n; ++k)
                ac(row, zeta + k) = -l(k) * br.h(k);
            ab.block(row, beta0, 1, nbeta) = rho * da;
            ac(row, col) = -half;
            b(row) = half - rho * d0(a);
            ++row;
            ++col;
        }
    }

    // |e_k| <= sum_a delta_a r_{a,k},  e_k = rbar_k eta_k
    for (Index i = 0; i < nk; ++i)
    {
        const Index k = box_rows[static_cast<std::size_t>(i)];
        const Index eta = col++;
        gc(k, eta) = rbar(k);
        Eigen::RowVectorXd coupling = Eigen::RowVectorXd::Zero(nbeta);
        double offset = 0.0;
        for (Index a = 0; a < s; ++a)
        {
            const double r = branches[static_cast<std::size_t>(a)].radius(k);
            coupling += r * dsel.row(a);
            offset += r * d0(a);
        }
        for (const double side : {-1.0, 1.0})
        {
            ac(row, eta) = side * rbar(k);
            ab.block(row, beta0, 1, nbeta) = coupling;
            ac(row, col) = -rbar(k);
            b(row) = rbar(k) - offset;
            ++row;
            ++col;
        }
    }

    if (s > 2)
    {
        ab.block(row, beta0, 1, nbeta).setOnes();
        b(row) = 2.0 - static_cast<double>(s);
        ++row;
    }

    gc.middleCols(col, noise.num_generators()) = noise.generators();
    col += noise.num_generators();

    return HybridZonotope(std::move(gc), Matrix::Zero(n, nb), noise.center(), std::move(ac), std::move(ab),
                          std::move(b));
}

} // namespace

HybridZonotope restrict_to_region(const HybridZonotope& z, const PolyhedralRegion& region)
{
    if (region.dim() != z.dim() && region.num_rows() > 0)
        throw DimensionError("restrict_to_region: region dimension mismatch");
    HybridZonotope out = z;
    for (Index j = 0; j < region.num_rows(); ++j)
        out = halfspace_intersection(out, region.row(j));
    return out;
}

HybridZonotope propagate_mode(const MatrixZonotope& model, const HybridZonotope& state_set,
                              const HybridZonotope& input_set, const Zonotope& noise, const oracle::Options& opt)
{
    if (model.cols() != state_set.dim() + input_set.dim() || model.rows() != noise.dim())
        throw DimensionError("propagate_mode: model, sets and noise have inconsistent dimensions");
    const HybridZonotope joint = cartesian_product(state_set, input_set);
    const auto hull = oracle::interval_hull(joint, opt);
    if (!hull)
        return HybridZonotope::empty(model.rows());
    return minkowski_sum(matzono_times_set(model, joint, *hull), lift_zonotope(noise));
}

ReachFamily make_family(int step, const HybridZonotope& union_set, const std::vector<PolyhedralRegion>& regions,
                        const oracle::Options& opt)
{
    ReachFamily f;
    f.step = step;
    f.union_set = union_set;
    f.per_mode.resize(regions.size());
    f.empty.assign(regions.size(), 0);
    detail::parallel_for(static_cast<long>(regions.size()), [&](long i) {
        const auto idx = static_cast<std::size_t>(i);
        f.per_mode[idx] = restrict_to_region(union_set, regions[idx]);
        f.empty[idx] = oracle::is_empty(f.per_mode[idx], opt) ? 1 : 0;
    });
    return f;
}

ReachFamily reach_step(const ReachFamily& family, const std::vector<MatrixZonotope>& models,
                       const std::vector<PolyhedralRegion>& regions, const std::vector<HybridZonotope>& input_sets,
                       const Zonotope& noise, const ReachOptions& opt)
{
    const std::size_t s = regions.size();
    if (models.size() != s)
        throw DimensionError("reach_step: one model per region is required");
    if (input_sets.size() != 1 && input_sets.size() != s)
        throw DimensionError("reach_step: give one input set or one per region");
    if (family.per_mode.size() != s || family.empty.size() != s)
        throw DimensionError("reach_step: family does not match the region count");
    const Index n = noise.dim();
    for (std::size_t i = 0; i < s; ++i)
        if (models[i].rows() != n || models[i].cols() != n + input_for(input_sets, i).dim())
            throw DimensionError("reach_step: model " + std::to_string(i + 1) + " has the wrong shape");

    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < s; ++i)
        if (!family.empty[i])
            active.push_back(i);
    if (active.empty())
    {
        ReachFamily f;
        f.step = family.step + 1;
        f.union_set = HybridZonotope::empty(n);
        f.per_mode.assign(s, HybridZonotope::empty(n));
        f.empty.assign(s, 1);
        return f;
    }

    bool shared_input = true;
    for (std::size_t i = 1; i < s && input_sets.size() > 1; ++i)
        shared_input = shared_input && same_set_representation(input_sets[i], input_sets[0]);

    HybridZonotope next;
    if (active.size() == 1 || opt.union_strategy == UnionStrategy::fold || !shared_input)
    {
        std::vector<HybridZonotope> images(active.size());
        detail::parallel_for(static_cast<long>(active.size()), [&](long i) {
            const std::size_t mode = active[static_cast<std::size_t>(i)];
            images[static_cast<std::size_t>(i)] = propagate_mode(models[mode], family.per_mode[mode],
                                                                 input_for(input_sets, mode), noise, opt.oracle);
        });
        next = images.front();
        for (std::size_t i = 1; i < images.size(); ++i)
            next = set_union(next, images[i]);
    }
    else
    {
        const HybridZonotope& input = input_sets.front();
        const auto input_hull = oracle::interval_hull(input, opt.oracle);
        if (!input_hull)
            throw EmptySetError("reach_step: input set is empty");
        std::vector<Branch> branches(active.size());
        detail::parallel_for(static_cast<long>(active.size()), [&](long i) {
            const std::size_t mode = active[static_cast<std::size_t>(i)];
            const auto state_hull = oracle::interval_hull(family.per_mode[mode], opt.oracle);
            if (!state_hull)
                throw EmptySetError("reach_step: branch reported nonempty has no hull");
            Branch& br = branches[static_cast<std::size_t>(i)];
            br.mode = mode;
            br.hull.lower.resize(n + input.dim());
            br.hull.upper.resize(n + input.dim());
            br.hull.lower << state_hull->lower, input_hull->lower;
            br.hull.upper << state_hull->upper, input_hull->upper;
            br.h = br.hull.magnitude();
            for (Index k = 0; k < br.h.size(); ++k)
                if (br.h(k) == 0.0)
                    br.h(k) = 1.0;
            br.radius = matzono_box_radius(models[mode], br.hull);
        });
        const HybridZonotope q = cartesian_product(family.union_set, input);
        next = selector_union(q, n, branches, models, regions, noise);
    }

    if (opt.hull_relaxation)
    {
        const auto hull = oracle::interval_hull(next, opt.oracle);
        next = hull ? box_set(*hull) : HybridZonotope::empty(n);
    }
    return make_family(family.step + 1, next, regions, opt.oracle);
}

std::vector<ReachFamily> reach_horizon(const HybridZonotope& initial, const std::vector<MatrixZonotope>& models,
                                       const std::vector<PolyhedralRegion>& regions,
                                       const std::vector<HybridZonotope>& input_sets, const Zonotope& noise, int n,
                                       const ReachOptions& opt)
{
    if (n < 0)
        throw std::invalid_argument("reach_horizon: negative horizon");
    std::vector<ReachFamily> out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    out.push_back(make_family(0, initial, regions, opt.oracle));
    for (int k = 0; k < n; ++k)
        out.push_back(reach_step(out.back(), models, regions, input_sets, noise, opt));
    return out;
}

std::vector<MatrixZonotope> known_models(const PwaSystemSpec& spec)
{
    if (spec.modes.empty())
        throw std::invalid_argument("known_models: the system has no known dynamics");
    std::vector<MatrixZonotope> models;
    for (const auto& m : spec.modes)
    {
        Matrix ab(m.a.rows(), m.a.cols() + m.b.cols());
        ab << m.a, m.b;
        models.emplace_back(std::move(ab), std::vector<Matrix>{});
    }
    return models;
}

std::vector<ReachFamily> reach_horizon_known(const HybridZonotope& initial, const PwaSystemSpec& spec,
                                             const std::vector<HybridZonotope>& input_sets, int n,
                                             const ReachOptions& opt)
{
    return reach_horizon(initial, known_models(spec), spec.regions, input_sets, spec.noise_w, n, opt);
}

} // namespace hzreach
