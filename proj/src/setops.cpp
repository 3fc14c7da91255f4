#include "hzreach/setops.hpp"

#include "hzreach/matrix_utils.hpp"
#include "hzreach/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace hzreach
{

using detail::blkdiag;
using detail::hstack;
using detail::vcat;
using detail::vstack;

HybridZonotope minkowski_sum(const HybridZonotope& z1, const HybridZonotope& z2)
{
    if (z1.dim() != z2.dim())
        throw DimensionError("minkowski_sum: operands have different dimensions");
    const Index n = z1.dim();
    return HybridZonotope(hstack(n, {&z1.gc(), &z2.gc()}), hstack(n, {&z1.gb(), &z2.gb()}), z1.center() + z2.center(),
                          blkdiag(z1.ac(), z2.ac()), blkdiag(z1.ab(), z2.ab()), vcat({&z1.b(), &z2.b()}));
}

HybridZonotope generalized_intersection(const HybridZonotope& z1, const Matrix& r, const HybridZonotope& z3)
{
    if (r.cols() != z1.dim() || r.rows() != z3.dim())
        throw DimensionError("generalized_intersection: R must map Z1's space into Z3's space");
    const Index n = z1.dim();
    const Index g1 = z1.num_continuous(), g3 = z3.num_continuous();
    const Index q1 = z1.num_binary(), q3 = z3.num_binary();
    const Index c1 = z1.num_constraints(), c3 = z3.num_constraints();
    const Index m = z3.dim();

    Matrix gc = Matrix::Zero(n, g1 + g3);
    gc.leftCols(g1) = z1.gc();
    Matrix gb = Matrix::Zero(n, q1 + q3);
    gb.leftCols(q1) = z1.gb();

    Matrix ac = Matrix::Zero(c1 + c3 + m, g1 + g3);
    ac.topLeftCorner(c1, g1) = z1.ac();
    ac.block(c1, g1, c3, g3) = z3.ac();
    ac.bottomLeftCorner(m, g1) = r * z1.gc();
    ac.bottomRightCorner(m, g3) = -z3.gc();

    Matrix ab = Matrix::Zero(c1 + c3 + m, q1 + q3);
    ab.topLeftCorner(c1, q1) = z1.ab();
    ab.block(c1, q1, c3, q3) = z3.ab();
    ab.bottomLeftCorner(m, q1) = r * z1.gb();
    ab.bottomRightCorner(m, q3) = -z3.gb();

    const Vector coupling = z3.center() - r * z1.center();
    return HybridZonotope(std::move(gc), std::move(gb), z1.center(), std::move(ac), std::move(ab),
                          vcat({&z1.b(), &z3.b(), &coupling}));
}

HybridZonotope halfspace_intersection(const HybridZonotope& z1, const Halfspace& h)
{
    const Index n = z1.dim();
    const bool identity = h.map.size() == 0;
    if ((identity && h.normal.size() != n) || (!identity && h.map.cols() != n))
        throw DimensionError("halfspace_intersection: halfspace incompatible with the set dimension");

    // row vector l' R
    const Eigen::RowVectorXd lr = identity ? Eigen::RowVectorXd(h.normal.transpose())
                                           : Eigen::RowVectorXd(h.normal.transpose() * h.map);
    const Eigen::RowVectorXd lgc = lr * z1.gc();
    const Eigen::RowVectorXd lgb = lr * z1.gb();
    const double lc = lr * z1.center();
    const double dm = std::max(0.0, h.offset - lc + lgc.cwiseAbs().sum() + lgb.cwiseAbs().sum());

    const Index g = z1.num_continuous();
    const Index nc = z1.num_constraints();
    Matrix gc = Matrix::Zero(n, g + 1);
    gc.leftCols(g) = z1.gc();

    Matrix ac = Matrix::Zero(nc + 1, g + 1);
    ac.topLeftCorner(nc, g) = z1.ac();
    ac.bottomLeftCorner(1, g) = lgc;
    ac(nc, g) = dm / 2.0;

    Matrix ab(nc + 1, z1.num_binary());
    ab.topRows(nc) = z1.ab();
    ab.bottomRows(1) = lgb;

    Vector b(nc + 1);
    b.head(nc) = z1.b();
    b(nc) = h.offset - lc - dm / 2.0;
    return HybridZonotope(std::move(gc), z1.gb(), z1.center(), std::move(ac), std::move(ab), std::move(b));
}

HybridZonotope linear_map(const Matrix& m, const HybridZonotope& z)
{
    if (m.cols() != z.dim())
        throw DimensionError("linear_map: matrix columns must equal the set dimension");
    return HybridZonotope(m * z.gc(), m * z.gb(), m * z.center(), z.ac(), z.ab(), z.b());
}

HybridZonotope cartesian_product(const HybridZonotope& z1, const HybridZonotope& z2)
{
    return HybridZonotope(blkdiag(z1.gc(), z2.gc()), blkdiag(z1.gb(), z2.gb()), vcat({&z1.center(), &z2.center()}),
                          blkdiag(z1.ac(), z2.ac()), blkdiag(z1.ab(), z2.ab()), vcat({&z1.b(), &z2.b()}));
}

HybridZonotope set_union(const HybridZonotope& z1, const HybridZonotope& z2)
{
    if (z1.dim() != z2.dim())
        throw DimensionError("set_union: operands have different dimensions");
    const Index n = z1.dim();
    const Index g1 = z1.num_continuous(), g2 = z2.num_continuous();
    const Index q1 = z1.num_binary(), q2 = z2.num_binary();
    const Index r1 = z1.num_constraints(), r2 = z2.num_constraints();

    // column layout
    //   continuous: [xi1c (g1) | xi2c (g2) | zeroing slacks 2(g1+g2) | binary slacks (q1+q2)]
    //   binary:     [xi1b (q1) | xi2b (q2) | sigma]
    const Index slack_c = 2 * (g1 + g2);
    const Index slack_b = q1 + q2;
    const Index ng = g1 + g2 + slack_c + slack_b;
    const Index nb = q1 + q2 + 1;
    const Index nc = r1 + r2 + slack_c + slack_b;
    const Index sigma = q1 + q2;

    const Vector ones1 = Vector::Ones(q1);
    const Vector ones2 = Vector::Ones(q2);
    const Vector gb1_sum = z1.gb() * ones1;
    const Vector gb2_sum = z2.gb() * ones2;

    Matrix gc = Matrix::Zero(n, ng);
    gc.leftCols(g1) = z1.gc();
    gc.middleCols(g1, g2) = z2.gc();

    Matrix gb = Matrix::Zero(n, nb);
    gb.leftCols(q1) = z1.gb();
    gb.middleCols(q1, q2) = z2.gb();
    gb.col(sigma) = 0.5 * (z1.center() - z2.center()) - 0.5 * gb1_sum + 0.5 * gb2_sum;

    const Vector c = 0.5 * (z1.center() + z2.center()) + 0.5 * (gb1_sum + gb2_sum);

    Matrix ac = Matrix::Zero(nc, ng);
    Matrix ab = Matrix::Zero(nc, nb);
    Vector b = Vector::Zero(nc);

    // operand constraints, scaled so that they vanish when deselected
    const Vector ab1_sum = z1.ab() * ones1;
    const Vector ab2_sum = z2.ab() * ones2;
    ac.block(0, 0, r1, g1) = z1.ac();
    ab.block(0, 0, r1, q1) = z1.ab();
    ab.block(0, sigma, r1, 1) = -0.5 * (ab1_sum + z1.b());
    b.segment(0, r1) = 0.5 * (z1.b() - ab1_sum);

    ac.block(r1, g1, r2, g2) = z2.ac();
    ab.block(r1, q1, r2, q2) = z2.ab();
    ab.block(r1, sigma, r2, 1) = 0.5 * (ab2_sum + z2.b());
    b.segment(r1, r2) = 0.5 * (z2.b() - ab2_sum);

    // |xi| <= (1 + s)/2 for operand 1 and |xi| <= (1 - s)/2 for operand 2
    Index row = r1 + r2;
    Index slack = g1 + g2;
    for (Index k = 0; k < g1 + g2; ++k)
    {
        const double sgn = k < g1 ? -0.5 : 0.5;
        for (const double side : {1.0, -1.0})
        {
            ac(row, k) = side;
            ac(row, slack) = 1.0;
            ab(row, sigma) = sgn;
            b(row) = -0.5;
            ++row;
            ++slack;
        }
    }
    // binaries of a deselected operand are forced to -1
    for (Index k = 0; k < q1 + q2; ++k)
    {
        ab(row, k) = 1.0;
        ab(row, sigma) = k < q1 ? -1.0 : 1.0;
        ac(row, slack) = 1.0;
        b(row) = -1.0;
        ++row;
        ++slack;
    }

    return HybridZonotope(std::move(gc), std::move(gb), c, std::move(ac), std::move(ab), std::move(b));
}

Vector matzono_box_radius(const MatrixZonotope& m, const Box& hull)
{
    if (hull.lower.size() != m.cols())
        throw DimensionError("matzono_times_set: hull dimension mismatch");
    const Vector mag = hull.magnitude();
    Vector radius = Vector::Zero(m.rows());
    for (const auto& g : m.generators())
        radius += g.cwiseAbs() * mag;
    return radius;
}

HybridZonotope matzono_times_set(const MatrixZonotope& m, const HybridZonotope& z, const Box& hull)
{
    if (m.cols() != z.dim())
        throw DimensionError("matzono_times_set: matrix columns must equal the set dimension");
    HybridZonotope out = linear_map(m.center(), z);
    if (m.num_generators() == 0)
        return out;
    const Vector radius = matzono_box_radius(m, hull);
    if (radius.maxCoeff() <= 0.0)
        return out;
    return minkowski_sum(out, lift_zonotope(Zonotope::box(Vector::Zero(m.rows()), radius)));
}

HybridZonotope matzono_times_set(const MatrixZonotope& m, const HybridZonotope& z)
{
    if (m.cols() != z.dim())
        throw DimensionError("matzono_times_set: matrix columns must equal the set dimension");
    if (m.num_generators() == 0)
        return linear_map(m.center(), z);
    const auto hull = oracle::interval_hull(z);
    if (!hull)
        return linear_map(m.center(), z);
    return matzono_times_set(m, z, *hull);
}

} // namespace hzreach
