#pragma once

#include "hzreach/oracle.hpp"
#include "hzreach/setops.hpp"

#include <doctest.h>

#include <random>

namespace hzreach::testing
{

inline HybridZonotope box(const Vector& center, const Vector& radius)
{
    return lift_zonotope(Zonotope::box(center, radius));
}

inline HybridZonotope interval(double lo, double hi)
{
    return box(Vector::Constant(1, 0.5 * (lo + hi)), Vector::Constant(1, 0.5 * (hi - lo)));
}

inline HybridZonotope unit_box(Index n) { return box(Vector::Zero(n), Vector::Ones(n)); }

inline Vector vec(std::initializer_list<double> v)
{
    Vector out(static_cast<Index>(v.size()));
    Index i = 0;
    for (double x : v)
        out(i++) = x;
    return out;
}

inline void check_hull(const HybridZonotope& z, const Vector& lower, const Vector& upper, double tol = 1e-9)
{
    const auto hull = oracle::interval_hull(z);
    REQUIRE(hull.has_value());
    CHECK((hull->lower - lower).cwiseAbs().maxCoeff() <= tol);
    CHECK((hull->upper - upper).cwiseAbs().maxCoeff() <= tol);
}

inline double max_support_gap(const HybridZonotope& a, const HybridZonotope& b, int count = 16)
{
    const Matrix dirs = oracle::spread_directions(a.dim(), count);
    const auto ha = oracle::support_batch(a, dirs);
    const auto hb = oracle::support_batch(b, dirs);
    double gap = 0.0;
    for (std::size_t i = 0; i < ha.size(); ++i)
        gap = std::max(gap, std::abs(ha[i] - hb[i]));
    return gap;
}

/// Random hybrid zonotope with a guaranteed member: factors are built around a known point.
inline HybridZonotope random_hz(std::mt19937_64& rng, Index n, Index ng, Index nb, Index nc)
{
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unit(-0.8, 0.8);
    auto rnd = [&](Index r, Index c) {
        Matrix m(r, c);
        for (Index i = 0; i < r; ++i)
            for (Index j = 0; j < c; ++j)
                m(i, j) = normal(rng);
        return m;
    };
    Vector xc(ng), xb(nb);
    for (Index i = 0; i < ng; ++i)
        xc(i) = unit(rng);
    for (Index i = 0; i < nb; ++i)
        xb(i) = unit(rng) > 0 ? 1.0 : -1.0;
    Matrix ac = rnd(nc, ng), ab = rnd(nc, nb);
    Vector b = ac * xc + ab * xb;
    return HybridZonotope(rnd(n, ng), rnd(n, nb), rnd(n, 1), ac, ab, b);
}

} // namespace hzreach::testing
