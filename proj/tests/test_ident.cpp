#include "hzreach/ident.hpp"

#include "hzreach/matrix_utils.hpp"
#include "test_support.hpp"

#include <random>

using namespace hzreach;
using namespace hzreach::testing;

namespace
{

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

ModeDataset dataset(const Matrix& xm, const Matrix& um, const Matrix& xp)
{
    ModeDataset d;
    d.x_minus = xm;
    d.u_minus = um;
    d.x_plus = xp;
    d.y_minus.resize(0, xm.cols());
    d.y_plus.resize(0, xm.cols());
    return d;
}

Matrix hull_radius(const MatrixZonotope& m)
{
    Matrix r = Matrix::Zero(m.rows(), m.cols());
    for (const auto& g : m.generators())
        r += g.cwiseAbs();
    return r;
}

// Random stable (A, B) with spectral radius below 0.95.
void random_system(std::mt19937_64& rng, Index n, Index m, Matrix& a, Matrix& b)
{
    std::normal_distribution<double> normal;
    a.resize(n, n);
    b.resize(n, m);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            a(i, j) = normal(rng);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < m; ++j)
            b(i, j) = normal(rng);
    const double rho = Eigen::EigenSolver<Matrix>(a).eigenvalues().cwiseAbs().maxCoeff();
    if (rho > 0.0)
        a *= 0.9 / rho;
}

} // namespace

TEST_CASE("partition_trajectories examples")
{
    const std::vector<PolyhedralRegion> regions{PolyhedralRegion(mat({{1.0}}), vec({0.0})),
                                                PolyhedralRegion(mat({{-1.0}}), vec({0.0}))};
    std::vector<Transition> raw{{vec({-0.5}), vec({0}), vec({0.1}), Vector(0), Vector(0)},
                                {vec({0.5}), vec({0}), vec({0.2}), Vector(0), Vector(0)}};
    auto parts = partition_trajectories(raw, regions);
    REQUIRE(parts.size() == 2);
    CHECK(parts[0].x_minus(0, 0) == -0.5);
    CHECK(parts[1].x_minus(0, 0) == 0.5);

    raw.push_back({vec({0.0}), vec({0}), vec({0.3}), Vector(0), Vector(0)});
    parts = partition_trajectories(raw, regions);
    CHECK(parts[0].size() == 2);
    CHECK(parts[0].x_minus(0, 1) == 0.0);
    CHECK(parts[0].size() + parts[1].size() == 3);

    const std::vector<PolyhedralRegion> narrow{PolyhedralRegion(mat({{1.0}}), vec({-1.0}))};
    CHECK_THROWS_AS(partition_trajectories(raw, narrow), IdentificationError);
    const std::vector<Transition> left_only{raw.front()};
    CHECK_THROWS_AS(partition_trajectories(left_only, regions), IdentificationError);
}

TEST_CASE("noise_matrix_zonotope examples")
{
    const auto zero = noise_matrix_zonotope(Zonotope::point(Vector::Zero(2)), 3);
    CHECK(zero.num_generators() == 0);
    CHECK(zero.center().isZero());
    CHECK(zero.cols() == 3);

    const auto m = noise_matrix_zonotope(Zonotope(vec({0.0}), mat({{0.1}})), 2);
    REQUIRE(m.num_generators() == 2);
    CHECK(m.generators()[0].isApprox(mat({{0.1, 0.0}})));
    CHECK(m.generators()[1].isApprox(mat({{0.0, 0.1}})));
    CHECK(contains(m, mat({{0.05, -0.1}})));
    CHECK_FALSE(contains(m, mat({{0.05, -0.12}})));
    CHECK_THROWS(noise_matrix_zonotope(Zonotope(vec({0.0}), mat({{0.1}})), 0));
}

TEST_CASE("build_model_set examples")
{
    const auto d = dataset(mat({{1.0, 1.5}}), mat({{1.0, 0.0}}), mat({{1.5, 0.75}}));
    const auto m = build_model_set(d, noise_matrix_zonotope(Zonotope::point(vec({0.0})), 2));
    CHECK((m.center() - mat({{0.5, 1.0}})).norm() <= 1e-12);
    CHECK(m.num_generators() == 0);

    std::mt19937_64 rng(4);
    const Matrix xm = Matrix::Random(2, 6), um = Matrix::Random(1, 6);
    const auto id = build_model_set(dataset(xm, um, xm), noise_matrix_zonotope(Zonotope::point(Vector::Zero(2)), 6));
    Matrix expected = Matrix::Zero(2, 3);
    expected.leftCols(2).setIdentity();
    CHECK((id.center() - expected).norm() <= 1e-10);

    const auto rank_poor = dataset(mat({{1.0, 2.0}}), mat({{1.0, 2.0}}), mat({{1.0, 1.0}}));
    CHECK_THROWS_AS(build_model_set(rank_poor, noise_matrix_zonotope(Zonotope::point(vec({0.0})), 2)), RankError);
    CHECK_THROWS_AS(build_model_set(d, noise_matrix_zonotope(Zonotope::point(vec({0.0})), 3)), DimensionError);
}

TEST_CASE("build_model_set recovers the benchmark left mode from ten excitation steps")
{
    const Matrix a1 = mat({{0.75, 0.25}, {-0.25, 0.75}});
    const Matrix b1 = mat({{-0.25}, {-0.25}});
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Matrix xm(2, 10), um(1, 10), xp(2, 10);
    Vector x = vec({-1.5, 2.5});
    for (int k = 0; k < 10; ++k)
    {
        xm.col(k) = x;
        um(0, k) = unit(rng);
        x = a1 * x + b1 * um(0, k);
        xp.col(k) = x;
    }
    const auto m = build_model_set(dataset(xm, um, xp), noise_matrix_zonotope(Zonotope::point(Vector::Zero(2)), 10));
    Matrix truth(2, 3);
    truth << a1, b1;
    CHECK((m.center() - truth).norm() <= 1e-8);
}

TEST_CASE("exact recovery over random stable systems")
{
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> dim(1, 4);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 50; ++trial)
    {
        const Index n = dim(rng), m = dim(rng);
        Matrix a, b;
        random_system(rng, n, m, a, b);
        const Index t = 3 * (n + m);
        Matrix xm(n, t), um(m, t), xp(n, t);
        Vector x = Vector::Zero(n);
        for (Index i = 0; i < n; ++i)
            x(i) = normal(rng);
        for (Index k = 0; k < t; ++k)
        {
            xm.col(k) = x;
            for (Index i = 0; i < m; ++i)
                um(i, k) = normal(rng);
            x = a * x + b * um.col(k);
            xp.col(k) = x;
        }
        const auto ms = build_model_set(dataset(xm, um, xp), noise_matrix_zonotope(Zonotope::point(Vector::Zero(n)), t));
        Matrix truth(n, n + m);
        truth << a, b;
        CHECK((ms.center() - truth).norm() <= 1e-8);
        CHECK(ms.num_generators() == 0);
    }
}

TEST_CASE("model set contains the true system and grows with the noise")
{
    std::mt19937_64 rng(555);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const Zonotope zw(Vector::Zero(2), 0.05 * Matrix::Identity(2, 2));
    int contained = 0;
    for (int trial = 0; trial < 50; ++trial)
    {
        Matrix a, b;
        random_system(rng, 2, 1, a, b);
        const Index t = 20;
        Matrix xm(2, t), um(1, t), xp(2, t);
        Vector x = vec({unit(rng), unit(rng)});
        for (Index k = 0; k < t; ++k)
        {
            xm.col(k) = x;
            um(0, k) = unit(rng);
            const Vector w = zw.generators() * vec({unit(rng), unit(rng)});
            x = a * x + b * um.col(k) + w;
            xp.col(k) = x;
        }
        const auto d = dataset(xm, um, xp);
        const auto ms = build_model_set(d, noise_matrix_zonotope(zw, t));
        Matrix truth(2, 3);
        truth << a, b;
        if (contains(ms, truth))
            ++contained;

        const Zonotope bigger(zw.center(), 1.5 * zw.generators());
        const auto mb = build_model_set(d, noise_matrix_zonotope(bigger, t));
        const Matrix lo_s = ms.center() - hull_radius(ms), hi_s = ms.center() + hull_radius(ms);
        const Matrix lo_b = mb.center() - hull_radius(mb), hi_b = mb.center() + hull_radius(mb);
        CHECK((lo_b.array() <= lo_s.array() + 1e-12).all());
        CHECK((hi_b.array() >= hi_s.array() - 1e-12).all());
    }
    CHECK(contained == 50);
}

TEST_CASE("build_model_set_from_outputs examples")
{
    const auto d0 = dataset(mat({{1.0, 1.5, -0.5}, {0.3, -1.0, 2.0}}), mat({{1.0, 0.0, -1.0}}),
                            mat({{1.5, 0.75, 0.2}, {0.1, 0.4, -0.3}}));
    const auto mw = noise_matrix_zonotope(Zonotope::point(Vector::Zero(2)), 3);
    const auto direct = build_model_set(d0, mw);
    for (double scale : {1.0, 2.0})
    {
        ModeDataset d = d0;
        d.y_minus = scale * d0.x_minus;
        d.y_plus = scale * d0.x_plus;
        const std::vector<Sensor> sensors{{scale * Matrix::Identity(2, 2), Zonotope::point(Vector::Zero(2))}};
        const auto from_y = build_model_set_from_outputs(d, sensors, mw, 1.0);
        CHECK((from_y.center() - direct.center()).norm() <= 1e-12);
        CHECK(from_y.num_generators() == 0);
    }

    const std::vector<Sensor> rank_poor{{mat({{1.0, 0.0}}), Zonotope::point(vec({0.0}))}};
    ModeDataset dr = d0;
    dr.y_minus = d0.x_minus.topRows(1);
    dr.y_plus = d0.x_plus.topRows(1);
    CHECK_THROWS_AS(build_model_set_from_outputs(dr, rank_poor, mw, 1.0), RankError);
}

TEST_CASE("output-based scalar model set contains the truth over noise realizations")
{
    const auto base = dataset(mat({{1.0, 1.5}}), mat({{1.0, 0.0}}), mat({{1.5, 0.75}}));
    const std::vector<Sensor> sensors{{mat({{1.0}}), Zonotope(vec({0.0}), mat({{0.01}}))}};
    const auto mw = noise_matrix_zonotope(Zonotope::point(vec({0.0})), 2);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> noise(-0.01, 0.01);
    for (int trial = 0; trial < 100; ++trial)
    {
        ModeDataset d = base;
        d.y_minus = base.x_minus;
        d.y_plus = base.x_plus;
        for (Index k = 0; k < 2; ++k)
        {
            d.y_minus(0, k) += noise(rng);
            d.y_plus(0, k) += noise(rng);
        }
        const auto m = build_model_set_from_outputs(d, sensors, mw, 1.0);
        CHECK((m.center() - mat({{0.5, 1.0}})).cwiseAbs().maxCoeff() <= 0.05);
        CHECK(contains(m, mat({{0.5, 1.0}})));
    }
}

TEST_CASE("system spec validation and region lookup")
{
    PwaSystemSpec spec;
    spec.noise_w = Zonotope::point(Vector::Zero(2));
    spec.regions = {PolyhedralRegion(mat({{1.0, 0.0}}), vec({0.0})), PolyhedralRegion(mat({{-1.0, 0.0}}), vec({0.0}))};
    spec.modes = {{Matrix::Identity(2, 2), Matrix::Zero(2, 1)}, {Matrix::Identity(2, 2), Matrix::Zero(2, 1)}};
    CHECK_NOTHROW(spec.validate());
    CHECK(spec.region_of(vec({0.0, 3.0})) == 0);
    CHECK(spec.region_of(vec({0.1, 3.0})) == 1);
    spec.modes.pop_back();
    CHECK_THROWS_AS(spec.validate(), DimensionError);
}
