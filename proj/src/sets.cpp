#include "hzreach/sets.hpp"

#include "hzreach/lp.hpp"

#include <string>

namespace hzreach
{

Zonotope::Zonotope(Vector center, Matrix generators)
    : center_(std::move(center)), generators_(std::move(generators))
{
    if (generators_.cols() == 0)
        generators_.resize(center_.size(), 0);
    if (generators_.rows() != center_.size())
        throw DimensionError("Zonotope: generator matrix must have exactly n rows");
}

Zonotope Zonotope::point(const Vector& c) { return Zonotope(c, Matrix(c.size(), 0)); }

Zonotope Zonotope::box(const Vector& center, const Vector& radius)
{
    if (radius.size() != center.size())
        throw DimensionError("Zonotope::box: radius dimension mismatch");
    Index count = 0;
    for (Index i = 0; i < radius.size(); ++i)
        if (radius(i) > 0.0)
            ++count;
    Matrix g = Matrix::Zero(center.size(), count);
    Index k = 0;
    for (Index i = 0; i < radius.size(); ++i)
        if (radius(i) > 0.0)
            g(i, k++) = radius(i);
    return Zonotope(center, g);
}

HybridZonotope::HybridZonotope(Matrix gc, Matrix gb, Vector c, Matrix ac, Matrix ab, Vector b)
    : gc_(std::move(gc)), gb_(std::move(gb)), c_(std::move(c)), ac_(std::move(ac)), ab_(std::move(ab)),
      b_(std::move(b))
{
    const Index n = c_.size();
    const Index nc = b_.size();
    // 0-sized blocks may arrive with arbitrary shape; give them the implied one
    if (gc_.cols() == 0)
        gc_.resize(n, 0);
    if (gb_.cols() == 0)
        gb_.resize(n, 0);
    if (ac_.size() == 0)
        ac_.resize(nc, gc_.cols());
    if (ab_.size() == 0)
        ab_.resize(nc, gb_.cols());

    if (gc_.rows() != n || gb_.rows() != n)
        throw DimensionError("HybridZonotope: generator matrices must have n rows");
    if (ac_.rows() != nc || ab_.rows() != nc)
        throw DimensionError("HybridZonotope: constraint row counts of Ac, Ab and b disagree");
    if (ac_.cols() != gc_.cols())
        throw DimensionError("HybridZonotope: Ac must have n_g columns");
    if (ab_.cols() != gb_.cols())
        throw DimensionError("HybridZonotope: Ab must have n_b columns");
}

HybridZonotope HybridZonotope::empty(Index n)
{
    Vector b(1);
    b(0) = 1.0;
    return HybridZonotope(Matrix(n, 0), Matrix(n, 0), Vector::Zero(n), Matrix(1, 0), Matrix(1, 0), b);
}

MatrixZonotope::MatrixZonotope(Matrix center, std::vector<Matrix> generators)
    : center_(std::move(center)), generators_(std::move(generators))
{
    for (const auto& g : generators_)
        if (g.rows() != center_.rows() || g.cols() != center_.cols())
            throw DimensionError("MatrixZonotope: generator dimensions must match the center");
}

MatrixZonotope MatrixZonotope::operator+(const MatrixZonotope& other) const
{
    if (other.rows() != rows() || other.cols() != cols())
        throw DimensionError("MatrixZonotope sum: dimension mismatch");
    std::vector<Matrix> gens = generators_;
    gens.insert(gens.end(), other.generators_.begin(), other.generators_.end());
    return MatrixZonotope(center_ + other.center_, std::move(gens));
}

MatrixZonotope MatrixZonotope::operator-() const
{
    std::vector<Matrix> gens;
    gens.reserve(generators_.size());
    for (const auto& g : generators_)
        gens.push_back(-g);
    return MatrixZonotope(-center_, std::move(gens));
}

Halfspace::Halfspace(Vector l, double rho, Matrix r) : normal(std::move(l)), offset(rho), map(std::move(r))
{
    if (normal.size() == 0 || normal.cwiseAbs().maxCoeff() == 0.0)
        throw std::invalid_argument("Halfspace: normal must be nonzero");
    if (map.size() != 0 && map.rows() != normal.size())
        throw DimensionError("Halfspace: map rows must equal the normal dimension");
}

PolyhedralRegion::PolyhedralRegion(Matrix l, Vector rho) : l_(std::move(l)), rho_(std::move(rho))
{
    if (l_.rows() != rho_.size())
        throw DimensionError("PolyhedralRegion: row counts of L and rho disagree");
}

PolyhedralRegion PolyhedralRegion::whole_space(Index n) { return PolyhedralRegion(Matrix(0, n), Vector(0)); }

bool PolyhedralRegion::contains(const Vector& x, double tol) const
{
    if (x.size() != dim())
        throw DimensionError("PolyhedralRegion::contains: dimension mismatch");
    if (num_rows() == 0)
        return true;
    return ((l_ * x - rho_).array() <= tol).all();
}

Halfspace PolyhedralRegion::row(Index j) const { return Halfspace(l_.row(j).transpose(), rho_(j)); }

HybridZonotope lift_zonotope(const Zonotope& z)
{
    const Index n = z.dim();
    const Index g = z.num_generators();
    return HybridZonotope(z.generators(), Matrix(n, 0), z.center(), Matrix(0, g), Matrix(0, 0), Vector(0));
}

bool contains(const MatrixZonotope& m, const Matrix& y, double tol)
{
    if (y.rows() != m.rows() || y.cols() != m.cols())
        throw DimensionError("MatrixZonotope membership: dimension mismatch");
    const Index entries = m.rows() * m.cols();
    const Index g = m.num_generators();
    lp::Problem p;
    p.A.resize(entries, g);
    for (Index j = 0; j < g; ++j)
        p.A.col(j) = m.generators()[static_cast<std::size_t>(j)].reshaped();
    p.b = (y - m.center()).reshaped();
    p.lower = Vector::Constant(g, -1.0);
    p.upper = Vector::Constant(g, 1.0);
    if (g == 0)
        return p.b.cwiseAbs().maxCoeff() <= tol;
    lp::Options opt;
    opt.feasibility_tol = tol;
    const auto res = lp::solve(p, opt);
    if (res.status != lp::Status::optimal)
        return false;
    return (p.A * res.x - p.b).cwiseAbs().maxCoeff() <= tol;
}

} // namespace hzreach
