#include "hzreach/matrix_utils.hpp"

#include <Eigen/SVD>

namespace hzreach::detail
{

Matrix hstack(Index rows, std::initializer_list<const Matrix*> blocks)
{
    Index cols = 0;
    for (const Matrix* b : blocks)
    {
        if (b->cols() > 0 && b->rows() != rows)
            throw DimensionError("hstack: block row count mismatch");
        cols += b->cols();
    }
    Matrix out = Matrix::Zero(rows, cols);
    Index at = 0;
    for (const Matrix* b : blocks)
    {
        if (b->cols() > 0)
            out.middleCols(at, b->cols()) = *b;
        at += b->cols();
    }
    return out;
}

Matrix vstack(Index cols, std::initializer_list<const Matrix*> blocks)
{
    Index rows = 0;
    for (const Matrix* b : blocks)
    {
        if (b->rows() > 0 && b->cols() != cols)
            throw DimensionError("vstack: block column count mismatch");
        rows += b->rows();
    }
    Matrix out = Matrix::Zero(rows, cols);
    Index at = 0;
    for (const Matrix* b : blocks)
    {
        if (b->rows() > 0)
            out.middleRows(at, b->rows()) = *b;
        at += b->rows();
    }
    return out;
}

Vector vcat(std::initializer_list<const Vector*> parts)
{
    Index n = 0;
    for (const Vector* p : parts)
        n += p->size();
    Vector out(n);
    Index at = 0;
    for (const Vector* p : parts)
    {
        out.segment(at, p->size()) = *p;
        at += p->size();
    }
    return out;
}

Matrix blkdiag(const Matrix& a, const Matrix& b)
{
    Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.bottomRightCorner(b.rows(), b.cols()) = b;
    return out;
}

Matrix blkdiag(const std::vector<Matrix>& blocks)
{
    Index rows = 0, cols = 0;
    for (const auto& b : blocks)
    {
        rows += b.rows();
        cols += b.cols();
    }
    Matrix out = Matrix::Zero(rows, cols);
    Index r = 0, c = 0;
    for (const auto& b : blocks)
    {
        out.block(r, c, b.rows(), b.cols()) = b;
        r += b.rows();
        c += b.cols();
    }
    return out;
}

Matrix pinv(const Matrix& m, double rel_cutoff)
{
    if (m.size() == 0)
        return Matrix::Zero(m.cols(), m.rows());
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    const double cutoff = rel_cutoff * (s.size() > 0 ? s(0) : 0.0);
    Vector inv = Vector::Zero(s.size());
    for (Index i = 0; i < s.size(); ++i)
        if (s(i) > cutoff && s(i) > 0.0)
            inv(i) = 1.0 / s(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Vector singular_values(const Matrix& m)
{
    if (m.size() == 0)
        return Vector(0);
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues();
}

Index numerical_rank(const Matrix& m, double rel_threshold)
{
    const Vector s = singular_values(m);
    if (s.size() == 0 || s(0) <= 0.0)
        return 0;
    Index r = 0;
    for (Index i = 0; i < s.size(); ++i)
        if (s(i) > rel_threshold * s(0))
            ++r;
    return r;
}

Matrix null_space(const Matrix& m, double rel_threshold)
{
    const Index n = m.cols();
    if (m.rows() == 0)
        return Matrix::Identity(n, n);
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    const Vector& s = svd.singularValues();
    Index r = 0;
    for (Index i = 0; i < s.size(); ++i)
        if (s(i) > rel_threshold * s(0))
            ++r;
    return svd.matrixV().rightCols(n - r);
}

} // namespace hzreach::detail
