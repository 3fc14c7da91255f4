#pragma once

#include "hzreach/common.hpp"

#include <initializer_list>
#include <vector>

namespace hzreach::detail
{

/// Horizontal concatenation; every block must have `rows` rows (0-column blocks allowed).
Matrix hstack(Index rows, std::initializer_list<const Matrix*> blocks);

/// Vertical concatenation; every block must have `cols` columns (0-row blocks allowed).
Matrix vstack(Index cols, std::initializer_list<const Matrix*> blocks);

Vector vcat(std::initializer_list<const Vector*> parts);

Matrix blkdiag(const Matrix& a, const Matrix& b);
Matrix blkdiag(const std::vector<Matrix>& blocks);

/// Moore-Penrose pseudoinverse by SVD; singular values below rel_cutoff * sigma_max are dropped.
Matrix pinv(const Matrix& m, double rel_cutoff = 1e-10);

/// Number of singular values above rel_threshold * sigma_max.
Index numerical_rank(const Matrix& m, double rel_threshold = 1e-8);

/// Singular values in descending order.
Vector singular_values(const Matrix& m);

/// Orthonormal basis of the null space of m (columns), via full SVD.
Matrix null_space(const Matrix& m, double rel_threshold = 1e-10);

} // namespace hzreach::detail
