#pragma once

#include "hzreach/sets.hpp"

namespace hzreach
{

/// Z1 (+) Z2: generators concatenated, constraints block-diagonal.
HybridZonotope minkowski_sum(const HybridZonotope& z1, const HybridZonotope& z2);

/// Z1 cap_R Z3 = { x in Z1 : R x in Z3 }.
HybridZonotope generalized_intersection(const HybridZonotope& z1, const Matrix& r, const HybridZonotope& z3);

/**
 * Z1 cap { x : l' R x <= rho } with one new continuous factor and one constraint row
 * whose slack coefficient is d_m / 2, where
 *   d_m = rho - l'R c + sum |l'R g_c| + sum |l'R g_b|.
 *
 * When d_m < 0 the halfspace misses the bounding box of Z1 entirely; d_m is clamped to 0
 * so the appended row reads l'R x = rho, which no point of Z1 satisfies.
 */
HybridZonotope halfspace_intersection(const HybridZonotope& z1, const Halfspace& h);

HybridZonotope linear_map(const Matrix& m, const HybridZonotope& z);

HybridZonotope cartesian_product(const HybridZonotope& z1, const HybridZonotope& z2);

/**
 * Exact union with one fresh binary selector s.
 *
 * While s deselects an operand, its continuous factors are pinned to 0 and its binary
 * factors to -1 through slack rows, and its own constraint rows become 0 = 0.
 * Output size: n_g = 3(g1+g2) + q1+q2, n_b = q1+q2+1, n_c = r1+r2 + 2(g1+g2) + q1+q2.
 */
HybridZonotope set_union(const HybridZonotope& z1, const HybridZonotope& z2);

/**
 * Over-approximates { A x : A in M, x in Z }: the center matrix maps Z exactly and each
 * generator contributes the symmetric box bounding G_j * IH(Z). The boxes are axis
 * aligned, so their Minkowski sum is one box with radius sum_j |G_j| * |IH(Z)|.
 */
HybridZonotope matzono_times_set(const MatrixZonotope& m, const HybridZonotope& z, const Box& hull);

/// Same, with IH(Z) taken from the oracle. An empty Z yields the (empty) center map.
HybridZonotope matzono_times_set(const MatrixZonotope& m, const HybridZonotope& z);

/// Radius of the generator box used by matzono_times_set.
Vector matzono_box_radius(const MatrixZonotope& m, const Box& hull);

} // namespace hzreach
