#pragma once

#include "hzreach/sets.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace hzreach::oracle
{

struct Options
{
    /// queries on sets with more binary factors than this raise EnumerationCapError
    int max_binaries = 20;
    /// branch-and-bound node budget per query
    long max_nodes = 1L << 21;
    double lp_tolerance = 1e-9;
};

/// Constrained zonotope obtained by fixing the binary factors of a hybrid zonotope.
struct LeafProblem
{
    Matrix generators;
    Vector center;
    Matrix eq_a;
    Vector eq_b;
};

/// Leaf for the binary assignment xb in {-1,1}^nb: center c + Gb xb, constraints Ac xi = b - Ab xb.
LeafProblem make_leaf(const HybridZonotope& z, const Vector& xb);

/*
 * Exact queries. Binary factors are resolved by depth-first branch and bound over LP
 * relaxations (binaries relaxed to [-1,1]); every answer is certified on a fixed leaf.
 */

bool membership(const HybridZonotope& z, const Vector& x, double tol = 1e-7, const Options& opt = {});

/// max d'x over z, or -infinity when z is empty.
double support(const HybridZonotope& z, const Vector& d, const Options& opt = {});

bool is_empty(const HybridZonotope& z, const Options& opt = {});

/// Componentwise [-h(-e_k), h(e_k)]; nullopt when z is empty.
std::optional<Box> interval_hull(const HybridZonotope& z, const Options& opt = {});

/// All binary assignments whose leaf is nonempty, in lexicographic order (-1 before +1).
std::vector<Vector> feasible_leaves(const HybridZonotope& z, const Options& opt = {});

/**
 * Deterministic member points. A leaf is chosen uniformly among the feasible ones, a factor
 * vector is drawn uniformly from the box and projected onto the leaf's constraints by the
 * least-norm correction; draws leaving the box are rejected and, after repeated rejection,
 * replaced by a random convex combination of LP vertices of the leaf.
 * Throws EmptySetError when z is empty.
 */
std::vector<Vector> sample(const HybridZonotope& z, int count, std::uint64_t seed, const Options& opt = {});

/// Parallel kernels: one query per column, spread over the library threads.
std::vector<double> support_batch(const HybridZonotope& z, const Matrix& directions, const Options& opt = {});
std::vector<char> membership_batch(const HybridZonotope& z, const Matrix& points, double tol = 1e-7,
                                   const Options& opt = {});

/// k unit directions evenly spread on the circle (2-D) or a deterministic spread on the sphere.
Matrix spread_directions(Index n, int count);

/// Brute-force serial enumeration of all 2^nb leaves; kept as the ground truth for tests.
namespace reference
{

bool membership(const HybridZonotope& z, const Vector& x, double tol = 1e-7, const Options& opt = {});
double support(const HybridZonotope& z, const Vector& d, const Options& opt = {});
bool is_empty(const HybridZonotope& z, const Options& opt = {});
std::vector<double> support_batch(const HybridZonotope& z, const Matrix& directions, const Options& opt = {});
std::vector<char> membership_batch(const HybridZonotope& z, const Matrix& points, double tol = 1e-7,
                                   const Options& opt = {});

} // namespace reference

} // namespace hzreach::oracle
