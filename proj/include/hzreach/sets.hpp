#pragma once

#include "hzreach/common.hpp"

#include <optional>
#include <vector>

namespace hzreach
{

/// Zonotope <center, generators> = { center + G xi : xi in [-1,1]^g }.
class Zonotope
{
  public:
    Zonotope() = default;
    Zonotope(Vector center, Matrix generators);

    static Zonotope point(const Vector& c);
    /// Axis-aligned box with the given center and nonnegative radius; zero radii produce no generator.
    static Zonotope box(const Vector& center, const Vector& radius);

    const Vector& center() const { return center_; }
    const Matrix& generators() const { return generators_; }
    Index dim() const { return center_.size(); }
    Index num_generators() const { return generators_.cols(); }

  private:
    Vector center_;
    Matrix generators_;
};

/**
 * Hybrid zonotope
 *   { Gc xc + Gb xb + c : xc in [-1,1]^ng, xb in {-1,1}^nb, Ac xc + Ab xb = b }.
 *
 * Immutable after construction. Zero-sized blocks are legal everywhere.
 */
class HybridZonotope
{
  public:
    HybridZonotope() = default;
    HybridZonotope(Matrix gc, Matrix gb, Vector c, Matrix ac, Matrix ab, Vector b);

    /// Canonical empty set in R^n: no factors and the constraint 0 = 1.
    static HybridZonotope empty(Index n);

    const Matrix& gc() const { return gc_; }
    const Matrix& gb() const { return gb_; }
    const Vector& center() const { return c_; }
    const Matrix& ac() const { return ac_; }
    const Matrix& ab() const { return ab_; }
    const Vector& b() const { return b_; }

    Index dim() const { return c_.size(); }
    Index num_continuous() const { return gc_.cols(); }
    Index num_binary() const { return gb_.cols(); }
    Index num_constraints() const { return b_.size(); }
    /// generators + constraints, the size measure reported by the reach loop
    Index representation_size() const { return num_continuous() + num_binary() + num_constraints(); }

    bool is_zonotope() const { return num_binary() == 0 && num_constraints() == 0; }

  private:
    Matrix gc_;
    Matrix gb_;
    Vector c_;
    Matrix ac_;
    Matrix ab_;
    Vector b_;
};

/// { center + sum_j beta_j * generators[j] : beta in [-1,1]^g } in matrix space.
class MatrixZonotope
{
  public:
    MatrixZonotope() = default;
    MatrixZonotope(Matrix center, std::vector<Matrix> generators);

    const Matrix& center() const { return center_; }
    const std::vector<Matrix>& generators() const { return generators_; }
    Index rows() const { return center_.rows(); }
    Index cols() const { return center_.cols(); }
    Index num_generators() const { return static_cast<Index>(generators_.size()); }

    /// Concatenate generators and add centers.
    MatrixZonotope operator+(const MatrixZonotope& other) const;
    /// The set -M = <-C, {-G_j}>.
    MatrixZonotope operator-() const;

  private:
    Matrix center_;
    std::vector<Matrix> generators_;
};

/// { x : l' R x <= rho }; an empty map means the identity.
struct Halfspace
{
    Vector normal;
    double offset = 0.0;
    Matrix map;

    Halfspace() = default;
    Halfspace(Vector l, double rho, Matrix r = Matrix());
};

/// { x : L x <= rho }.
class PolyhedralRegion
{
  public:
    PolyhedralRegion() = default;
    PolyhedralRegion(Matrix l, Vector rho);

    /// Region with no inequalities (the whole space).
    static PolyhedralRegion whole_space(Index n);

    const Matrix& l() const { return l_; }
    const Vector& rho() const { return rho_; }
    Index dim() const { return l_.cols(); }
    Index num_rows() const { return l_.rows(); }

    bool contains(const Vector& x, double tol = kTolerance) const;
    Halfspace row(Index j) const;

  private:
    Matrix l_;
    Vector rho_;
};

HybridZonotope lift_zonotope(const Zonotope& z);

/// Matrix-zonotope membership: is Y = C + sum beta_j G_j for some beta in the box (LP)?
bool contains(const MatrixZonotope& m, const Matrix& y, double tol = 1e-8);

} // namespace hzreach
