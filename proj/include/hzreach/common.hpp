#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace hzreach
{

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// absolute tolerance for floating comparisons unless an operation states otherwise
inline constexpr double kTolerance = 1e-9;

class DimensionError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

/// Raised by the oracle when a query would enumerate more binary factors than allowed.
class EnumerationCapError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class EmptySetError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Identification failures: rank deficiency, empty modes, malformed trajectories.
class IdentificationError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class RankError : public IdentificationError
{
  public:
    using IdentificationError::IdentificationError;
};

/// A corrected estimation set turned out empty: the data contradicts the noise bounds.
class EstimationInfeasibleError : public std::runtime_error
{
  public:
    EstimationInfeasibleError(int step, const std::string& what)
        : std::runtime_error(what), step_(step)
    {
    }
    int step() const { return step_; }

  private:
    int step_;
};

/// Axis-aligned box [lower, upper].
struct Box
{
    Vector lower;
    Vector upper;

    Vector midpoint() const { return 0.5 * (lower + upper); }
    Vector radius() const { return 0.5 * (upper - lower); }
    /// componentwise max(|lower|, |upper|)
    Vector magnitude() const { return lower.cwiseAbs().cwiseMax(upper.cwiseAbs()); }
};

} // namespace hzreach
