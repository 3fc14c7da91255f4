#pragma once

#include "hzreach/common.hpp"

namespace hzreach::lp
{

enum class Status
{
    optimal,
    infeasible,
    iteration_limit,
};

/// minimize cost' x  s.t.  A x = b,  lower <= x <= upper   (all bounds finite)
struct Problem
{
    Matrix A;
    Vector b;
    Vector lower;
    Vector upper;
    Vector cost; // empty means pure feasibility
};

struct Options
{
    double feasibility_tol = 1e-9;
    double optimality_tol = 1e-10;
    double pivot_tol = 1e-10;
    int max_iterations = 200000;
    // consecutive degenerate pivots before switching to Bland's rule
    int degenerate_switch = 25;
};

struct Result
{
    Status status = Status::infeasible;
    double objective = 0.0;
    Vector x;
    double infeasibility = 0.0; // phase-one objective (sum of artificials)
    int iterations = 0;
};

/// Dense bounded-variable primal simplex, two phases, artificial start basis.
Result solve(const Problem& problem, const Options& options = {});

} // namespace hzreach::lp
