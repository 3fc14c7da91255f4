#pragma once

#include "hzreach/ident.hpp"
#include "hzreach/oracle.hpp"

#include <vector>

namespace hzreach
{

/// Reachable set at one step: the union and its restriction to every region.
struct ReachFamily
{
    int step = 0;
    HybridZonotope union_set;
    std::vector<HybridZonotope> per_mode;
    std::vector<char> empty; // per mode
};

enum class UnionStrategy
{
    /// one copy of the previous set's factors, one selector binary per step (linear growth)
    selector,
    /// left fold of the pairwise union over the propagated branches (copies every branch)
    fold,
};

struct ReachOptions
{
    UnionStrategy union_strategy = UnionStrategy::selector;
    /// replace each new union set by its interval hull (escape hatch for long horizons)
    bool hull_relaxation = false;
    oracle::Options oracle;
};

/// z intersected with every inequality of the region, one halfspace at a time.
HybridZonotope restrict_to_region(const HybridZonotope& z, const PolyhedralRegion& region);

/**
 * One-step image M (state_set x input_set) (+) W of one mode; HybridZonotope::empty when the
 * state set is empty.
 */
HybridZonotope propagate_mode(const MatrixZonotope& model, const HybridZonotope& state_set,
                              const HybridZonotope& input_set, const Zonotope& noise,
                              const oracle::Options& opt = {});

/// Family for a given union set: per-region restrictions and their emptiness flags.
ReachFamily make_family(int step, const HybridZonotope& union_set, const std::vector<PolyhedralRegion>& regions,
                        const oracle::Options& opt = {});

/**
 * Propagates every nonempty mode of the family and returns the family of the union.
 *
 * With the selector strategy the union
 *   U_a ( C_a (P_a x U) (+) box(r_a) ) (+) W,   P_a = R_k cap C_a,
 * is encoded over a single copy of the factors of R_k x U: the point p = (x, u) is split
 * into per-branch copies z_a that are forced to zero unless a's selector is on, and the
 * selected copy must satisfy a's region inequalities. The represented set is the same as
 * with the fold strategy. Per-mode input sets that differ fall back to the fold.
 */
ReachFamily reach_step(const ReachFamily& family, const std::vector<MatrixZonotope>& models,
                       const std::vector<PolyhedralRegion>& regions, const std::vector<HybridZonotope>& input_sets,
                       const Zonotope& noise, const ReachOptions& opt = {});

/// N steps from the initial set; returns N+1 families, the first holding the initial set.
std::vector<ReachFamily> reach_horizon(const HybridZonotope& initial, const std::vector<MatrixZonotope>& models,
                                       const std::vector<PolyhedralRegion>& regions,
                                       const std::vector<HybridZonotope>& input_sets, const Zonotope& noise, int n,
                                       const ReachOptions& opt = {});

/// Singleton model sets [A_i B_i] from the known dynamics.
std::vector<MatrixZonotope> known_models(const PwaSystemSpec& spec);

/// Model-based baseline: reach_horizon with the known dynamics.
std::vector<ReachFamily> reach_horizon_known(const HybridZonotope& initial, const PwaSystemSpec& spec,
                                             const std::vector<HybridZonotope>& input_sets, int n,
                                             const ReachOptions& opt = {});

} // namespace hzreach
