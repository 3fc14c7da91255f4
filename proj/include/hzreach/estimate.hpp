#pragma once

#include "hzreach/reach.hpp"

#include <cstdint>
#include <vector>

namespace hzreach
{

/// One sensor's reading y^j at step k.
struct SensorReading
{
    int sensor = 0;
    int step = 0;
    Vector y;
};

/// Applied input and all readings of one step.
struct MeasurementStep
{
    int step = 0;
    Vector u; // nan entries when the input is not recorded
    std::vector<SensorReading> readings;
};

/// States consistent with one reading: { x : C x in y - Z_v } cut to a null-space box of half-width M.
struct MeasurementZonotope
{
    Vector center;
    Matrix generators;

    Zonotope zonotope() const { return Zonotope(center, generators); }
};

enum class UpdateMethod
{
    rm,
    in,
    gi,
};

const char* update_method_name(UpdateMethod m);

/**
 * SVD C = P1 S V1' (full row rank): center V1 S^-1 P1' (y - c_v), generators
 * [V1 S^-1 P1' G_v, M V2]. Throws RankError for a rank-deficient C and
 * std::invalid_argument for M <= 0.
 */
MeasurementZonotope reverse_map_zonotope(const Sensor& sensor, const Vector& y, double m);

/// The per-step null-space extent policy: 2 max|IH(pred)| + 1.
double default_null_space_extent(const HybridZonotope& pred, const oracle::Options& opt = {});

/// pred intersected with every reverse-mapped measurement zonotope, in reading order.
HybridZonotope update_rm(const HybridZonotope& pred, const std::vector<SensorReading>& readings,
                         const std::vector<Sensor>& sensors, double m);

struct ImplicitUpdate
{
    HybridZonotope set;
    /// stacked weights [lambda^1 ... lambda^q], n x sum p_j, in reading order
    Matrix lambda;
    /// max-abs entry of the cost gradient at lambda
    double stationarity = 0.0;
    /// condition number of C P C' + V
    double condition = 0.0;
};

/**
 * Implicit intersection. The weights minimise ||G^c_IN||_F^2 + alpha ||G^b_IN||_F^2; with
 * P = G^c G^c' + alpha G^b G^b' and V = blkdiag(G_v,j G_v,j') the cost is
 *   tr((I - L C) P (I - L C)') + tr(L V L'),
 * stationary at L (C P C' + V) = P C', solved by pseudoinverse.
 */
ImplicitUpdate update_in_detail(const HybridZonotope& pred, const std::vector<SensorReading>& readings,
                                const std::vector<Sensor>& sensors, double alpha);
HybridZonotope update_in(const HybridZonotope& pred, const std::vector<SensorReading>& readings,
                         const std::vector<Sensor>& sensors, double alpha);
/// Implicit intersection with given stacked weights (no optimisation).
HybridZonotope update_in_with_weights(const HybridZonotope& pred, const std::vector<SensorReading>& readings,
                                      const std::vector<Sensor>& sensors, const Matrix& lambda);
/// Cost gradient -2 (I - L C) P C' + 2 L V at the stacked weights.
Matrix implicit_gradient(const HybridZonotope& pred, const std::vector<SensorReading>& readings,
                         const std::vector<Sensor>& sensors, double alpha, const Matrix& lambda);

/// pred cap_{C^j} (y^j - Z_v,j) for every reading.
HybridZonotope update_gi(const HybridZonotope& pred, const std::vector<SensorReading>& readings,
                         const std::vector<Sensor>& sensors);

/// One prediction step: reach_step from the family of the previous corrected set.
ReachFamily time_update(const HybridZonotope& prev, const std::vector<MatrixZonotope>& models_y,
                        const std::vector<PolyhedralRegion>& regions, const std::vector<HybridZonotope>& input_sets,
                        const Zonotope& noise, const ReachOptions& opt = {}, int step = 0);

struct EstimationOptions
{
    double alpha = 1.0;
    /// null-space extent for RM; <= 0 selects default_null_space_extent per step
    double m_value = 0.0;
    ReachOptions reach;
};

/// Corrected sets of one method, index k = step k (k = 0 corrects the initial set with y(0)).
struct EstimationRun
{
    UpdateMethod method = UpdateMethod::gi;
    std::vector<HybridZonotope> corrected;
    std::vector<double> m_values;     // RM
    std::vector<double> stationarity; // IN
};

/**
 * Online estimation over `steps` steps after the initial correction: alternates the time
 * update (recorded inputs become singleton input sets) and the chosen measurement update.
 * Each method runs its own chain. Throws EstimationInfeasibleError at the first empty
 * corrected set.
 */
std::vector<EstimationRun> estimate_online(const HybridZonotope& x0, const std::vector<MeasurementStep>& stream,
                                           const std::vector<MatrixZonotope>& models_y,
                                           const std::vector<PolyhedralRegion>& regions,
                                           const std::vector<Sensor>& sensors,
                                           const std::vector<HybridZonotope>& input_sets, const Zonotope& noise,
                                           const std::vector<UpdateMethod>& methods, int steps,
                                           const EstimationOptions& opt = {});

struct EquivalenceReport
{
    double max_gap = 0.0;
    int samples = 0;
    int a_in_b = 0;
    int b_in_a = 0;

    bool equivalent(double tol) const { return max_gap <= tol && a_in_b == samples && b_in_a == samples; }
};

/// Support gap over evenly spread directions and mutual containment of sampled points.
EquivalenceReport equivalence_report(const HybridZonotope& a, const HybridZonotope& b, int directions, double tol,
                                     int samples = 20, std::uint64_t seed = 1, const oracle::Options& opt = {});

} // namespace hzreach
