#pragma once

#include "hzreach/sets.hpp"

#include <vector>

namespace hzreach
{

/// Known dynamics x+ = A x + B u of one mode (baselines and simulation only).
struct ModeDynamics
{
    Matrix a;
    Matrix b;
};

/// Sensor y = C x + v with v in noise.
struct Sensor
{
    Matrix c;
    Zonotope noise;
};

struct PwaSystemSpec
{
    std::vector<ModeDynamics> modes; // may be empty when only data is available
    std::vector<PolyhedralRegion> regions;
    Zonotope noise_w;
    std::vector<Sensor> sensors;

    Index state_dim() const { return noise_w.dim(); }
    Index input_dim() const { return modes.empty() ? 0 : modes.front().b.cols(); }
    /// Lowest index of a region containing x (closed regions), or -1.
    int region_of(const Vector& x, double tol = kTolerance) const;
    /// Throws DimensionError when modes, regions, noise and sensors disagree.
    void validate() const;
};

/// Stacked sensor matrix, noise generators (block diagonal) and noise centers, in sensor order.
Matrix stacked_output_matrix(const std::vector<Sensor>& sensors);
Matrix stacked_noise_generators(const std::vector<Sensor>& sensors);
Vector stacked_noise_center(const std::vector<Sensor>& sensors);

/// One recorded transition; y / y_next hold the stacked outputs when present.
struct Transition
{
    Vector x;
    Vector u;
    Vector x_next;
    Vector y;
    Vector y_next;
};

/// Per-mode data matrices: columns are transitions whose source state lies in the mode's region.
struct ModeDataset
{
    Matrix x_plus;
    Matrix x_minus;
    Matrix u_minus;
    Matrix y_plus; // 0 rows when no outputs were recorded
    Matrix y_minus;
    int mode_index = 0;

    Index size() const { return x_minus.cols(); }
};

/**
 * Splits transitions by the region of their source state; boundary ties go to the lowest
 * region index. Throws IdentificationError for a state outside every region or a mode
 * that receives no data.
 */
std::vector<ModeDataset> partition_trajectories(const std::vector<Transition>& raw,
                                                const std::vector<PolyhedralRegion>& regions,
                                                double tol = kTolerance);

/// Matrix zonotope of noise sequences [w(0) ... w(T-1)], one generator per (slot, noise generator).
MatrixZonotope noise_matrix_zonotope(const Zonotope& noise, Index horizon);

/**
 * Set of [A B] consistent with the data: (X+ - Mw) D^+ with D = [X-; U-].
 * Throws RankError unless D has full row rank.
 */
MatrixZonotope build_model_set(const ModeDataset& d, const MatrixZonotope& mw);

/**
 * Model set from outputs. States are reconstructed as X^ = C^+ (Y - c_v) with the stacked
 * sensor matrix C; the reconstruction error C^+ (v - c_v) enters the subtracted matrix
 * zonotope twice: as is for X^+, and through A for X^-, bounded by an axis-aligned box of
 * radius a_bound * ||C^+ G_v||_inf where a_bound >= ||A||_inf.
 */
MatrixZonotope build_model_set_from_outputs(const ModeDataset& d, const std::vector<Sensor>& sensors,
                                            const MatrixZonotope& mw, double a_bound);

/// Matrix zonotope of the reconstruction noise that build_model_set_from_outputs subtracts.
MatrixZonotope output_noise_matrix_zonotope(const std::vector<Sensor>& sensors, const MatrixZonotope& mw,
                                            double a_bound);

/// Partitions the transitions and builds one state-based model set per mode.
std::vector<MatrixZonotope> identify_models(const std::vector<Transition>& raw, const PwaSystemSpec& spec);

/// Partitions the transitions and builds one output-based model set per mode.
std::vector<MatrixZonotope> identify_models_from_outputs(const std::vector<Transition>& raw,
                                                         const PwaSystemSpec& spec, double a_bound);

} // namespace hzreach
