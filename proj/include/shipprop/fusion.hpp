#pragma once

#include <string>
#include <vector>

#include "shipprop/raster.hpp"

namespace shipprop {

/// Dense square matrix, row-major. Only used for the tiny K x K problems here.
class SquareMatrix {
public:
    explicit SquareMatrix(int n = 0) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {}

    int size() const noexcept { return n_; }
    double operator()(int r, int c) const { return a_[static_cast<std::size_t>(r) * n_ + c]; }
    double& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * n_ + c]; }

    static SquareMatrix identity(int n);

private:
    int n_;
    std::vector<double> a_;
};

struct SymmetricEigen {
    std::vector<double> values;                // descending
    std::vector<std::vector<double>> vectors;  // vectors[i] pairs with values[i]
    int sweeps = 0;
};

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix. Sweeps until the
/// off-diagonal Frobenius norm drops below 1e-12 relative to the matrix norm.
SymmetricEigen jacobi_eigen(const SquareMatrix& symmetric);

// ---------------------------------------------------------------------------
// Pan-sharpening

/// Least-squares coefficients of pan_low ~ sum_k weights[k] * ms_k + intercept.
struct SyntheticPanFit {
    std::vector<double> weights;
    double intercept = 0.0;
};

/// Mean over non-overlapping scale x scale blocks.
Band box_downsample(const Band& band, int scale);

/// Bilinear upsampling by an integer factor using pixel-centre alignment and
/// edge clamping.
Band bilinear_upsample(const Band& band, int scale);

SyntheticPanFit fit_synthetic_pan(const Band& pan_low, const MultibandImage& ms);

/// Ratio-injection pan-sharpening: fits a synthetic pan from the MS bands by
/// least squares at MS resolution, then scales each upsampled MS band by
/// pan / synthetic_pan. `pan` must be exactly `scale` times the MS size.
MultibandImage pansharpen(const Band& pan, const MultibandImage& ms, int scale);

// ---------------------------------------------------------------------------
// Reflectance contrast

struct ContrastReport {
    std::string band_role;
    double m_t = 0.0;   // mean ship reflectance
    double q1_t = 0.0;  // first-quartile ship reflectance
    double m_b = 0.0;   // mean background reflectance
    double c_m = 0.0;   // m_t / m_b
    double c_q1 = 0.0;  // q1_t / m_b
};

/// First quartile by linear interpolation at zero-based rank 0.25 * (n - 1).
double first_quartile(std::vector<double> values);

ContrastReport contrast_report(const Band& band, const BinaryMask& ship_mask, const BinaryMask& background_mask,
                               std::string band_role = {});

// ---------------------------------------------------------------------------
// PCA

struct PcaModel {
    std::vector<double> mean;
    std::vector<double> eigenvalues;                // descending, >= 0
    std::vector<std::vector<double>> eigenvectors;  // orthonormal, paired with eigenvalues
    SquareMatrix covariance;

    std::size_t dimension() const noexcept { return mean.size(); }
};

/// Population covariance of the per-pixel band vectors, diagonalised with
/// Jacobi. Each eigenvector's largest-magnitude component is made positive.
PcaModel fit_pca(const MultibandImage& image);

/// Projects each raw pixel vector onto the leading eigenvector. The mean is
/// not subtracted.
Band first_component(const MultibandImage& image, const PcaModel& model);

}  // namespace shipprop
