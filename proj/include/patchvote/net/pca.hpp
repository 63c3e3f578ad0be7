// patchvote/net/pca.hpp — PCA baseline regressor.
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "patchvote/core/errors.hpp"
#include "patchvote/core/rng.hpp"
#include "patchvote/patch/patch.hpp"

namespace pv {

/// Mean + top-F eigenvectors (rows of `basis`) of the sample covariance,
/// C = (1/N) sum (x - mean)(x - mean)^T, in double precision.
struct PcaModel {
    int F = 0;
    Eigen::VectorXd mean;   // 4096
    Eigen::MatrixXd basis;  // F x 4096, orthonormal rows, descending eigenvalue

    Eigen::VectorXd encode(const Eigen::VectorXd& x) const { return basis * (x - mean); }
    Eigen::VectorXd reconstruct(const Eigen::VectorXd& code) const {
        return basis.transpose() * code + mean;
    }
};

/// Fits PCA on flattened 4096-vectors. Uses the Gram-matrix route when the
/// sample count is below the ambient dimension, which keeps the fit tractable
/// while giving the exact same top eigenpairs.
inline PcaModel pca_fit(const std::vector<Patch>& patches, int F) {
    const int n = static_cast<int>(patches.size());
    const int d = Patch::kValues;
    if (F < 1) throw ConfigError("pca_fit: F must be positive");
    if (n < F) throw ConfigError("pca_fit: fewer samples than F (rank deficient)");

    Eigen::MatrixXd X(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) X(i, j) = patches[i].data[j];

    PcaModel model;
    model.F = F;
    model.mean = X.colwise().mean();
    X.rowwise() -= model.mean.transpose();

    model.basis.resize(F, d);
    int filled = 0;

    if (n < d) {
        const Eigen::MatrixXd gram = X * X.transpose() / n;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
        if (es.info() != Eigen::Success) throw ConfigError("pca_fit: eigensolver failed");
        const double lmax = std::max(es.eigenvalues().maxCoeff(), 0.0);
        // Eigen returns ascending order; take from the back.
        for (int j = n - 1; j >= 0 && filled < F; --j) {
            const double lambda = es.eigenvalues()(j);
            if (lambda <= lmax * 1e-12 || lambda <= 0.0) break;
            model.basis.row(filled++) =
                (X.transpose() * es.eigenvectors().col(j)).transpose() / std::sqrt(n * lambda);
        }
    } else {
        const Eigen::MatrixXd cov = X.transpose() * X / n;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
        if (es.info() != Eigen::Success) throw ConfigError("pca_fit: eigensolver failed");
        for (int j = d - 1; j >= d - F; --j) model.basis.row(filled++) = es.eigenvectors().col(j);
    }

    // Rank-deficient data: complete the basis with orthonormalized fill-ins so
    // the projection still has F rows (they carry no variance).
    Rng rng(0x9CA5EEDull);
    while (filled < F) {
        Eigen::VectorXd v(d);
        for (int j = 0; j < d; ++j) v(j) = rng.normal();
        for (int r = 0; r < filled; ++r) v -= model.basis.row(r).dot(v) * model.basis.row(r).transpose();
        const double norm = v.norm();
        if (norm < 1e-8) continue;
        model.basis.row(filled++) = v.transpose() / norm;
    }
    return model;
}

}  // namespace pv
