#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include "patchvote/core/rng.hpp"
#include "patchvote/net/pca.hpp"

using namespace pv;

namespace {

std::vector<Patch> random_patches(int n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Patch> out(n);
    for (auto& p : out) {
        for (auto& v : p.data) v = static_cast<float>(rng.uniform(-1, 1));
        p.valid = true;
    }
    return out;
}

double reconstruction_sse(const PcaModel& model, const std::vector<Patch>& patches) {
    double sse = 0.0;
    for (const auto& p : patches) {
        Eigen::VectorXd x(Patch::kValues);
        for (int i = 0; i < Patch::kValues; ++i) x(i) = p.data[i];
        sse += (model.reconstruct(model.encode(x)) - x).squaredNorm();
    }
    return sse;
}

/// Cyclic Jacobi eigenvalues of a small symmetric matrix; written here so the
/// spectrum comes from a code path fully independent of pca_fit.
std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd A) {
    const int n = static_cast<int>(A.rows());
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
        if (off < 1e-24) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(A(p, q)) < 1e-300) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
                const double t =
                    (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = A(i, i);
    std::sort(ev.begin(), ev.end(), std::greater<double>());
    return ev;
}

}  // namespace

TEST_CASE("a complete basis reconstructs the training data exactly") {
    const auto patches = random_patches(60, 101);
    const PcaModel model = pca_fit(patches, 60);
    CHECK(reconstruction_sse(model, patches) / 60.0 < 1e-8);
}

TEST_CASE("the mean patch encodes to the zero vector") {
    const auto patches = random_patches(40, 103);
    const PcaModel model = pca_fit(patches, 8);
    CHECK(model.encode(model.mean).norm() == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("pca_fit rejects fewer samples than components") {
    const auto patches = random_patches(10, 105);
    CHECK_THROWS_AS(pca_fit(patches, 11), ConfigError);
    CHECK_THROWS_AS(pca_fit(patches, 0), ConfigError);
}

TEST_CASE("reconstruction error equals the discarded covariance eigenvalues") {
    // 50-sample toy set; oracle spectrum from a hand-rolled Jacobi solver on
    // the Gram matrix (eigenvalues of C are eig(Gram)/N plus zeros).
    const int n = 50, F = 12;
    const auto patches = random_patches(n, 107);

    Eigen::MatrixXd X(n, Patch::kValues);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < Patch::kValues; ++j) X(i, j) = patches[i].data[j];
    const Eigen::RowVectorXd mean = X.colwise().mean();
    X.rowwise() -= mean;

    Eigen::MatrixXd gram(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) gram(i, j) = X.row(i).dot(X.row(j));
    const auto ev = jacobi_eigenvalues(gram);

    double discarded = 0.0;
    for (int j = F; j < n; ++j) discarded += std::max(ev[j], 0.0) / n;

    const PcaModel model = pca_fit(patches, F);
    const double mean_sse = reconstruction_sse(model, patches) / n;
    CHECK(mean_sse == Catch::Approx(discarded).epsilon(1e-6));
}

TEST_CASE("pca beats random orthonormal projections of the same rank") {
    const int n = 80, F = 6;
    const auto patches = random_patches(n, 109);
    const PcaModel model = pca_fit(patches, F);
    const double pca_err = reconstruction_sse(model, patches);

    Eigen::MatrixXd X(n, Patch::kValues);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < Patch::kValues; ++j) X(i, j) = patches[i].data[j];
    const Eigen::RowVectorXd mean = X.colwise().mean();
    X.rowwise() -= mean;

    Rng rng(211);
    for (int trial = 0; trial < 100; ++trial) {
        // Random rank-F orthonormal basis via Gram-Schmidt.
        Eigen::MatrixXd B(F, Patch::kValues);
        for (int r = 0; r < F; ++r) {
            Eigen::VectorXd v(Patch::kValues);
            for (int j = 0; j < Patch::kValues; ++j) v(j) = rng.normal();
            for (int k = 0; k < r; ++k) v -= B.row(k).dot(v) * B.row(k).transpose();
            B.row(r) = v.transpose() / v.norm();
        }
        const Eigen::MatrixXd codes = X * B.transpose();
        const double err = (X - codes * B).squaredNorm();
        REQUIRE(pca_err <= err + 1e-9);
    }
}

TEST_CASE("basis rows are orthonormal") {
    const auto patches = random_patches(30, 113);
    const PcaModel model = pca_fit(patches, 20);
    const Eigen::MatrixXd gram = model.basis * model.basis.transpose();
    CHECK((gram - Eigen::MatrixXd::Identity(20, 20)).cwiseAbs().maxCoeff() < 1e-9);
}
