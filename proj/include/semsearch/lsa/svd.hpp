#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>

#include "semsearch/common/errors.hpp"
#include "semsearch/common/random.hpp"

namespace semsearch::lsa {

struct svd_options {
    /// Converged when every wanted triplet has ||A v - s u|| <= tolerance * s_max.
    double tolerance = 1e-8;
    int max_iterations = 1000;
    /// Extra block columns beyond k; 0 picks max(10, k / 5).
    std::size_t oversample = 0;
    std::uint64_t seed = 0x5eed;
};

struct svd_result {
    Eigen::MatrixXd u;  ///< rows x k, orthonormal columns
    Eigen::VectorXd s;  ///< k values, descending
    Eigen::MatrixXd v;  ///< cols x k, orthonormal columns
    int iterations = 0;
    double residual = 0.0;  ///< max_i ||A v_i - s_i u_i|| / s_max
};

namespace detail {

inline Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& y) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
    return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

inline Eigen::MatrixXd gaussian_block(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    rng gen(seed);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double u1 = 1.0 - gen.uniform();
            const double u2 = gen.uniform();
            m(i, j) = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
        }
    }
    return m;
}

}  // namespace detail

/// Rank-k truncated SVD by randomized block subspace iteration with a
/// Rayleigh-Ritz step every sweep.
///
/// Works on any Eigen dense or sparse matrix. The block holds k plus an
/// oversampling margin, so singular values repeated up to that margin are
/// resolved. Throws solver_error (with the residual) if max_iterations pass
/// without convergence.
template <typename Matrix>
svd_result truncated_svd(const Matrix& a, std::size_t k, const svd_options& opts = {}) {
    const auto rows = static_cast<std::size_t>(a.rows());
    const auto cols = static_cast<std::size_t>(a.cols());
    const auto full = std::min(rows, cols);
    if (k == 0 || k > full)
        throw error("truncated_svd: k=" + std::to_string(k) + " must be in [1, " + std::to_string(full) + "]");

    const std::size_t extra = opts.oversample > 0 ? opts.oversample : std::max<std::size_t>(10, k / 5);
    const auto block = static_cast<Eigen::Index>(std::min(full, k + extra));
    const auto kk = static_cast<Eigen::Index>(k);

    Eigen::MatrixXd q = detail::orthonormal_basis(a * detail::gaussian_block(a.cols(), block, opts.seed));
    svd_result out;
    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        const Eigen::MatrixXd p = detail::orthonormal_basis(a.transpose() * q);
        q = detail::orthonormal_basis(a * p);

        // Rayleigh-Ritz on span(q): B = q^T A, with B^T = (A^T q) thin.
        const Eigen::MatrixXd bt = a.transpose() * q;
        Eigen::BDCSVD<Eigen::MatrixXd> small(bt, Eigen::ComputeThinU | Eigen::ComputeThinV);
        out.v = small.matrixU().leftCols(kk);
        out.s = small.singularValues().head(kk);
        out.u = q * small.matrixV().leftCols(kk);
        out.iterations = iter;

        const double s_max = small.singularValues().size() > 0 ? small.singularValues()(0) : 0.0;
        if (s_max == 0.0) {
            out.residual = 0.0;
            break;
        }
        const Eigen::MatrixXd r = a * out.v - out.u * out.s.asDiagonal();
        out.residual = r.colwise().norm().maxCoeff() / s_max;
        if (out.residual <= opts.tolerance) break;
        if (iter == opts.max_iterations)
            throw solver_error("truncated_svd did not converge after " + std::to_string(iter) +
                               " iterations (relative residual " + std::to_string(out.residual) + ")");
    }

    // Sign convention: the largest-magnitude entry of each u column is positive.
    for (Eigen::Index j = 0; j < kk; ++j) {
        Eigen::Index at = 0;
        out.u.col(j).cwiseAbs().maxCoeff(&at);
        if (out.u(at, j) < 0) {
            out.u.col(j) *= -1.0;
            out.v.col(j) *= -1.0;
        }
    }
    return out;
}

}  // namespace semsearch::lsa
