#include "spnf/numcore.hpp"

#include <Eigen/SVD>

namespace spnf {

void ToleranceConfig::validate() const {
    if (!(rank_rel_tol > 0) || !(eig_cluster_tol > 0) || !(circle_snap_tol > 0) ||
        !(residual_tol > 0))
        throw InvalidInput("ToleranceConfig: all tolerances must be strictly positive");
    if (rank_rel_tol > eig_cluster_tol)
        throw InvalidInput("ToleranceConfig: rank_rel_tol must not exceed eig_cluster_tol");
}

bool all_finite(const Mat& M) { return M.allFinite(); }
bool all_finite(const CMat& M) { return M.real().allFinite() && M.imag().allFinite(); }

namespace {

template <typename Matrix>
auto rank_kernel_impl(const Matrix& M, const ToleranceConfig& cfg) {
    cfg.validate();
    if (M.size() == 0) throw InvalidInput("rank_kernel: empty matrix");
    if (!all_finite(M)) throw InvalidInput("rank_kernel: non-finite entries");
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 0.0;
    double thresh = cfg.rank_rel_tol * (smax > 0 ? smax : 1.0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > thresh) ++rank;
    Matrix kernel = svd.matrixV().rightCols(M.cols() - rank);
    return std::make_pair(rank, kernel);
}

template <typename Matrix>
Matrix solve_inverse_impl(const Matrix& M, const ToleranceConfig& cfg) {
    cfg.validate();
    if (M.rows() != M.cols()) throw InvalidInput("solve_inverse: matrix not square");
    if (M.size() == 0) throw InvalidInput("solve_inverse: empty matrix");
    if (!all_finite(M)) throw InvalidInput("solve_inverse: non-finite entries");
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double smax = sv(0);
    if (smax == 0.0 || sv(sv.size() - 1) < cfg.rank_rel_tol * smax)
        throw SingularMatrix("solve_inverse: singular to working tolerance");
    return svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().adjoint();
}

}  // namespace

RankKernel rank_kernel(const CMat& M, const ToleranceConfig& cfg) {
    auto [rank, kernel] = rank_kernel_impl(M, cfg);
    return RankKernel{rank, std::move(kernel)};
}

RankKernelReal rank_kernel(const Mat& M, const ToleranceConfig& cfg) {
    auto [rank, kernel] = rank_kernel_impl(M, cfg);
    return RankKernelReal{rank, std::move(kernel)};
}

CMat solve_inverse(const CMat& M, const ToleranceConfig& cfg) {
    return solve_inverse_impl(M, cfg);
}
Mat solve_inverse(const Mat& M, const ToleranceConfig& cfg) {
    return solve_inverse_impl(M, cfg);
}

Mat omega0(Eigen::Index two_n) {
    if (two_n <= 0 || two_n % 2 != 0) throw InvalidInput("omega0: dimension must be even positive");
    Eigen::Index n = two_n / 2;
    Mat W = Mat::Zero(two_n, two_n);
    W.topRightCorner(n, n) = Mat::Identity(n, n);
    W.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
    return W;
}

double symplecticity_residual(const Mat& A) {
    if (A.rows() != A.cols() || A.rows() % 2 != 0)
        throw InvalidInput("symplecticity_residual: matrix must be square of even dimension");
    Mat W = omega0(A.rows());
    return (A.transpose() * W * A - W).norm();
}

}  // namespace spnf
