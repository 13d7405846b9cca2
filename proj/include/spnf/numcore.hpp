#pragma once
// Dense matrix plumbing: tolerance policy, error taxonomy, rank/kernel and
// inverse decisions shared by every Jordan-structure computation.
#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace spnf {

using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using cplx = std::complex<double>;

struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct SingularMatrix : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotSymplectic : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ToleranceAmbiguity : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotAnEigenvalue : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalDegeneracy : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateGenerator : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateChain : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct GenerationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// contract violations that contradict the underlying mathematics
struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

struct ToleranceConfig {
    double rank_rel_tol = 1e-9;    // singular-value threshold, relative to sigma_max
    double eig_cluster_tol = 1e-7; // base eigenvalue clustering radius
    double circle_snap_tol = 1e-7; // snap-to-unit-circle / snap-to-(+-1) radius
    double residual_tol = 1e-8;    // acceptance threshold for residual checks

    // throws InvalidInput unless all four are positive and
    // rank_rel_tol <= eig_cluster_tol
    void validate() const;
};

// rank = #{singular values > rank_rel_tol * sigma_max} (threshold against 1
// for the zero matrix); kernel columns are orthonormal right singular vectors.
struct RankKernel {
    Eigen::Index rank = 0;
    CMat kernel;
};
struct RankKernelReal {
    Eigen::Index rank = 0;
    Mat kernel;
};
RankKernel rank_kernel(const CMat& M, const ToleranceConfig& cfg);
RankKernelReal rank_kernel(const Mat& M, const ToleranceConfig& cfg);

// SVD-based inverse; throws SingularMatrix when sigma_min < rank_rel_tol * sigma_max
CMat solve_inverse(const CMat& M, const ToleranceConfig& cfg);
Mat solve_inverse(const Mat& M, const ToleranceConfig& cfg);

// standard form [[0, I], [-I, 0]] on 2n coordinates
Mat omega0(Eigen::Index two_n);

// ||A^T Omega0 A - Omega0||_F
double symplecticity_residual(const Mat& A);

bool all_finite(const Mat& M);
bool all_finite(const CMat& M);

}  // namespace spnf
