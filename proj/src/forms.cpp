#include "spnf/forms.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace spnf {

namespace {

constexpr double kUnitCircleTol = 1e-9;

bool on_unit_circle(cplx lambda) { return std::abs(std::abs(lambda) - 1.0) <= kUnitCircleTol; }

cplx ipow(cplx z, int k) {
    cplx r = 1.0;
    for (int i = 0; i < k; ++i) r *= z;
    return r;
}

// orthonormal basis of span(E) \cap span(K)^perp (complement representatives
// of the quotient E/K)
CMat quotient_representatives(const CMat& E, const CMat& K, const ToleranceConfig& cfg) {
    CMat M = E;
    if (K.cols() > 0) M -= K * (K.adjoint() * E);
    Eigen::JacobiSVD<CMat> svd(M, Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 0.0;
    double thresh = cfg.rank_rel_tol * (smax > 0 ? smax : 1.0);
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > thresh) ++rank;
    return svd.matrixU().leftCols(rank);
}

CMat apply_power(const CMat& N, const CMat& X, int j) {
    CMat Y = X;
    for (int i = 0; i < j; ++i) Y = N * Y;
    return Y;
}

}  // namespace

cplx omega_pair(const CVec& u, const CVec& v) {
    if (u.size() != v.size() || u.size() % 2 != 0 || u.size() == 0)
        throw InvalidInput("omega_pair: vectors must have equal even length");
    Eigen::Index n = u.size() / 2;
    cplx acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        acc += u(i) * v(n + i) - u(n + i) * v(i);
    return acc;
}

cplx t_form(const Mat& A, cplx lambda, const CVec& v, int i, int j) {
    if (!on_unit_circle(lambda))
        throw InvalidInput("t_form: T_{i,j} is defined only for |lambda| = 1");
    if (A.rows() != A.cols() || A.rows() != v.size())
        throw InvalidInput("t_form: dimension mismatch");
    if (i < 0 || j < 0) throw InvalidInput("t_form: indices must be non-negative");
    CMat I = CMat::Identity(A.rows(), A.cols());
    CMat Nl = A.cast<cplx>() - lambda * I;
    CMat Nc = A.cast<cplx>() - std::conj(lambda) * I;
    CVec x = v;
    for (int r = 0; r < i; ++r) x = Nl * x;
    CVec y = v.conjugate();
    for (int r = 0; r < j; ++r) y = Nc * y;
    return omega_pair(x, y) / (ipow(lambda, i) * ipow(std::conj(lambda), j));
}

FormMatrix q_tilde(const Mat& A, cplx lambda, int j, const ToleranceConfig& cfg) {
    cfg.validate();
    if (j < 1) throw InvalidInput("q_tilde: j must be >= 1");
    CMat I = CMat::Identity(A.rows(), A.cols());
    CMat Nl = A.cast<cplx>() - lambda * I;
    CMat Nm = A.cast<cplx>() - (1.0 / lambda) * I;
    KernelLadder kl = kernel_ladder(Nl, cfg, static_cast<int>(A.rows()));
    KernelLadder km = kernel_ladder(Nm, cfg, static_cast<int>(A.rows()));
    if (kl.dims.empty() || km.dims.empty())
        throw NotAnEigenvalue("q_tilde: lambda is not an eigenvalue within tolerance");
    FormMatrix out;
    out.kind = FormKind::Pairing;
    const int pl = static_cast<int>(kl.dims.size());  // p+1
    const int pm = static_cast<int>(km.dims.size());
    if (j >= pl || j >= pm) {
        if (j < pl || j < pm)
            throw InternalError("q_tilde: quotient dimensions disagree between lambda and 1/lambda");
        out.gram = CMat(0, 0);
        out.domain_basis = CMat(A.rows(), 0);
        out.codomain_basis = CMat(A.rows(), 0);
        return out;
    }
    CMat U = quotient_representatives(kl.bases.back(), kl.bases[static_cast<std::size_t>(j - 1)], cfg);
    CMat W = quotient_representatives(km.bases.back(), km.bases[static_cast<std::size_t>(j - 1)], cfg);
    if (U.cols() != W.cols())
        throw InternalError("q_tilde: quotient dimensions mismatch (" + std::to_string(U.cols()) +
                            " vs " + std::to_string(W.cols()) + ")");
    out.domain_basis = U;
    out.codomain_basis = W;
    out.gram = (apply_power(Nl, U, j)).transpose() * omega0(A.rows()).cast<cplx>() * W;
    return out;
}

std::pair<FormMatrix, Signature> q_hat(const Mat& A, cplx lambda, int m,
                                       const ToleranceConfig& cfg) {
    cfg.validate();
    if (!on_unit_circle(lambda))
        throw InvalidInput("q_hat: lambda must lie on the unit circle");
    if (m < 1) throw InvalidInput("q_hat: m must be >= 1");
    const bool real_case = lambda.imag() == 0.0;
    FormMatrix out;
    if (real_case) {
        if (m % 2 != 0) throw InvalidInput("q_hat: m must be even for lambda = +-1");
        const double lam = lambda.real();
        Mat N = A - lam * Mat::Identity(A.rows(), A.cols());
        RealKernelLadder kl = kernel_ladder(N, cfg, m);
        if (kl.dims.empty()) throw NotAnEigenvalue("q_hat: lambda is not an eigenvalue");
        Mat Km = kl.bases[static_cast<std::size_t>(
            std::min<std::size_t>(kl.bases.size() - 1, static_cast<std::size_t>(m - 1)))];
        const int k = m / 2;
        Mat Xa = Km, Xb = Km;
        for (int r = 0; r < k; ++r) Xa = N * Xa;
        for (int r = 0; r < k - 1; ++r) Xb = N * Xb;
        Mat G = lam * Xa.transpose() * omega0(A.rows()) * Xb;
        out.kind = FormKind::Symmetric;
        out.gram = G.cast<cplx>();
        out.domain_basis = Km.cast<cplx>();
        out.scale = std::max(1.0, Xa.norm() * Xb.norm());
    } else {
        CMat N = A.cast<cplx>() - lambda * CMat::Identity(A.rows(), A.cols());
        KernelLadder kl = kernel_ladder(N, cfg, static_cast<int>(A.rows()));
        if (kl.dims.empty()) throw NotAnEigenvalue("q_hat: lambda is not an eigenvalue");
        CMat Km = kl.bases[static_cast<std::size_t>(
            std::min<std::size_t>(kl.bases.size() - 1, static_cast<std::size_t>(m - 1)))];
        CMat W = omega0(A.rows()).cast<cplx>();
        CMat G;
        if (m % 2 == 0) {
            const int k = m / 2;
            CMat Xa = apply_power(N, Km, k), Xb = apply_power(N, Km, k - 1);
            G = (1.0 / lambda) * Xa.transpose() * W * Xb.conjugate();
            out.scale = std::max(1.0, Xa.norm() * Xb.norm());
        } else {
            const int k = (m - 1) / 2;
            CMat Xa = apply_power(N, Km, k);
            G = cplx(0.0, 1.0) * Xa.transpose() * W * Xa.conjugate();
            out.scale = std::max(1.0, Xa.norm() * Xa.norm());
        }
        out.kind = FormKind::Hermitian;
        out.gram = G;
        out.domain_basis = Km;
    }
    Signature sig = signature_of(out, cfg);
    return {std::move(out), sig};
}

Signature signature_of(const FormMatrix& form, const ToleranceConfig& cfg) {
    cfg.validate();
    if (form.kind == FormKind::Pairing)
        throw InvalidInput("signature_of: form must be Symmetric or Hermitian");
    if (form.gram.rows() != form.gram.cols())
        throw InvalidInput("signature_of: gram must be square");
    Signature sig;
    if (form.gram.size() == 0) return sig;
    CMat H = 0.5 * (form.gram + form.gram.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> es(H);
    if (es.info() != Eigen::Success)
        throw NumericalDegeneracy("signature_of: eigenvalue iteration failed");
    const auto& ev = es.eigenvalues();
    double emax = ev.cwiseAbs().maxCoeff();
    double thresh = cfg.rank_rel_tol * std::max({emax, form.scale, 1.0});
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) > thresh)
            ++sig.n_plus;
        else if (ev(i) < -thresh)
            ++sig.n_minus;
        else
            ++sig.n_zero;
    }
    return sig;
}

}  // namespace spnf
