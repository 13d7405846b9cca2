#include "spnf/normalform.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>

namespace spnf {

namespace {

cplx ipow(cplx z, int k) {
    cplx r = 1.0;
    for (int i = 0; i < k; ++i) r *= z;
    return r;
}

std::vector<CVec> make_chain(const CMat& N, const CVec& v, int p) {
    std::vector<CVec> a{v};
    for (int i = 0; i < p; ++i) a.push_back(N * a.back());
    return a;
}
std::vector<Vec> make_chain(const Mat& N, const Vec& v, int p) {
    std::vector<Vec> a{v};
    for (int i = 0; i < p; ++i) a.push_back(N * a.back());
    return a;
}

// T_{i,j}(v) from the precomputed chain a_i = (A - lambda I)^i v
cplx tval(const std::vector<CVec>& a, cplx lambda, int i, int j) {
    return omega_pair(a[static_cast<std::size_t>(i)],
                      a[static_cast<std::size_t>(j)].conjugate()) /
           (ipow(lambda, i) * ipow(std::conj(lambda), j));
}

template <typename Matrix>
Matrix apply_power(const Matrix& N, const Matrix& X, int j) {
    Matrix Y = X;
    for (int i = 0; i < j; ++i) Y = N * Y;
    return Y;
}

template <typename Matrix>
Matrix quotient_reps(const Matrix& E, const Matrix& K, const ToleranceConfig& cfg) {
    Matrix M = E;
    if (K.cols() > 0) M -= K * (K.adjoint() * E);
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 0.0;
    double thresh = cfg.rank_rel_tol * (smax > 0 ? smax : 1.0);
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > thresh) ++rank;
    return svd.matrixU().leftCols(rank);
}

// restrict the orthonormal basis B to the Omega-annihilator of the constraint vectors
template <typename Matrix>
Matrix omega_restrict(const Matrix& B, const Matrix& constraints, const Mat& W,
                      const ToleranceConfig& cfg, const char* who) {
    if (B.cols() == 0 || constraints.cols() == 0) return B;
    Matrix WC;
    if constexpr (std::is_same_v<Matrix, Mat>)
        WC = W * constraints;
    else
        WC = W.cast<cplx>() * constraints;
    Matrix M = WC.transpose() * B;
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 0.0;
    double thresh = cfg.rank_rel_tol * (smax > 0 ? smax : 1.0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > thresh) ++rank;
    Matrix out = B * svd.matrixV().rightCols(B.cols() - rank);
    if (out.cols() != B.cols() - constraints.cols())
        throw NumericalDegeneracy(std::string(who) +
                                  ": complement dimension dropped by " +
                                  std::to_string(B.cols() - out.cols()) + ", expected " +
                                  std::to_string(constraints.cols()));
    return out;
}

// maximize |c^T G conj(c)| over unit coefficient vectors: basis vectors, pair
// combinations, then seeded random combinations
CVec pick_generator(const CMat& G, bool complex_combos, double& best) {
    const Eigen::Index d = G.rows();
    best = -1.0;
    CVec bestc;
    auto eval = [&](const CVec& c) {
        double a = std::abs((c.transpose() * (G * c.conjugate()))(0));
        if (a > best) {
            best = a;
            bestc = c;
        }
    };
    const double r2 = 1.0 / std::sqrt(2.0);
    for (Eigen::Index i = 0; i < d; ++i) eval(CVec::Unit(d, i));
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i + 1; j < d; ++j) {
            eval(r2 * (CVec::Unit(d, i) + CVec::Unit(d, j)));
            eval(r2 * (CVec::Unit(d, i) - CVec::Unit(d, j)));
            if (complex_combos) {
                eval(r2 * (CVec::Unit(d, i) + cplx(0, 1) * CVec::Unit(d, j)));
                eval(r2 * (CVec::Unit(d, i) - cplx(0, 1) * CVec::Unit(d, j)));
            }
        }
    std::mt19937_64 rng(0x51e9f00dULL + static_cast<unsigned long long>(d));
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int t = 0; t < 32; ++t) {
        CVec c(d);
        for (Eigen::Index i = 0; i < d; ++i)
            c(i) = complex_combos ? cplx(U(rng), U(rng)) : cplx(U(rng), 0.0);
        double nn = c.norm();
        if (nn > 0) eval(c / nn);
    }
    return bestc;
}

// one clearing pass over the T-box {0..boxmax}^2 for |lambda| = 1 chains.
// kappa, D: anchor index and value of the nonzero top-level T (T_{m,p-m} =
// (-1)^{kappa-m} D holds structurally), so each level-L representative is
// cleared exactly by v -= (-1)^{J+kappa-i0} alpha/(2 D lambda^J) N^J v, J = p-L.
double clear_t_box(const CMat& N, cplx lambda, CVec& v, int p, int kappa, cplx D, int boxmax) {
    if (boxmax < 0) return 0.0;
    double resid = 0.0;
    for (int sweep = 0; sweep <= p; ++sweep) {
        for (int L = 2 * boxmax; L >= 0; --L) {
            int j0 = std::min(boxmax, L);
            int i0 = L - j0;
            auto a = make_chain(N, v, p);
            cplx alpha = tval(a, lambda, i0, j0);
            if (std::abs(alpha) == 0.0) continue;
            int J = p - L;
            double sgn = ((J + kappa - i0) % 2 == 0) ? 1.0 : -1.0;
            cplx c = sgn * alpha / (2.0 * D * ipow(lambda, J));
            v -= c * a[static_cast<std::size_t>(J)];
        }
        auto a = make_chain(N, v, p);
        resid = 0.0;
        for (int i = 0; i <= boxmax; ++i)
            for (int j = 0; j <= boxmax; ++j)
                resid = std::max(resid, std::abs(tval(a, lambda, i, j)));
        if (resid <= 1e-12) break;
    }
    return resid;
}

// clear the self-pairings of v using the partner chain of w (lambda = +-1,
// p even, Omega((A-lambda)^p v, w) = e = +-1)
double clear_pair_even(const Mat& N, double lam, Vec& v, const Vec& w, int p, double e) {
    auto wchain = make_chain(N, w, p);
    for (int sweep = 0; sweep < 2; ++sweep)
        for (int L = p - 1; L >= 1; L -= 2) {
            auto a = make_chain(N, v, p);
            double alpha = std::pow(lam, L) *
                           omega_pair(a[static_cast<std::size_t>(L)].cast<cplx>().eval(),
                                      a[0].cast<cplx>().eval())
                               .real();
            if (alpha == 0.0) continue;
            double c = e * alpha * std::pow(lam, L) / 2.0;
            v += c * wchain[static_cast<std::size_t>(p - L)];
        }
    auto a = make_chain(N, v, p);
    double resid = 0.0;
    for (int i = 0; i <= p; ++i)
        for (int j = 0; j < i; ++j)
            if (i + j <= p - 1)
                resid = std::max(
                    resid, std::abs(omega_pair(a[static_cast<std::size_t>(i)].cast<cplx>().eval(),
                                               a[static_cast<std::size_t>(j)].cast<cplx>().eval())));
    return resid;
}

// x'_{p-j} = (1/Omega(x_{p-j}, y_j)) (x_{p-j} - sum_{r<j} Omega(x_{p-j}, y_r) x'_{p-r}),
// j = 0..count-1; returns x'_p, x'_{p-1}, ... descending
std::vector<CVec> dual_gs(const std::vector<CVec>& x, const std::vector<CVec>& y, int count,
                          const ToleranceConfig& cfg) {
    const int p = static_cast<int>(x.size()) - 1;
    std::vector<CVec> out;
    for (int j = 0; j < count; ++j) {
        const CVec& xj = x[static_cast<std::size_t>(p - j)];
        CVec acc = xj;
        for (int r = 0; r < j; ++r)
            acc -= omega_pair(xj, y[static_cast<std::size_t>(r)]) * out[static_cast<std::size_t>(r)];
        cplx d = omega_pair(xj, y[static_cast<std::size_t>(j)]);
        double scale = xj.norm() * y[static_cast<std::size_t>(j)].norm();
        if (std::abs(d) <= cfg.rank_rel_tol * (scale > 0 ? scale : 1.0))
            throw DegenerateChain("symplectic Gram-Schmidt: antidiagonal pairing at index " +
                                  std::to_string(j) + " vanishes");
        out.push_back(acc / d);
    }
    return out;
}

struct BlockRecord {
    NormalFormBlock blk;
    Mat e;
    Mat f;
};

int sign_rank(int s) { return s == 1 ? 0 : (s == -1 ? 1 : 2); }

CaseResult assemble(std::vector<BlockRecord> recs, Eigen::Index rows, double t_resid) {
    std::stable_sort(recs.begin(), recs.end(), [](const BlockRecord& a, const BlockRecord& b) {
        if (a.blk.dim != b.blk.dim) return a.blk.dim > b.blk.dim;
        return sign_rank(a.blk.sign) < sign_rank(b.blk.sign);
    });
    CaseResult out;
    Eigen::Index total = 0;
    for (const auto& r : recs) total += r.blk.dim;
    out.basis_columns = Mat(rows, total);
    Eigen::Index at = 0;
    for (const auto& r : recs) {
        out.basis_columns.middleCols(at, r.e.cols()) = r.e;
        at += r.e.cols();
    }
    for (const auto& r : recs) {
        out.basis_columns.middleCols(at, r.f.cols()) = r.f;
        at += r.f.cols();
    }
    for (auto& r : recs) {
        out.blocks.push_back(r.blk);
        out.bases.emplace_back(std::move(r.e), std::move(r.f));
    }
    out.t_residual = t_resid;
    return out;
}

Mat cols_of(const std::vector<Vec>& v, int from, int to_excl, bool reverse) {
    Mat M(v.empty() ? 0 : v[0].size(), to_excl - from);
    for (int i = from; i < to_excl; ++i)
        M.col(reverse ? (to_excl - 1 - i) : (i - from)) = v[static_cast<std::size_t>(i)];
    return M;
}

Mat realify(const std::vector<CVec>& v, bool flip_imag) {
    // each complex vector contributes (sqrt2 Re, +-sqrt2 Im) column pairs, in order
    const double s2 = std::sqrt(2.0);
    Mat M(v.empty() ? 0 : v[0].size(), 2 * static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        M.col(2 * static_cast<Eigen::Index>(i)) = s2 * v[i].real();
        M.col(2 * static_cast<Eigen::Index>(i) + 1) = (flip_imag ? -s2 : s2) * v[i].imag();
    }
    return M;
}

}  // namespace

CVec normalize_generator_odd(const Mat& A, cplx lambda, const CVec& v,
                             const ToleranceConfig& cfg) {
    cfg.validate();
    if (A.rows() != A.cols() || A.rows() != v.size())
        throw InvalidInput("normalize_generator_odd: dimension mismatch");
    if (std::abs(std::abs(lambda) - 1.0) > cfg.circle_snap_tol)
        throw InvalidInput("normalize_generator_odd: |lambda| must be 1");
    CMat N = A.cast<cplx>() - lambda * CMat::Identity(A.rows(), A.cols());
    const double nscale = std::max(1.0, N.norm());
    // chain length of v
    int p = -1;
    {
        CVec x = v;
        for (int i = 0; i <= static_cast<int>(A.rows()); ++i) {
            CVec nx = N * x;
            if (nx.norm() <= cfg.rank_rel_tol * nscale * x.norm()) {
                p = i;
                break;
            }
            x = nx;
        }
    }
    if (p < 0)
        throw InvalidInput("normalize_generator_odd: chain of v does not terminate");
    if (p % 2 == 0)
        throw InvalidInput("normalize_generator_odd: chain length p = " + std::to_string(p) +
                           " is even");
    const int k = (p + 1) / 2;
    auto a = make_chain(N, v, p);
    cplx T = tval(a, lambda, k, k - 1);
    double scale = a[static_cast<std::size_t>(k)].norm() * a[static_cast<std::size_t>(k - 1)].norm();
    if (std::abs(T) <= cfg.rank_rel_tol * (scale > 0 ? scale : 1.0))
        throw DegenerateGenerator("normalize_generator_odd: pivot T_{k,k-1} vanishes");
    double s = T.real() >= 0 ? 1.0 : -1.0;
    CVec out = v / std::sqrt(std::abs(T));
    clear_t_box(N, lambda, out, p, k, cplx(s, 0.0), k - 1);
    return out;
}

CaseResult case_offcircle(const Mat& A, const QuadrupleClass& q, const ToleranceConfig& cfg) {
    cfg.validate();
    if (q.case_tag != CaseTag::RealOffCircle && q.case_tag != CaseTag::ComplexOffCircle)
        throw InvalidInput("case_offcircle: class is not off the unit circle");
    const Mat W = omega0(A.rows());
    std::vector<BlockRecord> recs;

    if (q.case_tag == CaseTag::RealOffCircle) {
        const double lam = q.representative.real();
        const double mu = 1.0 / lam;
        Mat Nl = A - lam * Mat::Identity(A.rows(), A.cols());
        Mat Nm = A - mu * Mat::Identity(A.rows(), A.cols());
        RealKernelLadder ll = kernel_ladder(Nl, cfg, static_cast<int>(A.rows()));
        RealKernelLadder lm = kernel_ladder(Nm, cfg, static_cast<int>(A.rows()));
        if (ll.dims.empty() || lm.dims.empty())
            throw NotAnEigenvalue("case_offcircle: representative is not an eigenvalue");
        Mat Bl = ll.bases.back(), Bm = lm.bases.back();
        while (Bl.cols() > 0) {
            Mat Mc = Bl.transpose() * Nl * Bl;
            RealKernelLadder lad = kernel_ladder(Mc, cfg, static_cast<int>(Bl.cols()));
            if (lad.dims.empty() || lad.dims.back() != static_cast<int>(Bl.cols()))
                throw NumericalDegeneracy("case_offcircle: restricted ladder does not exhaust the subspace");
            const int p = lad.p;
            Mat F = apply_power(Nl, Bl, p).transpose() * W * Bm;
            Eigen::JacobiSVD<Mat> svd(F, Eigen::ComputeFullU | Eigen::ComputeFullV);
            double s1 = svd.singularValues()(0);
            if (s1 <= cfg.rank_rel_tol * std::max(1.0, apply_power(Nl, Bl, p).norm()))
                throw InternalError("case_offcircle: degenerate pairing (contradicts Lemma 1.3)");
            Vec v = Bl * svd.matrixU().col(0);
            Vec w = Bm * svd.matrixV().col(0);
            auto bw = make_chain(Nm, w, p);
            double d = omega_pair(bw[static_cast<std::size_t>(p)].cast<cplx>().eval(),
                                  v.cast<cplx>().eval())
                           .real();
            if (std::abs(d) <= cfg.rank_rel_tol)
                throw InternalError("case_offcircle: pairing normalization failed");
            w /= d;
            auto a = make_chain(Nl, v, p);
            auto b = make_chain(Nm, w, p);
            std::vector<CVec> ac, bc;
            for (const auto& x : a) ac.push_back(x.cast<cplx>());
            for (const auto& x : b) bc.push_back(x.cast<cplx>());
            auto bp = dual_gs(bc, ac, p + 1, cfg);  // b'_p .. b'_0
            BlockRecord rec;
            rec.blk = {q.case_tag, q.representative, p + 1, 0, 2 * (p + 1)};
            rec.e = Mat(A.rows(), p + 1);
            rec.f = Mat(A.rows(), p + 1);
            for (int j = 0; j <= p; ++j) {
                rec.e.col(j) = bp[static_cast<std::size_t>(j)].real();
                rec.f.col(j) = a[static_cast<std::size_t>(j)];
            }
            recs.push_back(std::move(rec));
            Mat bcols(A.rows(), p + 1), acols(A.rows(), p + 1);
            for (int j = 0; j <= p; ++j) {
                bcols.col(j) = b[static_cast<std::size_t>(j)];
                acols.col(j) = a[static_cast<std::size_t>(j)];
            }
            Bl = omega_restrict(Bl, bcols, W, cfg, "case_offcircle");
            Bm = omega_restrict(Bm, acols, W, cfg, "case_offcircle");
        }
    } else {
        const cplx lam = q.representative;
        const cplx mu = 1.0 / lam;
        CMat Ac = A.cast<cplx>();
        CMat Nl = Ac - lam * CMat::Identity(A.rows(), A.cols());
        CMat Nm = Ac - mu * CMat::Identity(A.rows(), A.cols());
        KernelLadder ll = kernel_ladder(Nl, cfg, static_cast<int>(A.rows()));
        KernelLadder lm = kernel_ladder(Nm, cfg, static_cast<int>(A.rows()));
        if (ll.dims.empty() || lm.dims.empty())
            throw NotAnEigenvalue("case_offcircle: representative is not an eigenvalue");
        CMat Bl = ll.bases.back(), Bm = lm.bases.back();
        while (Bl.cols() > 0) {
            CMat Mc = Bl.adjoint() * Nl * Bl;
            KernelLadder lad = kernel_ladder(Mc, cfg, static_cast<int>(Bl.cols()));
            if (lad.dims.empty() || lad.dims.back() != static_cast<int>(Bl.cols()))
                throw NumericalDegeneracy("case_offcircle: restricted ladder does not exhaust the subspace");
            const int p = lad.p;
            CMat F = apply_power(Nl, Bl, p).transpose() * W.cast<cplx>() * Bm;
            Eigen::JacobiSVD<CMat> svd(F, Eigen::ComputeFullU | Eigen::ComputeFullV);
            double s1 = svd.singularValues()(0);
            if (s1 <= cfg.rank_rel_tol * std::max(1.0, apply_power(Nl, Bl, p).norm()))
                throw InternalError("case_offcircle: degenerate pairing (contradicts Lemma 1.3)");
            CVec v = Bl * svd.matrixU().col(0).conjugate();
            CVec w = Bm * svd.matrixV().col(0);
            auto b = make_chain(Nm, w, p);
            cplx d = omega_pair(b[static_cast<std::size_t>(p)], v);
            if (std::abs(d) <= cfg.rank_rel_tol)
                throw InternalError("case_offcircle: pairing normalization failed");
            w /= d;
            auto a = make_chain(Nl, v, p);
            b = make_chain(Nm, w, p);
            auto bp = dual_gs(b, a, p + 1, cfg);  // b'_p .. b'_0
            BlockRecord rec;
            rec.blk = {q.case_tag, q.representative, p + 1, 0, 4 * (p + 1)};
            rec.e = realify(bp, false);                       // u_p, v_p, ..., u_0, v_0
            rec.f = realify(a, true);                          // w_0, x_0, ..., w_p, x_p
            recs.push_back(std::move(rec));
            CMat bcols(A.rows(), p + 1), acols(A.rows(), p + 1);
            for (int j = 0; j <= p; ++j) {
                bcols.col(j) = b[static_cast<std::size_t>(j)];
                acols.col(j) = a[static_cast<std::size_t>(j)];
            }
            Bl = omega_restrict(Bl, bcols, W, cfg, "case_offcircle");
            Bm = omega_restrict(Bm, acols, W, cfg, "case_offcircle");
        }
    }
    return assemble(std::move(recs), A.rows(), 0.0);
}

CaseResult case_pm1(const Mat& A, const QuadrupleClass& q, const ToleranceConfig& cfg) {
    cfg.validate();
    if (q.case_tag != CaseTag::PlusOne && q.case_tag != CaseTag::MinusOne)
        throw InvalidInput("case_pm1: class is not at lambda = +-1");
    const double lam = q.representative.real();
    const Mat W = omega0(A.rows());
    Mat N = A - lam * Mat::Identity(A.rows(), A.cols());
    CMat Nc = N.cast<cplx>();
    RealKernelLadder full = kernel_ladder(N, cfg, static_cast<int>(A.rows()));
    if (full.dims.empty()) throw NotAnEigenvalue("case_pm1: lambda is not an eigenvalue");
    Mat B = full.bases.back();
    std::vector<BlockRecord> recs;
    double worst_t = 0.0;
    while (B.cols() > 0) {
        Mat Mc = B.transpose() * N * B;
        RealKernelLadder lad = kernel_ladder(Mc, cfg, static_cast<int>(B.cols()));
        if (lad.dims.empty() || lad.dims.back() != static_cast<int>(B.cols()))
            throw NumericalDegeneracy("case_pm1: restricted ladder does not exhaust the subspace");
        const int p = lad.p;
        if (p % 2 == 1) {
            const int k = (p + 1) / 2;
            Mat Kp = lad.bases[static_cast<std::size_t>(p - 1)];
            Mat C = quotient_reps(Mat::Identity(B.cols(), B.cols()).eval(), Kp, cfg);
            Mat X = B * C;
            Mat Y = apply_power(N, X, p);
            Mat G = Y.transpose() * W * X;
            double best = 0.0;
            CVec c = pick_generator(G.cast<cplx>().eval(), false, best);
            if (best <= cfg.rank_rel_tol * std::max(1.0, G.cwiseAbs().maxCoeff()))
                throw InternalError(
                    "case_pm1: no generator with nonzero odd Q-tilde value (contradicts "
                    "non-degeneracy of the symmetric form)");
            Vec v = X * c.real();
            auto a = make_chain(N, v, p);
            double piv = omega_pair(a[static_cast<std::size_t>(k)].cast<cplx>().eval(),
                                    a[static_cast<std::size_t>(k - 1)].cast<cplx>().eval())
                             .real();
            int s = (lam * piv) > 0 ? 1 : -1;
            v /= std::sqrt(std::abs(piv));
            CVec vc = v.cast<cplx>();
            worst_t = std::max(worst_t,
                               clear_t_box(Nc, cplx(lam, 0.0), vc, p, k, cplx(s, 0.0), k - 1));
            v = vc.real();
            a = make_chain(N, v, p);
            std::vector<CVec> ac;
            for (const auto& x : a) ac.push_back(x.cast<cplx>());
            auto ap = dual_gs(ac, ac, k, cfg);  // a'_p .. a'_k
            BlockRecord rec;
            rec.blk = {q.case_tag, q.representative, k, s, 2 * k};
            rec.e = Mat(A.rows(), k);
            rec.f = Mat(A.rows(), k);
            for (int j = 0; j < k; ++j) {
                rec.e.col(j) = ap[static_cast<std::size_t>(j)].real();
                rec.f.col(j) = a[static_cast<std::size_t>(j)];
            }
            recs.push_back(std::move(rec));
            Mat chain(A.rows(), p + 1);
            for (int j = 0; j <= p; ++j) chain.col(j) = a[static_cast<std::size_t>(j)];
            B = omega_restrict(B, chain, W, cfg, "case_pm1");
        } else {
            Mat F = apply_power(N, B, p).transpose() * W * B;
            Eigen::JacobiSVD<Mat> svd(F, Eigen::ComputeFullU | Eigen::ComputeFullV);
            double s1 = svd.singularValues()(0);
            if (s1 <= cfg.rank_rel_tol * std::max(1.0, apply_power(N, B, p).norm()))
                throw InternalError("case_pm1: degenerate even-p pairing (contradicts Lemma 1.3)");
            Vec v = B * svd.matrixU().col(0);
            Vec w = B * svd.matrixV().col(0);
            auto a = make_chain(N, v, p);
            double d = omega_pair(a[static_cast<std::size_t>(p)].cast<cplx>().eval(),
                                  w.cast<cplx>().eval())
                           .real();
            w /= d;
            worst_t = std::max(worst_t, clear_pair_even(N, lam, v, w, p, 1.0));
            worst_t = std::max(worst_t, clear_pair_even(N, lam, w, v, p, -1.0));
            a = make_chain(N, v, p);
            auto b = make_chain(N, w, p);
            std::vector<CVec> ac, bc;
            for (const auto& x : a) ac.push_back(x.cast<cplx>());
            for (const auto& x : b) bc.push_back(x.cast<cplx>());
            auto ap = dual_gs(ac, bc, p + 1, cfg);  // a'_p .. a'_0
            BlockRecord rec;
            rec.blk = {q.case_tag, q.representative, p + 1, 0, 2 * (p + 1)};
            rec.e = Mat(A.rows(), p + 1);
            rec.f = Mat(A.rows(), p + 1);
            for (int j = 0; j <= p; ++j) {
                rec.e.col(j) = ap[static_cast<std::size_t>(j)].real();
                rec.f.col(j) = b[static_cast<std::size_t>(j)];
            }
            recs.push_back(std::move(rec));
            Mat chain(A.rows(), 2 * (p + 1));
            for (int j = 0; j <= p; ++j) {
                chain.col(j) = a[static_cast<std::size_t>(j)];
                chain.col(p + 1 + j) = b[static_cast<std::size_t>(j)];
            }
            B = omega_restrict(B, chain, W, cfg, "case_pm1");
        }
    }
    return assemble(std::move(recs), A.rows(), worst_t);
}

CaseResult case_unit(const Mat& A, const QuadrupleClass& q, const ToleranceConfig& cfg) {
    cfg.validate();
    if (q.case_tag != CaseTag::UnitNonReal)
        throw InvalidInput("case_unit: class is not on the unit circle");
    const cplx lam = q.representative;
    const Mat W = omega0(A.rows());
    CMat Ac = A.cast<cplx>();
    CMat N = Ac - lam * CMat::Identity(A.rows(), A.cols());
    KernelLadder full = kernel_ladder(N, cfg, static_cast<int>(A.rows()));
    if (full.dims.empty()) throw NotAnEigenvalue("case_unit: lambda is not an eigenvalue");
    CMat B = full.bases.back();
    std::vector<BlockRecord> recs;
    double worst_t = 0.0;
    while (B.cols() > 0) {
        CMat Mc = B.adjoint() * N * B;
        KernelLadder lad = kernel_ladder(Mc, cfg, static_cast<int>(B.cols()));
        if (lad.dims.empty() || lad.dims.back() != static_cast<int>(B.cols()))
            throw NumericalDegeneracy("case_unit: restricted ladder does not exhaust the subspace");
        const int p = lad.p;
        CMat Kp = p >= 1 ? lad.bases[static_cast<std::size_t>(p - 1)] : CMat(B.cols(), 0);
        CMat C = quotient_reps(CMat::Identity(B.cols(), B.cols()).eval(), Kp, cfg);
        CMat X = B * C;
        if (p % 2 == 1) {
            const int k = (p + 1) / 2;
            CMat Y = apply_power(N, X, p);
            CMat G = ipow(std::conj(lam), p) * Y.transpose() * W.cast<cplx>() * X.conjugate();
            double best = 0.0;
            CVec c = pick_generator(G, true, best);
            if (best <= cfg.rank_rel_tol * std::max(1.0, G.cwiseAbs().maxCoeff()))
                throw InternalError("case_unit: degenerate odd Q-hat on all candidates");
            CVec v = X * c;
            auto a = make_chain(N, v, p);
            cplx T = tval(a, lam, k, k - 1);
            int s = T.real() >= 0 ? 1 : -1;
            v /= std::sqrt(std::abs(T));
            worst_t = std::max(worst_t, clear_t_box(N, lam, v, p, k, cplx(s, 0.0), k - 1));
            a = make_chain(N, v, p);
            std::vector<CVec> b;
            for (const auto& x : a) b.push_back(x.conjugate());
            auto ap = dual_gs(a, b, k, cfg);  // a'_{2k-1} .. a'_k
            BlockRecord rec;
            rec.blk = {q.case_tag, lam, k, s, 4 * k};
            rec.e = realify(ap, true);  // e_{2j-1} = sqrt2 Re a'_{2k-j}, e_{2j} = -sqrt2 Im
            std::vector<CVec> alow(a.begin(), a.begin() + k);
            rec.f = realify(alow, true);
            recs.push_back(std::move(rec));
            CMat conjchain(A.rows(), p + 1);
            for (int j = 0; j <= p; ++j) conjchain.col(j) = b[static_cast<std::size_t>(j)];
            B = omega_restrict(B, conjchain, W, cfg, "case_unit");
        } else {
            const int k = p / 2;
            CMat Z = apply_power(N, X, k);
            CMat G = (Z.transpose() * W.cast<cplx>() * Z.conjugate()) /
                     (ipow(lam, k) * ipow(std::conj(lam), k));
            double best = 0.0;
            CVec c = pick_generator(G, true, best);
            if (best <= cfg.rank_rel_tol * std::max(1.0, G.cwiseAbs().maxCoeff()))
                throw InternalError("case_unit: degenerate even Q-hat on all candidates");
            CVec v = X * c;
            auto a = make_chain(N, v, p);
            cplx Tkk = tval(a, lam, k, k);
            int s = Tkk.imag() <= 0 ? 1 : -1;  // s i = -T_{k,k}
            v /= std::sqrt(std::abs(Tkk));
            if (k >= 1) {
                a = make_chain(N, v, p);
                cplx alpha = tval(a, lam, k, k - 1);
                cplx c1 = alpha / (2.0 * lam * cplx(0.0, s));
                v -= c1 * a[1];
                worst_t = std::max(worst_t,
                                   clear_t_box(N, lam, v, p, k, cplx(0.0, -s), k - 1));
            }
            a = make_chain(N, v, p);
            std::vector<CVec> b;
            for (const auto& x : a) b.push_back(x.conjugate());
            auto ap = dual_gs(a, b, k, cfg);  // a'_{2k} .. a'_{k+1}
            CVec ak = a[static_cast<std::size_t>(k)];
            for (int r = 0; r < k; ++r)
                ak -= omega_pair(a[static_cast<std::size_t>(k)], b[static_cast<std::size_t>(r)]) *
                      ap[static_cast<std::size_t>(r)];
            BlockRecord rec;
            rec.blk = {q.case_tag, lam, k, s, 4 * k + 2};
            const double s2 = std::sqrt(2.0);
            rec.e = Mat(A.rows(), 2 * k + 1);
            rec.f = Mat(A.rows(), 2 * k + 1);
            Mat egs = realify(ap, true);
            if (k > 0) rec.e.leftCols(2 * k) = egs;
            rec.e.col(2 * k) = s2 * ak.real();
            std::vector<CVec> alow(a.begin(), a.begin() + k);
            Mat flow = realify(alow, true);
            if (k > 0) rec.f.leftCols(2 * k) = flow;
            rec.f.col(2 * k) = s * s2 * ak.imag();
            recs.push_back(std::move(rec));
            CMat conjchain(A.rows(), p + 1);
            for (int j = 0; j <= p; ++j) conjchain.col(j) = b[static_cast<std::size_t>(j)];
            B = omega_restrict(B, conjchain, W, cfg, "case_unit");
        }
    }
    return assemble(std::move(recs), A.rows(), worst_t);
}

ChainBasis symplectic_gram_schmidt(const ChainBasis& pivot_chain, const ToleranceConfig& cfg) {
    cfg.validate();
    ChainBasis out;
    out.lambda = pivot_chain.lambda;
    out.p = pivot_chain.p;
    out.a_chain = pivot_chain.a_chain;
    if (pivot_chain.a_chain.empty()) return out;
    if (pivot_chain.b_chain.size() != pivot_chain.a_chain.size() ||
        static_cast<int>(pivot_chain.a_chain.size()) != pivot_chain.p + 1)
        throw InvalidInput("symplectic_gram_schmidt: chain lengths inconsistent with p");
    const int p = pivot_chain.p;
    auto bp = dual_gs(pivot_chain.b_chain, pivot_chain.a_chain, p + 1, cfg);
    // dual_gs yields Omega(b'_{p-j}, a_j) = 1; the published convention is
    // Omega(a_i, b'_j) = delta_{i+j,p}, so flip the sign
    out.b_chain.resize(static_cast<std::size_t>(p + 1));
    for (int j = 0; j <= p; ++j)
        out.b_chain[static_cast<std::size_t>(j)] = -bp[static_cast<std::size_t>(p - j)];
    return out;
}

}  // namespace spnf
