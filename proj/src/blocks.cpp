#include "spnf/blocks.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace spnf {

namespace {

cplx ipow(cplx z, int k) {
    cplx r = 1.0;
    if (k >= 0)
        for (int i = 0; i < k; ++i) r *= z;
    else
        for (int i = 0; i < -k; ++i) r /= z;
    return r;
}

Mat rot(cplx z) {
    Mat R(2, 2);
    R << z.real(), -z.imag(), z.imag(), z.real();
    return R;
}

// exact inverse of the elementary Jordan block: (-1)^{j-i} lambda^{-(j-i+1)}
CMat jordan_inv(cplx lambda, int m) {
    CMat M = CMat::Zero(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j)
            M(i, j) = ((j - i) % 2 == 0 ? 1.0 : -1.0) * ipow(lambda, -(j - i + 1));
    return M;
}

// exact inverse of the real rotation-scaling Jordan block: R cells of z^{-(d+1)}
Mat jordan_real_inv(cplx z, int two_m) {
    const int m = two_m / 2;
    Mat M = Mat::Zero(two_m, two_m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j)
            M.block(2 * i, 2 * j, 2, 2) =
                ((j - i) % 2 == 0 ? 1.0 : -1.0) * rot(ipow(z, -(j - i + 1)));
    return M;
}

std::string fmt(cplx z) {
    std::ostringstream os;
    os << z.real() << (z.imag() >= 0 ? "+" : "") << z.imag() << "i";
    return os.str();
}

int tag_order(CaseTag t) { return static_cast<int>(t); }

}  // namespace

CMat jordan(cplx lambda, int m) {
    if (m < 1) throw InvalidInput("jordan: m must be >= 1");
    CMat M = CMat::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        M(i, i) = lambda;
        if (i + 1 < m) M(i, i + 1) = 1.0;
    }
    return M;
}

Mat jordan_real(double r, double phi, int two_m) {
    if (two_m < 2 || two_m % 2 != 0)
        throw InvalidInput("jordan_real: size must be even and >= 2");
    const int m = two_m / 2;
    const cplx z = std::polar(r, phi);
    Mat M = Mat::Zero(two_m, two_m);
    for (int i = 0; i < m; ++i) {
        M.block(2 * i, 2 * i, 2, 2) = rot(z);
        if (i + 1 < m) M.block(2 * i, 2 * (i + 1), 2, 2) = Mat::Identity(2, 2);
    }
    return M;
}

Mat build_block(const NormalFormBlock& b) {
    switch (b.case_tag) {
        case CaseTag::RealOffCircle: {
            const double lam = b.lambda.real();
            if (b.lambda.imag() != 0.0 || lam == 0.0 || std::abs(std::abs(lam) - 1.0) < 1e-12)
                throw InvalidInput("build_block: RealOffCircle lambda must be real, off the circle");
            const int q = b.size_param;
            if (q < 1 || b.dim != 2 * q || b.sign != 0)
                throw InvalidInput("build_block: inconsistent RealOffCircle fields");
            Mat M = Mat::Zero(2 * q, 2 * q);
            M.topLeftCorner(q, q) = jordan_inv(lam, q).real();
            M.bottomRightCorner(q, q) = jordan(lam, q).real().transpose();
            return M;
        }
        case CaseTag::ComplexOffCircle: {
            const cplx lam = b.lambda;
            if (lam.imag() <= 0.0 || std::abs(std::abs(lam) - 1.0) < 1e-12)
                throw InvalidInput(
                    "build_block: ComplexOffCircle lambda must have Im > 0, off the circle");
            const int q = b.size_param;
            if (q < 1 || b.dim != 4 * q || b.sign != 0)
                throw InvalidInput("build_block: inconsistent ComplexOffCircle fields");
            const cplx zbar = std::conj(lam);
            Mat M = Mat::Zero(4 * q, 4 * q);
            M.topLeftCorner(2 * q, 2 * q) = jordan_real_inv(zbar, 2 * q);
            M.bottomRightCorner(2 * q, 2 * q) =
                jordan_real(std::abs(zbar), std::arg(zbar), 2 * q).transpose();
            return M;
        }
        case CaseTag::PlusOne:
        case CaseTag::MinusOne: {
            const double lam = b.case_tag == CaseTag::PlusOne ? 1.0 : -1.0;
            if (b.lambda != cplx(lam, 0.0))
                throw InvalidInput("build_block: lambda inconsistent with case tag");
            const int r = b.size_param;
            if (r < 1 || b.dim != 2 * r) throw InvalidInput("build_block: inconsistent +-1 fields");
            if (b.sign == 0 && r % 2 == 0)
                throw InvalidInput("build_block: sign 0 requires odd size (Theorem 3.1)");
            if (b.sign != 0 && b.sign != 1 && b.sign != -1)
                throw InvalidInput("build_block: sign must be -1, 0 or +1");
            Mat Jinv = jordan_inv(lam, r).real();
            Mat M = Mat::Zero(2 * r, 2 * r);
            M.topLeftCorner(r, r) = Jinv;
            M.bottomRightCorner(r, r) = jordan(lam, r).real().transpose();
            if (b.sign != 0) {
                Mat D = Mat::Zero(r, r);
                D(r - 1, r - 1) = b.sign;
                M.topRightCorner(r, r) = Jinv * D;
            }
            return M;
        }
        case CaseTag::UnitNonReal: {
            const cplx lam = b.lambda;
            if (lam.imag() <= 0.0 || std::abs(std::abs(lam) - 1.0) > 1e-12)
                throw InvalidInput("build_block: UnitNonReal lambda must be unit with Im > 0");
            if (b.sign != 1 && b.sign != -1)
                throw InvalidInput("build_block: UnitNonReal sign must be +-1");
            const int k = b.size_param;
            const double phi = std::arg(lam);
            const double s = b.sign;
            const cplx zbar = std::conj(lam);
            if (b.dim == 4 * k && k >= 1) {
                Mat M = Mat::Zero(4 * k, 4 * k);
                M.topLeftCorner(2 * k, 2 * k) = jordan_real_inv(zbar, 2 * k);
                M.bottomRightCorner(2 * k, 2 * k) =
                    jordan_real(1.0, -phi, 2 * k).transpose();
                // C's last two columns: block row j carries s(-1)^{k-j} R(e^{i(k+1-j)phi})
                for (int j = 1; j <= k; ++j)
                    M.block(2 * (j - 1), 2 * k + 2 * (k - 1), 2, 2) =
                        s * ((k - j) % 2 == 0 ? 1.0 : -1.0) *
                        rot(std::polar(1.0, (k + 1 - j) * phi));
                return M;
            }
            if (b.dim == 4 * k + 2 && k >= 0) {
                const int n2 = 4 * k + 2;
                Mat M = Mat::Zero(n2, n2);
                M(2 * k, 2 * k) = std::cos(phi);
                M(2 * k, n2 - 1) = s * std::sin(phi);
                M(n2 - 1, 2 * k) = -s * std::sin(phi);
                M(n2 - 1, n2 - 1) = std::cos(phi);
                if (k >= 1) {
                    M.topLeftCorner(2 * k, 2 * k) = jordan_real_inv(zbar, 2 * k);
                    M.block(2 * k + 1, 2 * k + 1, 2 * k, 2 * k) =
                        jordan_real(1.0, -phi, 2 * k).transpose();
                    M(2 * k, 4 * k - 1) = 1.0;
                    M(n2 - 1, 4 * k) = -s;
                    // V block row j: (-1)^{k-j} R(e^{i(k+1-j)phi}); U = V R(e^{i phi})
                    for (int j = 1; j <= k; ++j) {
                        Mat Vj = ((k - j) % 2 == 0 ? 1.0 : -1.0) *
                                 rot(std::polar(1.0, (k + 1 - j) * phi));
                        Mat Uj = Vj * rot(std::polar(1.0, phi));
                        M.block(2 * (j - 1), 2 * k, 2, 1) = s * Uj.col(1);
                        M.block(2 * (j - 1), 4 * k - 1, 2, 1) = (s / 2.0) * Vj.col(1);
                        M.block(2 * (j - 1), 4 * k, 2, 1) = (-s / 2.0) * Vj.col(0);
                        M.block(2 * (j - 1), n2 - 1, 2, 1) = Uj.col(0);
                    }
                }
                return M;
            }
            throw InvalidInput("build_block: UnitNonReal dim must be 4k (k>=1) or 4k+2");
        }
    }
    throw InvalidInput("build_block: unknown case tag");
}

Mat symplectic_direct_sum(const Mat& A1, const Mat& A2) {
    if (A1.size() == 0) return A2;
    if (A2.size() == 0) return A1;
    if (A1.rows() != A1.cols() || A2.rows() != A2.cols() || A1.rows() % 2 != 0 ||
        A2.rows() % 2 != 0)
        throw InvalidInput("symplectic_direct_sum: inputs must be square of even dimension");
    const Eigen::Index k = A1.rows() / 2, l = A2.rows() / 2, m = k + l;
    auto map1 = [&](Eigen::Index i) { return i < k ? i : i + l; };
    auto map2 = [&](Eigen::Index i) { return i < l ? k + i : i + k + m - l; };
    Mat out = Mat::Zero(2 * m, 2 * m);
    for (Eigen::Index i = 0; i < 2 * k; ++i)
        for (Eigen::Index j = 0; j < 2 * k; ++j) out(map1(i), map1(j)) = A1(i, j);
    for (Eigen::Index i = 0; i < 2 * l; ++i)
        for (Eigen::Index j = 0; j < 2 * l; ++j) out(map2(i), map2(j)) = A2(i, j);
    return out;
}

namespace {

void sort_classes(std::vector<QuadrupleClass>& classes) {
    std::stable_sort(classes.begin(), classes.end(),
                     [](const QuadrupleClass& a, const QuadrupleClass& b) {
                         if (a.case_tag != b.case_tag)
                             return tag_order(a.case_tag) < tag_order(b.case_tag);
                         if (a.representative.real() != b.representative.real())
                             return a.representative.real() < b.representative.real();
                         return a.representative.imag() < b.representative.imag();
                     });
}

Fingerprint fingerprint_core(const Mat& A, const std::vector<QuadrupleClass>& classes,
                             const ToleranceConfig& cfg) {
    Fingerprint fp;
    for (const auto& q : classes) {
        FingerprintClass fc;
        fc.case_tag = q.case_tag;
        fc.representative = q.representative;
        auto [basis, ladder] = generalized_eigenspace(A, q.representative, cfg);
        fc.dims = ladder.dims;
        const int pmax = ladder.p + 1;
        if (q.case_tag == CaseTag::PlusOne || q.case_tag == CaseTag::MinusOne) {
            for (int m = 2; m <= pmax; m += 2) {
                auto [form, sig] = q_hat(A, q.representative, m, cfg);
                fc.q_hat.push_back({m, sig.n_plus + sig.n_minus, sig});
            }
        } else if (q.case_tag == CaseTag::UnitNonReal) {
            for (int m = 1; m <= pmax; ++m) {
                auto [form, sig] = q_hat(A, q.representative, m, cfg);
                fc.q_hat.push_back({m, sig.n_plus + sig.n_minus, sig});
            }
        }
        fp.classes.push_back(std::move(fc));
    }
    return fp;
}

CaseResult dispatch_case(const Mat& A, const QuadrupleClass& q, const ToleranceConfig& cfg) {
    switch (q.case_tag) {
        case CaseTag::RealOffCircle:
        case CaseTag::ComplexOffCircle:
            return case_offcircle(A, q, cfg);
        case CaseTag::PlusOne:
        case CaseTag::MinusOne:
            return case_pm1(A, q, cfg);
        case CaseTag::UnitNonReal:
            return case_unit(A, q, cfg);
    }
    throw InternalError("dispatch_case: unknown tag");
}

}  // namespace

NormalFormResult analyze(const Mat& A, const ToleranceConfig& cfg) {
    cfg.validate();
    NormalFormResult res;
    auto classes = eigen_quadruples(A, cfg, &res.residual_report.snaps);
    sort_classes(classes);
    std::vector<std::pair<Mat, Mat>> halves;
    for (const auto& q : classes) {
        CaseResult cr = dispatch_case(A, q, cfg);
        int got = 0;
        for (const auto& b : cr.blocks) got += b.dim;
        const int want = q.algebraic_multiplicity_per_member * static_cast<int>(q.members.size());
        if (got != want)
            throw NumericalDegeneracy("analyze: class " + fmt(q.representative) +
                                      " produced blocks of total dimension " +
                                      std::to_string(got) + ", expected " + std::to_string(want));
        for (std::size_t i = 0; i < cr.blocks.size(); ++i) {
            res.blocks.push_back(cr.blocks[i]);
            halves.push_back(cr.bases[i]);
        }
    }
    Mat N;
    for (const auto& b : res.blocks) N = symplectic_direct_sum(N, build_block(b));
    res.N = N;
    Eigen::Index total = 0;
    for (const auto& b : res.blocks) total += b.dim;
    if (total != A.rows())
        throw NumericalDegeneracy("analyze: blocks sum to dimension " + std::to_string(total) +
                                  ", expected " + std::to_string(A.rows()));
    Mat P(A.rows(), A.rows());
    Eigen::Index at = 0;
    for (const auto& h : halves) {
        P.middleCols(at, h.first.cols()) = h.first;
        at += h.first.cols();
    }
    for (const auto& h : halves) {
        P.middleCols(at, h.second.cols()) = h.second;
        at += h.second.cols();
    }
    res.P = P;
    const Mat W = omega0(A.rows());
    res.residual_report.symplecticity_P = (P.transpose() * W * P - W).norm();
    res.residual_report.reconstruction = (A * P - P * N).norm();
    Eigen::JacobiSVD<Mat> svd(P);
    const auto& sv = svd.singularValues();
    res.residual_report.cond_P =
        sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
    res.fingerprint = fingerprint_core(A, classes, cfg);
    return res;
}

Fingerprint fingerprint_of(const Mat& A, const ToleranceConfig& cfg) {
    cfg.validate();
    auto classes = eigen_quadruples(A, cfg, nullptr);
    sort_classes(classes);
    return fingerprint_core(A, classes, cfg);
}

bool fingerprints_equal(const Fingerprint& a, const Fingerprint& b, double lambda_tol,
                        std::string* reason) {
    auto fail = [&](const std::string& r) {
        if (reason) *reason = r;
        return false;
    };
    if (a.classes.size() != b.classes.size())
        return fail("class count mismatch (" + std::to_string(a.classes.size()) + " vs " +
                    std::to_string(b.classes.size()) + ")");
    for (std::size_t i = 0; i < a.classes.size(); ++i) {
        const auto& ca = a.classes[i];
        const auto& cb = b.classes[i];
        if (ca.case_tag != cb.case_tag)
            return fail(std::string("case mismatch (") + case_tag_name(ca.case_tag) + " vs " +
                        case_tag_name(cb.case_tag) + ")");
        if (std::abs(ca.representative - cb.representative) > lambda_tol)
            return fail("representative mismatch (lambda=" + fmt(ca.representative) + " vs " +
                        fmt(cb.representative) + ")");
        if (ca.dims != cb.dims)
            return fail("kernel ladder mismatch at lambda=" + fmt(ca.representative));
        if (ca.q_hat.size() != cb.q_hat.size())
            return fail("Q-hat list length mismatch at lambda=" + fmt(ca.representative));
        for (std::size_t j = 0; j < ca.q_hat.size(); ++j) {
            const auto& qa = ca.q_hat[j];
            const auto& qb = cb.q_hat[j];
            const bool pm = ca.case_tag == CaseTag::PlusOne || ca.case_tag == CaseTag::MinusOne;
            std::string where =
                "at lambda=" + fmt(ca.representative) + ", " +
                (pm ? "k=" + std::to_string(qa.m / 2) : "m=" + std::to_string(qa.m));
            if (qa.m != qb.m) return fail("Q-hat index mismatch " + where);
            if (qa.rank != qb.rank) return fail("Q-hat rank mismatch " + where);
            if (!(qa.signature == qb.signature))
                return fail("Q-hat signature mismatch " + where);
        }
    }
    if (reason) reason->clear();
    return true;
}

ConjugacyReport conjugacy_equal(const Mat& A, const Mat& B, const ToleranceConfig& cfg) {
    cfg.validate();
    if (A.rows() != B.rows() || A.cols() != B.cols())
        throw InvalidInput("conjugacy_equal: dimension mismatch");
    Fingerprint fa = fingerprint_of(A, cfg);
    Fingerprint fb = fingerprint_of(B, cfg);
    ConjugacyReport rep;
    rep.equal = fingerprints_equal(fa, fb, cfg.eig_cluster_tol, &rep.reason);
    return rep;
}

}  // namespace spnf
