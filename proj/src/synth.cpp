#include "spnf/synth.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace spnf {

namespace {

// [[X, -Y],[Y, X]] for unitary X + iY is orthogonal and symplectic
Mat ortho_symplectic(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    CMat Z(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) Z(i, j) = cplx(U(rng), U(rng));
    Eigen::HouseholderQR<CMat> qr(Z);
    CMat Q = qr.householderQ();
    Mat O(2 * n, 2 * n);
    O.topLeftCorner(n, n) = Q.real();
    O.topRightCorner(n, n) = -Q.imag();
    O.bottomLeftCorner(n, n) = Q.imag();
    O.bottomRightCorner(n, n) = Q.real();
    return O;
}

}  // namespace

Mat random_symplectic(int n, std::uint64_t seed, double condition_cap) {
    if (n < 1) throw InvalidInput("random_symplectic: n must be >= 1");
    if (!(condition_cap > 1.0))
        throw InvalidInput("random_symplectic: condition cap must exceed 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int attempt = 0; attempt < 64; ++attempt) {
        Mat O1 = ortho_symplectic(n, rng);
        Mat O2 = ortho_symplectic(n, rng);
        // triangular symplectic factor [[D^{-1}, D^{-1}S],[0, D]], D diagonal, S symmetric
        Vec d(n);
        for (int i = 0; i < n; ++i) d(i) = std::exp(0.5 * U(rng));
        Mat S(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) S(i, j) = S(j, i) = 0.5 * U(rng);
        Mat T = Mat::Zero(2 * n, 2 * n);
        T.topLeftCorner(n, n) = d.cwiseInverse().asDiagonal();
        T.topRightCorner(n, n) = d.cwiseInverse().asDiagonal() * S;
        T.bottomRightCorner(n, n) = d.asDiagonal();
        Mat P = O1 * T * O2;
        Eigen::JacobiSVD<Mat> svd(P);
        const auto& sv = svd.singularValues();
        if (sv(sv.size() - 1) > 0 && sv(0) / sv(sv.size() - 1) <= condition_cap) return P;
    }
    throw GenerationFailure("random_symplectic: condition cap " + std::to_string(condition_cap) +
                            " unreachable after 64 attempts");
}

std::pair<Mat, Fingerprint> build_from_params(const BlockSpec& spec) {
    if (spec.blocks.empty()) throw InvalidInput("build_from_params: empty block list");
    Mat N;
    for (const auto& b : spec.blocks) N = symplectic_direct_sum(N, build_block(b));
    const int n = static_cast<int>(N.rows()) / 2;
    Mat P = random_symplectic(n, spec.conjugator_seed, spec.conjugator_condition_cap);
    const Mat W = omega0(2 * n);
    Mat Pinv = W.transpose() * P.transpose() * W;  // symplectic inverse
    Mat A = P * N * Pinv;
    return {A, expected_fingerprint(spec.blocks)};
}

std::vector<int> brute_force_ladder(const Mat& A, cplx lambda, int r_max,
                                    const ToleranceConfig& cfg) {
    cfg.validate();
    if (A.rows() != A.cols() || A.size() == 0)
        throw InvalidInput("brute_force_ladder: matrix must be square");
    if (r_max < 1 || r_max > static_cast<int>(A.rows()))
        throw InvalidInput("brute_force_ladder: r_max out of range");
    CMat N = A.cast<cplx>() - lambda * CMat::Identity(A.rows(), A.cols());
    std::vector<int> dims;
    CMat Pw = CMat::Identity(A.rows(), A.cols());
    double scale = 1.0;
    for (int r = 1; r <= r_max; ++r) {
        Pw = N * Pw;
        scale *= std::max(1.0, N.norm());
        // threshold against ||N||^r, not against Pw itself: past ladder
        // stabilization Pw is pure rounding noise and must read as rank 0
        Eigen::JacobiSVD<CMat> svd(Pw);
        const auto& sv = svd.singularValues();
        double thresh = cfg.rank_rel_tol * std::max(sv.size() ? sv(0) : 0.0, scale);
        int rank = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv(i) > thresh) ++rank;
        dims.push_back(static_cast<int>(A.rows()) - rank);
    }
    return dims;
}

namespace {

struct ClassKey {
    int tag;
    double re, im;
    bool operator<(const ClassKey& o) const {
        if (tag != o.tag) return tag < o.tag;
        if (re != o.re) return re < o.re;
        return im < o.im;
    }
};

void validate_block_lambda(const NormalFormBlock& b) {
    switch (b.case_tag) {
        case CaseTag::RealOffCircle:
            if (b.lambda.imag() != 0.0 || std::abs(b.lambda.real()) <= 1.0)
                throw InvalidInput("expected_fingerprint: RealOffCircle representative must be "
                                   "real with |lambda| > 1");
            break;
        case CaseTag::ComplexOffCircle:
            if (b.lambda.imag() <= 0.0 || std::abs(b.lambda) <= 1.0)
                throw InvalidInput("expected_fingerprint: ComplexOffCircle representative must "
                                   "have Im > 0 and |lambda| > 1");
            break;
        case CaseTag::PlusOne:
            if (b.lambda != cplx(1.0, 0.0))
                throw InvalidInput("expected_fingerprint: PlusOne representative must be 1");
            break;
        case CaseTag::MinusOne:
            if (b.lambda != cplx(-1.0, 0.0))
                throw InvalidInput("expected_fingerprint: MinusOne representative must be -1");
            break;
        case CaseTag::UnitNonReal:
            if (b.lambda.imag() <= 0.0 || std::abs(std::abs(b.lambda) - 1.0) > 1e-12)
                throw InvalidInput("expected_fingerprint: UnitNonReal representative must be "
                                   "unit with Im > 0");
            break;
    }
}

// complex chain length(s) contributed at the representative eigenvalue
std::vector<int> chain_lengths(const NormalFormBlock& b) {
    switch (b.case_tag) {
        case CaseTag::RealOffCircle:
        case CaseTag::ComplexOffCircle:
            return {b.size_param};
        case CaseTag::PlusOne:
        case CaseTag::MinusOne:
            if (b.sign == 0) return {b.size_param, b.size_param};
            return {2 * b.size_param};
        case CaseTag::UnitNonReal:
            return {b.dim == 4 * b.size_param ? 2 * b.size_param : 2 * b.size_param + 1};
    }
    return {};
}

}  // namespace

Fingerprint expected_fingerprint(const std::vector<NormalFormBlock>& blocks) {
    std::map<ClassKey, std::vector<const NormalFormBlock*>> groups;
    for (const auto& b : blocks) {
        validate_block_lambda(b);
        build_block(b);  // field consistency check
        groups[{static_cast<int>(b.case_tag), b.lambda.real(), b.lambda.imag()}].push_back(&b);
    }
    Fingerprint fp;
    for (const auto& [key, grp] : groups) {
        FingerprintClass fc;
        fc.case_tag = grp.front()->case_tag;
        fc.representative = grp.front()->lambda;
        std::vector<int> lens;
        for (const auto* b : grp)
            for (int l : chain_lengths(*b)) lens.push_back(l);
        const int maxlen = *std::max_element(lens.begin(), lens.end());
        fc.dims.resize(static_cast<std::size_t>(maxlen), 0);
        for (int r = 1; r <= maxlen; ++r)
            for (int l : lens) fc.dims[static_cast<std::size_t>(r - 1)] += std::min(r, l);
        const bool pm = fc.case_tag == CaseTag::PlusOne || fc.case_tag == CaseTag::MinusOne;
        if (pm) {
            for (int m = 2; m <= maxlen; m += 2) {
                const int k = m / 2;
                Signature sig;
                for (const auto* b : grp) {
                    if (b->size_param != k || b->sign == 0) continue;
                    (b->sign > 0 ? sig.n_plus : sig.n_minus)++;
                }
                sig.n_zero =
                    fc.dims[static_cast<std::size_t>(m - 1)] - sig.n_plus - sig.n_minus;
                fc.q_hat.push_back({m, sig.n_plus + sig.n_minus, sig});
            }
        } else if (fc.case_tag == CaseTag::UnitNonReal) {
            for (int m = 1; m <= maxlen; ++m) {
                Signature sig;
                for (const auto* b : grp) {
                    const int len = chain_lengths(*b)[0];
                    if (len != m) continue;
                    (b->sign > 0 ? sig.n_plus : sig.n_minus)++;
                }
                sig.n_zero =
                    fc.dims[static_cast<std::size_t>(m - 1)] - sig.n_plus - sig.n_minus;
                fc.q_hat.push_back({m, sig.n_plus + sig.n_minus, sig});
            }
        }
        fp.classes.push_back(std::move(fc));
    }
    return fp;
}

}  // namespace spnf
