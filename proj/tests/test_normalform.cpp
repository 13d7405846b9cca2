#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "spnf/blocks.hpp"
#include "spnf/forms.hpp"
#include "spnf/normalform.hpp"
#include "spnf/synth.hpp"

using namespace spnf;

namespace {

const ToleranceConfig kCfg{};

Mat shear(double c) {
    Mat A(2, 2);
    A << 1, c, 0, 1;
    return A;
}

QuadrupleClass class_of(const Mat& A, CaseTag tag) {
    auto classes = eigen_quadruples(A, kCfg);
    for (auto& q : classes)
        if (q.case_tag == tag) return q;
    throw std::runtime_error("class not found");
}

// symplecticity of the produced basis against the standard form of its size
double basis_symplecticity(const CaseResult& r, const Mat& A) {
    const Mat W = omega0(A.rows());
    const Mat Wsub = omega0(r.basis_columns.cols());
    return (r.basis_columns.transpose() * W * r.basis_columns - Wsub).norm();
}

// reconstruction: A restricted to the basis equals the direct sum of blocks
double case_reconstruction(const CaseResult& r, const Mat& A) {
    Mat N;
    for (const auto& b : r.blocks) N = symplectic_direct_sum(N, build_block(b));
    return (A * r.basis_columns - r.basis_columns * N).norm();
}

Mat from_spec(std::vector<NormalFormBlock> blocks, std::uint64_t seed) {
    BlockSpec spec;
    spec.blocks = std::move(blocks);
    spec.conjugator_seed = seed;
    return build_from_params(spec).first;
}

}  // namespace

TEST_CASE("normalize_generator_odd: shear k=1 fixed point") {
    Mat A = shear(1.0);
    CVec v(2);
    v << 0, 1;
    CVec out = normalize_generator_odd(A, {1.0, 0.0}, v);
    CHECK((out - v).norm() < 1e-14);
    CHECK(std::abs(t_form(A, {1.0, 0.0}, out, 1, 0) - cplx(1.0, 0.0)) < 1e-12);
}

TEST_CASE("normalize_generator_odd: rescaling absorbs input scale") {
    Mat A = shear(1.0);
    CVec v(2);
    v << 0, 3;
    CVec out = normalize_generator_odd(A, {1.0, 0.0}, v);
    CHECK(std::abs(std::abs(t_form(A, {1.0, 0.0}, out, 1, 0)) - 1.0) < 1e-12);
}

TEST_CASE("normalize_generator_odd: clears the T-box on a contaminated 4-chain generator") {
    Mat A = from_spec({{CaseTag::PlusOne, {1.0, 0.0}, 2, 1, 4}}, 23);
    auto [basis, ladder] = generalized_eigenspace(A, {1.0, 0.0}, kCfg);
    REQUIRE(ladder.p == 3);  // chain length 4, k = 2
    // pick a full-length generator (largest |Q-tilde pivot| among basis combos)
    CMat N = A.cast<cplx>() - CMat::Identity(4, 4);
    CVec v;
    double best = -1.0;
    for (Eigen::Index i = 0; i < basis.cols(); ++i) {
        CVec c = basis.col(i);
        double piv = std::abs(omega_pair((N * N * N * c).eval(), c));
        if (piv > best) {
            best = piv;
            v = c;
        }
    }
    REQUIRE(best > 1e-6);
    // contaminate: any multiple of N^1 v changes T_{0,0}-level data but not the span
    CVec w = v + 0.37 * (N * v);
    CVec out = normalize_generator_odd(A, {1.0, 0.0}, w);
    for (int i = 0; i <= 1; ++i)
        for (int j = 0; j <= 1; ++j)
            CHECK(std::abs(t_form(A, {1.0, 0.0}, out, i, j)) <= 1e-10);
    CHECK(std::abs(std::abs(t_form(A, {1.0, 0.0}, out, 2, 1)) - 1.0) <= 1e-10);
}

TEST_CASE("normalize_generator_odd: input validation") {
    Mat A = shear(1.0);
    CVec v(2);
    v << 0, 1;
    CHECK_THROWS_AS(normalize_generator_odd(A, {2.0, 0.0}, v), InvalidInput);
    // v killed by (A-I) directly: chain length 1, p = 0 even
    CVec u(2);
    u << 1, 0;
    CHECK_THROWS_AS(normalize_generator_odd(A, {1.0, 0.0}, u), InvalidInput);
}

TEST_CASE("case_offcircle: diag(2, 1/2)") {
    Mat A = Mat::Zero(2, 2);
    A(0, 0) = 2.0;
    A(1, 1) = 0.5;
    auto q = class_of(A, CaseTag::RealOffCircle);
    CaseResult r = case_offcircle(A, q, kCfg);
    REQUIRE(r.blocks.size() == 1);
    CHECK(r.blocks[0].size_param == 1);
    CHECK(r.blocks[0].dim == 2);
    Mat N = build_block(r.blocks[0]);
    CHECK(N(0, 0) == 0.5);
    CHECK(N(1, 1) == 2.0);
    CHECK(basis_symplecticity(r, A) <= 1e-10);
    CHECK(case_reconstruction(r, A) <= 1e-10);
}

TEST_CASE("case_offcircle: real lambda=3 q=2 round trip") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        Mat A = from_spec({{CaseTag::RealOffCircle, {3.0, 0.0}, 2, 0, 4}}, seed);
        auto q = class_of(A, CaseTag::RealOffCircle);
        CaseResult r = case_offcircle(A, q, kCfg);
        REQUIRE(r.blocks.size() == 1);
        CHECK(r.blocks[0].size_param == 2);
        CHECK(basis_symplecticity(r, A) <= 1e-8);
        CHECK(case_reconstruction(r, A) <= 1e-8 * A.norm());
    }
}

TEST_CASE("case_offcircle: complex quadruple 2e^{i pi/4} q=1") {
    const cplx lam = 2.0 * std::polar(1.0, M_PI / 4);
    Mat A = from_spec({{CaseTag::ComplexOffCircle, lam, 1, 0, 4}}, 3);
    auto q = class_of(A, CaseTag::ComplexOffCircle);
    CaseResult r = case_offcircle(A, q, kCfg);
    REQUIRE(r.blocks.size() == 1);
    CHECK(r.blocks[0].dim == 4);
    CHECK(basis_symplecticity(r, A) <= 1e-8);
    CHECK(case_reconstruction(r, A) <= 1e-8 * A.norm());
    // the emitted block is diag(J_R(2e^{-i pi/4},2)^{-1}, J_R(2e^{-i pi/4},2)^T)
    Mat N = build_block(r.blocks[0]);
    Mat JR = jordan_real(2.0, -M_PI / 4, 2);
    CHECK((N.topLeftCorner(2, 2) * JR - Mat::Identity(2, 2)).norm() < 1e-12);
    CHECK((N.bottomRightCorner(2, 2) - JR.transpose()).norm() < 1e-12);
    CHECK(N.bottomLeftCorner(2, 2).norm() == 0.0);
    CHECK(N.topRightCorner(2, 2).norm() == 0.0);
}

TEST_CASE("case_offcircle: multiple chains, sizes sorted descending") {
    Mat A = from_spec({{CaseTag::RealOffCircle, {2.0, 0.0}, 1, 0, 2},
                       {CaseTag::RealOffCircle, {2.0, 0.0}, 3, 0, 6}},
                      7);
    auto q = class_of(A, CaseTag::RealOffCircle);
    CaseResult r = case_offcircle(A, q, kCfg);
    REQUIRE(r.blocks.size() == 2);
    CHECK(r.blocks[0].size_param == 3);
    CHECK(r.blocks[1].size_param == 1);
    CHECK(basis_symplecticity(r, A) <= 1e-8);
    CHECK(case_reconstruction(r, A) <= 1e-8 * A.norm());
}

TEST_CASE("case_pm1: identity, shear, negative shear") {
    CaseResult ri = case_pm1(Mat::Identity(2, 2), class_of(Mat::Identity(2, 2), CaseTag::PlusOne),
                             kCfg);
    REQUIRE(ri.blocks.size() == 1);
    CHECK(ri.blocks[0].size_param == 1);
    CHECK(ri.blocks[0].sign == 0);
    CHECK(build_block(ri.blocks[0]) == Mat::Identity(2, 2));

    Mat Ap = shear(1.0);
    CaseResult rp = case_pm1(Ap, class_of(Ap, CaseTag::PlusOne), kCfg);
    REQUIRE(rp.blocks.size() == 1);
    CHECK(rp.blocks[0].size_param == 1);
    CHECK(rp.blocks[0].sign == 1);
    CHECK((build_block(rp.blocks[0]) - Ap).norm() == 0.0);

    Mat Am = shear(-1.0);
    CaseResult rm = case_pm1(Am, class_of(Am, CaseTag::PlusOne), kCfg);
    REQUIRE(rm.blocks.size() == 1);
    CHECK(rm.blocks[0].sign == -1);
}

TEST_CASE("case_pm1: odd-p blocks recover injected (r, s) with symplectic bases") {
    for (int s : {1, -1})
        for (int rsz : {1, 2, 3}) {
            Mat A = from_spec({{CaseTag::MinusOne, {-1.0, 0.0}, rsz, s, 2 * rsz}},
                              static_cast<std::uint64_t>(10 * rsz + (s > 0)));
            auto q = class_of(A, CaseTag::MinusOne);
            CaseResult r = case_pm1(A, q, kCfg);
            REQUIRE(r.blocks.size() == 1);
            CHECK(r.blocks[0].size_param == rsz);
            CHECK(r.blocks[0].sign == s);
            CHECK(basis_symplecticity(r, A) <= 1e-8);
            CHECK(case_reconstruction(r, A) <= 1e-8 * std::max(1.0, A.norm()));
        }
}

TEST_CASE("case_pm1: even-p pair block (s=0) and Theorem 3.1 eigenspace count") {
    for (int rsz : {1, 3}) {
        Mat A = from_spec({{CaseTag::PlusOne, {1.0, 0.0}, rsz, 0, 2 * rsz}},
                          static_cast<std::uint64_t>(rsz));
        auto q = class_of(A, CaseTag::PlusOne);
        CaseResult r = case_pm1(A, q, kCfg);
        REQUIRE(r.blocks.size() == 1);
        CHECK(r.blocks[0].size_param == rsz);
        CHECK(r.blocks[0].sign == 0);
        CHECK(basis_symplecticity(r, A) <= 1e-8);
        CHECK(case_reconstruction(r, A) <= 1e-8 * std::max(1.0, A.norm()));
        // dim Ker(A - I) = 2 * #{s_j = 0} + #{s_j != 0}
        auto [basis, ladder] = generalized_eigenspace(A, {1.0, 0.0}, kCfg);
        CHECK(ladder.dims[0] == 2);
    }
}

TEST_CASE("case_pm1: mixed signs at +1, canonical block order and sign law") {
    Mat A = from_spec({{CaseTag::PlusOne, {1.0, 0.0}, 1, -1, 2},
                       {CaseTag::PlusOne, {1.0, 0.0}, 1, 1, 2},
                       {CaseTag::PlusOne, {1.0, 0.0}, 1, 0, 2}},
                      19);
    auto q = class_of(A, CaseTag::PlusOne);
    CaseResult r = case_pm1(A, q, kCfg);
    REQUIRE(r.blocks.size() == 3);
    // sorted: dim descending, then sign +1, -1, 0
    CHECK(r.blocks[0].sign == 1);
    CHECK(r.blocks[1].sign == -1);
    CHECK(r.blocks[2].sign == 0);
    // Prop. 3.3: Q-hat_2 signature counts the nonzero signs
    // d_2 = 6 (two 2-chains + two 1-chains); the two signed blocks give +-1
    auto [f, sig] = q_hat(A, {1.0, 0.0}, 2, kCfg);
    CHECK(sig == Signature{1, 1, 4});
    CHECK(basis_symplecticity(r, A) <= 1e-8);
    CHECK(case_reconstruction(r, A) <= 1e-8 * std::max(1.0, A.norm()));
    // Theorem 3.1 count: dim Ker(A-I) = 2*1 + 2 = 4
    auto [basis, ladder] = generalized_eigenspace(A, {1.0, 0.0}, kCfg);
    CHECK(ladder.dims[0] == 4);
}

TEST_CASE("case_unit: rotations are their own normal forms") {
    Mat R(2, 2);
    R << 0, -1, 1, 0;  // rotation by pi/2, s = -1
    auto q = class_of(R, CaseTag::UnitNonReal);
    CaseResult r = case_unit(R, q, kCfg);
    REQUIRE(r.blocks.size() == 1);
    CHECK(r.blocks[0].size_param == 0);
    CHECK(r.blocks[0].sign == -1);
    CHECK(r.blocks[0].dim == 2);
    CHECK((build_block(r.blocks[0]) - R).norm() < 1e-14);

    Mat Rm(2, 2);
    Rm << 0, 1, -1, 0;  // rotation by -pi/2; representative is still i, s = +1
    auto qm = class_of(Rm, CaseTag::UnitNonReal);
    CaseResult rm = case_unit(Rm, qm, kCfg);
    REQUIRE(rm.blocks.size() == 1);
    CHECK(rm.blocks[0].sign == 1);
    CHECK((build_block(rm.blocks[0]) - Rm).norm() < 1e-14);
}

TEST_CASE("case_unit: odd-p 4k blocks recover (k, s)") {
    const cplx lam = std::polar(1.0, 1.0);
    for (int s : {1, -1})
        for (int k : {1, 2}) {
            Mat A = from_spec({{CaseTag::UnitNonReal, lam, k, s, 4 * k}},
                              static_cast<std::uint64_t>(20 + 2 * k + (s > 0)));
            auto q = class_of(A, CaseTag::UnitNonReal);
            CaseResult r = case_unit(A, q, kCfg);
            REQUIRE(r.blocks.size() == 1);
            CHECK(r.blocks[0].size_param == k);
            CHECK(r.blocks[0].sign == s);
            CHECK(r.blocks[0].dim == 4 * k);
            CHECK(basis_symplecticity(r, A) <= 1e-8);
            CHECK(case_reconstruction(r, A) <= 1e-8 * std::max(1.0, A.norm()));
        }
}

TEST_CASE("case_unit: even-p 4k+2 blocks recover (k, s)") {
    const cplx lam = std::polar(1.0, 2.2);
    for (int s : {1, -1})
        for (int k : {0, 1, 2}) {
            Mat A = from_spec({{CaseTag::UnitNonReal, lam, k, s, 4 * k + 2}},
                              static_cast<std::uint64_t>(40 + 2 * k + (s > 0)));
            auto q = class_of(A, CaseTag::UnitNonReal);
            CaseResult r = case_unit(A, q, kCfg);
            REQUIRE(r.blocks.size() == 1);
            CHECK(r.blocks[0].size_param == k);
            CHECK(r.blocks[0].sign == s);
            CHECK(r.blocks[0].dim == 4 * k + 2);
            CHECK(basis_symplecticity(r, A) <= 1e-8);
            CHECK(case_reconstruction(r, A) <= 1e-8 * std::max(1.0, A.norm()));
        }
}

TEST_CASE("case_unit: Theorem 4.5 block count equals complex kernel dimension") {
    const cplx lam = std::polar(1.0, 0.6);
    Mat A = from_spec({{CaseTag::UnitNonReal, lam, 0, 1, 2},
                       {CaseTag::UnitNonReal, lam, 1, -1, 4},
                       {CaseTag::UnitNonReal, lam, 1, 1, 6}},
                      8);
    auto q = class_of(A, CaseTag::UnitNonReal);
    CaseResult r = case_unit(A, q, kCfg);
    CHECK(r.blocks.size() == 3);
    auto [basis, ladder] = generalized_eigenspace(A, lam, kCfg);
    CHECK(static_cast<int>(r.blocks.size()) == ladder.dims[0]);
    CHECK(basis_symplecticity(r, A) <= 1e-7);
    CHECK(case_reconstruction(r, A) <= 1e-7 * std::max(1.0, A.norm()));
}

TEST_CASE("symplectic_gram_schmidt: already dual chain is only rescaled") {
    // build an exactly dual pair in R^4 (p = 1):
    // a_0 = e1, a_1 = e2, b_0 = -e4, b_1 = e3 gives Omega(a_i, b_j) = delta_{i+j,1}
    ChainBasis in;
    in.lambda = {1.0, 0.0};
    in.p = 1;
    auto e = [](int i) {
        CVec v = CVec::Zero(4);
        v(i) = 1.0;
        return v;
    };
    in.a_chain = {e(0), e(1)};
    in.b_chain = {-e(3), e(2)};
    ChainBasis out = symplectic_gram_schmidt(in, kCfg);
    for (int i = 0; i <= 1; ++i)
        for (int j = 0; j <= 1; ++j) {
            cplx want = (i + j == 1) ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
            CHECK(std::abs(omega_pair(in.a_chain[i], out.b_chain[j]) - want) < 1e-13);
        }
}

TEST_CASE("symplectic_gram_schmidt: one-step correction of contaminated chain") {
    ChainBasis in;
    in.lambda = {1.0, 0.0};
    in.p = 1;
    auto e = [](int i) {
        CVec v = CVec::Zero(4);
        v(i) = 1.0;
        return v;
    };
    in.a_chain = {e(0), e(1)};
    // contaminate b_0 with a multiple of b_1: Omega(a_0, b_0) becomes 0.3 and
    // must be cleared by one subtraction of b'_1
    in.b_chain = {(-e(3) + 0.3 * e(2)).eval(), e(2)};
    ChainBasis out = symplectic_gram_schmidt(in, kCfg);
    CHECK(std::abs(omega_pair(in.a_chain[0], out.b_chain[0])) < 1e-13);
    CHECK(std::abs(omega_pair(in.a_chain[0], out.b_chain[1]) - cplx(1.0, 0.0)) < 1e-13);
    CHECK(std::abs(omega_pair(in.a_chain[1], out.b_chain[0]) - cplx(1.0, 0.0)) < 1e-13);
    CHECK(std::abs(omega_pair(in.a_chain[1], out.b_chain[1])) < 1e-13);
}

TEST_CASE("symplectic_gram_schmidt: empty chain and degenerate pivot") {
    ChainBasis empty;
    CHECK(symplectic_gram_schmidt(empty, kCfg).b_chain.empty());
    ChainBasis bad;
    bad.lambda = {1.0, 0.0};
    bad.p = 0;
    bad.a_chain = {CVec::Zero(2)};
    bad.b_chain = {CVec::Zero(2)};
    bad.a_chain[0](0) = 1.0;
    bad.b_chain[0](0) = 1.0;  // Omega(a_0, b_0) = 0
    CHECK_THROWS_AS(symplectic_gram_schmidt(bad, kCfg), DegenerateChain);
}
