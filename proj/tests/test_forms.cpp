#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "spnf/forms.hpp"
#include "spnf/synth.hpp"

using namespace spnf;

namespace {

Mat shear(double c) {
    Mat A(2, 2);
    A << 1, c, 0, 1;
    return A;
}

CVec cvec2(cplx a, cplx b) {
    CVec v(2);
    v << a, b;
    return v;
}

// random vector in the computed generalized eigenspace of lambda
CVec random_eigvec(const Mat& A, cplx lambda, std::mt19937_64& rng, const ToleranceConfig& cfg) {
    auto [basis, ladder] = generalized_eigenspace(A, lambda, cfg);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    CVec c(basis.cols());
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = cplx(U(rng), U(rng));
    return basis * c;
}

}  // namespace

TEST_CASE("omega_pair: defining values") {
    CHECK(omega_pair(cvec2(1, 0), cvec2(0, 1)) == cplx(1.0, 0.0));
    CVec u = cvec2(cplx(0.3, -0.7), cplx(1.1, 0.2));
    CHECK(omega_pair(u, u) == cplx(0.0, 0.0));
    CHECK(omega_pair(cvec2(1, cplx(0, -1)), cvec2(1, cplx(0, 1))) == cplx(0.0, 2.0));
    CHECK_THROWS_AS(omega_pair(CVec::Ones(2), CVec::Ones(4)), InvalidInput);
    CHECK_THROWS_AS(omega_pair(CVec::Ones(3), CVec::Ones(3)), InvalidInput);
}

TEST_CASE("omega_pair: antisymmetry and bilinearity") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int t = 0; t < 20; ++t) {
        CVec u(4), v(4);
        for (int i = 0; i < 4; ++i) {
            u(i) = cplx(U(rng), U(rng));
            v(i) = cplx(U(rng), U(rng));
        }
        CHECK(std::abs(omega_pair(u, v) + omega_pair(v, u)) < 1e-14);
        cplx a(0.7, -0.3);
        CHECK(std::abs(omega_pair((a * u).eval(), v) - a * omega_pair(u, v)) < 1e-12);
    }
}

TEST_CASE("t_form: shear T_{1,0} = 1") {
    Mat A = shear(1.0);
    CHECK(std::abs(t_form(A, {1.0, 0.0}, cvec2(0, 1), 1, 0) - cplx(1.0, 0.0)) < 1e-14);
    CHECK_THROWS_AS(t_form(A, {2.0, 0.0}, cvec2(0, 1), 0, 0), InvalidInput);
}

TEST_CASE("t_form: T_{i,i} vanishes for real lambda and real v") {
    Mat A = shear(-2.0);
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(t_form(A, {1.0, 0.0}, cvec2(0.4, 1.3), i, i)) < 1e-13);
}

TEST_CASE("t_form: Eq. (6) vanishing for i+j > p") {
    // shear has p = 1 at lambda = 1: any T with i+j >= 2 vanishes
    Mat A = shear(1.0);
    CVec v = cvec2(0.9, -0.4);
    for (int i = 0; i <= 3; ++i)
        for (int j = 0; j <= 3; ++j)
            if (i + j > 1) CHECK(std::abs(t_form(A, {1.0, 0.0}, v, i, j)) < 1e-12);
}

TEST_CASE("t_form: Eq. (8) recurrence and Eq. (9) skew-symmetry on unit-circle data") {
    ToleranceConfig cfg;
    const cplx lam = std::polar(1.0, 1.0);
    BlockSpec spec;
    spec.blocks.push_back({CaseTag::UnitNonReal, lam, 1, 1, 4});
    spec.blocks.push_back({CaseTag::UnitNonReal, lam, 1, -1, 6});
    std::mt19937_64 rng(31);
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        spec.conjugator_seed = seed;
        auto [A, fp] = build_from_params(spec);
        CVec v = random_eigvec(A, lam, rng, cfg);
        for (int i = 0; i <= 3; ++i)
            for (int j = 0; j <= 3; ++j) {
                cplx tij = t_form(A, lam, v, i, j);
                CHECK(std::abs(tij + std::conj(t_form(A, lam, v, j, i))) <=
                      1e-9 * std::max(1.0, std::abs(tij)));
                if (j >= 1) {
                    cplx rec = -t_form(A, lam, v, i + 1, j) - t_form(A, lam, v, i + 1, j - 1);
                    CHECK(std::abs(tij - rec) <= 1e-8 * std::max(1.0, std::abs(tij)));
                }
            }
    }
}

TEST_CASE("q_tilde: shear j=1 gives invertible 1x1 gram") {
    ToleranceConfig cfg;
    FormMatrix f = q_tilde(shear(1.0), {1.0, 0.0}, 1, cfg);
    CHECK(f.kind == FormKind::Pairing);
    REQUIRE(f.gram.rows() == 1);
    REQUIRE(f.gram.cols() == 1);
    CHECK(std::abs(f.gram(0, 0)) > cfg.rank_rel_tol);
}

TEST_CASE("q_tilde: empty beyond p") {
    ToleranceConfig cfg;
    Mat D = Mat::Zero(2, 2);
    D(0, 0) = 2.0;
    D(1, 1) = 0.5;
    FormMatrix f = q_tilde(D, {2.0, 0.0}, 1, cfg);
    CHECK(f.gram.size() == 0);
}

TEST_CASE("q_tilde: lambda=3 q=2 block pair, j=1 invertible (Lemma 1.3)") {
    ToleranceConfig cfg;
    BlockSpec spec;
    spec.blocks.push_back({CaseTag::RealOffCircle, {3.0, 0.0}, 2, 0, 4});
    spec.conjugator_seed = 13;
    auto [A, fp] = build_from_params(spec);
    FormMatrix f = q_tilde(A, {3.0, 0.0}, 1, cfg);
    REQUIRE(f.gram.rows() == 1);
    REQUIRE(f.gram.cols() == 1);
    CHECK(std::abs(f.gram(0, 0)) > cfg.rank_rel_tol * f.gram.norm());
}

TEST_CASE("q_tilde: invertibility across a mixed grid (Lemma 1.3)") {
    ToleranceConfig cfg;
    BlockSpec spec;
    spec.blocks.push_back({CaseTag::RealOffCircle, {2.0, 0.0}, 3, 0, 6});
    spec.blocks.push_back({CaseTag::RealOffCircle, {2.0, 0.0}, 1, 0, 2});
    for (std::uint64_t seed : {2u, 6u, 10u}) {
        spec.conjugator_seed = seed;
        auto [A, fp] = build_from_params(spec);
        for (int j = 1; j <= 2; ++j) {
            FormMatrix f = q_tilde(A, {2.0, 0.0}, j, cfg);
            REQUIRE(f.gram.rows() == f.gram.cols());
            if (f.gram.size() == 0) continue;
            Eigen::JacobiSVD<CMat> svd(f.gram);
            const auto& sv = svd.singularValues();
            CHECK(sv(sv.size() - 1) > cfg.rank_rel_tol * sv(0));
        }
    }
}

TEST_CASE("q_hat: identity gives the zero form") {
    ToleranceConfig cfg;
    auto [f, sig] = q_hat(Mat::Identity(2, 2), {1.0, 0.0}, 2, cfg);
    CHECK(sig == Signature{0, 0, 2});
}

TEST_CASE("q_hat: shear signatures +1 / -1") {
    ToleranceConfig cfg;
    auto [fp, sp] = q_hat(shear(1.0), {1.0, 0.0}, 2, cfg);
    CHECK(sp == Signature{1, 0, 1});
    auto [fm, sm] = q_hat(shear(-1.0), {1.0, 0.0}, 2, cfg);
    CHECK(sm == Signature{0, 1, 1});
}

TEST_CASE("q_hat: rotation by pi/2 at lambda=i, m=1 -> (0,1,0)") {
    ToleranceConfig cfg;
    Mat R(2, 2);
    R << 0, -1, 1, 0;
    auto [f, sig] = q_hat(R, {0.0, 1.0}, 1, cfg);
    CHECK(f.kind == FormKind::Hermitian);
    CHECK(sig == Signature{0, 1, 0});
    // direct evaluation: i Omega(v, conj v) with v = (1, -i) gives -2
    CVec v = cvec2(1, cplx(0, -1));
    cplx val = cplx(0, 1) * omega_pair(v, v.conjugate());
    CHECK(std::abs(val - cplx(-2.0, 0.0)) < 1e-14);
}

TEST_CASE("q_hat: rotation by -pi/2 at lambda=i, m=1 -> (1,0,0)") {
    ToleranceConfig cfg;
    Mat R(2, 2);
    R << 0, 1, -1, 0;
    auto [f, sig] = q_hat(R, {0.0, 1.0}, 1, cfg);
    CHECK(sig == Signature{1, 0, 0});
}

TEST_CASE("q_hat: gram symmetry/hermitianness invariants") {
    ToleranceConfig cfg;
    BlockSpec spec;
    const cplx lam = std::polar(1.0, 0.8);
    spec.blocks.push_back({CaseTag::PlusOne, {1.0, 0.0}, 2, 1, 4});
    spec.blocks.push_back({CaseTag::UnitNonReal, lam, 1, -1, 4});
    spec.conjugator_seed = 17;
    auto [A, fp] = build_from_params(spec);
    auto [f1, s1] = q_hat(A, {1.0, 0.0}, 2, cfg);
    CHECK(f1.kind == FormKind::Symmetric);
    CHECK((f1.gram - f1.gram.transpose()).norm() <= cfg.residual_tol * std::max(1.0, f1.gram.norm()));
    for (int m : {1, 2}) {
        auto [f2, s2] = q_hat(A, lam, m, cfg);
        CHECK(f2.kind == FormKind::Hermitian);
        CHECK((f2.gram - f2.gram.adjoint()).norm() <=
              cfg.residual_tol * std::max(1.0, f2.gram.norm()));
    }
    CHECK_THROWS_AS(q_hat(A, {1.0, 0.0}, 3, cfg), InvalidInput);   // odd m at +1
    CHECK_THROWS_AS(q_hat(A, {2.0, 0.0}, 2, cfg), InvalidInput);   // off the circle
}

TEST_CASE("q_hat: deep-kernel directions contribute zeros, not spurious signs") {
    // one 4-chain at +1: Q-hat_2 is identically zero on Ker(A-I)^2
    ToleranceConfig cfg;
    BlockSpec spec;
    spec.blocks.push_back({CaseTag::PlusOne, {1.0, 0.0}, 2, 1, 4});
    for (std::uint64_t seed : {1u, 5u, 9u}) {
        spec.conjugator_seed = seed;
        auto [A, fp] = build_from_params(spec);
        auto [f, sig] = q_hat(A, {1.0, 0.0}, 2, cfg);
        CHECK(sig == Signature{0, 0, 2});
        auto [f4, sig4] = q_hat(A, {1.0, 0.0}, 4, cfg);
        CHECK(sig4 == Signature{1, 0, 3});
    }
}

TEST_CASE("signature_of: explicit grams") {
    ToleranceConfig cfg;
    FormMatrix f;
    f.kind = FormKind::Symmetric;
    f.gram = CMat::Zero(2, 2);
    f.gram(0, 0) = 1.0;
    f.gram(1, 1) = -1.0;
    CHECK(signature_of(f, cfg) == Signature{1, 1, 0});
    f.gram = CMat::Zero(3, 3);
    CHECK(signature_of(f, cfg) == Signature{0, 0, 3});
    f.gram = CMat::Zero(2, 2);
    f.gram(0, 0) = 2.0;
    f.gram(1, 1) = 1e-15;
    CHECK(signature_of(f, cfg) == Signature{1, 0, 1});
    f.kind = FormKind::Pairing;
    CHECK_THROWS_AS(signature_of(f, cfg), InvalidInput);
}
