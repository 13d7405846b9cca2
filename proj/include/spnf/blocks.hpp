#pragma once
// Exact block constructors, symplectic direct sum, the full analyze pipeline
// assembling (N, P), and the conjugacy fingerprint with its comparison.
#include <string>
#include <vector>

#include "spnf/forms.hpp"
#include "spnf/normalform.hpp"
#include "spnf/numcore.hpp"
#include "spnf/spectral.hpp"

namespace spnf {

CMat jordan(cplx lambda, int m);
Mat jordan_real(double r, double phi, int two_m);

// the exact real matrix of the block described by b (always symplectic)
Mat build_block(const NormalFormBlock& b);

// interleaved direct sum: e-halves of both summands first, then f-halves
Mat symplectic_direct_sum(const Mat& A1, const Mat& A2);

struct QhatEntry {
    int m = 0;
    int rank = 0;
    Signature signature;
    bool operator==(const QhatEntry&) const = default;
};

struct FingerprintClass {
    CaseTag case_tag = CaseTag::RealOffCircle;
    cplx representative;
    std::vector<int> dims;          // d_r = dim Ker(A - lambda)^r, r = 1..p+1
    std::vector<QhatEntry> q_hat;   // only for |lambda| = 1
};

struct Fingerprint {
    std::vector<FingerprintClass> classes;
};

struct ResidualReport {
    double symplecticity_P = 0;
    double reconstruction = 0;  // ||AP - PN||
    double cond_P = 0;
    SnapReport snaps;
};

struct NormalFormResult {
    std::vector<NormalFormBlock> blocks;
    Mat N;
    Mat P;
    ResidualReport residual_report;
    Fingerprint fingerprint;
};

NormalFormResult analyze(const Mat& A, const ToleranceConfig& cfg = {});

Fingerprint fingerprint_of(const Mat& A, const ToleranceConfig& cfg = {});

struct ConjugacyReport {
    bool equal = false;
    std::string reason;  // first discrepancy; empty when equal
};
ConjugacyReport conjugacy_equal(const Mat& A, const Mat& B, const ToleranceConfig& cfg = {});

// discrete fields compared exactly, representatives within lambda_tol
bool fingerprints_equal(const Fingerprint& a, const Fingerprint& b, double lambda_tol,
                        std::string* reason = nullptr);

}  // namespace spnf
