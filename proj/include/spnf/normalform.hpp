#pragma once
// The constructive heart: per-eigenvalue-class algorithms producing a
// symplectic basis together with the block data (sizes and signs) of the
// normal form restricted to the class subspace.
#include <vector>

#include "spnf/forms.hpp"
#include "spnf/numcore.hpp"
#include "spnf/spectral.hpp"

namespace spnf {

struct NormalFormBlock {
    CaseTag case_tag = CaseTag::RealOffCircle;
    cplx lambda;     // canonical representative
    int size_param = 0;  // q_j / r_j / k_j depending on the case
    int sign = 0;        // -1, 0, +1; 0 only for lambda = +-1 (odd size_param)
    int dim = 0;         // real dimension of the block
    bool operator==(const NormalFormBlock&) const = default;
};

struct ChainBasis {
    cplx lambda;
    int p = 0;
    std::vector<CVec> a_chain;  // a_i = (A - lambda I)^i v, i = 0..p
    std::vector<CVec> b_chain;  // partner chain (from E_{1/lambda} or conjugates)
};

struct CaseResult {
    std::vector<NormalFormBlock> blocks;
    // per-block (e-half columns, f-half columns), same order as blocks
    std::vector<std::pair<Mat, Mat>> bases;
    Mat basis_columns;     // all e-halves then all f-halves, block order
    double t_residual = 0; // worst leftover |T_{i,j}| after the clearing sweeps
};

// Lemma 1.5 normalization: rescale so T_{k,k-1} = +-1 and clear all T_{i,j}
// with i,j <= k-1. Requires |lambda| = 1 and an odd chain length for v.
CVec normalize_generator_odd(const Mat& A, cplx lambda, const CVec& v,
                             const ToleranceConfig& cfg = {});

CaseResult case_offcircle(const Mat& A, const QuadrupleClass& q, const ToleranceConfig& cfg);
CaseResult case_pm1(const Mat& A, const QuadrupleClass& q, const ToleranceConfig& cfg);
CaseResult case_unit(const Mat& A, const QuadrupleClass& q, const ToleranceConfig& cfg);

// Gram-Schmidt of the b-chain against the a-chain: output b'-chain satisfies
// Omega(a_i, b'_j) = delta_{i+j,p}.
ChainBasis symplectic_gram_schmidt(const ChainBasis& pivot_chain, const ToleranceConfig& cfg);

}  // namespace spnf
