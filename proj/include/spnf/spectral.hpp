#pragma once
// Spectrum handling: quadruple classes, snapping, kernel ladders and the real
// invariant symplectic subspaces V_[lambda].
#include <utility>
#include <vector>

#include "spnf/numcore.hpp"

namespace spnf {

enum class CaseTag { RealOffCircle, ComplexOffCircle, PlusOne, MinusOne, UnitNonReal };

const char* case_tag_name(CaseTag tag);

struct QuadrupleClass {
    cplx representative;        // canonical member (see spec representative rules)
    std::vector<cplx> members;  // exact orbit of the representative, 1-4 values
    CaseTag case_tag = CaseTag::RealOffCircle;
    int algebraic_multiplicity_per_member = 0;
};

struct EigenspaceLadder {
    cplx lambda;
    std::vector<int> dims;  // dim Ker(A - lambda I)^r for r = 1..p+1
    int p = 0;              // last strict increase; dims[p] is the algebraic multiplicity
};

struct SnapEvent {
    cplx before;
    cplx after;
    std::string kind;  // "real-axis", "unit-circle", "plus-one", "minus-one"
};
struct SnapReport {
    std::vector<SnapEvent> events;
};

// Orthonormal kernel bases of N, N^2, ... computed by deflation
// (Ker N^{r+1} = Ker((I - K_r K_r^H) N)), never by explicit powers.
struct KernelLadder {
    std::vector<int> dims;    // d_1..d_{p+1}, strictly increasing
    std::vector<CMat> bases;  // bases[r-1] spans Ker N^r, orthonormal columns
    int p = 0;
};
KernelLadder kernel_ladder(const CMat& N, const ToleranceConfig& cfg, int max_r);

struct RealKernelLadder {
    std::vector<int> dims;
    std::vector<Mat> bases;
    int p = 0;
};
RealKernelLadder kernel_ladder(const Mat& N, const ToleranceConfig& cfg, int max_r);

std::vector<QuadrupleClass> eigen_quadruples(const Mat& A, const ToleranceConfig& cfg,
                                             SnapReport* snaps = nullptr);

std::pair<CMat, EigenspaceLadder> generalized_eigenspace(const Mat& A, cplx lambda,
                                                         const ToleranceConfig& cfg);

Mat invariant_real_subspace(const Mat& A, const QuadrupleClass& q, const ToleranceConfig& cfg);

}  // namespace spnf
