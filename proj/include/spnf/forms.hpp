#pragma once
// The bilinear/sesquilinear objects of the theory: the Omega pairing, the
// T_{i,j} calculus on the unit circle, the Q-tilde quotient pairing and the
// Q-hat forms whose signatures carry the sign characteristic.
#include <utility>

#include "spnf/numcore.hpp"
#include "spnf/spectral.hpp"

namespace spnf {

enum class FormKind { Symmetric, Hermitian, Pairing };

struct FormMatrix {
    FormKind kind = FormKind::Pairing;
    CMat gram;
    CMat domain_basis;
    CMat codomain_basis;  // only for Pairing
    // natural magnitude of the form's entries; rank decisions threshold
    // against it so an identically-zero form made of rounding noise is read
    // as zero rather than as full rank
    double scale = 1.0;
};

struct Signature {
    int n_plus = 0;
    int n_minus = 0;
    int n_zero = 0;
    bool operator==(const Signature&) const = default;
};

// u^T Omega0 v (bilinear, not sesquilinear)
cplx omega_pair(const CVec& u, const CVec& v);

// T_{i,j}(v) = lambda^{-i} conj(lambda)^{-j} Omega((A-lambda)^i v, (A-conj(lambda))^j conj(v));
// defined only for |lambda| = 1
cplx t_form(const Mat& A, cplx lambda, const CVec& v, int i, int j);

// pairing of E_lambda/Ker(A-lambda)^j with E_{1/lambda}/Ker(A-1/lambda)^j
FormMatrix q_tilde(const Mat& A, cplx lambda, int j, const ToleranceConfig& cfg);

// the symmetric (lambda=+-1, m even) or Hermitian (unit lambda) form on
// Ker(A-lambda)^m, with its signature
std::pair<FormMatrix, Signature> q_hat(const Mat& A, cplx lambda, int m,
                                       const ToleranceConfig& cfg);

Signature signature_of(const FormMatrix& form, const ToleranceConfig& cfg);

}  // namespace spnf
