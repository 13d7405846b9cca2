#pragma once
// Test-side generation and independent oracles: seeded random symplectic
// matrices, matrices built from block specifications, brute-force ladders and
// the combinatorial expected fingerprint (never calls analyze).
#include <cstdint>
#include <utility>
#include <vector>

#include "spnf/blocks.hpp"
#include "spnf/numcore.hpp"

namespace spnf {

struct BlockSpec {
    std::vector<NormalFormBlock> blocks;
    std::uint64_t conjugator_seed = 0;
    double conjugator_condition_cap = 1e3;
};

// P in Sp(2n,R) with cond(P) <= condition_cap, deterministic for fixed seed
Mat random_symplectic(int n, std::uint64_t seed, double condition_cap = 1e3);

// A = P N(spec) P^{-1} plus the expected fingerprint computed from the spec alone
std::pair<Mat, Fingerprint> build_from_params(const BlockSpec& spec);

// d_r = dim Ker (A - lambda)^r by explicit powers, r = 1..r_max (no deflation)
std::vector<int> brute_force_ladder(const Mat& A, cplx lambda, int r_max,
                                    const ToleranceConfig& cfg = {});

Fingerprint expected_fingerprint(const std::vector<NormalFormBlock>& blocks);

}  // namespace spnf
