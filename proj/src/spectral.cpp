#include "spnf/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace spnf {

const char* case_tag_name(CaseTag tag) {
    switch (tag) {
        case CaseTag::RealOffCircle: return "RealOffCircle";
        case CaseTag::ComplexOffCircle: return "ComplexOffCircle";
        case CaseTag::PlusOne: return "PlusOne";
        case CaseTag::MinusOne: return "MinusOne";
        case CaseTag::UnitNonReal: return "UnitNonReal";
    }
    return "?";
}

namespace {

// kernel with the rank threshold pinned to the scale of the *original* matrix:
// deflated iterates can consist entirely of rounding noise, and a threshold
// relative to their own largest singular value would misread that noise as rank
template <typename Matrix>
Matrix scaled_kernel(const Matrix& M, double scale, const ToleranceConfig& cfg) {
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 0.0;
    double thresh = cfg.rank_rel_tol * std::max({smax, scale, 1.0});
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > thresh) ++rank;
    return svd.matrixV().rightCols(M.cols() - rank);
}

template <typename Ladder, typename Matrix>
Ladder kernel_ladder_impl(const Matrix& N, const ToleranceConfig& cfg, int max_r) {
    cfg.validate();
    Ladder out;
    const double scale = N.norm();
    Matrix K = scaled_kernel(N, scale, cfg);
    if (K.cols() == 0) return out;  // not an eigenvalue: empty ladder
    out.dims.push_back(static_cast<int>(K.cols()));
    out.bases.push_back(K);
    for (int r = 2; r <= max_r; ++r) {
        const Matrix& Kp = out.bases.back();
        // Ker N^r = Ker((I - K K^H) N) where K spans Ker N^{r-1}
        Matrix M = N - Kp * (Kp.adjoint() * N);
        Matrix next = scaled_kernel(M, scale, cfg);
        int d = static_cast<int>(next.cols());
        if (d <= out.dims.back()) break;  // stabilized
        out.dims.push_back(d);
        out.bases.push_back(std::move(next));
    }
    out.p = static_cast<int>(out.dims.size()) - 1;
    return out;
}

}  // namespace

KernelLadder kernel_ladder(const CMat& N, const ToleranceConfig& cfg, int max_r) {
    return kernel_ladder_impl<KernelLadder>(N, cfg, max_r);
}

RealKernelLadder kernel_ladder(const Mat& N, const ToleranceConfig& cfg, int max_r) {
    return kernel_ladder_impl<RealKernelLadder>(N, cfg, max_r);
}

namespace {

struct Cluster {
    cplx mean;
    int size = 0;
};

double cluster_scale(const Mat& A) { return std::max(1.0, A.norm()); }

// adaptive radius: a defective eigenvalue with a length-q chain scatters like
// (eps*scale)^{1/q}
double merge_radius(int combined_size, double scale, const ToleranceConfig& cfg, int two_n) {
    int q = std::min(combined_size, two_n);
    double adaptive =
        4.0 * std::pow(std::numeric_limits<double>::epsilon() * scale, 1.0 / q);
    return std::max(cfg.eig_cluster_tol, adaptive);
}

struct Dsu {
    std::vector<int> parent;
    explicit Dsu(int n) : parent(static_cast<std::size_t>(n)) {
        for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
    }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

// Multi-scale single-linkage clustering.  A merge at radius ~(eps*scale)^{1/q}
// is only justified when the merged group has multiplicity at least q, so for
// each q we form connected components at that radius and accept only the
// components of size >= q.
std::vector<Cluster> cluster_eigenvalues(const CVec& eig, const Mat& A,
                                         const ToleranceConfig& cfg) {
    const double scale = cluster_scale(A);
    const int two_n = static_cast<int>(A.rows());
    const int m = static_cast<int>(eig.size());
    Dsu dsu(m);
    for (int q = 2; q <= two_n; ++q) {
        const double delta = merge_radius(q, scale, cfg, two_n);
        Dsu prov = dsu;
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                if (std::abs(eig(i) - eig(j)) <= delta) prov.unite(i, j);
        std::vector<int> size(static_cast<std::size_t>(m), 0);
        for (int i = 0; i < m; ++i) size[static_cast<std::size_t>(prov.find(i))]++;
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                if (prov.find(i) == prov.find(j) &&
                    size[static_cast<std::size_t>(prov.find(i))] >= q)
                    dsu.unite(i, j);
    }
    std::vector<Cluster> cl;
    std::vector<int> slot(static_cast<std::size_t>(m), -1);
    for (int i = 0; i < m; ++i) {
        int r = dsu.find(i);
        if (slot[static_cast<std::size_t>(r)] < 0) {
            slot[static_cast<std::size_t>(r)] = static_cast<int>(cl.size());
            cl.push_back({cplx(0, 0), 0});
        }
        Cluster& c = cl[static_cast<std::size_t>(slot[static_cast<std::size_t>(r)])];
        c.mean += eig(i);
        c.size += 1;
    }
    for (auto& c : cl) c.mean /= static_cast<double>(c.size);
    return cl;
}

void snap_cluster(Cluster& c, const ToleranceConfig& cfg, SnapReport* snaps) {
    cplx before = c.mean;
    cplx v = c.mean;
    std::string kind;
    if (std::abs(v.imag()) <= cfg.eig_cluster_tol && v.imag() != 0.0) {
        v = cplx(v.real(), 0.0);
        kind = "real-axis";
    }
    double mod = std::abs(v);
    if (mod > 0 && std::abs(mod - 1.0) <= cfg.circle_snap_tol && mod != 1.0) {
        v /= mod;
        kind = kind.empty() ? "unit-circle" : kind + "+unit-circle";
    }
    if (std::abs(v - cplx(1.0, 0.0)) <= cfg.circle_snap_tol && v != cplx(1.0, 0.0)) {
        v = cplx(1.0, 0.0);
        kind = "plus-one";
    } else if (std::abs(v + cplx(1.0, 0.0)) <= cfg.circle_snap_tol && v != cplx(-1.0, 0.0)) {
        v = cplx(-1.0, 0.0);
        kind = "minus-one";
    }
    if (v != before) {
        c.mean = v;
        if (snaps) snaps->events.push_back({before, v, kind});
    }
}

std::string fmt(cplx z) {
    std::ostringstream os;
    os << z.real() << (z.imag() >= 0 ? "+" : "") << z.imag() << "i";
    return os.str();
}

}  // namespace

std::vector<QuadrupleClass> eigen_quadruples(const Mat& A, const ToleranceConfig& cfg,
                                             SnapReport* snaps) {
    cfg.validate();
    if (A.size() == 0 || A.rows() != A.cols() || A.rows() % 2 != 0)
        throw InvalidInput("eigen_quadruples: matrix must be square of even dimension");
    if (!all_finite(A)) throw InvalidInput("eigen_quadruples: non-finite entries");
    const Eigen::Index two_n = A.rows();
    const Eigen::Index n = two_n / 2;
    if (symplecticity_residual(A) > cfg.residual_tol * static_cast<double>(n))
        throw NotSymplectic("eigen_quadruples: matrix is not symplectic within tolerance");

    Eigen::EigenSolver<Mat> es(A);
    if (es.info() != Eigen::Success)
        throw NumericalDegeneracy("eigen_quadruples: eigenvalue iteration failed");
    std::vector<Cluster> cl = cluster_eigenvalues(es.eigenvalues(), A, cfg);
    for (auto& c : cl) snap_cluster(c, cfg, snaps);

    // snapping can make two clusters coincide (off-circle pair projected onto
    // the circle); merge them
    for (std::size_t i = 0; i < cl.size(); ++i)
        for (std::size_t j = i + 1; j < cl.size();) {
            if (std::abs(cl[i].mean - cl[j].mean) <= cfg.eig_cluster_tol) {
                cl[i].size += cl[j].size;
                cl.erase(cl.begin() + static_cast<std::ptrdiff_t>(j));
            } else {
                ++j;
            }
        }
    for (std::size_t i = 0; i < cl.size(); ++i)
        for (std::size_t j = i + 1; j < cl.size(); ++j)
            if (std::abs(cl[i].mean - cl[j].mean) < 2.0 * cfg.eig_cluster_tol)
                throw ToleranceAmbiguity("eigen_quadruples: clusters at " + fmt(cl[i].mean) +
                                         " and " + fmt(cl[j].mean) +
                                         " are within the clustering tolerance of merging");

    auto find_cluster = [&](cplx target) -> int {
        int best = -1;
        double bestd = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < cl.size(); ++i) {
            double d = std::abs(cl[i].mean - target);
            if (d < bestd) {
                bestd = d;
                best = static_cast<int>(i);
            }
        }
        double scale = cluster_scale(A);
        if (best >= 0 &&
            bestd <= merge_radius(cl[static_cast<std::size_t>(best)].size, scale, cfg,
                                  static_cast<int>(two_n)))
            return best;
        return -1;
    };

    std::vector<bool> used(cl.size(), false);
    std::vector<QuadrupleClass> classes;
    for (std::size_t i = 0; i < cl.size(); ++i) {
        if (used[i]) continue;
        cplx mu = cl[i].mean;
        QuadrupleClass qc;
        // classify and pick the canonical representative
        if (mu.imag() == 0.0) {
            double x = mu.real();
            if (x == 1.0) {
                qc.case_tag = CaseTag::PlusOne;
                qc.representative = cplx(1.0, 0.0);
                qc.members = {cplx(1.0, 0.0)};
            } else if (x == -1.0) {
                qc.case_tag = CaseTag::MinusOne;
                qc.representative = cplx(-1.0, 0.0);
                qc.members = {cplx(-1.0, 0.0)};
            } else {
                qc.case_tag = CaseTag::RealOffCircle;
                double rep = std::abs(x) > 1.0 ? x : 1.0 / x;
                qc.representative = cplx(rep, 0.0);
                qc.members = {cplx(rep, 0.0), cplx(1.0 / rep, 0.0)};
            }
        } else {
            cplx rep = mu.imag() > 0 ? mu : std::conj(mu);
            // snapping divides by the modulus, which need not give |mu| == 1
            // exactly; post-snap means are either within a few ulps of the
            // circle or at least circle_snap_tol away
            if (std::abs(std::abs(mu) - 1.0) <= 1e-12) {
                qc.case_tag = CaseTag::UnitNonReal;
                qc.representative = rep / std::abs(rep);
                qc.members = {qc.representative, std::conj(qc.representative)};
            } else {
                qc.case_tag = CaseTag::ComplexOffCircle;
                if (std::abs(rep) < 1.0) rep = 1.0 / std::conj(rep);  // keeps Im > 0
                qc.representative = rep;
                qc.members = {rep, 1.0 / rep, std::conj(rep), 1.0 / std::conj(rep)};
            }
        }
        // match every orbit member to a cluster; sizes must agree
        int mult = -1;
        std::vector<int> mine;
        for (cplx m : qc.members) {
            int ci = find_cluster(m);
            if (ci < 0)
                throw ToleranceAmbiguity("eigen_quadruples: orbit member " + fmt(m) +
                                         " of class " + fmt(qc.representative) +
                                         " has no matching eigenvalue cluster");
            if (used[static_cast<std::size_t>(ci)] &&
                std::find(mine.begin(), mine.end(), ci) == mine.end())
                throw ToleranceAmbiguity("eigen_quadruples: cluster at " +
                                         fmt(cl[static_cast<std::size_t>(ci)].mean) +
                                         " matched by two distinct quadruple classes");
            mine.push_back(ci);
            if (mult < 0) mult = cl[static_cast<std::size_t>(ci)].size;
            if (cl[static_cast<std::size_t>(ci)].size != mult)
                throw ToleranceAmbiguity(
                    "eigen_quadruples: orbit members of class " + fmt(qc.representative) +
                    " carry unequal multiplicities");
            used[static_cast<std::size_t>(ci)] = true;
        }
        qc.algebraic_multiplicity_per_member = mult;
        classes.push_back(std::move(qc));
    }
    int total = 0;
    for (const auto& c : classes)
        total += c.algebraic_multiplicity_per_member * static_cast<int>(c.members.size());
    if (total != static_cast<int>(two_n))
        throw ToleranceAmbiguity("eigen_quadruples: class multiplicities sum to " +
                                 std::to_string(total) + ", expected " + std::to_string(two_n));
    return classes;
}

std::pair<CMat, EigenspaceLadder> generalized_eigenspace(const Mat& A, cplx lambda,
                                                         const ToleranceConfig& cfg) {
    cfg.validate();
    if (A.size() == 0 || A.rows() != A.cols())
        throw InvalidInput("generalized_eigenspace: matrix must be square");
    CMat N = A.cast<cplx>() - lambda * CMat::Identity(A.rows(), A.cols());
    KernelLadder kl = kernel_ladder(N, cfg, static_cast<int>(A.rows()));
    if (kl.dims.empty())
        throw NotAnEigenvalue("generalized_eigenspace: value is not an eigenvalue within tolerance");
    EigenspaceLadder ladder;
    ladder.lambda = lambda;
    ladder.dims = kl.dims;
    ladder.p = kl.p;
    return {kl.bases.back(), std::move(ladder)};
}

Mat invariant_real_subspace(const Mat& A, const QuadrupleClass& q, const ToleranceConfig& cfg) {
    cfg.validate();
    std::vector<Mat> pieces;
    std::vector<cplx> done;
    for (cplx m : q.members) {
        if (m.imag() < 0.0) continue;  // conjugate handled via real/imag parts
        auto [basis, ladder] = generalized_eigenspace(A, m, cfg);
        if (m.imag() == 0.0) {
            pieces.push_back(basis.real());
            // imaginary parts of a complex kernel basis of a real matrix also
            // lie in the real eigenspace; keep them for span safety
            pieces.push_back(basis.imag());
        } else {
            pieces.push_back(basis.real());
            pieces.push_back(basis.imag());
        }
        done.push_back(m);
    }
    Eigen::Index cols = 0;
    for (const auto& p : pieces) cols += p.cols();
    Mat S(A.rows(), cols);
    Eigen::Index at = 0;
    for (const auto& p : pieces) {
        S.middleCols(at, p.cols()) = p;
        at += p.cols();
    }
    const int want =
        q.algebraic_multiplicity_per_member * static_cast<int>(q.members.size());
    Eigen::JacobiSVD<Mat> svd(S, Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 0.0;
    double thresh = cfg.rank_rel_tol * (smax > 0 ? smax : 1.0);
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > thresh) ++rank;
    if (rank != want)
        throw NumericalDegeneracy("invariant_real_subspace: real span has rank " +
                                  std::to_string(rank) + ", expected " + std::to_string(want));
    Mat Q = svd.matrixU().leftCols(want);
    // restricted symplectic form must be non-degenerate
    Mat G = Q.transpose() * omega0(A.rows()) * Q;
    Eigen::JacobiSVD<Mat> gsvd(G);
    if (gsvd.singularValues()(gsvd.singularValues().size() - 1) <= cfg.rank_rel_tol)
        throw NumericalDegeneracy(
            "invariant_real_subspace: restricted symplectic form is degenerate");
    // A-invariance
    Mat AQ = A * Q;
    if ((AQ - Q * (Q.transpose() * AQ)).norm() > cfg.residual_tol * std::max(1.0, A.norm()))
        throw NumericalDegeneracy("invariant_real_subspace: span is not A-invariant to tolerance");
    return Q;
}

}  // namespace spnf
