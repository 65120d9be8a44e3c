#pragma once

// Tolerance-aware dense complex linear algebra used by every other module:
// column spaces, kernels, orthogonal projectors, subspace intersection and
// completion of orthonormal frames to a unitary.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "ppi/errors.hpp"

namespace ppi {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct Tolerance {
    double abs_tol = 1e-9;
    // Relative to the largest singular value of the matrix being ranked.
    double rank_rel_tol = 1e-10;

    void validate() const {
        if (!(abs_tol >= 0.0) || !(rank_rel_tol >= 0.0))
            throw InputError("tolerances must be nonnegative");
    }
};

inline constexpr double kFrameTol = 1e-12;

inline void require_finite(const Matrix& a, const char* what = "matrix") {
    if (!a.allFinite())
        throw InputError(std::string(what) + " has non-finite entries");
}

inline void require_square(const Matrix& a, const char* what = "operator") {
    if (a.rows() != a.cols())
        throw InputError(std::string(what) + " is not square (" + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + ")");
}

inline Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

inline Matrix adjoint(const Matrix& a) { return a.adjoint(); }

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Matrix block_diag(const std::vector<Matrix>& blocks) {
    Eigen::Index r = 0, c = 0;
    for (const auto& b : blocks) {
        r += b.rows();
        c += b.cols();
    }
    Matrix out = Matrix::Zero(r, c);
    r = c = 0;
    for (const auto& b : blocks) {
        out.block(r, c, b.rows(), b.cols()) = b;
        r += b.rows();
        c += b.cols();
    }
    return out;
}

// ‖A*A − I‖_F; zero-column frames have defect 0.
inline double orthonormality_defect(const Matrix& frame) {
    if (frame.cols() == 0) return 0.0;
    return (frame.adjoint() * frame - identity(frame.cols())).norm();
}

inline double unitarity_defect(const Matrix& u) {
    if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
    if (u.rows() == 0) return 0.0;
    return std::max((u.adjoint() * u - identity(u.cols())).norm(),
                    (u * u.adjoint() - identity(u.rows())).norm());
}

// Orthonormal column frame of a subspace of C^ambient_dim.
class Subspace {
public:
    Subspace() = default;

    // Throws ConsistencyError when the columns are not orthonormal within kFrameTol·max(1, dim).
    Subspace(Matrix frame) : frame_(std::move(frame)) {
        require_finite(frame_, "frame");
        double slack = kFrameTol * std::max<double>(1.0, static_cast<double>(frame_.cols()));
        if (orthonormality_defect(frame_) > slack)
            throw ConsistencyError("frame columns are not orthonormal");
    }

    static Subspace zero(Eigen::Index ambient_dim) { return Subspace(Matrix(ambient_dim, 0)); }
    static Subspace full(Eigen::Index ambient_dim) { return Subspace(identity(ambient_dim)); }

    Eigen::Index ambient_dim() const noexcept { return frame_.rows(); }
    Eigen::Index dim() const noexcept { return frame_.cols(); }
    bool empty() const noexcept { return frame_.cols() == 0; }
    const Matrix& frame() const noexcept { return frame_; }

private:
    Matrix frame_{Matrix(0, 0)};
};

namespace detail {

// Singular values strictly above this threshold count towards the rank. The
// absolute floor keeps floating point residue of nilpotent powers (all
// singular values ~1e-16) from registering as rank.
inline double rank_threshold(double sigma_max, const Tolerance& tol) {
    return std::max(tol.rank_rel_tol * sigma_max, tol.abs_tol);
}

inline Eigen::Index numerical_rank(const Eigen::VectorXd& sv, const Tolerance& tol) {
    if (sv.size() == 0) return 0;
    double cut = rank_threshold(sv(0), tol);
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > cut) ++r;
    return r;
}

struct Svd {
    Eigen::VectorXd values;
    Matrix u;
    Matrix v;
};

// JacobiSVD rather than BDCSVD: the divide-and-conquer solver in Eigen 3.4.0
// breaks down on inputs with many repeated singular values, which sums of
// projections produce constantly. With EIGEN_USE_LAPACKE this calls zgesvd.
inline Svd svd(const Matrix& a, unsigned int options) {
    Eigen::JacobiSVD<Matrix> f(a, options);
    Svd out{f.singularValues(), Matrix(0, 0), Matrix(0, 0)};
    if (options & (Eigen::ComputeThinU | Eigen::ComputeFullU)) out.u = f.matrixU();
    if (options & (Eigen::ComputeThinV | Eigen::ComputeFullV)) out.v = f.matrixV();
    return out;
}

} // namespace detail

inline Eigen::Index rank(const Matrix& a, const Tolerance& tol = {}) {
    require_finite(a);
    if (a.size() == 0) return 0;
    return detail::numerical_rank(detail::svd(a, 0).values, tol);
}

inline Subspace onb_of_range(const Matrix& a, const Tolerance& tol = {}) {
    require_finite(a);
    tol.validate();
    if (a.cols() == 0 || a.rows() == 0) return Subspace::zero(a.rows());
    auto f = detail::svd(a, Eigen::ComputeThinU);
    Eigen::Index r = detail::numerical_rank(f.values, tol);
    return Subspace(f.u.leftCols(r).eval());
}

inline Subspace kernel(const Matrix& a, const Tolerance& tol = {}) {
    require_finite(a);
    tol.validate();
    if (a.cols() == 0) return Subspace::zero(0);
    if (a.rows() == 0) return Subspace::full(a.cols());
    auto f = detail::svd(a, Eigen::ComputeFullV);
    Eigen::Index r = detail::numerical_rank(f.values, tol);
    return Subspace(f.v.rightCols(a.cols() - r).eval());
}

inline Matrix projector(const Subspace& s) { return s.frame() * s.frame().adjoint(); }

inline Matrix complement_projector(const Subspace& s) {
    return identity(s.ambient_dim()) - projector(s);
}

// ‖P_{S1} − P_{S2}‖_F, the distance used for subspace equality.
inline double projection_distance(const Subspace& a, const Subspace& b) {
    if (a.ambient_dim() != b.ambient_dim())
        throw ConsistencyError("ambient dimension mismatch");
    return (projector(a) - projector(b)).norm();
}

inline bool same_subspace(const Subspace& a, const Subspace& b, const Tolerance& tol = {}) {
    return projection_distance(a, b) <= tol.abs_tol;
}

// S1 ∩ S2 as the kernel of (I − P1) + (I − P2). A vector lies in the kernel of
// this positive sum iff both terms annihilate it. When P1 and P2 commute the
// result equals the range of P1·P2.
inline Subspace intersect(const Subspace& a, const Subspace& b, const Tolerance& tol = {}) {
    if (a.ambient_dim() != b.ambient_dim())
        throw ConsistencyError("intersect: ambient dimension mismatch (" +
                               std::to_string(a.ambient_dim()) + " vs " +
                               std::to_string(b.ambient_dim()) + ")");
    return kernel(complement_projector(a) + complement_projector(b), tol);
}

inline Matrix concat_frames(const std::vector<Subspace>& frames, Eigen::Index ambient_dim) {
    Eigen::Index total = 0;
    for (const auto& f : frames) {
        if (f.ambient_dim() != ambient_dim && !(f.dim() == 0))
            throw ConsistencyError("frame ambient dimension mismatch");
        total += f.dim();
    }
    Matrix out(ambient_dim, total);
    Eigen::Index c = 0;
    for (const auto& f : frames) {
        if (f.dim() == 0) continue;
        out.middleCols(c, f.dim()) = f.frame();
        c += f.dim();
    }
    return out;
}

// Unitary whose leading columns are the given frames in order; the remaining
// columns are an orthonormal basis of their joint complement.
inline Matrix complete_to_unitary(const std::vector<Subspace>& frames, Eigen::Index ambient_dim,
                                  double orth_tol = 1e-9) {
    Matrix lead = concat_frames(frames, ambient_dim);
    if (lead.cols() > ambient_dim)
        throw ConsistencyError("frames exceed the ambient dimension");
    if (orthonormality_defect(lead) > orth_tol)
        throw ConsistencyError("frames are not pairwise orthogonal");
    if (lead.cols() == ambient_dim) return lead;
    Matrix out(ambient_dim, ambient_dim);
    out.leftCols(lead.cols()) = lead;
    if (lead.cols() == 0) {
        out = identity(ambient_dim);
        return out;
    }
    auto f = detail::svd(lead, Eigen::ComputeFullU);
    out.rightCols(ambient_dim - lead.cols()) = f.u.rightCols(ambient_dim - lead.cols());
    return out;
}

// Nearest unitary-column frame G(G*G)^{-1/2}, computed as U·V* from an SVD.
// Column correspondence with the input is preserved.
inline Matrix polar_orthonormalize(const Matrix& g) {
    if (g.cols() == 0) return g;
    auto f = detail::svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return f.u * f.v.adjoint();
}

inline std::vector<Complex> eigenvalues(const Matrix& a) {
    require_square(a);
    if (a.rows() == 0) return {};
    Eigen::ComplexEigenSolver<Matrix> es(a, false);
    const auto& ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

// Greedy nearest matching of two eigenvalue multisets. Returns the largest
// matched distance, or +inf when the sizes differ.
inline double spectrum_distance(std::vector<Complex> a, std::vector<Complex> b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    std::vector<bool> used(b.size(), false);
    for (const auto& x : a) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (used[j]) continue;
            double d = std::abs(x - b[j]);
            if (d < best) {
                best = d;
                arg = j;
            }
        }
        used[arg] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

} // namespace ppi
