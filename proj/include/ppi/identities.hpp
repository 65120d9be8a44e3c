#pragma once

// Numerical audit of the algebraic identities behind the decomposition of a
// power partial isometry: the pull-through identities for range/source
// projections, orthogonality of the chain differences P_n and of the lattice
// Q_{m,n}, PQ = QP, T^p annihilating M_p, vanishing of the shift spaces, and
// dimension bookkeeping of the chain spaces H_p.
//
// Pairs whose product is bounded below kNegligible by the product of their
// Frobenius norms are not multiplied out; the bound is reported instead.

#include <algorithm>
#include <vector>

#include "ppi/halmos_wallen.hpp"

namespace ppi {

struct IdentityReport {
    double pull_range = 0.0;        // max_n ‖T(T^nT^{*n}) − (T^{n+1}T^{*n+1})T‖_F, n = 0..dim+1
    double pull_source = 0.0;       // max_n ‖T(T^{*n}T^n) − (T^{*n−1}T^{n−1})T‖_F, n = 1..dim+1
    double projections_commute = 0.0;
    double chain_orthogonality = 0.0; // P_mP_n = δ_{mn}P_m
    double lattice_orthogonality = 0.0; // Q_{m,n} mutually orthogonal projections
    double lattice_telescoping = 0.0;
    double lattice_containment = 0.0; // Q_{m,n}H ⊆ H_{m+n+1}
    double pq_commute = 0.0;
    double chain_annihilation = 0.0;  // max_p ‖T^p · frame(M_p)‖_F
    Eigen::Index shift_dim = 0;       // dim (1−P)QH
    Eigen::Index backshift_dim = 0;   // dim (1−Q)PH
    Eigen::Index bookkeeping_gap = 0; // Σ_p dim H_p − dim (1−P)(1−Q)H

    double max_defect() const {
        return std::max({pull_range, pull_source, projections_commute, chain_orthogonality,
                         lattice_orthogonality, lattice_telescoping, lattice_containment,
                         pq_commute, chain_annihilation});
    }
    bool passed(double limit) const {
        return max_defect() <= limit && shift_dim == 0 && backshift_dim == 0 &&
               bookkeeping_gap == 0;
    }
};

namespace detail {

inline constexpr double kNegligible = 1e-13;
// A projection step with Frobenius norm below this counts as settled.
inline constexpr double kSettled = 1e-11;

// Index past which the projection chain is numerically constant.
inline std::size_t last_moving(const std::vector<double>& step_norms, double floor) {
    std::size_t last = 0;
    for (std::size_t k = 0; k < step_norms.size(); ++k)
        if (step_norms[k] > floor) last = k;
    return last;
}

} // namespace detail

inline IdentityReport check_identities(const Matrix& t, const Tolerance& tol = {}) {
    detail::require_power_partial_isometry(t, tol);
    const Eigen::Index dim = t.rows();
    const std::size_t top = static_cast<std::size_t>(dim) + 1;
    const Matrix id = identity(dim);
    detail::PowerTable tab(t);
    IdentityReport rep;

    for (std::size_t n = 0; n <= top; ++n)
        rep.pull_range = std::max(
            rep.pull_range, (t * tab.range_proj(n) - tab.range_proj(n + 1) * t).norm());
    for (std::size_t n = 1; n <= top; ++n)
        rep.pull_source = std::max(
            rep.pull_source, (t * tab.source_proj(n) - tab.source_proj(n - 1) * t).norm());

    // Chain differences P_n = R_n − R_{n+1} and D-differences for n = 0..dim.
    std::vector<Matrix> dr, dd;
    std::vector<double> dr_norm, dd_norm;
    for (std::size_t n = 0; n <= static_cast<std::size_t>(dim); ++n) {
        dr.push_back(tab.range_proj(n) - tab.range_proj(n + 1));
        dd.push_back(tab.source_proj(n) - tab.source_proj(n + 1));
        dr_norm.push_back(dr.back().norm());
        dd_norm.push_back(dd.back().norm());
    }
    const std::size_t kr = detail::last_moving(dr_norm, detail::kSettled);
    const std::size_t kd = detail::last_moving(dd_norm, detail::kSettled);

    // All range and source projections pairwise commute. Beyond the last
    // moving index the chain is constant up to the listed tail norms.
    {
        std::vector<const Matrix*> projs;
        for (std::size_t n = 0; n <= std::min(kr + 1, top); ++n) projs.push_back(&tab.range_proj(n));
        for (std::size_t n = 0; n <= std::min(kd + 1, top); ++n) projs.push_back(&tab.source_proj(n));
        double worst = 0.0;
        for (std::size_t a = 0; a < projs.size(); ++a)
            for (std::size_t b = a + 1; b < projs.size(); ++b)
                worst = std::max(worst, ((*projs[a]) * (*projs[b]) - (*projs[b]) * (*projs[a])).norm());
        double tail = 0.0;
        for (std::size_t n = kr + 2; n <= top; ++n)
            tail = std::max(tail, (tab.range_proj(n) - tab.range_proj(kr + 1)).norm());
        for (std::size_t n = kd + 2; n <= top; ++n)
            tail = std::max(tail, (tab.source_proj(n) - tab.source_proj(kd + 1)).norm());
        rep.projections_commute = worst + 2.0 * tail;
    }

    // Settled steps are not multiplied out: ‖AB‖_F ≤ ‖A‖_F·‖B‖_F bounds them.
    for (std::size_t m = 0; m < dr.size(); ++m) {
        for (std::size_t n = 0; n < dr.size(); ++n) {
            double d;
            if (m == n)
                d = (dr[m] * dr[m] - dr[m]).norm();
            else if (m > kr || n > kr || dr_norm[m] * dr_norm[n] <= detail::kNegligible)
                d = dr_norm[m] * dr_norm[n];
            else
                d = (dr[m] * dr[n]).norm();
            rep.chain_orthogonality = std::max(rep.chain_orthogonality, d);
        }
    }

    // Lattice Q_{m,n} = (R_m − R_{m+1})(D_n − D_{n+1}).
    struct LatticeEntry {
        std::size_t m, n;
        Matrix q;
        double norm;
    };
    std::vector<LatticeEntry> lattice;
    double settled_bound = 0.0;
    for (std::size_t m = 0; m < dr.size(); ++m) {
        for (std::size_t n = 0; n < dd.size(); ++n) {
            if (m > kr || n > kd) {
                settled_bound = std::max(settled_bound, dr_norm[m] * dd_norm[n]);
                continue;
            }
            Matrix q = dr[m] * dd[n];
            double qn = q.norm();
            rep.lattice_orthogonality = std::max(
                {rep.lattice_orthogonality, (q * q - q).norm(), (q - q.adjoint()).norm()});
            lattice.push_back({m, n, std::move(q), qn});
        }
    }
    // A settled Q is tiny: its idempotence defect and its products with any
    // other lattice member are bounded by (1 + sqrt(dim))·‖Q‖_F.
    rep.lattice_orthogonality = std::max(
        rep.lattice_orthogonality, (1.0 + std::sqrt(static_cast<double>(dim))) * settled_bound);
    for (std::size_t a = 0; a < lattice.size(); ++a) {
        for (std::size_t b = a + 1; b < lattice.size(); ++b) {
            double bound = lattice[a].norm * lattice[b].norm;
            double d = bound <= detail::kNegligible ? bound : (lattice[a].q * lattice[b].q).norm();
            rep.lattice_orthogonality = std::max(rep.lattice_orthogonality, d);
        }
    }
    // Σ_{m≤M, n≤N} Q_{m,n} = (1 − R_{M+1})(1 − D_{N+1}), checked explicitly while
    // either chain still moves and bounded by the tail norms afterwards.
    {
        const std::size_t wm = std::min<std::size_t>(kr + 1, dim);
        const std::size_t wn = std::min<std::size_t>(kd + 1, dim);
        std::vector<Matrix> row_sums(wn + 1, Matrix::Zero(dim, dim));
        double worst = 0.0;
        for (std::size_t mm = 0; mm <= wm; ++mm) {
            Matrix partial = Matrix::Zero(dim, dim);
            for (std::size_t nn = 0; nn <= wn; ++nn) {
                partial += dr[mm] * dd[nn];
                row_sums[nn] += partial;
                Matrix rhs = (id - tab.range_proj(mm + 1)) * (id - tab.source_proj(nn + 1));
                worst = std::max(worst, (row_sums[nn] - rhs).norm());
            }
        }
        double tail = 0.0;
        for (std::size_t m = wm + 1; m < dr.size(); ++m) tail += dr_norm[m];
        for (std::size_t n = wn + 1; n < dd.size(); ++n) tail += dd_norm[n];
        rep.lattice_telescoping = worst + 2.0 * tail;
    }

    Subspace p_space = detail::range_limit(tab, tol);
    Subspace q_space = detail::source_limit(tab, tol);
    Matrix p_mat = projector(p_space);
    Matrix q_mat = projector(q_space);
    rep.pq_commute = (p_mat * q_mat - q_mat * p_mat).norm();
    rep.shift_dim = onb_of_range((id - p_mat) * q_mat, tol).dim();
    rep.backshift_dim = onb_of_range((id - q_mat) * p_mat, tol).dim();
    const Eigen::Index finite_part = onb_of_range((id - p_mat) * (id - q_mat), tol).dim();

    Eigen::Index chain_total = 0;
    std::vector<Matrix> hp_proj(static_cast<std::size_t>(dim) + 2, Matrix::Zero(dim, dim));
    for (Eigen::Index p = 1; p <= dim; ++p) {
        BlockSpace bs = detail::block_space(tab, static_cast<std::size_t>(p), tol);
        if (bs.multiplicity.dim() == 0) continue;
        rep.chain_annihilation = std::max(
            rep.chain_annihilation,
            (tab.power(static_cast<std::size_t>(p)) * bs.multiplicity.frame()).norm());
        chain_total += bs.space.dim();
        hp_proj[static_cast<std::size_t>(p)] = projector(bs.space);
    }
    rep.bookkeeping_gap = chain_total - finite_part;

    for (const auto& e : lattice) {
        if (e.norm <= detail::kNegligible) continue;
        std::size_t p = e.m + e.n + 1;
        const Matrix& hp = p < hp_proj.size() ? hp_proj[p] : hp_proj.back();
        rep.lattice_containment = std::max(rep.lattice_containment, ((id - hp) * e.q).norm());
    }
    return rep;
}

} // namespace ppi
