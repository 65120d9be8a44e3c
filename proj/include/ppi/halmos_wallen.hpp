#pragma once

// Canonical decomposition of a single power partial isometry on C^n into a
// unitary part and truncated shifts J_p ⊗ I_{mult}.
//
// With P = lim T^nT^{*n} and Q = lim T^{*n}T^n (both reached after finitely
// many steps here), H_u = PQH carries the unitary part, (1−P)QH and (1−Q)PH
// would carry the forward and backward shifts and are always zero for
// matrices, and the rest splits into the chain spaces H_p built from the
// multiplicity spaces M_p.

#include <limits>
#include <string>
#include <vector>

#include "ppi/linalg.hpp"
#include "ppi/pisometry.hpp"

namespace ppi {

// J_p: e_k ↦ e_{k+1} for k < p, e_p ↦ 0. J_1 is the 1×1 zero matrix.
inline Matrix truncated_shift(Eigen::Index p) {
    if (p < 1) throw InputError("truncated shift needs p >= 1");
    Matrix j = Matrix::Zero(p, p);
    for (Eigen::Index k = 0; k + 1 < p; ++k) j(k + 1, k) = 1.0;
    return j;
}

struct Block {
    int p = 1;
    int mult = 0;
    friend bool operator==(const Block&, const Block&) = default;
};

struct HWDecomposition {
    Eigen::Index ambient_dim = 0;
    Matrix unitary_part{Matrix(0, 0)};
    // p ascending, mult > 0
    std::vector<Block> blocks;
    Matrix basis{Matrix(0, 0)};
    double residual = 0.0;
    // Multiplicities of the forward and backward shift summands. Kept so the
    // vocabulary matches the orbit backend; always 0 for matrices.
    int shift_mult = 0;
    int backshift_mult = 0;
    // Largest orthonormality defect of the chain images before re-orthonormalization.
    double chain_deviation = 0.0;

    Eigen::Index dim_u() const noexcept { return unitary_part.rows(); }
};

namespace detail {

// Cached powers of T with their range projections T^nT^{*n} and source
// projections T^{*n}T^n.
class PowerTable {
public:
    explicit PowerTable(const Matrix& t) : t_(t) {
        powers_.push_back(identity(t.rows()));
        ranges_.push_back(identity(t.rows()));
        sources_.push_back(identity(t.rows()));
    }

    const Matrix& op() const noexcept { return t_; }
    Eigen::Index dim() const noexcept { return t_.rows(); }

    const Matrix& power(std::size_t n) {
        extend(n);
        return powers_[n];
    }
    // T^nT^{*n}
    const Matrix& range_proj(std::size_t n) {
        extend(n);
        return ranges_[n];
    }
    // T^{*n}T^n
    const Matrix& source_proj(std::size_t n) {
        extend(n);
        return sources_[n];
    }

private:
    void extend(std::size_t n) {
        while (powers_.size() <= n) {
            Matrix next = powers_.back() * t_;
            ranges_.push_back(next * next.adjoint());
            sources_.push_back(next.adjoint() * next);
            powers_.push_back(std::move(next));
        }
    }

    Matrix t_;
    std::vector<Matrix> powers_;
    std::vector<Matrix> ranges_;
    std::vector<Matrix> sources_;
};

inline void require_power_partial_isometry(const Matrix& t, const Tolerance& tol) {
    require_finite(t);
    require_square(t);
    tol.validate();
    auto rep = is_power_partial_isometry(t, tol);
    if (!rep.verdict) {
        int n = rep.first_failing_power(tol.abs_tol);
        throw PredicateError("not a power partial isometry: T^" + std::to_string(n) +
                             " has defect " + std::to_string(rep.per_power_defect[n - 1]));
    }
}

// Least n with rank(T^n) = rank(T^{n+1}).
inline std::size_t range_stabilization(PowerTable& tab, const Tolerance& tol) {
    Eigen::Index prev = tab.dim();
    for (std::size_t n = 0; n <= static_cast<std::size_t>(tab.dim()); ++n) {
        Eigen::Index next = rank(tab.power(n + 1), tol);
        if (next == prev) return n;
        prev = next;
    }
    return static_cast<std::size_t>(tab.dim());
}

inline Subspace range_limit(PowerTable& tab, const Tolerance& tol) {
    return onb_of_range(tab.power(range_stabilization(tab, tol)), tol);
}

inline Subspace source_limit(PowerTable& tab, const Tolerance& tol) {
    PowerTable adj(tab.op().adjoint());
    return range_limit(adj, tol);
}

// The projection whose range is M_p. Its two factors commute.
inline Matrix multiplicity_projection(PowerTable& tab, std::size_t p) {
    const auto n = tab.dim();
    Matrix co_defect = identity(n) - tab.range_proj(1);
    if (p == 1) return co_defect * (identity(n) - tab.source_proj(1));
    return co_defect * (tab.source_proj(p - 1) - tab.source_proj(p));
}

} // namespace detail

inline constexpr double kMaxChainDeviation = 1e-6;

// Projection onto ∩_n T^nH: the range of T^n at the first power whose rank
// equals that of the next one.
inline Subspace range_limit_projection(const Matrix& t, const Tolerance& tol = {}) {
    detail::require_power_partial_isometry(t, tol);
    detail::PowerTable tab(t);
    return detail::range_limit(tab, tol);
}

inline Subspace source_limit_projection(const Matrix& t, const Tolerance& tol = {}) {
    detail::require_power_partial_isometry(t, tol);
    detail::PowerTable tab(t);
    return detail::source_limit(tab, tol);
}

// M_1 = ker T ∩ ker T*, M_p = (1 − TT*)(T^{*p−1}T^{p−1} − T^{*p}T^p)H for p ≥ 2.
inline Subspace multiplicity_space(const Matrix& t, int p, const Tolerance& tol = {}) {
    if (p < 1) throw InputError("multiplicity_space needs p >= 1");
    detail::require_power_partial_isometry(t, tol);
    detail::PowerTable tab(t);
    return onb_of_range(detail::multiplicity_projection(tab, static_cast<std::size_t>(p)), tol);
}

struct BlockSpace {
    Subspace space;                   // H_p
    std::vector<Subspace> chain_frames; // chain_frames[n] = T^n · frame(M_p)
    Subspace multiplicity;            // M_p
    double deviation = 0.0;
};

namespace detail {

inline BlockSpace block_space(PowerTable& tab, std::size_t p, const Tolerance& tol) {
    const auto n = tab.dim();
    BlockSpace out;
    out.multiplicity = onb_of_range(multiplicity_projection(tab, p), tol);
    const Eigen::Index m = out.multiplicity.dim();
    if (m == 0) {
        out.space = Subspace::zero(n);
        out.chain_frames.assign(p, Subspace::zero(n));
        return out;
    }
    Matrix chain(n, static_cast<Eigen::Index>(p) * m);
    for (std::size_t k = 0; k < p; ++k)
        chain.middleCols(static_cast<Eigen::Index>(k) * m, m) = tab.power(k) * out.multiplicity.frame();
    out.deviation = orthonormality_defect(chain);
    if (out.deviation > kMaxChainDeviation)
        throw DegeneracyError("chain images for p = " + std::to_string(p) +
                              " deviate from orthonormality by " + std::to_string(out.deviation));
    chain = polar_orthonormalize(chain);
    for (std::size_t k = 0; k < p; ++k)
        out.chain_frames.emplace_back(chain.middleCols(static_cast<Eigen::Index>(k) * m, m).eval());
    out.space = Subspace(std::move(chain));
    return out;
}

} // namespace detail

// H_p together with its chain frames. The columns of `space` are ordered
// chain position first, multiplicity second, i.e. the J_p ⊗ I_m layout.
inline BlockSpace block_space(const Matrix& t, int p, const Tolerance& tol = {}) {
    if (p < 1) throw InputError("block_space needs p >= 1");
    detail::require_power_partial_isometry(t, tol);
    detail::PowerTable tab(t);
    return detail::block_space(tab, static_cast<std::size_t>(p), tol);
}

// blockdiag(unitary_part, J_{p1} ⊗ I_{m1}, J_{p2} ⊗ I_{m2}, ...)
inline Matrix canonical_form(const HWDecomposition& d) {
    std::vector<Matrix> parts;
    parts.push_back(d.unitary_part);
    for (const auto& b : d.blocks) parts.push_back(kron(truncated_shift(b.p), identity(b.mult)));
    return block_diag(parts);
}

inline Eigen::Index accounted_dim(const HWDecomposition& d) {
    Eigen::Index total = d.dim_u();
    for (const auto& b : d.blocks) total += static_cast<Eigen::Index>(b.p) * b.mult;
    return total;
}

inline HWDecomposition decompose(const Matrix& t, const Tolerance& tol = {}) {
    detail::require_power_partial_isometry(t, tol);
    const Eigen::Index n = t.rows();
    detail::PowerTable tab(t);

    Subspace range_lim = detail::range_limit(tab, tol);
    Subspace source_lim = detail::source_limit(tab, tol);
    Matrix p_mat = projector(range_lim);
    Matrix q_mat = projector(source_lim);

    // Isometries on C^n are unitary, so both shift spaces must vanish.
    Eigen::Index shift_dim = onb_of_range((identity(n) - p_mat) * q_mat, tol).dim();
    Eigen::Index backshift_dim = onb_of_range((identity(n) - q_mat) * p_mat, tol).dim();
    if (shift_dim != 0 || backshift_dim != 0)
        throw DecompositionError("nonzero shift/backshift space (" + std::to_string(shift_dim) +
                                 ", " + std::to_string(backshift_dim) + ")");

    Subspace unitary_space = intersect(range_lim, source_lim, tol);

    HWDecomposition d;
    d.ambient_dim = n;
    d.unitary_part = unitary_space.frame().adjoint() * t * unitary_space.frame();

    std::vector<Subspace> frames{unitary_space};
    Eigen::Index remaining = n - unitary_space.dim();
    for (Eigen::Index p = 1; p <= n && remaining > 0; ++p) {
        BlockSpace bs = detail::block_space(tab, static_cast<std::size_t>(p), tol);
        const Eigen::Index m = bs.multiplicity.dim();
        if (m == 0) continue;
        d.chain_deviation = std::max(d.chain_deviation, bs.deviation);
        d.blocks.push_back({static_cast<int>(p), static_cast<int>(m)});
        frames.push_back(std::move(bs.space));
        remaining -= p * m;
    }
    if (remaining != 0)
        throw DecompositionError("dimension accounting failed: " + std::to_string(n - remaining) +
                                 " of " + std::to_string(n) + " dimensions assigned");

    d.basis = complete_to_unitary(frames, n);
    d.residual = (d.basis.adjoint() * t * d.basis - canonical_form(d)).norm();
    if (d.residual > tol.abs_tol)
        throw DecompositionError("reconstruction residual " + std::to_string(d.residual) +
                                 " exceeds " + std::to_string(tol.abs_tol));
    return d;
}

inline Matrix reconstruct(const HWDecomposition& d) {
    if (d.basis.rows() != d.ambient_dim || d.basis.cols() != d.ambient_dim)
        throw ConsistencyError("basis does not match the ambient dimension");
    if (d.unitary_part.rows() != d.unitary_part.cols())
        throw ConsistencyError("unitary part is not square");
    for (const auto& b : d.blocks)
        if (b.p < 1 || b.mult < 0) throw ConsistencyError("invalid block");
    if (accounted_dim(d) != d.ambient_dim)
        throw ConsistencyError("block dimensions do not add up to the ambient dimension");
    return d.basis * canonical_form(d) * d.basis.adjoint();
}

struct Check {
    std::string name;
    double value = 0.0;
    double limit = 0.0;
    bool passed = false;
};

struct VerificationReport {
    std::vector<Check> checks;

    bool passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
    void add(std::string name, double value, double limit) {
        checks.push_back({std::move(name), value, limit, value <= limit});
    }
};

inline VerificationReport verify(const Matrix& t, const HWDecomposition& d, const Tolerance& tol = {}) {
    VerificationReport rep;
    const double inf = std::numeric_limits<double>::infinity();
    bool shapes_ok = t.rows() == t.cols() && t.rows() == d.ambient_dim &&
                     d.basis.rows() == d.ambient_dim && d.basis.cols() == d.ambient_dim &&
                     d.unitary_part.rows() == d.unitary_part.cols();
    rep.add("shape", shapes_ok ? 0.0 : inf, 0.0);
    rep.add("dimension_accounting",
            static_cast<double>(std::abs(accounted_dim(d) - d.ambient_dim)), 0.0);
    double bad_blocks = 0;
    for (const auto& b : d.blocks)
        if (b.p < 1 || b.mult < 0) ++bad_blocks;
    rep.add("block_validity", bad_blocks, 0.0);
    rep.add("shift_summands", static_cast<double>(d.shift_mult + d.backshift_mult), 0.0);
    rep.add("basis_unitarity", shapes_ok ? unitarity_defect(d.basis) : inf, tol.abs_tol);
    rep.add("unitary_part_unitarity", unitarity_defect(d.unitary_part), tol.abs_tol);
    double residual = inf;
    if (shapes_ok && bad_blocks == 0 && accounted_dim(d) == d.ambient_dim)
        residual = (d.basis.adjoint() * t * d.basis - canonical_form(d)).norm();
    rep.add("residual", residual, tol.abs_tol);
    return rep;
}

} // namespace ppi
