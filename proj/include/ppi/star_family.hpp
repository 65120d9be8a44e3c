#pragma once

// Simultaneous decomposition of a finite star-commuting family of power
// partial isometries into summands
//
//     H_i = (⊗_{m ∈ Σ_i} K_{i,m}) ⊗ M_i,
//
// on which T_m acts as J_p on leg m when i_m = p, and as I ⊗ V_{i,m} with
// V_{i,m} unitary on M_i when i_m = u. Operators are absorbed one at a time:
// after step m the summand list is the decomposition of T_1..T_m, and each
// summand of that list is split by decomposing the compression of the next
// operator, which has the form I_legs ⊗ R.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ppi/halmos_wallen.hpp"
#include "ppi/pisometry.hpp"

namespace ppi {

struct Label {
    enum class Kind { Unitary, Shift, Backshift, Truncated };
    Kind kind = Kind::Unitary;
    int p = 0; // only for Truncated

    static Label u() { return {Kind::Unitary, 0}; }
    static Label s() { return {Kind::Shift, 0}; }
    static Label b() { return {Kind::Backshift, 0}; }
    static Label truncated(int p) {
        if (p < 1) throw InputError("truncated label needs p >= 1");
        return {Kind::Truncated, p};
    }

    bool is_unitary() const noexcept { return kind == Kind::Unitary; }

    std::string str() const {
        switch (kind) {
        case Kind::Unitary: return "u";
        case Kind::Shift: return "s";
        case Kind::Backshift: return "b";
        case Kind::Truncated: return "p:" + std::to_string(p);
        }
        return "?";
    }

    static Label parse(const std::string& text) {
        if (text == "u") return u();
        if (text == "s") return s();
        if (text == "b") return b();
        if (text.rfind("p:", 0) == 0) {
            std::size_t used = 0;
            int p = 0;
            try {
                p = std::stoi(text.substr(2), &used);
            } catch (const std::exception&) {
                throw InputError("bad label '" + text + "'");
            }
            if (used != text.size() - 2) throw InputError("bad label '" + text + "'");
            return truncated(p);
        }
        throw InputError("bad label '" + text + "'");
    }

    // u < s < b < p:1 < p:2 < ...
    friend auto operator<=>(const Label&, const Label&) = default;
};

using MultiIndex = std::vector<Label>;

inline std::string to_string(const MultiIndex& index) {
    std::string out = "(";
    for (std::size_t k = 0; k < index.size(); ++k) out += (k ? "," : "") + index[k].str();
    return out + ")";
}

struct FamilySummand {
    MultiIndex index;
    // dim K_{i,m} for m ∈ Σ_i, ascending m
    std::vector<int> leg_dims;
    Eigen::Index mult_dim = 0;
    // V_{i,m} for i_m = u, keyed by 0-based operator position
    std::map<int, Matrix> unitaries;
    // Orthonormal frame of H_i, columns in legs-then-multiplicity order.
    Matrix basis;

    // Σ_i: 0-based positions with a non-unitary label.
    std::vector<int> sigma() const {
        std::vector<int> out;
        for (int m = 0; m < static_cast<int>(index.size()); ++m)
            if (!index[m].is_unitary()) out.push_back(m);
        return out;
    }
    Eigen::Index leg_product() const {
        Eigen::Index prod = 1;
        for (int d : leg_dims) prod *= d;
        return prod;
    }
};

struct FamilyDecomposition {
    int M = 0;
    std::vector<FamilySummand> summands;
    // ‖W*T_mW − ⊕_i model_{i,m}‖_F with W the concatenated summand bases.
    std::vector<double> residuals;

    Eigen::Index ambient_dim() const {
        return summands.empty() ? 0 : summands.front().basis.rows();
    }
};

// B ≈ I_leg ⊗ R. R is the mean of the diagonal r×r blocks; the form is
// accepted when ‖B − I ⊗ R‖_F ≤ abs_tol·dim.
inline Matrix extract_tensor_factor(const Matrix& b, Eigen::Index leg_dim, const Tolerance& tol = {}) {
    require_finite(b);
    require_square(b);
    if (leg_dim < 1) throw InputError("leg dimension must be positive");
    if (b.rows() % leg_dim != 0)
        throw InputError("dimension " + std::to_string(b.rows()) + " is not divisible by leg dimension " +
                         std::to_string(leg_dim));
    const Eigen::Index r = b.rows() / leg_dim;
    Matrix factor = Matrix::Zero(r, r);
    for (Eigen::Index a = 0; a < leg_dim; ++a) factor += b.block(a * r, a * r, r, r);
    factor /= static_cast<double>(leg_dim);
    double defect = (b - kron(identity(leg_dim), factor)).norm();
    double limit = tol.abs_tol * static_cast<double>(std::max<Eigen::Index>(1, b.rows()));
    if (defect > limit)
        throw FormViolation("operator is not of the form I_" + std::to_string(leg_dim) +
                                " ⊗ R (defect " + std::to_string(defect) + ")",
                            defect);
    return factor;
}

// Model action of T_m on a summand in its own basis.
inline Matrix model_operator(const FamilySummand& s, int m) {
    if (m < 0 || m >= static_cast<int>(s.index.size())) throw InputError("operator position out of range");
    Matrix out = identity(1);
    const auto sig = s.sigma();
    if (sig.size() != s.leg_dims.size()) throw ConsistencyError("leg count does not match Σ_i");
    for (std::size_t k = 0; k < sig.size(); ++k) {
        const Label& lab = s.index[sig[k]];
        if (sig[k] == m) {
            if (lab.kind != Label::Kind::Truncated)
                throw ConsistencyError("label " + lab.str() + " has no finite-dimensional model");
            out = kron(out, truncated_shift(lab.p));
        } else {
            out = kron(out, identity(s.leg_dims[k]));
        }
    }
    if (s.index[m].is_unitary()) {
        auto it = s.unitaries.find(m);
        if (it == s.unitaries.end()) throw ConsistencyError("missing unitary for a u-slot");
        return kron(out, it->second);
    }
    return kron(out, identity(s.mult_dim));
}

namespace detail {

inline Matrix concat_bases(const std::vector<FamilySummand>& summands, Eigen::Index dim) {
    Eigen::Index cols = 0;
    for (const auto& s : summands) cols += s.basis.cols();
    Matrix w(dim, cols);
    cols = 0;
    for (const auto& s : summands) {
        w.middleCols(cols, s.basis.cols()) = s.basis;
        cols += s.basis.cols();
    }
    return w;
}

inline double family_residual(const Matrix& t, const std::vector<FamilySummand>& summands, int m) {
    Matrix w = concat_bases(summands, t.rows());
    std::vector<Matrix> models;
    for (const auto& s : summands) models.push_back(model_operator(s, m));
    return (w.adjoint() * t * w - block_diag(models)).norm();
}

inline void require_family(const std::vector<Matrix>& ts, const Tolerance& tol) {
    if (ts.empty()) throw InputError("empty family");
    require_same_dims(ts);
    tol.validate();
    auto violations = is_star_commuting_family(ts, tol);
    if (!violations.empty()) {
        const auto& v = violations.front();
        throw PredicateError("family does not star-commute: operators " + std::to_string(v.m + 1) + " and " +
                             std::to_string(v.n + 1) + " fail " + to_string(v.kind) + " (defect " +
                             std::to_string(v.defect) + ")");
    }
    for (std::size_t m = 0; m < ts.size(); ++m) {
        auto rep = is_power_partial_isometry(ts[m], tol);
        if (!rep.verdict)
            throw PredicateError("operator " + std::to_string(m + 1) + " is not a power partial isometry");
    }
}

// Split one summand by the next operator.
inline std::vector<FamilySummand> split_summand(const FamilySummand& s, const Matrix& t, int m,
                                                const Tolerance& tol) {
    const Eigen::Index legs = s.leg_product();
    Matrix compressed = s.basis.adjoint() * t * s.basis;
    Matrix factor;
    try {
        factor = extract_tensor_factor(compressed, legs, tol);
    } catch (const FormViolation& e) {
        throw FormViolation("summand " + to_string(s.index) + ": " + e.what(), e.defect());
    }
    HWDecomposition d = decompose(factor, tol);
    const Matrix lift = identity(legs);

    std::vector<FamilySummand> out;
    Eigen::Index offset = 0;
    if (d.dim_u() > 0) {
        Matrix frame = d.basis.leftCols(d.dim_u());
        FamilySummand child;
        child.index = s.index;
        child.index.push_back(Label::u());
        child.leg_dims = s.leg_dims;
        child.mult_dim = d.dim_u();
        for (const auto& [k, v] : s.unitaries) child.unitaries[k] = frame.adjoint() * v * frame;
        child.unitaries[m] = d.unitary_part;
        child.basis = s.basis * kron(lift, frame);
        out.push_back(std::move(child));
        offset = d.dim_u();
    }
    for (const auto& blk : d.blocks) {
        const Eigen::Index width = static_cast<Eigen::Index>(blk.p) * blk.mult;
        Matrix frame = d.basis.middleCols(offset, width);
        offset += width;
        FamilySummand child;
        child.index = s.index;
        child.index.push_back(Label::truncated(blk.p));
        child.leg_dims = s.leg_dims;
        child.leg_dims.push_back(blk.p);
        child.mult_dim = blk.mult;
        // The old unitaries commute with the chain structure, so they act as
        // I_p ⊗ V' on the chain frame.
        for (const auto& [k, v] : s.unitaries) {
            try {
                child.unitaries[k] = extract_tensor_factor(frame.adjoint() * v * frame, blk.p, tol);
            } catch (const FormViolation& e) {
                throw FormViolation("unitary " + std::to_string(k + 1) + " on summand " +
                                        to_string(child.index) + ": " + e.what(),
                                    e.defect());
            }
        }
        child.basis = s.basis * kron(lift, frame);
        out.push_back(std::move(child));
    }
    return out;
}

} // namespace detail

inline FamilyDecomposition decompose_family(const std::vector<Matrix>& ts, const Tolerance& tol = {}) {
    detail::require_family(ts, tol);
    const Eigen::Index n = ts.front().rows();

    FamilySummand whole;
    whole.mult_dim = n;
    whole.basis = identity(n);
    std::vector<FamilySummand> current{whole};

    for (int m = 0; m < static_cast<int>(ts.size()); ++m) {
        std::vector<FamilySummand> next;
        for (const auto& s : current) {
            auto parts = detail::split_summand(s, ts[m], m, tol);
            for (auto& part : parts) next.push_back(std::move(part));
        }
        current = std::move(next);
    }

    std::sort(current.begin(), current.end(),
              [](const FamilySummand& a, const FamilySummand& b) { return a.index < b.index; });

    FamilyDecomposition fd;
    fd.M = static_cast<int>(ts.size());
    fd.summands = std::move(current);
    for (int m = 0; m < fd.M; ++m) fd.residuals.push_back(detail::family_residual(ts[m], fd.summands, m));
    return fd;
}

inline VerificationReport verify_family(const std::vector<Matrix>& ts, const FamilyDecomposition& fd,
                                        const Tolerance& tol = {}) {
    VerificationReport rep;
    const double inf = std::numeric_limits<double>::infinity();
    const Eigen::Index n = ts.empty() ? 0 : ts.front().rows();
    bool shapes_ok = !ts.empty() && static_cast<int>(ts.size()) == fd.M && !fd.summands.empty();
    for (const auto& t : ts) shapes_ok = shapes_ok && t.rows() == n && t.cols() == n;
    for (const auto& s : fd.summands)
        shapes_ok = shapes_ok && s.basis.rows() == n && static_cast<int>(s.index.size()) == fd.M;
    rep.add("shape", shapes_ok ? 0.0 : inf, 0.0);
    if (!shapes_ok) return rep;

    Eigen::Index total = 0;
    for (const auto& s : fd.summands) {
        const std::string tag = to_string(s.index);
        bool layout_ok = s.sigma().size() == s.leg_dims.size() && s.mult_dim > 0;
        for (std::size_t k = 0; layout_ok && k < s.leg_dims.size(); ++k) {
            const Label& lab = s.index[s.sigma()[k]];
            layout_ok = lab.kind == Label::Kind::Truncated && lab.p == s.leg_dims[k];
        }
        layout_ok = layout_ok && s.leg_product() * s.mult_dim == s.basis.cols();
        rep.add(tag + " layout", layout_ok ? 0.0 : inf, 0.0);
        total += s.basis.cols();
        if (!layout_ok) continue;

        std::vector<const Matrix*> vs;
        for (int m = 0; m < fd.M; ++m) {
            if (!s.index[m].is_unitary()) continue;
            auto it = s.unitaries.find(m);
            if (it == s.unitaries.end() || it->second.rows() != s.mult_dim) {
                rep.add(tag + " V_" + std::to_string(m + 1) + " present", inf, 0.0);
                continue;
            }
            vs.push_back(&it->second);
            rep.add(tag + " V_" + std::to_string(m + 1) + " unitary", unitarity_defect(it->second), tol.abs_tol);
        }
        double commute = 0.0;
        for (std::size_t a = 0; a < vs.size(); ++a)
            for (std::size_t b = a + 1; b < vs.size(); ++b)
                commute = std::max(commute, ((*vs[a]) * (*vs[b]) - (*vs[b]) * (*vs[a])).norm());
        rep.add(tag + " unitaries commute", commute, tol.abs_tol);

        for (int m = 0; m < fd.M; ++m) {
            double defect = inf;
            try {
                defect = (s.basis.adjoint() * ts[m] * s.basis - model_operator(s, m)).norm();
            } catch (const Error&) {
            }
            rep.add(tag + " T_" + std::to_string(m + 1) + " model", defect, tol.abs_tol);
        }
    }
    rep.add("completeness", static_cast<double>(std::abs(total - n)), 0.0);
    Matrix w = detail::concat_bases(fd.summands, n);
    rep.add("bases orthonormal", orthonormality_defect(w), tol.abs_tol);
    return rep;
}

// Every summand projector commutes with R, where R is required to
// star-commute with the family.
inline bool commutant_reducing_check(const FamilyDecomposition& fd, const std::vector<Matrix>& ts,
                                     const Matrix& r, const Tolerance& tol = {}) {
    require_finite(r);
    require_square(r, "R");
    auto violations = star_commutant_violations(r, ts, tol);
    if (!violations.empty())
        throw PredicateError("R does not star-commute with operator " + std::to_string(violations.front().n + 1) +
                             " (defect " + std::to_string(violations.front().defect) + ")");
    for (const auto& s : fd.summands) {
        if (s.basis.rows() != r.rows()) throw InputError("R dimension does not match the decomposition");
        Matrix proj = s.basis * s.basis.adjoint();
        if ((proj * r - r * proj).norm() > tol.abs_tol) return false;
    }
    return true;
}

// (index, mult_dim) pairs sorted by index; the order-free content of a decomposition.
inline std::vector<std::pair<MultiIndex, Eigen::Index>> index_profile(const FamilyDecomposition& fd) {
    std::vector<std::pair<MultiIndex, Eigen::Index>> out;
    for (const auto& s : fd.summands) out.emplace_back(s.index, s.mult_dim);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace ppi
