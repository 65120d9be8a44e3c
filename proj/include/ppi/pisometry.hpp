#pragma once

// Predicates and defect measures for partial isometries, power partial
// isometries and star-commuting families.

#include <string>
#include <vector>

#include "ppi/linalg.hpp"

namespace ppi {

// ‖TT*T − T‖_F
inline double partial_isometry_defect(const Matrix& t) {
    return (t * t.adjoint() * t - t).norm();
}

inline bool is_partial_isometry(const Matrix& t, const Tolerance& tol = {}) {
    require_finite(t);
    require_square(t);
    return partial_isometry_defect(t) <= tol.abs_tol;
}

struct DefectReport {
    int max_power_checked = 0;
    // per_power_defect[k] belongs to power k + 1
    std::vector<double> per_power_defect;
    bool verdict = true;

    // First failing power, 0 if none.
    int first_failing_power(double abs_tol) const {
        for (std::size_t k = 0; k < per_power_defect.size(); ++k)
            if (per_power_defect[k] > abs_tol) return static_cast<int>(k) + 1;
        return 0;
    }
};

// Checks T^n for n = 1..dim+1. Decreasing range chains stabilize within dim
// steps; a successful decompose() is the certificate for all powers.
inline DefectReport is_power_partial_isometry(const Matrix& t, const Tolerance& tol = {}) {
    require_finite(t);
    require_square(t);
    tol.validate();
    DefectReport rep;
    rep.max_power_checked = static_cast<int>(t.rows()) + 1;
    Matrix power = t;
    for (int n = 1; n <= rep.max_power_checked; ++n) {
        if (n > 1) power = (power * t).eval();
        double d = partial_isometry_defect(power);
        rep.per_power_defect.push_back(d);
        if (d > tol.abs_tol) rep.verdict = false;
    }
    return rep;
}

enum class ViolationKind { Commute, StarCommute };

inline const char* to_string(ViolationKind k) {
    return k == ViolationKind::Commute ? "commute" : "star-commute";
}

struct StarViolation {
    int m = 0; // 0-based operator positions
    int n = 0;
    ViolationKind kind = ViolationKind::Commute;
    double defect = 0.0;
};

inline void require_same_dims(const std::vector<Matrix>& ts) {
    for (const auto& t : ts) {
        require_finite(t);
        require_square(t);
        if (t.rows() != ts.front().rows())
            throw InputError("family operators have different dimensions");
    }
}

// Every pair violating T_mT_n = T_nT_m (m < n) or T_m*T_n = T_nT_m* (m ≠ n).
// An empty result means the family star-commutes.
inline std::vector<StarViolation> is_star_commuting_family(const std::vector<Matrix>& ts,
                                                           const Tolerance& tol = {}) {
    require_same_dims(ts);
    std::vector<StarViolation> out;
    const int count = static_cast<int>(ts.size());
    for (int m = 0; m < count; ++m) {
        for (int n = 0; n < count; ++n) {
            if (m == n) continue;
            if (m < n) {
                double c = (ts[m] * ts[n] - ts[n] * ts[m]).norm();
                if (c > tol.abs_tol) out.push_back({m, n, ViolationKind::Commute, c});
            }
            double s = (ts[m].adjoint() * ts[n] - ts[n] * ts[m].adjoint()).norm();
            if (s > tol.abs_tol) out.push_back({m, n, ViolationKind::StarCommute, s});
        }
    }
    return out;
}

// Whether R star-commutes with each member of the family: RT = TR and R*T = TR*.
inline std::vector<StarViolation> star_commutant_violations(const Matrix& r,
                                                            const std::vector<Matrix>& ts,
                                                            const Tolerance& tol = {}) {
    std::vector<StarViolation> out;
    for (int m = 0; m < static_cast<int>(ts.size()); ++m) {
        if (ts[m].rows() != r.rows() || r.rows() != r.cols())
            throw InputError("operator dimension mismatch");
        double c = (r * ts[m] - ts[m] * r).norm();
        if (c > tol.abs_tol) out.push_back({-1, m, ViolationKind::Commute, c});
        double s = (r.adjoint() * ts[m] - ts[m] * r.adjoint()).norm();
        if (s > tol.abs_tol) out.push_back({-1, m, ViolationKind::StarCommute, s});
    }
    return out;
}

struct ProductDefect {
    double commutator = 0.0;     // ‖[V*V, WW*]‖_F
    double product_defect = 0.0; // ‖(VW)(VW)*(VW) − VW‖_F
};

// VW is a partial isometry exactly when V*V commutes with WW*.
inline ProductDefect product_pi_defect(const Matrix& v, const Matrix& w, const Tolerance& tol = {}) {
    require_square(v, "V");
    require_square(w, "W");
    if (v.rows() != w.rows()) throw InputError("V and W have different dimensions");
    if (!is_partial_isometry(v, tol)) throw PredicateError("V is not a partial isometry");
    if (!is_partial_isometry(w, tol)) throw PredicateError("W is not a partial isometry");
    Matrix initial = v.adjoint() * v;
    Matrix range = w * w.adjoint();
    Matrix vw = v * w;
    return {(initial * range - range * initial).norm(), partial_isometry_defect(vw)};
}

} // namespace ppi
