// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "ppi/generator.hpp"
#include "ppi/identities.hpp"
#include "ppi/pisometry.hpp"

using namespace ppi;

namespace {

struct Outcome {
    bool passed = true;
    std::string detail;
};

int failures = 0;

void report(int id, const char* title, const Outcome& o) {
    std::printf("[%s] %d. %s: %s\n", o.passed ? "PASS" : "FAIL", id, title, o.detail.c_str());
    std::fflush(stdout);
    if (!o.passed) ++failures;
}

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", x);
    return buf;
}

// Every matrix accepted by the suites, for the vacuity criterion.
std::vector<Matrix> accepted;

struct SingleRun {
    Matrix op;
    HWDecomposition found;
};
std::vector<SingleRun> singles;
std::vector<PlantedFamily> families;

Outcome planted_recovery() {
    Outcome o;
    int exact = 0;
    double worst_residual_ratio = 0.0, worst_spectrum = 0.0;
    auto start = std::chrono::steady_clock::now();
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        PlantSpec spec = random_plant_spec(64, seed);
        PlantedSingle plant = plant_single(spec);
        const double dim = static_cast<double>(spec.total_dim());
        HWDecomposition d;
        try {
            d = decompose(plant.op);
        } catch (const Error& e) {
            o.passed = false;
            o.detail = "seed " + std::to_string(seed) + " threw: " + e.what();
            return o;
        }
        bool ok = d.dim_u() == spec.dim_u && d.blocks == plant.truth.blocks;
        double spec_dist = spectrum_distance(eigenvalues(d.unitary_part), eigenvalues(plant.truth.unitary_part));
        worst_residual_ratio = std::max(worst_residual_ratio, d.residual / dim);
        worst_spectrum = std::max(worst_spectrum, spec_dist);
        ok = ok && d.residual <= 1e-8 * dim && spec_dist <= 1e-8;
        if (ok) ++exact;
        else if (o.passed) {
            o.passed = false;
            o.detail = "first failure seed " + std::to_string(seed) + "; ";
        }
        singles.push_back({plant.op, std::move(d)});
        accepted.push_back(plant.op);
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.passed = o.passed && secs < 60.0;
    o.detail += std::to_string(exact) + "/200 exact, max residual/dim " + sci(worst_residual_ratio) +
                ", max spectrum distance " + sci(worst_spectrum) + ", " + sci(secs) + " s";
    return o;
}

Outcome round_trip() {
    Outcome o;
    double worst = 0.0;
    for (const auto& s : singles) {
        double dim = static_cast<double>(s.op.rows());
        double dist = (reconstruct(s.found) - s.op).norm() / dim;
        worst = std::max(worst, dist);
        if (dist > 1e-9) o.passed = false;
    }
    o.passed = o.passed && singles.size() == 200;
    o.detail = std::to_string(singles.size()) + " instances, max distance/dim " + sci(worst);
    return o;
}

Outcome family_recovery() {
    Outcome o;
    int exact = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        int M = 2 + static_cast<int>(seed % 2);
        FamilyPlantSpec spec = random_family_plant_spec(M, 60, 4, 1000 + seed);
        PlantedFamily fam = plant_family(spec);
        const double dim = static_cast<double>(spec.total_dim());
        bool ok = false;
        try {
            FamilyDecomposition fd = decompose_family(fam.ops);
            VerificationReport rep = verify_family(fam.ops, fd, {1e-8 * dim, 1e-10});
            for (const auto& c : rep.checks) worst = std::max(worst, c.value / dim);
            ok = index_profile(fd) == index_profile(fam.truth) && rep.passed();
        } catch (const Error& e) {
            o.detail += "seed " + std::to_string(seed) + " threw: " + e.what() + "; ";
        }
        if (ok) ++exact;
        else o.passed = false;
        for (const auto& t : fam.ops) accepted.push_back(t);
        families.push_back(std::move(fam));
    }
    o.detail += std::to_string(exact) + "/50 exact, max verification defect/dim " + sci(worst);
    return o;
}

Outcome identity_suite() {
    Outcome o;
    std::size_t checked = 0, failed = 0;
    double worst = 0.0;
    auto check = [&](const Matrix& t) {
        const double dim = static_cast<double>(t.rows());
        IdentityReport r = check_identities(t);
        worst = std::max(worst, r.max_defect() / dim);
        ++checked;
        if (!r.passed(1e-10 * dim)) ++failed;
    };
    for (const auto& s : singles) check(s.op);
    for (const auto& f : families)
        for (const auto& t : f.ops) check(t);
    o.passed = failed == 0;
    o.detail = std::to_string(checked) + " operators, " + std::to_string(failed) + " failed, max defect/dim " +
               sci(worst);
    return o;
}

Matrix diag_proj(const std::vector<int>& bits) {
    Matrix d = Matrix::Zero(static_cast<Eigen::Index>(bits.size()), static_cast<Eigen::Index>(bits.size()));
    for (std::size_t k = 0; k < bits.size(); ++k) d(k, k) = bits[k];
    return d;
}

// V*V = X diag(a) X* and WW* = X' diag(b) X'*, with X' = X for commuting pairs.
Outcome product_lemma() {
    Outcome o;
    int commuting = 0, detected = 0, weak = 0, misclassified = 0;
    double worst_commuting = 0.0;
    const Tolerance tol;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        std::mt19937_64 rng(derive_seed(seed, 5));
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 7);
        std::vector<int> a(n), b(n);
        for (auto& x : a) x = static_cast<int>(rng() % 2);
        for (auto& x : b) x = static_cast<int>(rng() % 2);
        a[0] = 1, b[0] = 1, a[n - 1] = 0, b[1] = 0;
        Matrix x = random_unitary(n, derive_seed(seed, 1));
        const bool make_commuting = seed % 3 != 0;
        Matrix x2 = make_commuting ? x : random_unitary(n, derive_seed(seed, 4));
        Matrix v = random_unitary(n, derive_seed(seed, 2)) * diag_proj(a) * x.adjoint();
        Matrix w = x2 * diag_proj(b) * random_unitary(n, derive_seed(seed, 3)).adjoint();
        ProductDefect r = product_pi_defect(v, w, tol);
        // A pair is misclassified when either reported value puts it on the
        // wrong side of the tolerance for the way it was built.
        const bool looks_commuting = r.commutator <= tol.abs_tol;
        const bool looks_pi = r.product_defect <= tol.abs_tol;
        if (looks_commuting != make_commuting || looks_pi != make_commuting) ++misclassified;
        if (make_commuting) {
            ++commuting;
            worst_commuting = std::max(worst_commuting, r.product_defect);
            if (r.product_defect > 1e-9) ++misclassified;
        } else if (r.commutator > 1e-3 && r.product_defect > 1e-3) {
            ++detected;
        } else {
            ++weak;
        }
    }
    o.passed = misclassified == 0 && detected >= 100;
    o.detail = std::to_string(commuting) + " commuting (max defect " + sci(worst_commuting) + "), " +
               std::to_string(detected) + " non-commuting detected above 1e-3, " + std::to_string(weak) +
               " below, " + std::to_string(misclassified) + " misclassified";
    return o;
}

Outcome oracle_equivalence() {
    Outcome o;
    int agreed = 0, total = 0;
    double worst = 0.0;
    auto check = [&](const PartialInjection& f) {
        ++total;
        Matrix t = to_matrix(f);
        HWDecomposition d = decompose(t);
        auto cmp = compare_signatures(classify_orbits(f), signature_of_decomposition(d));
        worst = std::max(worst, cmp.spectrum_distance);
        if (cmp.agree(1e-9)) ++agreed;
        accepted.push_back(t);
    };
    try {
        for (int n = 0; n <= 4; ++n)
            for (const auto& f : enumerate_partial_injections(n)) check(f);
        for (std::uint64_t seed = 0; seed < 500; ++seed) {
            std::mt19937_64 rng(derive_seed(seed, 6));
            int n = 1 + static_cast<int>(rng() % 50);
            double density = std::uniform_real_distribution<double>(0.3, 1.0)(rng);
            check(random_partial_injection(n, density, 0.0, seed));
        }
    } catch (const Error& e) {
        o.passed = false;
        o.detail = std::string("threw: ") + e.what() + "; ";
    }
    o.passed = o.passed && agreed == total;
    o.detail += std::to_string(agreed) + "/" + std::to_string(total) + " agree, max spectrum distance " + sci(worst);
    return o;
}

Outcome vacuity() {
    Outcome o;
    std::size_t nonzero = 0;
    for (const auto& t : accepted) {
        const Tolerance tol;
        Subspace p = range_limit_projection(t, tol);
        Subspace q = source_limit_projection(t, tol);
        Matrix pp = projector(p), qq = projector(q);
        const Eigen::Index n = t.rows();
        Eigen::Index shift = rank((Matrix::Identity(n, n) - pp) * qq, tol);
        Eigen::Index back = rank((Matrix::Identity(n, n) - qq) * pp, tol);
        if (shift != 0 || back != 0) ++nonzero;
    }
    o.passed = nonzero == 0 && !accepted.empty();
    o.detail = std::to_string(accepted.size()) + " inputs, " + std::to_string(nonzero) + " with a shift summand";
    return o;
}

Matrix power_of(const Matrix& t, Eigen::Index n) {
    Matrix out = Matrix::Identity(t.rows(), t.cols());
    for (Eigen::Index k = 0; k < n; ++k) out = (out * t).eval();
    return out;
}

Outcome reducing_claim() {
    Outcome o;
    int accepted_true = 0, commutants = 0, rejected = 0, perturbations = 0;
    std::vector<std::string> problems;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        FamilyPlantSpec spec = random_family_plant_spec(2 + static_cast<int>(seed % 2), 40, 4, 5000 + seed);
        PlantedFamily fam = plant_family(spec);
        const auto& ts = fam.ops;
        const Eigen::Index n = ts[0].rows();
        FamilyDecomposition fd = decompose_family(ts);
        std::mt19937_64 rng(derive_seed(seed, 8));
        std::uniform_real_distribution<double> coeff(-1.0, 1.0);

        Matrix pw = power_of(ts[0], n);
        std::vector<Matrix> rs;
        rs.push_back(Matrix::Identity(n, n));
        rs.push_back(pw * pw.adjoint());
        rs.push_back(pw.adjoint() * pw);
        rs.push_back(fam.truth.summands[0].basis * fam.truth.summands[0].basis.adjoint());
        Matrix mix = Matrix::Zero(n, n);
        for (const auto& s : fam.truth.summands)
            mix += Complex(coeff(rng), coeff(rng)) * (s.basis * s.basis.adjoint());
        rs.push_back(mix);
        for (const auto& r : rs) {
            ++commutants;
            try {
                if (commutant_reducing_check(fd, ts, r)) ++accepted_true;
            } catch (const Error& e) {
                problems.push_back(e.what());
            }
        }

        Matrix noise(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) noise(i, j) = Complex(coeff(rng), coeff(rng));
        Matrix r = mix + 1e-2 * noise;
        if (star_commutant_violations(r, ts, {1e-3, 1e-10}).empty()) continue; // commutes with everything
        ++perturbations;
        try {
            commutant_reducing_check(fd, ts, r);
        } catch (const PredicateError&) {
            ++rejected;
        }
    }
    o.passed = accepted_true == commutants && commutants == 250 && perturbations >= 50 && rejected == perturbations;
    o.detail = std::to_string(accepted_true) + "/" + std::to_string(commutants) + " commutants reduce, " +
               std::to_string(rejected) + "/" + std::to_string(perturbations) + " perturbations rejected";
    if (!problems.empty()) o.detail += "; " + problems.front();
    return o;
}

Outcome negative_power() {
    Matrix t = Matrix::Zero(3, 3);
    t(1, 0) = 1.0;
    t(0, 1) = t(2, 1) = 1.0 / std::sqrt(2.0);
    DefectReport rep = is_power_partial_isometry(t);
    Outcome o;
    const int first = rep.first_failing_power(Tolerance{}.abs_tol);
    const double defect = first >= 1 ? rep.per_power_defect[first - 1] : 0.0;
    o.passed = !rep.verdict && first == 2 && defect > 0.1;
    o.detail = "first failing power " + std::to_string(first) + ", defect " + sci(defect);
    return o;
}

} // namespace

int main() {
    report(1, "planted single-operator recovery", planted_recovery());
    report(2, "round trip", round_trip());
    report(3, "family recovery", family_recovery());
    report(4, "identity suite", identity_suite());
    report(5, "product lemma", product_lemma());
    report(6, "oracle equivalence", oracle_equivalence());
    report(7, "finite-dimension vacuity", vacuity());
    report(8, "augmented reducing claim", reducing_claim());
    report(9, "negative power detection", negative_power());
    std::printf("%d/9 criteria passed\n", 9 - failures);
    return failures == 0 ? 0 : 1;
}
