#pragma once

// Seeded synthesis of operators with a known decomposition. Each instance is
// a model operator conjugated by one random unitary, and the model is kept as
// the ground truth.

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "ppi/halmos_wallen.hpp"
#include "ppi/orbit_model.hpp"
#include "ppi/star_family.hpp"

namespace ppi {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream));
}

// QR of a complex Gaussian matrix with the phases of diag(R) moved into Q,
// which makes the result Haar distributed.
inline Matrix random_unitary(Eigen::Index n, std::uint64_t seed) {
    if (n < 1) throw InputError("random_unitary needs n >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix z(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) {
            double re = normal(rng);
            double im = normal(rng);
            z(i, j) = Complex(re, im);
        }
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ();
    const Matrix& r = qr.matrixQR();
    for (Eigen::Index k = 0; k < n; ++k) {
        Complex d = r(k, k);
        double a = std::abs(d);
        if (a > 0) q.col(k) *= d / a;
    }
    return q;
}

struct PlantSpec {
    int dim_u = 0;
    std::map<int, int> mults; // p -> multiplicity
    std::uint64_t seed = 0;

    int total_dim() const {
        int total = dim_u;
        for (const auto& [p, m] : mults) total += p * m;
        return total;
    }
    void validate() const {
        if (dim_u < 0) throw InputError("dim_u must be nonnegative");
        for (const auto& [p, m] : mults)
            if (p < 1 || m < 0) throw InputError("block sizes must be >= 1 and multiplicities >= 0");
        if (total_dim() < 1) throw InputError("planted operator must have dimension >= 1");
    }
};

struct PlantedSingle {
    Matrix op;
    HWDecomposition truth;
};

inline PlantedSingle plant_single(const PlantSpec& spec) {
    spec.validate();
    const int n = spec.total_dim();
    HWDecomposition truth;
    truth.ambient_dim = n;
    truth.unitary_part = spec.dim_u > 0 ? random_unitary(spec.dim_u, derive_seed(spec.seed, 1)) : Matrix(0, 0);
    for (const auto& [p, m] : spec.mults)
        if (m > 0) truth.blocks.push_back({p, m});
    truth.basis = random_unitary(n, derive_seed(spec.seed, 2));
    Matrix op = truth.basis * canonical_form(truth) * truth.basis.adjoint();
    truth.residual = (truth.basis.adjoint() * op * truth.basis - canonical_form(truth)).norm();
    return {std::move(op), std::move(truth)};
}

struct SummandPlant {
    MultiIndex index;
    int mult_dim = 1;
    std::uint64_t unitary_seed = 0;

    int dim() const {
        int d = mult_dim;
        for (const auto& l : index)
            if (!l.is_unitary()) d *= l.p;
        return d;
    }
};

struct FamilyPlantSpec {
    int M = 1;
    std::vector<SummandPlant> summands;
    std::uint64_t seed = 0;

    int total_dim() const {
        int total = 0;
        for (const auto& s : summands) total += s.dim();
        return total;
    }
    void validate() const {
        if (M < 1) throw InputError("family needs at least one operator");
        if (summands.empty()) throw InputError("family plant needs at least one summand");
        std::set<MultiIndex> seen;
        for (const auto& s : summands) {
            if (static_cast<int>(s.index.size()) != M) throw InputError("summand index length differs from M");
            for (const auto& l : s.index)
                if (l.kind != Label::Kind::Unitary && l.kind != Label::Kind::Truncated)
                    throw InputError("matrix plants only support u and p labels");
            if (s.mult_dim < 1) throw InputError("summand multiplicity must be >= 1");
            if (!seen.insert(s.index).second)
                throw InputError("duplicate summand index " + to_string(s.index));
        }
        if (total_dim() < 1) throw InputError("planted family must have dimension >= 1");
    }
};

struct PlantedFamily {
    std::vector<Matrix> ops;
    FamilyDecomposition truth;
};

// The u-slot unitaries of a summand are V, V², V³, ... for one seeded V, so
// they commute exactly.
inline PlantedFamily plant_family(const FamilyPlantSpec& spec) {
    spec.validate();
    const int n = spec.total_dim();
    Matrix w = random_unitary(n, derive_seed(spec.seed, 3));

    FamilyDecomposition truth;
    truth.M = spec.M;
    Eigen::Index offset = 0;
    for (const auto& plan : spec.summands) {
        FamilySummand s;
        s.index = plan.index;
        s.mult_dim = plan.mult_dim;
        for (const auto& l : plan.index)
            if (!l.is_unitary()) s.leg_dims.push_back(l.p);
        Matrix base = random_unitary(plan.mult_dim, plan.unitary_seed);
        Matrix power = base;
        for (int m = 0; m < spec.M; ++m) {
            if (!plan.index[m].is_unitary()) continue;
            s.unitaries[m] = power;
            power = (power * base).eval();
        }
        s.basis = w.middleCols(offset, plan.dim());
        offset += plan.dim();
        truth.summands.push_back(std::move(s));
    }

    PlantedFamily out;
    for (int m = 0; m < spec.M; ++m) {
        std::vector<Matrix> models;
        for (const auto& s : truth.summands) models.push_back(model_operator(s, m));
        out.ops.push_back(w * block_diag(models) * w.adjoint());
    }
    for (int m = 0; m < spec.M; ++m)
        truth.residuals.push_back(detail::family_residual(out.ops[m], truth.summands, m));
    out.truth = std::move(truth);
    return out;
}

inline PartialInjection random_partial_injection(int n, double edge_density, double flag_prob,
                                                 std::uint64_t seed) {
    if (n < 0) throw InputError("node count must be nonnegative");
    if (!(edge_density >= 0.0 && edge_density <= 1.0) || !(flag_prob >= 0.0 && flag_prob <= 1.0))
        throw InputError("probabilities must lie in [0, 1]");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) order[k] = k;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> free_targets = order;

    PartialInjection f;
    f.node_count = n;
    std::vector<bool> has_pred(static_cast<std::size_t>(n), false), has_succ(static_cast<std::size_t>(n), false);
    for (int v : order) {
        if (free_targets.empty() || coin(rng) >= edge_density) continue;
        std::uniform_int_distribution<std::size_t> pick(0, free_targets.size() - 1);
        std::size_t k = pick(rng);
        int target = free_targets[k];
        free_targets[k] = free_targets.back();
        free_targets.pop_back();
        f.edges.emplace_back(v, target);
        has_succ[v] = true;
        has_pred[target] = true;
    }
    std::sort(f.edges.begin(), f.edges.end());
    for (int v = 0; v < n; ++v) {
        if (!has_pred[v] && coin(rng) < flag_prob) f.past_flags.insert(v);
        if (!has_succ[v] && coin(rng) < flag_prob) f.future_flags.insert(v);
    }
    return f;
}

// A single path through all n nodes in seeded order.
inline PartialInjection seeded_path(int n, std::uint64_t seed) {
    if (n < 0) throw InputError("node count must be nonnegative");
    std::mt19937_64 rng(seed);
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) order[k] = k;
    std::shuffle(order.begin(), order.end(), rng);
    PartialInjection f;
    f.node_count = n;
    for (int k = 0; k + 1 < n; ++k) f.edges.emplace_back(order[k], order[k + 1]);
    return f;
}

// Random single-operator plant with total dimension in [1, max_dim].
inline PlantSpec random_plant_spec(int max_dim, std::uint64_t seed) {
    if (max_dim < 1) throw InputError("max_dim must be >= 1");
    std::mt19937_64 rng(seed);
    PlantSpec spec;
    spec.seed = derive_seed(seed, 7);
    std::uniform_int_distribution<int> target_dist(1, max_dim);
    const int target = target_dist(rng);
    std::uniform_int_distribution<int> u_dist(0, std::max(0, target / 3));
    spec.dim_u = u_dist(rng);
    int room = target - spec.dim_u;
    std::uniform_int_distribution<int> p_dist(1, 8);
    std::uniform_int_distribution<int> m_dist(1, 4);
    while (room > 0) {
        int p = std::min(p_dist(rng), room);
        int m = std::min(m_dist(rng), room / p);
        spec.mults[p] += m;
        room -= p * m;
    }
    return spec;
}

// Random family plant with M operators, distinct indices and total dimension <= max_dim.
inline FamilyPlantSpec random_family_plant_spec(int M, int max_dim, int summand_count, std::uint64_t seed) {
    if (M < 1 || max_dim < 1 || summand_count < 1) throw InputError("invalid family plant request");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> label_dist(0, 3); // 0 = u, else p
    std::uniform_int_distribution<int> mult_dist(1, 3);
    FamilyPlantSpec spec;
    spec.M = M;
    spec.seed = derive_seed(seed, 11);
    std::set<MultiIndex> used;
    int total = 0;
    for (int attempt = 0; attempt < 200 && static_cast<int>(spec.summands.size()) < summand_count; ++attempt) {
        SummandPlant plan;
        for (int m = 0; m < M; ++m) {
            int l = label_dist(rng);
            plan.index.push_back(l == 0 ? Label::u() : Label::truncated(l));
        }
        plan.mult_dim = mult_dist(rng);
        plan.unitary_seed = derive_seed(seed, 100 + static_cast<std::uint64_t>(attempt));
        if (used.count(plan.index) || total + plan.dim() > max_dim) continue;
        used.insert(plan.index);
        total += plan.dim();
        spec.summands.push_back(std::move(plan));
    }
    if (spec.summands.empty()) {
        SummandPlant plan;
        plan.index.assign(static_cast<std::size_t>(M), Label::u());
        plan.unitary_seed = derive_seed(seed, 99);
        spec.summands.push_back(std::move(plan));
    }
    return spec;
}

} // namespace ppi
