#pragma once

// Exact backend for partial injections ("basis permutation" power partial
// isometries). A node may carry a past flag (an implicit infinite backward
// tail feeds into it) or a future flag (its orbit continues into an implicit
// infinite forward tail), which is how the forward shift, the backward shift
// and the bilateral shift are represented with finitely many nodes.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ppi/halmos_wallen.hpp"

namespace ppi {

struct PartialInjection {
    int node_count = 0;
    std::vector<std::pair<int, int>> edges; // (from, to)
    std::set<int> past_flags;
    std::set<int> future_flags;

    bool has_flags() const noexcept { return !past_flags.empty() || !future_flags.empty(); }
};

struct OrbitSignature {
    std::vector<int> u_cycles; // sorted cycle lengths
    int u_dim = 0;             // total dimension of the finite unitary part
    int u_lines = 0;           // two-sided infinite orbits
    int s_count = 0;
    int b_count = 0;
    std::vector<int> chains;   // sorted finite chain lengths
    int ray_nodes = 0;         // explicit nodes lying on flagged orbits
    // Eigenvalues of the finite unitary part.
    std::vector<Complex> unitary_spectrum;
};

inline std::vector<std::string> validate(const PartialInjection& f) {
    std::vector<std::string> out;
    if (f.node_count < 0) {
        out.push_back("negative node count");
        return out;
    }
    const auto n = static_cast<std::size_t>(f.node_count);
    std::vector<int> out_deg(n, 0), in_deg(n, 0);
    for (const auto& [from, to] : f.edges) {
        if (from < 0 || from >= f.node_count || to < 0 || to >= f.node_count) {
            out.push_back("edge (" + std::to_string(from) + "," + std::to_string(to) + ") out of range");
            continue;
        }
        ++out_deg[from];
        ++in_deg[to];
    }
    for (std::size_t v = 0; v < n; ++v) {
        if (out_deg[v] > 1) out.push_back("node " + std::to_string(v) + " has " + std::to_string(out_deg[v]) + " successors");
        if (in_deg[v] > 1)
            out.push_back("injectivity: node " + std::to_string(v) + " has " + std::to_string(in_deg[v]) + " predecessors");
    }
    auto in_range = [&](int v) { return v >= 0 && v < f.node_count; };
    for (int v : f.past_flags) {
        if (!in_range(v)) out.push_back("past flag on missing node " + std::to_string(v));
        else if (in_deg[v] > 0) out.push_back("past flag on node " + std::to_string(v) + " which has a predecessor");
    }
    for (int v : f.future_flags) {
        if (!in_range(v)) out.push_back("future flag on missing node " + std::to_string(v));
        else if (out_deg[v] > 0) out.push_back("future flag on node " + std::to_string(v) + " which has a successor");
    }
    // Cycle nodes have both a predecessor and a successor, so the two checks
    // above already keep flags off cycles.
    return out;
}

namespace detail {

inline void require_valid(const PartialInjection& f) {
    auto violations = validate(f);
    if (!violations.empty()) throw InputError("invalid partial injection: " + violations.front());
}

} // namespace detail

// e^{2πik/len}, k = 0..len−1, for each cycle.
inline std::vector<Complex> cycle_spectrum(const std::vector<int>& cycles) {
    std::vector<Complex> out;
    for (int len : cycles)
        for (int k = 0; k < len; ++k) out.push_back(std::polar(1.0, 2.0 * std::numbers::pi * k / len));
    return out;
}

inline OrbitSignature classify_orbits(const PartialInjection& f) {
    detail::require_valid(f);
    const auto n = static_cast<std::size_t>(f.node_count);
    std::vector<int> succ(n, -1), pred(n, -1);
    for (const auto& [from, to] : f.edges) {
        succ[from] = to;
        pred[to] = from;
    }
    OrbitSignature sig;
    std::vector<bool> seen(n, false);
    for (std::size_t start = 0; start < n; ++start) {
        if (pred[start] != -1) continue;
        int len = 0;
        int v = static_cast<int>(start);
        int last = v;
        while (v != -1) {
            seen[v] = true;
            ++len;
            last = v;
            v = succ[v];
        }
        const bool past = f.past_flags.count(static_cast<int>(start)) > 0;
        const bool future = f.future_flags.count(last) > 0;
        if (past && future) ++sig.u_lines;
        else if (future) ++sig.s_count;
        else if (past) ++sig.b_count;
        else sig.chains.push_back(len);
        if (past || future) sig.ray_nodes += len;
    }
    for (std::size_t start = 0; start < n; ++start) {
        if (seen[start]) continue;
        int len = 0;
        int v = static_cast<int>(start);
        do {
            seen[v] = true;
            ++len;
            v = succ[v];
        } while (v != static_cast<int>(start));
        sig.u_cycles.push_back(len);
        sig.u_dim += len;
    }
    std::sort(sig.u_cycles.begin(), sig.u_cycles.end());
    std::sort(sig.chains.begin(), sig.chains.end());
    sig.unitary_spectrum = cycle_spectrum(sig.u_cycles);
    return sig;
}

// 0/1 matrix with column j equal to e_{succ(j)}, or zero when j has no successor.
inline Matrix to_matrix(const PartialInjection& f) {
    detail::require_valid(f);
    if (f.has_flags()) throw InputError("flagged partial injections describe infinite-dimensional operators");
    Matrix t = Matrix::Zero(f.node_count, f.node_count);
    for (const auto& [from, to] : f.edges) t(to, from) = 1.0;
    return t;
}

// Chains come from the block list; cycle lengths are not recoverable from a
// decomposition, so only the total unitary dimension and its spectrum are set.
inline OrbitSignature signature_of_decomposition(const HWDecomposition& d) {
    OrbitSignature sig;
    sig.u_dim = static_cast<int>(d.dim_u());
    sig.s_count = d.shift_mult;
    sig.b_count = d.backshift_mult;
    for (const auto& b : d.blocks)
        for (int k = 0; k < b.mult; ++k) sig.chains.push_back(b.p);
    std::sort(sig.chains.begin(), sig.chains.end());
    sig.unitary_spectrum = eigenvalues(d.unitary_part);
    return sig;
}

struct SignatureComparison {
    bool chains_equal = false;
    bool u_dim_equal = false;
    bool rays_equal = false;
    double spectrum_distance = 0.0;

    bool agree(double spectrum_tol) const {
        return chains_equal && u_dim_equal && rays_equal && spectrum_distance <= spectrum_tol;
    }
};

inline SignatureComparison compare_signatures(const OrbitSignature& exact, const OrbitSignature& numeric) {
    SignatureComparison c;
    c.chains_equal = exact.chains == numeric.chains;
    c.u_dim_equal = exact.u_dim == numeric.u_dim;
    c.rays_equal = exact.s_count == numeric.s_count && exact.b_count == numeric.b_count &&
                   exact.u_lines == numeric.u_lines;
    c.spectrum_distance = spectrum_distance(exact.unitary_spectrum, numeric.unitary_spectrum);
    return c;
}

// perm[v] is the new label of node v.
inline PartialInjection relabel(const PartialInjection& f, const std::vector<int>& perm) {
    PartialInjection g;
    g.node_count = f.node_count;
    for (const auto& [from, to] : f.edges) g.edges.emplace_back(perm.at(from), perm.at(to));
    for (int v : f.past_flags) g.past_flags.insert(perm.at(v));
    for (int v : f.future_flags) g.future_flags.insert(perm.at(v));
    return g;
}

// Every flag-free partial injection on `n` labelled nodes.
inline std::vector<PartialInjection> enumerate_partial_injections(int n) {
    std::vector<PartialInjection> out;
    std::vector<int> succ(static_cast<std::size_t>(n), -1);
    std::vector<bool> taken(static_cast<std::size_t>(n), false);
    std::function<void(int)> rec = [&](int v) {
        if (v == n) {
            PartialInjection f;
            f.node_count = n;
            for (int k = 0; k < n; ++k)
                if (succ[k] >= 0) f.edges.emplace_back(k, succ[k]);
            out.push_back(std::move(f));
            return;
        }
        succ[v] = -1;
        rec(v + 1);
        for (int t = 0; t < n; ++t) {
            if (taken[t]) continue;
            taken[t] = true;
            succ[v] = t;
            rec(v + 1);
            taken[t] = false;
            succ[v] = -1;
        }
    };
    rec(0);
    return out;
}

} // namespace ppi
