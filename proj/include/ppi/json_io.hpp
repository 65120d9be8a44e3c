#pragma once

// JSON encodings of the library types. Matrices use
//     {"rows": n, "cols": m, "re": [[...], ...], "im": [[...], ...]}
// with row-major nested arrays; "im" may be omitted for real matrices.

#include <string>
#include <vector>

#include "json.hpp"

#include "ppi/generator.hpp"
#include "ppi/halmos_wallen.hpp"
#include "ppi/identities.hpp"
#include "ppi/orbit_model.hpp"
#include "ppi/pisometry.hpp"
#include "ppi/star_family.hpp"

namespace ppi {

using json = nlohmann::json;

namespace detail {

inline const json& field(const json& j, const char* key) {
    if (!j.is_object()) throw InputError(std::string("expected an object holding '") + key + "'");
    auto it = j.find(key);
    if (it == j.end()) throw InputError(std::string("missing field '") + key + "'");
    return *it;
}

template <typename Int>
Int integer_field(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_number_integer()) throw InputError(std::string("field '") + key + "' must be an integer");
    return v.get<Int>();
}

inline std::vector<std::vector<double>> parse_grid(const json& j, const char* key, long rows, long cols) {
    if (!j.is_array()) throw InputError(std::string("'") + key + "' must be an array of rows");
    if (static_cast<long>(j.size()) != rows)
        throw InputError(std::string("'") + key + "' has " + std::to_string(j.size()) + " rows, expected " +
                         std::to_string(rows));
    std::vector<std::vector<double>> out;
    for (const auto& row : j) {
        if (!row.is_array()) throw InputError(std::string("'") + key + "' rows must be arrays");
        if (static_cast<long>(row.size()) != cols)
            throw InputError(std::string("ragged array in '") + key + "': row of length " +
                             std::to_string(row.size()) + ", expected " + std::to_string(cols));
        std::vector<double> vals;
        for (const auto& x : row) {
            if (!x.is_number()) throw InputError(std::string("non-numeric entry in '") + key + "'");
            vals.push_back(x.get<double>());
        }
        out.push_back(std::move(vals));
    }
    return out;
}

} // namespace detail

inline json matrix_to_json(const Matrix& a) {
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        json rr = json::array(), ir = json::array();
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            rr.push_back(a(i, j).real());
            ir.push_back(a(i, j).imag());
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ir));
    }
    return {{"rows", a.rows()}, {"cols", a.cols()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline Matrix matrix_from_json(const json& j) {
    long rows = detail::integer_field<long>(j, "rows");
    long cols = detail::integer_field<long>(j, "cols");
    if (rows < 0 || cols < 0) throw InputError("matrix dimensions must be nonnegative");
    auto re = detail::parse_grid(detail::field(j, "re"), "re", rows, cols);
    std::vector<std::vector<double>> im;
    if (j.contains("im")) im = detail::parse_grid(j.at("im"), "im", rows, cols);
    Matrix a(rows, cols);
    for (long r = 0; r < rows; ++r)
        for (long c = 0; c < cols; ++c) a(r, c) = Complex(re[r][c], im.empty() ? 0.0 : im[r][c]);
    require_finite(a);
    return a;
}

inline json to_json(const DefectReport& r) {
    return {{"max_power_checked", r.max_power_checked},
            {"per_power_defect", r.per_power_defect},
            {"verdict", r.verdict}};
}

inline json to_json(const std::vector<StarViolation>& vs) {
    json out = json::array();
    for (const auto& v : vs)
        out.push_back({{"m", v.m + 1}, {"n", v.n + 1}, {"kind", to_string(v.kind)}, {"defect", v.defect}});
    return out;
}

inline json to_json(const VerificationReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name}, {"value", c.value}, {"limit", c.limit}, {"passed", c.passed}});
    return {{"passed", r.passed()}, {"checks", std::move(checks)}};
}

inline json to_json(const IdentityReport& r) {
    return {{"pull_range", r.pull_range},
            {"pull_source", r.pull_source},
            {"projections_commute", r.projections_commute},
            {"chain_orthogonality", r.chain_orthogonality},
            {"lattice_orthogonality", r.lattice_orthogonality},
            {"lattice_telescoping", r.lattice_telescoping},
            {"lattice_containment", r.lattice_containment},
            {"pq_commute", r.pq_commute},
            {"chain_annihilation", r.chain_annihilation},
            {"shift_dim", r.shift_dim},
            {"backshift_dim", r.backshift_dim},
            {"bookkeeping_gap", r.bookkeeping_gap}};
}

inline json to_json(const HWDecomposition& d) {
    json blocks = json::array();
    for (const auto& b : d.blocks) blocks.push_back({{"p", b.p}, {"mult", b.mult}});
    return {{"ambient_dim", d.ambient_dim},
            {"dim_u", d.dim_u()},
            {"blocks", std::move(blocks)},
            {"shift_mult", d.shift_mult},
            {"backshift_mult", d.backshift_mult},
            {"residual", d.residual},
            {"chain_deviation", d.chain_deviation},
            {"basis", matrix_to_json(d.basis)},
            {"unitary_part", matrix_to_json(d.unitary_part)}};
}

inline HWDecomposition hw_decomposition_from_json(const json& j) {
    HWDecomposition d;
    d.basis = matrix_from_json(detail::field(j, "basis"));
    d.unitary_part = matrix_from_json(detail::field(j, "unitary_part"));
    d.ambient_dim = j.contains("ambient_dim") ? detail::integer_field<long>(j, "ambient_dim") : d.basis.rows();
    if (j.contains("dim_u") && detail::integer_field<long>(j, "dim_u") != d.unitary_part.rows())
        throw InputError("dim_u does not match unitary_part");
    const json& blocks = detail::field(j, "blocks");
    if (!blocks.is_array()) throw InputError("'blocks' must be an array");
    for (const auto& b : blocks)
        d.blocks.push_back({detail::integer_field<int>(b, "p"), detail::integer_field<int>(b, "mult")});
    if (j.contains("shift_mult")) d.shift_mult = detail::integer_field<int>(j, "shift_mult");
    if (j.contains("backshift_mult")) d.backshift_mult = detail::integer_field<int>(j, "backshift_mult");
    if (j.contains("residual") && j.at("residual").is_number()) d.residual = j.at("residual").get<double>();
    if (j.contains("chain_deviation") && j.at("chain_deviation").is_number())
        d.chain_deviation = j.at("chain_deviation").get<double>();
    return d;
}

inline json to_json(const MultiIndex& index) {
    json out = json::array();
    for (const auto& l : index) out.push_back(l.str());
    return out;
}

inline MultiIndex multi_index_from_json(const json& j) {
    if (!j.is_array()) throw InputError("index must be an array of labels");
    MultiIndex out;
    for (const auto& l : j) {
        if (!l.is_string()) throw InputError("index labels must be strings");
        out.push_back(Label::parse(l.get<std::string>()));
    }
    return out;
}

inline json to_json(const FamilyDecomposition& fd) {
    json summands = json::array();
    for (const auto& s : fd.summands) {
        json unitaries = json::object();
        for (const auto& [m, v] : s.unitaries) unitaries[std::to_string(m + 1)] = matrix_to_json(v);
        summands.push_back({{"index", to_json(s.index)},
                            {"leg_dims", s.leg_dims},
                            {"mult_dim", s.mult_dim},
                            {"unitaries", std::move(unitaries)},
                            {"basis", matrix_to_json(s.basis)}});
    }
    return {{"M", fd.M}, {"summands", std::move(summands)}, {"residuals", fd.residuals}};
}

inline FamilyDecomposition family_decomposition_from_json(const json& j) {
    FamilyDecomposition fd;
    fd.M = detail::integer_field<int>(j, "M");
    const json& summands = detail::field(j, "summands");
    if (!summands.is_array()) throw InputError("'summands' must be an array");
    for (const auto& sj : summands) {
        FamilySummand s;
        s.index = multi_index_from_json(detail::field(sj, "index"));
        const json& legs = detail::field(sj, "leg_dims");
        if (!legs.is_array()) throw InputError("'leg_dims' must be an array");
        for (const auto& l : legs) {
            if (!l.is_number_integer()) throw InputError("leg dimensions must be integers");
            s.leg_dims.push_back(l.get<int>());
        }
        s.mult_dim = detail::integer_field<long>(sj, "mult_dim");
        if (sj.contains("unitaries")) {
            const json& us = sj.at("unitaries");
            if (!us.is_object()) throw InputError("'unitaries' must be an object");
            for (auto it = us.begin(); it != us.end(); ++it) {
                int m = 0;
                try {
                    m = std::stoi(it.key());
                } catch (const std::exception&) {
                    throw InputError("unitary key '" + it.key() + "' is not an operator number");
                }
                if (m < 1) throw InputError("operator numbers start at 1");
                s.unitaries[m - 1] = matrix_from_json(it.value());
            }
        }
        s.basis = matrix_from_json(detail::field(sj, "basis"));
        fd.summands.push_back(std::move(s));
    }
    if (j.contains("residuals")) {
        for (const auto& r : j.at("residuals"))
            fd.residuals.push_back(r.is_number() ? r.get<double>() : std::numeric_limits<double>::infinity());
    }
    return fd;
}

inline json to_json(const PartialInjection& f) {
    json edges = json::array();
    for (const auto& [a, b] : f.edges) edges.push_back({a, b});
    return {{"nodes", f.node_count},
            {"edges", std::move(edges)},
            {"past_flags", std::vector<int>(f.past_flags.begin(), f.past_flags.end())},
            {"future_flags", std::vector<int>(f.future_flags.begin(), f.future_flags.end())}};
}

inline PartialInjection partial_injection_from_json(const json& j) {
    PartialInjection f;
    f.node_count = detail::integer_field<int>(j, "nodes");
    const json& edges = detail::field(j, "edges");
    if (!edges.is_array()) throw InputError("'edges' must be an array");
    for (const auto& e : edges) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
            throw InputError("edges must be [from, to] integer pairs");
        f.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    auto read_flags = [&](const char* key, std::set<int>& into) {
        if (!j.contains(key)) return;
        const json& a = j.at(key);
        if (!a.is_array()) throw InputError(std::string("'") + key + "' must be an array");
        for (const auto& v : a) {
            if (!v.is_number_integer()) throw InputError(std::string("'") + key + "' entries must be integers");
            into.insert(v.get<int>());
        }
    };
    read_flags("past_flags", f.past_flags);
    read_flags("future_flags", f.future_flags);
    return f;
}

inline json to_json(const OrbitSignature& s) {
    json spectrum = json::array();
    for (const auto& z : s.unitary_spectrum) spectrum.push_back({z.real(), z.imag()});
    return {{"u_cycles", s.u_cycles},   {"u_dim", s.u_dim},       {"u_lines", s.u_lines},
            {"s_count", s.s_count},     {"b_count", s.b_count},   {"chains", s.chains},
            {"ray_nodes", s.ray_nodes}, {"unitary_spectrum", std::move(spectrum)}};
}

inline json to_json(const PlantSpec& s) {
    json mults = json::object();
    for (const auto& [p, m] : s.mults) mults[std::to_string(p)] = m;
    return {{"dim_u", s.dim_u}, {"mults", std::move(mults)}, {"seed", s.seed}};
}

inline PlantSpec plant_spec_from_json(const json& j) {
    PlantSpec s;
    s.dim_u = j.contains("dim_u") ? detail::integer_field<int>(j, "dim_u") : 0;
    if (j.contains("seed")) s.seed = detail::integer_field<std::uint64_t>(j, "seed");
    if (j.contains("mults")) {
        const json& m = j.at("mults");
        if (m.is_object()) {
            for (auto it = m.begin(); it != m.end(); ++it) {
                int p = 0;
                try {
                    p = std::stoi(it.key());
                } catch (const std::exception&) {
                    throw InputError("block size key '" + it.key() + "' is not an integer");
                }
                if (!it.value().is_number_integer()) throw InputError("multiplicities must be integers");
                s.mults[p] += it.value().get<int>();
            }
        } else if (m.is_array()) {
            for (const auto& b : m)
                s.mults[detail::integer_field<int>(b, "p")] += detail::integer_field<int>(b, "mult");
        } else {
            throw InputError("'mults' must be an object or an array");
        }
    }
    s.validate();
    return s;
}

inline json to_json(const FamilyPlantSpec& s) {
    json summands = json::array();
    for (const auto& p : s.summands)
        summands.push_back({{"index", to_json(p.index)}, {"mult_dim", p.mult_dim}, {"unitary_seed", p.unitary_seed}});
    return {{"M", s.M}, {"summands", std::move(summands)}, {"seed", s.seed}};
}

inline FamilyPlantSpec family_plant_spec_from_json(const json& j) {
    FamilyPlantSpec s;
    s.M = detail::integer_field<int>(j, "M");
    if (j.contains("seed")) s.seed = detail::integer_field<std::uint64_t>(j, "seed");
    const json& summands = detail::field(j, "summands");
    if (!summands.is_array()) throw InputError("'summands' must be an array");
    for (const auto& sj : summands) {
        SummandPlant p;
        p.index = multi_index_from_json(detail::field(sj, "index"));
        p.mult_dim = detail::integer_field<int>(sj, "mult_dim");
        if (sj.contains("unitary_seed")) p.unitary_seed = detail::integer_field<std::uint64_t>(sj, "unitary_seed");
        s.summands.push_back(std::move(p));
    }
    s.validate();
    return s;
}

} // namespace ppi
