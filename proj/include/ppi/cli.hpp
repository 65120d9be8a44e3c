#pragma once

// Command implementations behind the `ppi` executable. Each command turns a
// RunConfig into a JSON report, a text summary and an exit code:
//   0 success, 1 mathematical verdict failure, 2 input error,
//   3 internal consistency failure.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ppi/json_io.hpp"

namespace ppi::cli {

enum ExitCode : int { kOk = 0, kVerdictFailure = 1, kInputError = 2, kInternalError = 3 };

struct RunConfig {
    std::string command;
    std::string input;  // path or inline JSON
    std::string second; // decomposition for `verify`
    Tolerance tol;
    std::optional<std::uint64_t> seed;
    std::string output;
    std::string format = "json"; // json | text
    std::string batch;
    bool cross_check = false;
};

struct CommandResult {
    int exit_code = kOk;
    json report = json::object();
    std::string text;
    std::string diagnostics;
};

inline const std::vector<std::string>& commands() {
    static const std::vector<std::string> names{"analyze", "decompose", "decompose-family",
                                                "orbit-classify", "plant", "verify"};
    return names;
}

namespace detail {

inline bool looks_inline(const std::string& s) {
    auto it = std::find_if(s.begin(), s.end(), [](unsigned char c) { return !std::isspace(c); });
    return it != s.end() && (*it == '{' || *it == '[');
}

inline json load_json(const std::string& source) {
    std::string text;
    if (looks_inline(source)) {
        text = source;
    } else {
        std::ifstream in(source);
        if (!in) throw InputError("cannot open '" + source + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("JSON parse error: ") + e.what());
    }
}

inline bool is_family_input(const json& j) {
    return j.is_array() || (j.is_object() && j.contains("operators"));
}

inline Matrix operator_from_input(const json& j) {
    if (j.is_object() && j.contains("operator")) return matrix_from_json(j.at("operator"));
    return matrix_from_json(j);
}

inline std::vector<Matrix> family_from_input(const json& j) {
    const json& ops = j.is_array() ? j : j.at("operators");
    if (!ops.is_array() || ops.empty()) throw InputError("'operators' must be a nonempty array");
    std::vector<Matrix> out;
    for (const auto& o : ops) out.push_back(matrix_from_json(o));
    return out;
}

inline std::string blocks_text(const HWDecomposition& d) {
    std::string s = "[";
    for (std::size_t k = 0; k < d.blocks.size(); ++k)
        s += (k ? ", " : "") + std::string("(") + std::to_string(d.blocks[k].p) + "," +
             std::to_string(d.blocks[k].mult) + ")";
    return s + "]";
}

inline std::string fmt_double(double x) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << x;
    return os.str();
}

inline std::string report_text(const VerificationReport& r) {
    std::string s = r.passed() ? "PASS" : "FAIL";
    for (const auto& c : r.checks)
        if (!c.passed) s += "\n  failed " + c.name + ": " + fmt_double(c.value) + " > " + fmt_double(c.limit);
    return s;
}

inline CommandResult analyze(const RunConfig& cfg) {
    CommandResult res;
    json in = load_json(cfg.input);
    if (is_family_input(in)) {
        auto ts = family_from_input(in);
        require_same_dims(ts);
        json reports = json::array();
        bool ok = true;
        std::string text;
        for (std::size_t m = 0; m < ts.size(); ++m) {
            auto rep = is_power_partial_isometry(ts[m], cfg.tol);
            ok = ok && rep.verdict;
            reports.push_back(to_json(rep));
            text += "T_" + std::to_string(m + 1) + ": power partial isometry " + (rep.verdict ? "yes" : "no");
            if (!rep.verdict) text += " (fails at power " + std::to_string(rep.first_failing_power(cfg.tol.abs_tol)) + ")";
            text += "\n";
        }
        auto violations = is_star_commuting_family(ts, cfg.tol);
        ok = ok && violations.empty();
        text += std::string("star-commuting: ") + (violations.empty() ? "yes" : "no");
        for (const auto& v : violations)
            text += "\n  T_" + std::to_string(v.m + 1) + ", T_" + std::to_string(v.n + 1) + " " + to_string(v.kind) +
                    " defect " + fmt_double(v.defect);
        res.report = {{"kind", "family"}, {"defects", std::move(reports)}, {"violations", to_json(violations)},
                      {"verdict", ok}};
        res.text = text;
        res.exit_code = ok ? kOk : kVerdictFailure;
        return res;
    }
    Matrix t = operator_from_input(in);
    require_square(t);
    auto rep = is_power_partial_isometry(t, cfg.tol);
    bool pi = partial_isometry_defect(t) <= cfg.tol.abs_tol;
    res.report = {{"kind", "operator"}, {"partial_isometry", pi}, {"defects", to_json(rep)}, {"verdict", rep.verdict}};
    if (!rep.verdict) res.report["first_failing_power"] = rep.first_failing_power(cfg.tol.abs_tol);
    res.text = std::string("partial isometry: ") + (pi ? "yes" : "no") + "\npower partial isometry: " +
               (rep.verdict ? "yes" : "no");
    if (!rep.verdict) {
        int n = rep.first_failing_power(cfg.tol.abs_tol);
        res.text += " (power " + std::to_string(n) + " defect " + fmt_double(rep.per_power_defect[n - 1]) + ")";
    }
    res.exit_code = rep.verdict ? kOk : kVerdictFailure;
    return res;
}

inline CommandResult decompose_cmd(const RunConfig& cfg) {
    CommandResult res;
    Matrix t = operator_from_input(load_json(cfg.input));
    require_square(t);
    auto rep = is_power_partial_isometry(t, cfg.tol);
    if (!rep.verdict) {
        res.exit_code = kVerdictFailure;
        res.report = {{"error", "not a power partial isometry"}, {"defects", to_json(rep)}};
        res.text = "not a power partial isometry (power " +
                   std::to_string(rep.first_failing_power(cfg.tol.abs_tol)) + ")";
        return res;
    }
    HWDecomposition d = decompose(t, cfg.tol);
    res.report = to_json(d);
    res.text = "H_u dim " + std::to_string(d.dim_u()) + ", blocks " + blocks_text(d) + ", residual " +
               fmt_double(d.residual);
    return res;
}

inline CommandResult decompose_family_cmd(const RunConfig& cfg) {
    CommandResult res;
    auto ts = family_from_input(load_json(cfg.input));
    require_same_dims(ts);
    auto violations = is_star_commuting_family(ts, cfg.tol);
    json defects = json::array();
    bool powers_ok = true;
    for (const auto& t : ts) {
        auto rep = is_power_partial_isometry(t, cfg.tol);
        powers_ok = powers_ok && rep.verdict;
        defects.push_back(to_json(rep));
    }
    if (!violations.empty() || !powers_ok) {
        res.exit_code = kVerdictFailure;
        res.report = {{"error", "family is not a star-commuting family of power partial isometries"},
                      {"violations", to_json(violations)},
                      {"defects", std::move(defects)}};
        res.text = "precondition failed";
        for (const auto& v : violations)
            res.text += "\n  T_" + std::to_string(v.m + 1) + ", T_" + std::to_string(v.n + 1) + " " +
                        to_string(v.kind) + " defect " + fmt_double(v.defect);
        return res;
    }
    FamilyDecomposition fd = decompose_family(ts, cfg.tol);
    res.report = to_json(fd);
    std::string text = std::to_string(fd.summands.size()) + " summands";
    for (const auto& s : fd.summands) text += "\n  " + to_string(s.index) + " mult " + std::to_string(s.mult_dim);
    double worst = 0.0;
    for (double r : fd.residuals) worst = std::max(worst, r);
    res.text = text + "\nmax residual " + fmt_double(worst);
    return res;
}

inline CommandResult orbit_cmd(const RunConfig& cfg) {
    CommandResult res;
    PartialInjection f = partial_injection_from_json(load_json(cfg.input));
    auto violations = validate(f);
    if (!violations.empty()) {
        res.exit_code = kInputError;
        res.report = {{"error", "invalid partial injection"}, {"violations", violations}};
        res.text = "invalid partial injection: " + violations.front();
        return res;
    }
    OrbitSignature sig = classify_orbits(f);
    res.report = to_json(sig);
    std::ostringstream text;
    text << "cycles " << json(sig.u_cycles).dump() << ", lines " << sig.u_lines << ", shifts " << sig.s_count
         << ", backshifts " << sig.b_count << ", chains " << json(sig.chains).dump();
    if (cfg.cross_check) {
        if (f.has_flags()) {
            res.report["cross_check"] = "skipped: flagged orbits have no matrix model";
        } else {
            HWDecomposition d = decompose(to_matrix(f), cfg.tol);
            auto cmp = compare_signatures(sig, signature_of_decomposition(d));
            bool agree = cmp.agree(1e-9);
            res.report["cross_check"] = {{"agree", agree},
                                         {"chains_equal", cmp.chains_equal},
                                         {"u_dim_equal", cmp.u_dim_equal},
                                         {"spectrum_distance", cmp.spectrum_distance}};
            text << "\ncross-check " << (agree ? "agrees" : "MISMATCH");
            if (!agree) {
                res.exit_code = kInternalError;
                res.diagnostics = "matrix backend disagrees with the orbit classification";
            }
        }
    }
    res.text = text.str();
    return res;
}

inline CommandResult plant_cmd(const RunConfig& cfg) {
    CommandResult res;
    json in = load_json(cfg.input);
    if (in.is_object() && in.contains("summands")) {
        FamilyPlantSpec spec = family_plant_spec_from_json(in);
        if (cfg.seed) spec.seed = *cfg.seed;
        PlantedFamily pf = plant_family(spec);
        json ops = json::array();
        for (const auto& t : pf.ops) ops.push_back(matrix_to_json(t));
        res.report = {{"spec", to_json(spec)}, {"operators", std::move(ops)}, {"truth", to_json(pf.truth)}};
        res.text = "planted family of " + std::to_string(spec.M) + " operators on C^" +
                   std::to_string(spec.total_dim()) + " with " + std::to_string(spec.summands.size()) + " summands";
        return res;
    }
    PlantSpec spec = plant_spec_from_json(in);
    if (cfg.seed) spec.seed = *cfg.seed;
    PlantedSingle ps = plant_single(spec);
    res.report = {{"spec", to_json(spec)}, {"operator", matrix_to_json(ps.op)}, {"truth", to_json(ps.truth)}};
    res.text = "planted operator on C^" + std::to_string(spec.total_dim()) + ": H_u dim " +
               std::to_string(spec.dim_u) + ", blocks " + blocks_text(ps.truth);
    return res;
}

inline CommandResult verify_cmd(const RunConfig& cfg) {
    CommandResult res;
    if (cfg.second.empty()) throw InputError("verify needs an operator input and a decomposition input");
    json in = load_json(cfg.input);
    json dec = load_json(cfg.second);
    if (dec.is_object() && dec.contains("truth")) dec = dec.at("truth");
    VerificationReport rep;
    if (is_family_input(in)) {
        auto ts = family_from_input(in);
        require_same_dims(ts);
        rep = verify_family(ts, family_decomposition_from_json(dec), cfg.tol);
    } else {
        Matrix t = operator_from_input(in);
        require_square(t);
        rep = verify(t, hw_decomposition_from_json(dec), cfg.tol);
    }
    res.report = to_json(rep);
    res.text = report_text(rep);
    res.exit_code = rep.passed() ? kOk : kVerdictFailure;
    return res;
}

inline CommandResult dispatch(const RunConfig& cfg) {
    if (cfg.command == "analyze") return analyze(cfg);
    if (cfg.command == "decompose") return decompose_cmd(cfg);
    if (cfg.command == "decompose-family") return decompose_family_cmd(cfg);
    if (cfg.command == "orbit-classify") return orbit_cmd(cfg);
    if (cfg.command == "plant") return plant_cmd(cfg);
    if (cfg.command == "verify") return verify_cmd(cfg);
    throw InputError("unknown command '" + cfg.command + "'");
}

inline CommandResult guarded(const RunConfig& cfg) {
    auto fail = [](int code, const std::string& kind, const std::string& msg) {
        CommandResult r;
        r.exit_code = code;
        r.report = {{"error", kind}, {"message", msg}};
        r.text = kind + ": " + msg;
        r.diagnostics = msg;
        return r;
    };
    try {
        cfg.tol.validate();
        if (!(cfg.tol.abs_tol > 0.0) || !(cfg.tol.rank_rel_tol > 0.0))
            throw InputError("tolerances must be positive");
        return dispatch(cfg);
    } catch (const InputError& e) {
        return fail(kInputError, "input error", e.what());
    } catch (const PredicateError& e) {
        return fail(kVerdictFailure, "precondition failed", e.what());
    } catch (const Error& e) {
        return fail(kInternalError, "internal consistency failure", e.what());
    } catch (const json::exception& e) {
        return fail(kInputError, "input error", e.what());
    }
}

} // namespace detail

// Runs one command, or every *.json file of cfg.batch concurrently when set.
inline CommandResult run(const RunConfig& cfg) {
    if (cfg.batch.empty()) return detail::guarded(cfg);

    CommandResult res;
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(cfg.batch, ec))
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    if (ec) {
        res.exit_code = kInputError;
        res.report = {{"error", "input error"}, {"message", "cannot read batch directory '" + cfg.batch + "'"}};
        res.diagnostics = res.report["message"];
        return res;
    }
    std::sort(files.begin(), files.end());
    std::vector<std::future<CommandResult>> jobs;
    for (const auto& path : files) {
        RunConfig one = cfg;
        one.batch.clear();
        one.input = path.string();
        jobs.push_back(std::async(std::launch::async, [one] { return detail::guarded(one); }));
    }
    json per_file = json::object();
    std::string text;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        CommandResult r = jobs[k].get();
        const std::string name = files[k].filename().string();
        per_file[name] = {{"exit_code", r.exit_code}, {"report", r.report}};
        text += name + ": exit " + std::to_string(r.exit_code) + "\n";
        res.exit_code = std::max(res.exit_code, r.exit_code);
    }
    res.report = {{"files", std::move(per_file)}};
    res.text = text;
    return res;
}

} // namespace ppi::cli
