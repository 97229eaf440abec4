#include "modal/run.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <vector>

#include "modal/ensemble.hpp"
#include "modal/scenario_json.hpp"

namespace modal {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Shortest round-trip-exact decimal representation (RFC-4180 cell content).
std::string format_double(double value) {
    std::array<char, 40> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
}

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

json scenario_echo(const Scenario& sc) {
    json out{{"model", sc.model},        {"dim_a", sc.dim_a},
             {"dim_e", sc.dim_e},        {"eta", sc.eta},
             {"n_steps", sc.n_steps},    {"seed", sc.seed},
             {"eps_null", sc.eps_null},  {"static", sc.is_static},
             {"metadata", sc.metadata}};
    if (sc.measurement) {
        out["c_plus_sq"] = std::norm(sc.measurement->c_plus);
        out["pointer_dim"] = sc.measurement->pointer_dim;
        out["t_measure"] = sc.measurement->t_measure;
    }
    return out;
}

std::string trajectories_csv(const std::vector<Trajectory>& trs) {
    std::string out = "index,step,label\n";
    for (std::size_t i = 0; i < trs.size(); ++i) {
        for (std::size_t k = 0; k < trs[i].labels.size(); ++k) {
            out += std::to_string(i);
            out += ',';
            out += std::to_string(k);
            out += ',';
            out += std::to_string(trs[i].labels[k]);
            out += '\n';
        }
    }
    return out;
}

std::string flow_csv(const EvolutionTrace& trace, double eta) {
    std::string out = "step,time,residual,tau\n";
    for (std::size_t k = 0; k < trace.flow_residuals.size(); ++k) {
        out += std::to_string(k);
        out += ',';
        out += format_double(eta * static_cast<double>(k));
        out += ',';
        out += format_double(trace.flow_residuals[k]);
        out += ',';
        out += format_double(trace.taus[k]);
        out += '\n';
    }
    return out;
}

std::string frames_csv(const EvolutionTrace& trace) {
    std::string out = "step,time,label,p,null_weight\n";
    for (std::size_t k = 0; k < trace.frames.size(); ++k) {
        const auto& f = trace.frames[k];
        for (Index i = 0; i < f.size(); ++i) {
            out += std::to_string(k);
            out += ',';
            out += format_double(f.time);
            out += ',';
            out += std::to_string(f.labels[static_cast<std::size_t>(i)]);
            out += ',';
            out += format_double(f.p[i]);
            out += ',';
            out += format_double(f.null_weight);
            out += '\n';
        }
    }
    return out;
}

std::string transition_csv(const TransitionMatrix& tm) {
    std::string out = "to,from,p\n";
    for (Index i = 0; i < tm.p_cond.rows(); ++i) {
        for (Index j = 0; j < tm.p_cond.cols(); ++j) {
            out += std::to_string(tm.labels[static_cast<std::size_t>(i)]);
            out += ',';
            out += std::to_string(tm.labels[static_cast<std::size_t>(j)]);
            out += ',';
            out += format_double(tm.p_cond(i, j));
            out += '\n';
        }
    }
    return out;
}

}  // namespace

int cmd_run(const RunConfig& config, std::ostream& err) {
    Scenario sc;
    try {
        sc = load_scenario(config.scenario_path);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    if (config.n_trajectories < 1) {
        err << "error: --trajectories must be at least 1\n";
        return 2;
    }
    for (const auto& w : scenario_warnings(sc)) err << "warning: " << w << "\n";

    const EvolutionTrace trace = build_trace(sc);
    std::vector<Trajectory> trajectories =
        run_ensemble(trace, config.master_seed, config.n_trajectories, config.workers);

    // Classification and Born statistics for measurement scenarios.
    std::optional<EnsemblePartition> partition;
    std::optional<BornReport> born;
    double mixture_residual = -1.0;
    if (sc.measurement && !trace.breakdown_step) {
        const BranchDensities bd = branch_density_matrices(sc);
        mixture_residual = bd.mixture_residual;
        partition = classify_ensembles(trace.frames.back(), bd.rho_plus, bd.rho_minus);
        classify_trajectories(trajectories, *partition);
        try {
            born = born_statistics(trajectories, *sc.measurement, *partition,
                                   trace.frames.back());
        } catch (const EmptyEnsembleError&) {
            // counts are still reported below
        }
    }

    int n_null = 0, n_breakdown = 0, death_events = 0;
    for (const auto& tr : trajectories) {
        if (tr.breakdown_step) ++n_breakdown;
        if (tr.outcome && *tr.outcome == Outcome::Null) ++n_null;
        death_events += tr.death_events;
    }

    json summary;
    summary["tool"] = {{"name", kToolName}, {"version", kToolVersion}, {"rng", kRngVersion}};
    summary["timestamp"] = utc_timestamp();
    summary["config"] = {{"scenario_path", config.scenario_path},
                         {"master_seed", config.master_seed},
                         {"n_trajectories", config.n_trajectories},
                         {"emit", std::vector<std::string>(config.emit.begin(), config.emit.end())}};
    summary["scenario"] = scenario_echo(sc);
    summary["trajectories"] = {{"total", static_cast<int>(trajectories.size())},
                               {"null", n_null},
                               {"breakdown", n_breakdown},
                               {"death_events", death_events}};
    if (born) {
        json per_initial = json::object();
        for (const auto& [label, counts] : born->per_initial_label) {
            per_initial[std::to_string(label)] = {
                {"f_plus", counts.second > 0
                               ? static_cast<double>(counts.first) / counts.second
                               : 0.0},
                {"classified", counts.second}};
        }
        summary["born"] = {{"c_plus_sq", born->c_plus_sq},
                           {"f_plus", born->f_plus},
                           {"f_minus", born->f_minus},
                           {"sigma3", born->sigma3},
                           {"within_3sigma", std::abs(born->f_plus - born->c_plus_sq) <= born->sigma3},
                           {"n_plus", born->n_plus},
                           {"n_minus", born->n_minus},
                           {"p_sum_plus", born->p_sum_plus},
                           {"p_sum_minus", born->p_sum_minus},
                           {"per_initial_label", per_initial}};
    }
    if (partition) {
        summary["partition"] = {{"plus_labels", partition->plus_labels},
                                {"minus_labels", partition->minus_labels},
                                {"null_labels", partition->null_labels},
                                {"mixture_residual", mixture_residual}};
    }
    if (!trace.flow_residuals.empty()) {
        double mean = 0.0;
        for (double r : trace.flow_residuals) mean += r;
        mean /= static_cast<double>(trace.flow_residuals.size());
        const double max_res =
            *std::max_element(trace.flow_residuals.begin(), trace.flow_residuals.end());
        std::vector<double> finite_taus;
        for (double t : trace.taus) {
            if (std::isfinite(t)) finite_taus.push_back(t);
        }
        const double min_tau =
            finite_taus.empty() ? std::numeric_limits<double>::infinity()
                                : *std::min_element(finite_taus.begin(), finite_taus.end());
        summary["flow"] = {{"max_residual", max_res},
                           {"mean_residual", mean},
                           {"min_tau", std::isfinite(min_tau) ? json(min_tau) : json("inf")},
                           {"max_eta_over_tau",
                            std::isfinite(min_tau) ? sc.eta / min_tau : 0.0}};
    }
    summary["frames"] = {{"min_overlap", trace.min_overlap},
                         {"births", trace.birth_count},
                         {"deaths", trace.death_count},
                         {"degeneracy_steps", trace.degeneracy_steps},
                         {"final_labels", static_cast<int>(trace.frames.back().size())},
                         {"final_null_weight", trace.frames.back().null_weight}};
    if (trace.breakdown_step) summary["breakdown_step"] = *trace.breakdown_step;

    // Ergodicity over a trailing window of ~10 decoherence times, capped by
    // the longest suffix with stable labels (early steps often birth labels).
    if (!trace.tms.empty()) {
        std::vector<double> finite_taus;
        for (double t : trace.taus) {
            if (std::isfinite(t)) finite_taus.push_back(t);
        }
        std::size_t aligned = 1;
        while (aligned < trace.tms.size() &&
               trace.tms[trace.tms.size() - aligned - 1].labels == trace.tms.back().labels) {
            ++aligned;
        }
        const double span = sc.eta * static_cast<double>(aligned);
        const double window =
            finite_taus.empty() ? span : std::min(span, 10.0 * median(finite_taus));
        try {
            const ErgodicityReport erg = ergodicity_diagnostic(
                trace.tms, window, partition ? &*partition : nullptr);
            json e{{"window_steps", erg.window_steps},
                   {"window", erg.window},
                   {"tv_distance", erg.tv_distance},
                   {"verdict", erg.verdict}};
            if (partition) {
                e["cross_partition_mass"] = erg.cross_partition_mass;
                e["intra_partition_mass"] = erg.intra_partition_mass;
            }
            summary["ergodicity"] = e;
        } catch (const CompositionError&) {
            summary["ergodicity"] = {{"verdict", "unavailable"},
                                     {"reason", "labels not aligned across the window"}};
        }
        // For measurement runs also compose a short trailing window, where
        // branch suppression should already hold.
        if (partition) {
            const std::size_t post_steps = std::min<std::size_t>(aligned, 40);
            const ErgodicityReport post = ergodicity_diagnostic(
                trace.tms, sc.eta * static_cast<double>(post_steps), &*partition);
            summary["ergodicity_post"] = {
                {"window_steps", post.window_steps},
                {"window", post.window},
                {"cross_partition_mass", post.cross_partition_mass},
                {"intra_partition_mass", post.intra_partition_mass}};
        }
    }
    summary["warnings"] = scenario_warnings(sc);

    const fs::path out_dir(config.output_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (!fs::is_directory(out_dir)) {
        err << "error: output directory '" << config.output_dir << "' is not writable\n";
        return 2;
    }
    write_file(out_dir / "summary.json", summary.dump(2) + "\n");
    write_file(out_dir / "flow_residuals.csv", flow_csv(trace, sc.eta));
    if (config.emit.count("trajectories")) {
        write_file(out_dir / "trajectories.csv", trajectories_csv(trajectories));
    }
    if (config.emit.count("frames")) {
        write_file(out_dir / "frames.csv", frames_csv(trace));
    }
    if (config.emit.count("transition_matrices")) {
        for (std::size_t k = 0; k < trace.tms.size(); ++k) {
            write_file(out_dir / ("transition_t" + std::to_string(k) + ".csv"),
                       transition_csv(trace.tms[k]));
        }
    }

    const double breakdown_frac =
        trajectories.empty() ? 0.0
                             : static_cast<double>(n_breakdown) /
                                   static_cast<double>(trajectories.size());
    return breakdown_frac > 0.01 ? 3 : 0;
}

int cmd_diagnose(const DiagnoseConfig& config, std::ostream& out, std::ostream& err) {
    if (config.delta) {
        const auto& [n, sep, micro] = *config.delta;
        try {
            out << "ln_delta = " << format_double(delta_estimate({n, sep, micro})) << "\n";
        } catch (const Error& e) {
            err << "error: " << e.what() << "\n";
            return 2;
        }
    }
    if (config.scenario_path.empty()) return 0;

    Scenario sc;
    try {
        sc = load_scenario(config.scenario_path);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    for (const auto& w : scenario_warnings(sc)) err << "warning: " << w << "\n";

    const EvolutionTrace trace = build_trace(sc);
    out << "step,time,tau,flow_residual,min_overlap,degeneracy\n";
    for (std::size_t k = 0; k < trace.tms.size(); ++k) {
        double min_ov = 1.0;
        for (const auto& [label, ov] : trace.matches[k].overlaps) min_ov = std::min(min_ov, ov);
        out << k << ',' << format_double(sc.eta * static_cast<double>(k)) << ','
            << format_double(trace.taus[k]) << ',' << format_double(trace.flow_residuals[k])
            << ',' << format_double(min_ov) << ','
            << (trace.matches[k].degeneracy_flag ? 1 : 0) << "\n";
    }
    if (trace.breakdown_step) {
        out << "breakdown at step " << *trace.breakdown_step << "\n";
    }
    if (!trace.flow_residuals.empty()) {
        out << "max_flow_residual = "
            << format_double(
                   *std::max_element(trace.flow_residuals.begin(), trace.flow_residuals.end()))
            << "\n";
    }
    out << "min_frame_overlap = " << format_double(trace.min_overlap) << "\n";
    out << "degeneracy_steps = " << trace.degeneracy_steps << "\n";

    if (sc.tripartite) {
        const auto& tp = *sc.tripartite;
        const FactorizationMap fm = factorization_check(trace.psi_final, tp.dim_a1, tp.dim_a2,
                                                        sc.dim_e, sc.eps_null);
        out << "factorization: m,i,a,residual,p_m,p_joint\n";
        for (const auto& pair : fm.pairs) {
            out << pair.m << ',' << pair.i << ',' << pair.a << ','
                << format_double(pair.residual) << ',' << format_double(pair.p_m) << ','
                << format_double(pair.p_joint) << "\n";
        }
        out << "max_factorization_residual = " << format_double(fm.max_residual) << "\n";
    }
    return 0;
}

}  // namespace modal
