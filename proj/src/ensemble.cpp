#include "modal/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "modal/assignment.hpp"

namespace modal {

namespace {

// Inverse-CDF draw over a frame's eigenvalues (ascending label order),
// normalized over the retained labels.
int sample_frame_label(const SchmidtFrame& frame, Rng& rng) {
    const double total = frame.p.sum();
    const double u = rng.uniform01() * total;
    double cum = 0.0;
    for (Index i = 0; i < frame.size(); ++i) {
        cum += frame.p[i];
        if (u < cum) return frame.labels[static_cast<std::size_t>(i)];
    }
    return frame.labels.back();
}

JointState strip_qubit_factor(const JointState& joint, Index row, Index dim_dev) {
    // joint is ((qubit (x) device), env); keep the device+env block of one
    // qubit basis state and renormalize.
    const Index de = joint.dim_e;
    JointState out;
    out.dim_a = dim_dev;
    out.dim_e = de;
    out.amps = joint.amps.segment(row * dim_dev * de, dim_dev * de);
    const double n = out.amps.norm();
    if (n <= 1e-12) {
        throw ValidationError("measurement_branches: branch block carries no amplitude");
    }
    out.amps /= n;
    return out;
}

struct BranchStates {
    JointState joint_plus_0;
    JointState joint_minus_0;
    JointState phi0;
};

BranchStates branch_initial_states(const Scenario& sc) {
    if (!sc.measurement) {
        throw ValidationError("measurement operation on a non-measurement scenario");
    }
    const auto& ms = *sc.measurement;
    const Index dim_dev = ms.pointer_dim;
    // Recover the device+bath ready state from whichever branch amplitude is
    // nonzero; the initial state is (c+|0> + c-|1>) (x) ready by construction.
    const Index block = dim_dev * sc.dim_e;
    Vector ready(block);
    if (std::abs(ms.c_plus) >= std::abs(ms.c_minus)) {
        ready = sc.initial.amps.segment(0, block) / ms.c_plus;
    } else {
        ready = sc.initial.amps.segment(block, block) / ms.c_minus;
    }
    ready /= ready.norm();

    BranchStates out;
    out.phi0 = JointState{dim_dev, sc.dim_e, ready};
    out.joint_plus_0 = JointState{sc.dim_a, sc.dim_e, kron(basis_state(2, 0), ready)};
    out.joint_minus_0 = JointState{sc.dim_a, sc.dim_e, kron(basis_state(2, 1), ready)};
    return out;
}

}  // namespace

// ------------------------- deterministic evolution ---------------------------

EvolutionTrace build_trace(const Scenario& sc) {
    validate_joint(sc.initial, "build_trace");
    const Matrix h_total = scenario_h_total(sc);
    const SpectralPropagator prop(h_total);

    EvolutionTrace trace;
    trace.frames.reserve(sc.n_steps + 1);
    trace.frames.push_back(extract_frame(sc.initial, sc.eps_null, 0.0));

    JointState psi = sc.initial;
    for (int k = 0; k < sc.n_steps; ++k) {
        TransitionMatrix tm;
        try {
            tm = transition_matrix(trace.frames.back(), sc.h_int, sc.eta);
        } catch (const BreakdownError&) {
            trace.breakdown_step = k;
            break;
        }
        trace.taus.push_back(decoherence_scale(tm));
        psi = prop.step(psi, sc.eta);
        const SchmidtFrame raw =
            extract_frame(psi, sc.eps_null, sc.eta * static_cast<double>(k + 1));
        auto [relabeled, match] = match_frames(trace.frames.back(), raw);

        // Flow residual over the labels present on both ends of the step.
        double res = 0.0;
        const RealVector predicted = tm.p_cond * trace.frames.back().p;
        for (Index i = 0; i < relabeled.size(); ++i) {
            const int idx = trace.frames.back().index_of(relabeled.labels[i]);
            if (idx >= 0) res = std::max(res, std::abs(relabeled.p[i] - predicted[idx]));
        }
        trace.flow_residuals.push_back(res);

        for (const auto& [label, ov] : match.overlaps) {
            trace.min_overlap = std::min(trace.min_overlap, ov);
        }
        trace.birth_count += static_cast<int>(match.births.size());
        trace.death_count += static_cast<int>(match.deaths.size());
        trace.degeneracy_steps += match.degeneracy_flag ? 1 : 0;

        trace.tms.push_back(std::move(tm));
        trace.matches.push_back(std::move(match));
        trace.frames.push_back(std::move(relabeled));
    }
    trace.psi_final = std::move(psi);
    return trace;
}

// ------------------------------ trajectories ---------------------------------

Trajectory run_trajectory(const EvolutionTrace& trace, std::uint64_t master_seed,
                          std::uint64_t index) {
    Rng rng(derive_stream_seed(master_seed, index));
    Trajectory tr;
    tr.seed_index = index;
    tr.breakdown_step = trace.breakdown_step;
    tr.labels.reserve(trace.frames.size());
    tr.labels.push_back(sample_frame_label(trace.frames.front(), rng));
    for (std::size_t k = 0; k < trace.tms.size(); ++k) {
        int next = sample_transition(trace.tms[k], tr.labels.back(), rng);
        const SchmidtFrame& frame_next = trace.frames[k + 1];
        if (frame_next.index_of(next) < 0) {
            next = sample_frame_label(frame_next, rng);
            ++tr.death_events;
        }
        tr.labels.push_back(next);
    }
    return tr;
}

std::vector<Trajectory> run_ensemble(const EvolutionTrace& trace, std::uint64_t master_seed,
                                     int n_trajectories, int workers) {
    if (n_trajectories < 1) throw ValidationError("run_ensemble: need at least one trajectory");
    if (workers <= 0) {
        workers = static_cast<int>(std::thread::hardware_concurrency());
        if (workers <= 0) workers = 1;
    }
    workers = std::min(workers, n_trajectories);

    std::vector<Trajectory> out(static_cast<std::size_t>(n_trajectories));
    auto work = [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            out[static_cast<std::size_t>(i)] =
                run_trajectory(trace, master_seed, static_cast<std::uint64_t>(i));
        }
    };
    if (workers == 1) {
        work(0, n_trajectories);
        return out;
    }
    std::vector<std::thread> pool;
    const int chunk = (n_trajectories + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int begin = w * chunk;
        const int end = std::min(n_trajectories, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back(work, begin, end);
    }
    for (auto& t : pool) t.join();
    return out;
}

// ----------------------------- classification --------------------------------

bool EnsemblePartition::is_plus(int label) const {
    return std::find(plus_labels.begin(), plus_labels.end(), label) != plus_labels.end();
}

bool EnsemblePartition::is_minus(int label) const {
    return std::find(minus_labels.begin(), minus_labels.end(), label) != minus_labels.end();
}

EnsemblePartition classify_ensembles(const SchmidtFrame& frame, const Matrix& rho_plus,
                                     const Matrix& rho_minus, double margin_min) {
    if (rho_plus.rows() != frame.dim_a || rho_minus.rows() != frame.dim_a) {
        throw ValidationError("classify_ensembles: branch matrix dimension mismatch");
    }
    EnsemblePartition part;
    for (Index i = 0; i < frame.size(); ++i) {
        const Vector& v = frame.psi[i];
        const double sp = std::real(v.dot(rho_plus * v));
        const double sm = std::real(v.dot(rho_minus * v));
        const int label = frame.labels[static_cast<std::size_t>(i)];
        const double denom = sp + sm;
        const double margin = denom > 0.0 ? std::abs(sp - sm) / denom : 0.0;
        part.margins[label] = margin;
        if (margin >= margin_min) {
            (sp > sm ? part.plus_labels : part.minus_labels).push_back(label);
        } else {
            part.null_labels.push_back(label);
        }
    }
    return part;
}

void classify_trajectories(std::vector<Trajectory>& trajectories,
                           const EnsemblePartition& partition) {
    for (auto& tr : trajectories) {
        if (tr.breakdown_step) continue;
        const int label = tr.labels.back();
        if (partition.is_plus(label)) {
            tr.outcome = Outcome::Plus;
        } else if (partition.is_minus(label)) {
            tr.outcome = Outcome::Minus;
        } else {
            tr.outcome = Outcome::Null;
        }
    }
}

// ------------------------------ measurement ----------------------------------

MeasurementBranches measurement_branches(const Scenario& sc) {
    const BranchStates init = branch_initial_states(sc);
    const SpectralPropagator prop(scenario_h_total(sc));
    const double t = sc.measurement->t_measure;

    MeasurementBranches out;
    out.phi0 = init.phi0;
    out.joint_plus = init.joint_plus_0;
    out.joint_plus.amps = prop.apply(init.joint_plus_0.amps, t);
    out.joint_minus = init.joint_minus_0;
    out.joint_minus.amps = prop.apply(init.joint_minus_0.amps, t);
    // sigma_z of the measured qubit commutes with the builder's Hamiltonian,
    // so each evolved branch stays inside its own qubit block.
    out.phi_plus = strip_qubit_factor(out.joint_plus, 0, sc.measurement->pointer_dim);
    out.phi_minus = strip_qubit_factor(out.joint_minus, 1, sc.measurement->pointer_dim);
    return out;
}

BranchDensities branch_density_matrices(const Scenario& sc) {
    const BranchStates init = branch_initial_states(sc);
    const SpectralPropagator prop(scenario_h_total(sc));
    const double t = sc.measurement->t_measure;
    const auto& ms = *sc.measurement;

    BranchDensities out;
    out.rho0 = partial_trace_env(sc.initial);

    JointState bp = init.joint_plus_0;
    bp.amps = prop.apply(bp.amps, t);
    JointState bm = init.joint_minus_0;
    bm.amps = prop.apply(bm.amps, t);
    out.rho_plus = partial_trace_env(bp);
    out.rho_minus = partial_trace_env(bm);

    JointState full = sc.initial;
    full.amps = prop.apply(full.amps, t);
    const Matrix rho_t = partial_trace_env(full);
    out.mixture_residual = max_abs(rho_t - std::norm(ms.c_plus) * out.rho_plus -
                                   std::norm(ms.c_minus) * out.rho_minus);
    return out;
}

// --------------------------------- reports -----------------------------------

BornReport born_statistics(const std::vector<Trajectory>& trajectories,
                           const MeasurementSpec& spec, const EnsemblePartition& partition,
                           const SchmidtFrame& final_frame) {
    BornReport rep;
    rep.total = static_cast<int>(trajectories.size());
    rep.c_plus_sq = std::norm(spec.c_plus);
    for (const auto& tr : trajectories) {
        if (tr.breakdown_step) {
            ++rep.n_breakdown;
            continue;
        }
        if (!tr.outcome) continue;
        const int initial = tr.labels.front();
        auto& [plus, classified] = rep.per_initial_label[initial];
        switch (*tr.outcome) {
            case Outcome::Plus:
                ++rep.n_plus;
                ++plus;
                ++classified;
                break;
            case Outcome::Minus:
                ++rep.n_minus;
                ++classified;
                break;
            case Outcome::Null:
                ++rep.n_null;
                break;
        }
    }
    const int classified = rep.n_plus + rep.n_minus;
    if (classified == 0) {
        throw EmptyEnsembleError("born_statistics: no classified trajectories");
    }
    rep.f_plus = static_cast<double>(rep.n_plus) / classified;
    rep.f_minus = static_cast<double>(rep.n_minus) / classified;
    rep.sigma3 = 3.0 * std::sqrt(rep.c_plus_sq * (1.0 - rep.c_plus_sq) / classified);
    for (Index i = 0; i < final_frame.size(); ++i) {
        const int label = final_frame.labels[static_cast<std::size_t>(i)];
        if (partition.is_plus(label)) rep.p_sum_plus += final_frame.p[i];
        if (partition.is_minus(label)) rep.p_sum_minus += final_frame.p[i];
    }
    return rep;
}

ErgodicityReport ergodicity_diagnostic(std::span<const TransitionMatrix> tms, double window,
                                       const EnsemblePartition* partition) {
    if (tms.empty()) throw ValidationError("ergodicity_diagnostic: no transition matrices");
    if (window <= 0.0) throw ValidationError("ergodicity_diagnostic: window must be positive");

    // Trailing suffix spanning >= window.
    double span = 0.0;
    std::size_t begin = tms.size();
    while (begin > 0 && span < window - 1e-12) {
        --begin;
        span += tms[begin].eta;
    }
    if (span < window - 1e-12) {
        throw ValidationError("ergodicity_diagnostic: matrices span less than the window");
    }
    std::vector<TransitionMatrix> suffix(tms.begin() + static_cast<std::ptrdiff_t>(begin),
                                         tms.end());
    const TransitionMatrix composed = compose_chain(suffix);

    ErgodicityReport rep;
    rep.window_steps = static_cast<int>(suffix.size());
    rep.window = composed.eta;
    const Index k = composed.p_cond.cols();
    for (Index a = 0; a < k; ++a) {
        for (Index b = a + 1; b < k; ++b) {
            const double tv = 0.5 * (composed.p_cond.col(a) - composed.p_cond.col(b))
                                        .cwiseAbs()
                                        .sum();
            rep.tv_distance = std::max(rep.tv_distance, tv);
        }
    }
    const double off_mass = composed.p_cond.sum() - composed.p_cond.trace();
    if (rep.tv_distance <= 0.05) {
        rep.verdict = "equilibrium";
    } else if (off_mass <= 1e-12) {
        rep.verdict = "frozen";
    } else {
        rep.verdict = "mixing";
    }

    if (partition) {
        rep.cross_partition_mass = 0.0;
        rep.intra_partition_mass = 0.0;
        for (Index i = 0; i < k; ++i) {
            for (Index j = 0; j < k; ++j) {
                if (i == j) continue;
                const int li = composed.labels[static_cast<std::size_t>(i)];
                const int lj = composed.labels[static_cast<std::size_t>(j)];
                const bool ip = partition->is_plus(li), im = partition->is_minus(li);
                const bool jp = partition->is_plus(lj), jm = partition->is_minus(lj);
                if ((ip && jm) || (im && jp)) {
                    rep.cross_partition_mass += composed.p_cond(i, j);
                } else if ((ip && jp) || (im && jm)) {
                    rep.intra_partition_mass += composed.p_cond(i, j);
                }
            }
        }
    }
    return rep;
}

// ------------------------- emergent joint probabilities ----------------------

FactorizationMap factorization_check(const JointState& psi, Index dim_a, Index dim_b,
                                     Index dim_e, double eps_null) {
    if (psi.amps.size() != dim_a * dim_b * dim_e) {
        throw ValidationError("factorization_check: dims do not match the state");
    }
    const JointState view_ab{dim_a * dim_b, dim_e, psi.amps};
    const JointState view_a{dim_a, dim_b * dim_e, psi.amps};
    const SchmidtFrame frame_ab = extract_frame(view_ab, eps_null, 0.0);
    const SchmidtFrame frame_a = extract_frame(view_a, eps_null, 0.0);
    const SchmidtFrame frame_b =
        extract_frame(promote_middle_factor(view_ab, dim_a, dim_b), eps_null, 0.0);
    const Matrix rho_ab = partial_trace_env(view_ab);

    const Index n_m = frame_ab.size();
    const Index n_i = frame_a.size();
    const Index n_a = frame_b.size();

    // Benefit of pairing composite m with product (i, a).
    Eigen::MatrixXd benefit(n_m, n_i * n_a);
    std::vector<Vector> products(static_cast<std::size_t>(n_i * n_a));
    for (Index i = 0; i < n_i; ++i) {
        for (Index a = 0; a < n_a; ++a) {
            const Index col = i * n_a + a;
            products[static_cast<std::size_t>(col)] = kron(frame_a.psi[i], frame_b.psi[a]);
            for (Index m = 0; m < n_m; ++m) {
                benefit(m, col) =
                    std::norm(frame_ab.psi[m].dot(products[static_cast<std::size_t>(col)]));
            }
        }
    }
    const std::vector<int> assign = max_benefit_assignment(benefit);

    FactorizationMap out;
    for (Index m = 0; m < n_m; ++m) {
        const int col = assign[static_cast<std::size_t>(m)];
        if (col < 0) continue;
        const Vector& prod = products[static_cast<std::size_t>(col)];
        // Residual minimized over the product's free global phase, computed
        // from the difference vector itself (the 2-2|ov| form loses half the
        // significant digits near zero).
        const Complex ov = frame_ab.psi[m].dot(prod);
        const Complex phase = std::abs(ov) > 0.0 ? std::conj(ov) / std::abs(ov) : Complex(1.0);
        FactorPair pair;
        pair.m = frame_ab.labels[static_cast<std::size_t>(m)];
        pair.i = frame_a.labels[static_cast<std::size_t>(col / n_a)];
        pair.a = frame_b.labels[static_cast<std::size_t>(col % n_a)];
        pair.residual = (frame_ab.psi[m] - phase * prod).norm();
        pair.p_m = frame_ab.p[m];
        pair.p_joint = std::real(prod.dot(rho_ab * prod));
        out.max_residual = std::max(out.max_residual, pair.residual);
        out.pairs.push_back(pair);
    }
    return out;
}

// ------------------------------- collapse ------------------------------------

Matrix collapse(const Matrix& rho_t, const SchmidtFrame& frame,
                const EnsemblePartition& partition, Outcome outcome) {
    if (rho_t.rows() != frame.dim_a) {
        throw ValidationError("collapse: density matrix dimension mismatch");
    }
    const std::vector<int>& keep =
        outcome == Outcome::Plus ? partition.plus_labels : partition.minus_labels;
    if (outcome == Outcome::Null || keep.empty()) {
        throw EmptyEnsembleError("collapse: outcome label set is empty");
    }
    Matrix out = Matrix::Zero(frame.dim_a, frame.dim_a);
    double total = 0.0;
    for (int label : keep) {
        const int i = frame.index_of(label);
        if (i < 0) continue;
        out += frame.p[i] * (frame.psi[i] * frame.psi[i].adjoint());
        total += frame.p[i];
    }
    if (total <= 0.0) {
        throw EmptyEnsembleError("collapse: outcome set carries no probability mass");
    }
    return out / total;
}

}  // namespace modal
