// ensemble.hpp — deterministic evolution traces, Monte-Carlo trajectory
// ensembles, outcome classification, Born statistics, ergodicity diagnostics,
// emergent joint probabilities and collapse bookkeeping.
#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "modal/ontic.hpp"
#include "modal/scenario.hpp"

namespace modal {

// ------------------------- deterministic evolution ---------------------------

// Everything the wavefunction determines, computed once per scenario and
// shared read-only by all trajectories: matched frames, one-step transition
// matrices, per-step flow residuals and labeling diagnostics.
struct EvolutionTrace {
    std::vector<SchmidtFrame> frames;       // n_steps+1 entries unless truncated
    std::vector<FrameMatch> matches;        // matches[k]: frames[k] -> frames[k+1]
    std::vector<TransitionMatrix> tms;      // tms[k]: step k -> k+1
    std::vector<double> flow_residuals;     // per step, over surviving labels
    std::vector<double> taus;               // decoherence scale per step
    std::optional<int> breakdown_step;
    JointState psi_final;
    int birth_count{0};
    int death_count{0};
    int degeneracy_steps{0};
    double min_overlap{1.0};

    int n_steps_completed() const { return static_cast<int>(tms.size()); }
};

EvolutionTrace build_trace(const Scenario& sc);

// ------------------------------ trajectories ---------------------------------

enum class Outcome { Plus, Minus, Null };

struct Trajectory {
    std::uint64_t seed_index{0};
    std::vector<int> labels;                // one per step, truncated on breakdown
    int death_events{0};
    std::optional<int> breakdown_step;
    std::optional<Outcome> outcome;         // set by classify_trajectories
};

// Sample one chain through the trace. The initial label is drawn from the
// t=0 frame's eigenvalues; a label that dies mid-run is resampled from the
// next frame's distribution (counted as a death event).
Trajectory run_trajectory(const EvolutionTrace& trace, std::uint64_t master_seed,
                          std::uint64_t index);

// Embarrassingly parallel ensemble; results are indexed by trajectory and
// independent of the worker count.
std::vector<Trajectory> run_ensemble(const EvolutionTrace& trace, std::uint64_t master_seed,
                                     int n_trajectories, int workers = 0);

// ----------------------------- classification --------------------------------

struct EnsemblePartition {
    std::vector<int> plus_labels;
    std::vector<int> minus_labels;
    std::vector<int> null_labels;
    std::map<int, double> margins;

    bool is_plus(int label) const;
    bool is_minus(int label) const;
};

// Score each frame label against the two branch density matrices,
// s_pm = <psi|rho_pm|psi>, and assign it to the larger side when the relative
// margin reaches margin_min; otherwise the label stays null.
EnsemblePartition classify_ensembles(const SchmidtFrame& frame, const Matrix& rho_plus,
                                     const Matrix& rho_minus, double margin_min = 0.9);

// Stamp outcomes onto trajectories from their final label's partition side.
void classify_trajectories(std::vector<Trajectory>& trajectories,
                           const EnsemblePartition& partition);

// ------------------------------ measurement ----------------------------------

struct MeasurementBranches {
    JointState phi0;        // device+environment ready state at t=0
    JointState phi_plus;    // device+environment branch states at t_measure
    JointState phi_minus;
    // Full joint branch states (qubit included), evolved to t_measure.
    JointState joint_plus;
    JointState joint_minus;
};

// Evolve the two branch initial states separately to t_measure and strip the
// conserved measured-qubit factor.
MeasurementBranches measurement_branches(const Scenario& sc);

struct BranchDensities {
    Matrix rho0;
    Matrix rho_plus;
    Matrix rho_minus;
    double mixture_residual;  // ||rho_A(T) - |c+|^2 rho_+ - |c-|^2 rho_-||_max
};

BranchDensities branch_density_matrices(const Scenario& sc);

// --------------------------------- reports -----------------------------------

struct BornReport {
    int total{0};
    int n_plus{0};
    int n_minus{0};
    int n_null{0};
    int n_breakdown{0};
    double c_plus_sq{0.0};
    double f_plus{0.0};
    double f_minus{0.0};
    double sigma3{0.0};       // 3 sqrt(p(1-p)/n_classified) at p = |c+|^2
    double p_sum_plus{0.0};   // sum of final-frame eigenvalues over E^(+)
    double p_sum_minus{0.0};
    // initial label -> (plus count, classified count)
    std::map<int, std::pair<int, int>> per_initial_label;
};

BornReport born_statistics(const std::vector<Trajectory>& trajectories,
                           const MeasurementSpec& spec, const EnsemblePartition& partition,
                           const SchmidtFrame& final_frame);

struct ErgodicityReport {
    int window_steps{0};
    double window{0.0};            // time actually spanned
    double tv_distance{0.0};       // max column-pair total variation
    std::string verdict;           // "equilibrium" | "frozen" | "mixing"
    double cross_partition_mass{-1.0};  // -1 when no partition given
    double intra_partition_mass{-1.0};
};

// Compose the chain over the trailing portion of tms spanning at least
// `window` in time and compare columns. CompositionError propagates if the
// labels in that portion are not aligned.
ErgodicityReport ergodicity_diagnostic(std::span<const TransitionMatrix> tms, double window,
                                       const EnsemblePartition* partition = nullptr);

// ------------------------- emergent joint probabilities ----------------------

struct FactorPair {
    int m;            // composite label
    int i;            // factor label of A
    int a;            // factor label of B
    double residual;  // || |Phi_m> - |psi_i>|phi_a> || minimized over phase
    double p_m;       // composite eigenvalue
    double p_joint;   // <psi_i phi_a| rho_AB |psi_i phi_a>
};

struct FactorizationMap {
    std::vector<FactorPair> pairs;
    double max_residual{0.0};
};

// Extract frames of A+B (tracing E), A (tracing B+E) and B (tracing A+E),
// then pair each composite state with its best product by optimal assignment.
// Large residuals are data, not errors.
FactorizationMap factorization_check(const JointState& psi, Index dim_a, Index dim_b,
                                     Index dim_e, double eps_null);

// ------------------------------- collapse ------------------------------------

// Discard the ergodically inaccessible branch: returns the normalized mixture
// of the outcome side's ontic states. Bookkeeping, not dynamics.
Matrix collapse(const Matrix& rho_t, const SchmidtFrame& frame,
                const EnsemblePartition& partition, Outcome outcome);

}  // namespace modal
