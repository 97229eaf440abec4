// schmidt.hpp — labeled Schmidt frames: the instantaneous eigensystem of the
// reduced density matrix together with environment mirrors, and the matching
// that keeps labels smooth across adjacent time steps.
#pragma once

#include <map>
#include <utility>
#include <vector>

#include "modal/hilbert.hpp"

namespace modal {

inline constexpr double kDefaultEpsNull = 1e-8;
inline constexpr double kDegeneracyTol = 1e-9;

// One time slice of the Schmidt decomposition |Psi> = sum_i sqrt(p_i) |psi_i>|mirror_i>.
// Entries are stored in ascending label order; on a fresh extraction labels
// run 0..k-1 in descending-p order so the two orders coincide.
struct SchmidtFrame {
    double time{0.0};
    Index dim_a{0};
    Index dim_e{0};
    std::vector<int> labels;
    RealVector p;                 // aligned with labels
    std::vector<Vector> psi;      // subsystem eigenvectors, dim_a
    std::vector<Vector> mirror;   // environment mirrors, dim_e
    double null_weight{0.0};      // eigenvalue mass below the cutoff
    int next_label{0};            // next fresh label for births

    Index size() const { return static_cast<Index>(labels.size()); }
    int index_of(int label) const;            // -1 when absent
    Vector joint(Index i) const { return kron(psi[i], mirror[i]); }
    Vector reconstruct() const;                // sum_i sqrt(p_i) psi_i (x) mirror_i
};

// Outcome of matching a raw frame against the previous step's labeled frame.
struct FrameMatch {
    std::vector<int> raw_to_label;    // stable label per raw (descending-p) index
    std::map<int, double> overlaps;   // surviving label -> |<psi_cur|psi_prev>|
    std::vector<int> births;          // labels newly above the cutoff
    std::vector<int> deaths;          // labels dropped below the cutoff
    bool degeneracy_flag{false};      // some |p_i - p_j| < kDegeneracyTol in the new frame
};

// Diagonalize the reduced density matrix of psi and assemble the frame.
// Labels are assigned 0..k-1 in descending-p order; eigenvalues <= eps_null
// are dropped into null_weight. Throws DegenerateStateError if nothing
// survives the cutoff.
SchmidtFrame extract_frame(const JointState& psi, double eps_null, double time);

// Relabel cur_raw so its states continue prev's labels. The permutation
// maximizes sum |<psi_cur|psi_prev>|^2 over assignments; surviving states are
// rephased so <psi_prev|psi_cur> is real and >= 0 (mirrors get the opposite
// phase, leaving psi (x) mirror unchanged). Unmatched raw states become
// births with fresh labels; unmatched previous labels are deaths.
std::pair<SchmidtFrame, FrameMatch> match_frames(const SchmidtFrame& prev,
                                                 const SchmidtFrame& cur_raw);

}  // namespace modal
