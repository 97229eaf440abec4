// ontic.hpp — the stochastic process over ontic states: one-step transition
// matrices, decoherence-scale readout, chain sampling, multi-step composition
// and the flow-consistency check p_i(t+eta) = sum_j p_{i|j} p_j(t).
#pragma once

#include <vector>

#include "modal/rng.hpp"
#include "modal/schmidt.hpp"

namespace modal {

// Column-stochastic one-step matrix: p_cond(i, j) = p_{i|j}, the probability
// of label i at t+eta given label j at t. Rows/columns follow the frame's
// ascending label order.
struct TransitionMatrix {
    std::vector<int> labels;
    double t{0.0};
    double eta{0.0};
    RealMatrix p_cond;

    int index_of(int label) const;
};

// Build the one-step matrix from a frame and the A-E interaction Hamiltonian:
//   p_{i|j} = 2 eta sqrt(p_i/p_j) max[Im <psi_i, mirror_i| H_int |psi_j, mirror_j>, 0]
// for i != j (hbar = 1), diagonal fixed by column normalization. The imaginary
// part is antisymmetrized explicitly so one-sidedness holds exactly in floating
// point. Throws BreakdownError when a diagonal would go negative.
TransitionMatrix transition_matrix(const SchmidtFrame& frame, const Matrix& h_int, double eta);

// tau = eta / max_j sum_{i != j} p_{i|j}; +infinity when no off-diagonal mass.
double decoherence_scale(const TransitionMatrix& tm);

// Current ontic label plus the trajectory's private generator state.
struct ChainState {
    int label{0};
    Rng rng;
};

// Inverse-CDF draw from the column of from_label, in ascending label order.
int sample_transition(const TransitionMatrix& tm, int from_label, Rng& rng);

// Sample the next label from the column of the current one by inverse CDF in
// ascending label order.
ChainState chain_step(ChainState state, const TransitionMatrix& tm);

// Chain-order product of consecutive one-step matrices (Markov composition).
// Matrices must share labels and abut in time within 1e-9.
TransitionMatrix compose_chain(const std::vector<TransitionMatrix>& tms);

// max_i |p_i(t+eta) - sum_j p_{i|j} p_j(t)| over the shared labels. Frames
// must carry identical label sets and tm must be built from frame_t.
double verify_flow(const SchmidtFrame& frame_t, const SchmidtFrame& frame_next,
                   const TransitionMatrix& tm);

}  // namespace modal
