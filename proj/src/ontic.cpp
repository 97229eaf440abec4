#include "modal/ontic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace modal {

int TransitionMatrix::index_of(int label) const {
    auto it = std::lower_bound(labels.begin(), labels.end(), label);
    if (it == labels.end() || *it != label) return -1;
    return static_cast<int>(it - labels.begin());
}

TransitionMatrix transition_matrix(const SchmidtFrame& frame, const Matrix& h_int, double eta) {
    const Index k = frame.size();
    if (k == 0) throw ValidationError("transition_matrix: frame has no labels");
    if (eta <= 0.0) throw ValidationError("transition_matrix: eta must be positive");
    const Index d = frame.dim_a * frame.dim_e;
    if (h_int.rows() != d || h_int.cols() != d) {
        throw ValidationError("transition_matrix: h_int dimension mismatch");
    }
    for (Index i = 0; i < k; ++i) {
        if (!(frame.p[i] > 0.0)) {
            throw ValidationError("transition_matrix: nonpositive eigenvalue in frame");
        }
    }

    Matrix joint(d, k);
    for (Index i = 0; i < k; ++i) joint.col(i) = frame.joint(i);
    const Matrix mel = joint.adjoint() * h_int * joint;

    // Antisymmetrize the imaginary part; Hermitian H_int makes Im M exactly
    // antisymmetric up to rounding, and (x-y)/2 = -((y-x)/2) holds bitwise,
    // so for i != j exactly one of the two directions survives max[., 0].
    RealMatrix im(k, k);
    for (Index i = 0; i < k; ++i) {
        for (Index j = 0; j < k; ++j) im(i, j) = 0.5 * (mel(i, j).imag() - mel(j, i).imag());
    }

    TransitionMatrix tm;
    tm.labels = frame.labels;
    tm.t = frame.time;
    tm.eta = eta;
    tm.p_cond = RealMatrix::Zero(k, k);
    for (Index j = 0; j < k; ++j) {
        double off = 0.0;
        for (Index i = 0; i < k; ++i) {
            if (i == j) continue;
            const double a = im(i, j);
            if (a > 0.0) {
                tm.p_cond(i, j) = 2.0 * eta * std::sqrt(frame.p[i] / frame.p[j]) * a;
                off += tm.p_cond(i, j);
            }
        }
        const double diag = 1.0 - off;
        if (diag < 0.0) {
            throw BreakdownError("transition_matrix: column " + std::to_string(frame.labels[j]) +
                                     " off-diagonal mass " + std::to_string(off) +
                                     " exceeds 1; effective description broke down",
                                 frame.labels[j]);
        }
        tm.p_cond(j, j) = diag;
    }
    return tm;
}

double decoherence_scale(const TransitionMatrix& tm) {
    const Index k = tm.p_cond.cols();
    double worst = 0.0;
    for (Index j = 0; j < k; ++j) {
        const double off = tm.p_cond.col(j).sum() - tm.p_cond(j, j);
        worst = std::max(worst, off);
    }
    if (worst <= 0.0) return std::numeric_limits<double>::infinity();
    return tm.eta / worst;
}

int sample_transition(const TransitionMatrix& tm, int from_label, Rng& rng) {
    const int j = tm.index_of(from_label);
    if (j < 0) {
        throw ValidationError("sample_transition: label " + std::to_string(from_label) +
                              " not present in transition matrix");
    }
    const double u = rng.uniform01();
    double cum = 0.0;
    const Index k = tm.p_cond.rows();
    for (Index i = 0; i < k; ++i) {
        cum += tm.p_cond(i, j);
        if (u < cum) return tm.labels[static_cast<std::size_t>(i)];
    }
    return tm.labels.back();  // cum may fall short of 1 by rounding
}

ChainState chain_step(ChainState state, const TransitionMatrix& tm) {
    state.label = sample_transition(tm, state.label, state.rng);
    return state;
}

TransitionMatrix compose_chain(const std::vector<TransitionMatrix>& tms) {
    if (tms.empty()) throw ValidationError("compose_chain: empty list");
    const auto& first = tms.front();
    double t_end = first.t;
    for (const auto& tm : tms) {
        if (tm.labels != first.labels) {
            throw CompositionError("compose_chain: label sets differ across steps");
        }
        if (std::abs(tm.t - t_end) > 1e-9) {
            throw CompositionError("compose_chain: steps do not abut in time");
        }
        t_end = tm.t + tm.eta;
    }
    TransitionMatrix out;
    out.labels = first.labels;
    out.t = first.t;
    out.eta = t_end - first.t;
    out.p_cond = RealMatrix::Identity(first.p_cond.rows(), first.p_cond.cols());
    for (const auto& tm : tms) {
        out.p_cond = tm.p_cond * out.p_cond;
    }
    return out;
}

double verify_flow(const SchmidtFrame& frame_t, const SchmidtFrame& frame_next,
                   const TransitionMatrix& tm) {
    if (frame_t.labels != frame_next.labels || frame_t.labels != tm.labels) {
        throw ValidationError("verify_flow: label sets do not match");
    }
    const RealVector predicted = tm.p_cond * frame_t.p;
    return (frame_next.p - predicted).cwiseAbs().maxCoeff();
}

}  // namespace modal
