#include "modal/schmidt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "modal/assignment.hpp"

namespace modal {

int SchmidtFrame::index_of(int label) const {
    auto it = std::lower_bound(labels.begin(), labels.end(), label);
    if (it == labels.end() || *it != label) return -1;
    return static_cast<int>(it - labels.begin());
}

Vector SchmidtFrame::reconstruct() const {
    Vector out = Vector::Zero(dim_a * dim_e);
    for (Index i = 0; i < size(); ++i) {
        out += std::sqrt(p[i]) * joint(i);
    }
    return out;
}

SchmidtFrame extract_frame(const JointState& psi, double eps_null, double time) {
    validate_joint(psi, "extract_frame");
    if (eps_null < 0.0 || eps_null >= 1.0) {
        throw ValidationError("extract_frame: eps_null must lie in [0, 1)");
    }

    const Matrix rho = partial_trace_env(psi);
    const Eigensystem es = eigh(rho, 1e-10);

    SchmidtFrame frame;
    frame.time = time;
    frame.dim_a = psi.dim_a;
    frame.dim_e = psi.dim_e;

    // Walk eigenvalues in descending order, keep everything above the cutoff.
    auto m = psi.as_matrix();
    double retained = 0.0;
    for (Index k = es.values.size() - 1; k >= 0; --k) {
        const double p = es.values[k];
        if (p <= eps_null) break;
        const Vector v = es.vectors.col(k);
        Vector mirror = m.transpose() * v.conjugate() / std::sqrt(p);
        mirror.normalize();
        frame.labels.push_back(static_cast<int>(frame.labels.size()));
        frame.psi.push_back(v);
        frame.mirror.push_back(mirror);
        retained += p;
    }
    if (frame.labels.empty()) {
        throw DegenerateStateError("extract_frame: all eigenvalue mass below eps_null");
    }
    frame.p.resize(static_cast<Index>(frame.labels.size()));
    {
        Index i = 0;
        for (Index k = es.values.size() - 1; k >= 0 && i < frame.p.size(); --k, ++i) {
            frame.p[i] = es.values[k];
        }
    }
    frame.null_weight = std::max(0.0, 1.0 - retained);
    frame.next_label = static_cast<int>(frame.labels.size());
    return frame;
}

std::pair<SchmidtFrame, FrameMatch> match_frames(const SchmidtFrame& prev,
                                                 const SchmidtFrame& cur_raw) {
    if (prev.dim_a != cur_raw.dim_a || prev.dim_e != cur_raw.dim_e) {
        throw ValidationError("match_frames: frame dimensions do not match");
    }
    const Index np = prev.size();
    const Index nc = cur_raw.size();

    Eigen::MatrixXd benefit(np, nc);
    for (Index i = 0; i < np; ++i) {
        for (Index k = 0; k < nc; ++k) {
            benefit(i, k) = std::norm(cur_raw.psi[k].dot(prev.psi[i]));
        }
    }
    const std::vector<int> prev_to_raw = max_benefit_assignment(benefit);

    FrameMatch match;
    match.raw_to_label.assign(nc, -1);
    for (Index i = 0; i < np; ++i) {
        const int k = prev_to_raw[i];
        if (k >= 0) {
            match.raw_to_label[k] = prev.labels[i];
        } else {
            match.deaths.push_back(prev.labels[i]);
        }
    }
    int next_label = prev.next_label;
    for (Index k = 0; k < nc; ++k) {
        if (match.raw_to_label[k] < 0) {
            match.raw_to_label[k] = next_label++;
            match.births.push_back(match.raw_to_label[k]);
        }
    }

    // Assemble the relabeled frame in ascending label order.
    std::vector<Index> order(nc);
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        return match.raw_to_label[a] < match.raw_to_label[b];
    });

    SchmidtFrame out;
    out.time = cur_raw.time;
    out.dim_a = cur_raw.dim_a;
    out.dim_e = cur_raw.dim_e;
    out.null_weight = cur_raw.null_weight;
    out.next_label = next_label;
    out.p.resize(nc);
    for (Index pos = 0; pos < nc; ++pos) {
        const Index k = order[pos];
        const int label = match.raw_to_label[k];
        out.labels.push_back(label);
        out.p[pos] = cur_raw.p[k];
        Vector v = cur_raw.psi[k];
        Vector mir = cur_raw.mirror[k];
        const int iprev = prev.index_of(label);
        if (iprev >= 0) {
            // <psi_prev|psi_cur> = r e^{i theta}; rotate the pair so the
            // overlap is real and nonnegative.
            const Complex ov = prev.psi[iprev].dot(v);
            const double r = std::abs(ov);
            match.overlaps[label] = r;
            if (r > 0.0) {
                const Complex phase = std::conj(ov) / r;
                v *= phase;
                mir *= std::conj(phase);
            }
        }
        out.psi.push_back(std::move(v));
        out.mirror.push_back(std::move(mir));
    }

    for (Index i = 0; i < nc && !match.degeneracy_flag; ++i) {
        for (Index j = i + 1; j < nc; ++j) {
            if (std::abs(out.p[i] - out.p[j]) < kDegeneracyTol) {
                match.degeneracy_flag = true;
                break;
            }
        }
    }
    return {std::move(out), std::move(match)};
}

}  // namespace modal
