// helpers.hpp — deterministic random objects shared across test files.
#pragma once

#include "modal/hilbert.hpp"
#include "modal/rng.hpp"

namespace testutil {

inline modal::Vector random_state(modal::Rng& rng, modal::Index dim) {
    modal::Vector v(dim);
    for (modal::Index i = 0; i < dim; ++i) {
        v[i] = modal::Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    }
    v.normalize();
    return v;
}

inline modal::JointState random_joint(modal::Rng& rng, modal::Index da, modal::Index de) {
    return modal::JointState{da, de, random_state(rng, da * de)};
}

inline modal::Matrix random_hermitian(modal::Rng& rng, modal::Index dim, double scale = 1.0) {
    modal::Matrix m(dim, dim);
    for (modal::Index i = 0; i < dim; ++i) {
        for (modal::Index j = 0; j < dim; ++j) {
            m(i, j) = modal::Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        }
    }
    return scale * 0.5 * (m + modal::Matrix(m.adjoint()));
}

}  // namespace testutil
