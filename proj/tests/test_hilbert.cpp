#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "modal/hilbert.hpp"

using namespace modal;

TEST_SUITE_BEGIN("hilbert");

TEST_CASE("tensor product basis and linearity cases") {
    const Vector e0 = basis_state(2, 0);
    const Vector e1 = basis_state(2, 1);

    const JointState basis = tensor_product(e0, e0);
    CHECK(basis.amps.size() == 4);
    CHECK(std::abs(basis.amps[0] - 1.0) < 1e-15);
    CHECK(std::abs(basis.amps[1]) + std::abs(basis.amps[2]) + std::abs(basis.amps[3]) < 1e-15);

    const Vector plus = (e0 + e1) / std::sqrt(2.0);
    const JointState lin = tensor_product(plus, e0);
    CHECK(std::abs(lin.at(0, 0) - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(lin.at(1, 0) - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(lin.at(0, 1)) < 1e-15);
}

TEST_CASE("tensor product preserves norm for random factors") {
    Rng rng(42);
    for (int trial = 0; trial < 10; ++trial) {
        const Vector a = testutil::random_state(rng, 5);
        const Vector b = testutil::random_state(rng, 7);
        const JointState joint = tensor_product(a, b);
        CHECK(std::abs(joint.squared_norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("tensor product rejects oversized and unnormalized input") {
    const Vector v = basis_state(100, 0);
    CHECK_THROWS_AS(tensor_product(v, v, 4096), SizeError);
    const Vector w = basis_state(4, 0);
    CHECK_THROWS_AS(tensor_product(2.0 * w, w), ValidationError);
}

TEST_CASE("partial trace of a product state is a rank-1 projector") {
    Rng rng(7);
    const Vector a = testutil::random_state(rng, 3);
    const Vector b = testutil::random_state(rng, 8);
    const Matrix rho = partial_trace_env(tensor_product(a, b));
    CHECK(max_abs(rho - a * a.adjoint()) < 1e-12);
}

TEST_CASE("partial trace of a Bell state is maximally mixed") {
    JointState bell{2, 2, Vector::Zero(4)};
    bell.amps[0] = 1.0 / std::sqrt(2.0);
    bell.amps[3] = 1.0 / std::sqrt(2.0);
    const Matrix rho = partial_trace_env(bell);
    CHECK(max_abs(rho - 0.5 * Matrix::Identity(2, 2)) < 1e-14);
}

TEST_CASE("partial trace has unit trace and is Hermitian PSD on random states") {
    Rng rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const JointState psi = testutil::random_joint(rng, 4, 12);
        const Matrix rho = partial_trace_env(psi);
        CHECK(std::abs(rho.trace().real() - 1.0) < 1e-12);
        CHECK(is_hermitian(rho));
        const Eigensystem es = eigh(rho);
        CHECK(es.values.minCoeff() > -1e-10);
    }
}

TEST_CASE("partial trace is linear at the density-matrix level") {
    Rng rng(13);
    for (int trial = 0; trial < 3; ++trial) {
        const JointState psi1 = testutil::random_joint(rng, 3, 6);
        const JointState psi2 = testutil::random_joint(rng, 3, 6);
        const Complex alpha(0.6, 0.1), beta(0.3, -0.5);
        Vector combo = alpha * psi1.amps + beta * psi2.amps;
        combo.normalize();
        const Matrix lhs = partial_trace_env(JointState{3, 6, combo});

        // Tr_E |phi><chi| for pure joint states via the reshaped matrices.
        auto cross = [](const JointState& x, const JointState& y) -> Matrix {
            return x.as_matrix() * y.as_matrix().adjoint();
        };
        const Complex a = alpha / std::sqrt((alpha * psi1.amps + beta * psi2.amps).squaredNorm());
        const Complex b = beta / std::sqrt((alpha * psi1.amps + beta * psi2.amps).squaredNorm());
        const Matrix rhs = std::norm(a) * cross(psi1, psi1) + std::norm(b) * cross(psi2, psi2) +
                           a * std::conj(b) * cross(psi1, psi2) +
                           b * std::conj(a) * cross(psi2, psi1);
        CHECK(max_abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("partial_trace_middle and promote_middle_factor agree") {
    Rng rng(17);
    const Index da = 2, db = 3, de = 4;
    const JointState psi = testutil::random_joint(rng, da * db, de);
    const Matrix direct = partial_trace_middle(psi, da, db);
    const Matrix via_promote = partial_trace_env(promote_middle_factor(psi, da, db));
    CHECK(max_abs(direct - via_promote) < 1e-13);
}

TEST_CASE("eigh on identity and pauli-z") {
    const Eigensystem id = eigh(Matrix::Identity(3, 3));
    for (Index i = 0; i < 3; ++i) CHECK(std::abs(id.values[i] - 1.0) < 1e-14);

    Matrix sz(2, 2);
    sz << 1.0, 0.0, 0.0, -1.0;
    const Eigensystem es = eigh(sz);
    CHECK(std::abs(es.values[0] + 1.0) < 1e-14);
    CHECK(std::abs(es.values[1] - 1.0) < 1e-14);
}

TEST_CASE("eigh rejects non-Hermitian input") {
    Matrix bad(2, 2);
    bad << 0.0, 1.0, 0.0, 0.0;
    CHECK_THROWS_AS(eigh(bad), ValidationError);
}

TEST_CASE("eigh reconstruction and orthonormality across dimensions") {
    Rng rng(23);
    for (Index dim : {2, 3, 8, 16, 64}) {
        const Matrix h = testutil::random_hermitian(rng, dim);
        const Eigensystem es = eigh(h);
        const Matrix rebuilt =
            es.vectors * es.values.asDiagonal().toDenseMatrix().cast<Complex>() *
            es.vectors.adjoint();
        CHECK(max_abs(rebuilt - h) < 1e-10);
        CHECK(max_abs(es.vectors.adjoint() * es.vectors - Matrix::Identity(dim, dim)) < 1e-10);
        for (Index i = 0; i + 1 < dim; ++i) CHECK(es.values[i] <= es.values[i + 1]);
    }
}

TEST_CASE("evolve_step with zero Hamiltonian is the identity") {
    Rng rng(29);
    const JointState psi = testutil::random_joint(rng, 2, 4);
    const JointState out = evolve_step(psi, Matrix::Zero(8, 8), 0.3);
    CHECK((out.amps - psi.amps).norm() < 1e-13);
}

TEST_CASE("evolve_step phases an eigenvector by its energy") {
    Rng rng(31);
    const Matrix h = testutil::random_hermitian(rng, 6);
    const Eigensystem es = eigh(h);
    const double eta = 0.17;
    JointState psi{2, 3, es.vectors.col(2)};
    const JointState out = evolve_step(psi, h, eta);
    const Vector expected = std::polar(1.0, -es.values[2] * eta) * psi.amps;
    CHECK((out.amps - expected).norm() < 1e-12);
}

TEST_CASE("evolve_step conserves energy and rejects mismatched dims") {
    Rng rng(37);
    const Matrix h = testutil::random_hermitian(rng, 12);
    const JointState psi = testutil::random_joint(rng, 3, 4);
    const JointState out = evolve_step(psi, h, 0.25);
    const Complex before = psi.amps.dot(h * psi.amps);
    const Complex after = out.amps.dot(h * out.amps);
    CHECK(std::abs(before - after) < 1e-10);
    CHECK_THROWS_AS(evolve_step(psi, Matrix::Zero(9, 9), 0.1), ValidationError);
}

TEST_CASE("norm drift stays below n_steps * 1e-14 over long runs") {
    Rng rng(41);
    const Matrix h = testutil::random_hermitian(rng, 16);
    const SpectralPropagator prop(h);
    JointState psi = testutil::random_joint(rng, 4, 4);
    const int n_steps = 20000;
    for (int k = 0; k < n_steps; ++k) psi = prop.step(psi, 0.05);
    CHECK(std::abs(psi.squared_norm() - 1.0) < n_steps * 1e-14);
}

TEST_SUITE_END();
