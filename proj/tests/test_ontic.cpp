#include <doctest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "modal/ontic.hpp"

using namespace modal;

namespace {

// Two-label frame on basis states with weights p0, p1 (dA = dE = 2).
SchmidtFrame basis_frame(double p0, double p1) {
    SchmidtFrame f;
    f.time = 0.0;
    f.dim_a = 2;
    f.dim_e = 2;
    f.labels = {0, 1};
    f.p.resize(2);
    f.p << p0, p1;
    f.psi = {basis_state(2, 0), basis_state(2, 1)};
    f.mirror = {basis_state(2, 0), basis_state(2, 1)};
    f.null_weight = std::max(0.0, 1.0 - p0 - p1);
    f.next_label = 2;
    return f;
}

SchmidtFrame frame_of(const JointState& psi, double eps = 1e-10) {
    return extract_frame(psi, eps, 0.0);
}

}  // namespace

TEST_SUITE_BEGIN("ontic");

TEST_CASE("zero interaction gives the identity matrix") {
    const SchmidtFrame f = basis_frame(0.5, 0.5);
    const TransitionMatrix tm = transition_matrix(f, Matrix::Zero(4, 4), 0.01);
    CHECK(max_abs(Matrix(tm.p_cond.cast<Complex>()) - Matrix::Identity(2, 2)) == 0.0);
}

TEST_CASE("real matrix elements give the identity matrix") {
    Rng rng(2);
    const SchmidtFrame f = basis_frame(0.5, 0.5);
    Matrix h = testutil::random_hermitian(rng, 4);
    h = (h + Matrix(h.transpose())) * 0.5;  // real symmetric: Im elements vanish
    const TransitionMatrix tm = transition_matrix(f, h, 0.01);
    CHECK(max_abs(Matrix(tm.p_cond.cast<Complex>()) - Matrix::Identity(2, 2)) < 1e-15);
}

TEST_CASE("hand-evaluated two-label transition") {
    const SchmidtFrame f = basis_frame(0.5, 0.5);
    // <psi_0 mirror_0| H |psi_1 mirror_1> = i*0.1 between joint indices 0 and 3.
    Matrix h = Matrix::Zero(4, 4);
    h(0, 3) = Complex(0.0, 0.1);
    h(3, 0) = Complex(0.0, -0.1);
    const TransitionMatrix tm = transition_matrix(f, h, 0.01);
    CHECK(tm.p_cond(0, 1) == doctest::Approx(0.002).epsilon(1e-12));
    CHECK(tm.p_cond(1, 0) == 0.0);
    CHECK(tm.p_cond(0, 0) == doctest::Approx(1.0));
    CHECK(tm.p_cond(1, 1) == doctest::Approx(0.998).epsilon(1e-12));

    SUBCASE("decoherence scale of the same matrix") {
        CHECK(decoherence_scale(tm) == doctest::Approx(5.0).epsilon(1e-12));
    }
}

TEST_CASE("decoherence scale of the identity is infinite") {
    const SchmidtFrame f = basis_frame(0.5, 0.5);
    const TransitionMatrix tm = transition_matrix(f, Matrix::Zero(4, 4), 0.01);
    CHECK(std::isinf(decoherence_scale(tm)));
}

TEST_CASE("decoherence scale is bounded below by eta") {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const SchmidtFrame f = frame_of(testutil::random_joint(rng, 3, 9));
        const Matrix h = testutil::random_hermitian(rng, 27, 0.5);
        try {
            const TransitionMatrix tm = transition_matrix(f, h, 0.02);
            CHECK(decoherence_scale(tm) >= tm.eta);
        } catch (const BreakdownError&) {
            // valid outcome for aggressive couplings; not part of this bound
        }
    }
}

TEST_CASE("negative diagonal raises BreakdownError") {
    const SchmidtFrame f = basis_frame(1.0 - 1e-6, 1e-6);
    Matrix h = Matrix::Zero(4, 4);
    h(0, 3) = Complex(0.0, 0.1);
    h(3, 0) = Complex(0.0, -0.1);
    // p_{0|1} = 2*1.0*sqrt((1-1e-6)/1e-6)*0.1 ~ 200 >> 1
    CHECK_THROWS_AS(transition_matrix(f, h, 1.0), BreakdownError);
}

TEST_CASE("stochasticity and exact one-sidedness on random frames") {
    Rng rng(6);
    int built = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const SchmidtFrame f = frame_of(testutil::random_joint(rng, 4, 12));
        const Matrix h = testutil::random_hermitian(rng, 48, 0.3);
        TransitionMatrix tm;
        try {
            tm = transition_matrix(f, h, 0.01);
        } catch (const BreakdownError&) {
            continue;
        }
        ++built;
        const Index k = tm.p_cond.rows();
        for (Index j = 0; j < k; ++j) {
            CHECK(std::abs(tm.p_cond.col(j).sum() - 1.0) < 1e-12);
            for (Index i = 0; i < k; ++i) {
                CHECK(tm.p_cond(i, j) >= 0.0);
                CHECK(tm.p_cond(i, j) <= 1.0 + 1e-12);
                if (i != j) CHECK(std::min(tm.p_cond(i, j), tm.p_cond(j, i)) == 0.0);
            }
        }
    }
    CHECK(built > 30);
}

TEST_CASE("gauge rotations leave the transition matrix unchanged") {
    Rng rng(8);
    const SchmidtFrame f = frame_of(testutil::random_joint(rng, 4, 8));
    const Matrix h = testutil::random_hermitian(rng, 32, 0.2);
    const TransitionMatrix base = transition_matrix(f, h, 0.01);
    for (int trial = 0; trial < 5; ++trial) {
        SchmidtFrame rotated = f;
        for (Index i = 0; i < rotated.size(); ++i) {
            const Complex phase = std::polar(1.0, rng.uniform(0.0, 6.28));
            rotated.psi[i] *= phase;
            rotated.mirror[i] *= std::conj(phase);
        }
        const TransitionMatrix tm = transition_matrix(rotated, h, 0.01);
        CHECK((tm.p_cond - base.p_cond).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("chain_step is frozen under the identity matrix") {
    const SchmidtFrame f = basis_frame(0.5, 0.5);
    const TransitionMatrix tm = transition_matrix(f, Matrix::Zero(4, 4), 0.01);
    ChainState state{1, Rng(99)};
    for (int k = 0; k < 50; ++k) {
        state = chain_step(state, tm);
        CHECK(state.label == 1);
    }
}

TEST_CASE("a deterministic column always fires") {
    TransitionMatrix tm;
    tm.labels = {0, 1};
    tm.eta = 0.1;
    tm.p_cond.resize(2, 2);
    tm.p_cond << 0.0, 0.3, 1.0, 0.7;
    ChainState state{0, Rng(7)};
    for (int k = 0; k < 20; ++k) {
        ChainState next = chain_step(ChainState{0, state.rng}, tm);
        state.rng = next.rng;
        CHECK(next.label == 1);
    }
    CHECK_THROWS_AS(chain_step(ChainState{5, Rng(1)}, tm), ValidationError);
}

TEST_CASE("chain sampling matches the binomial oracle at 3 sigma") {
    TransitionMatrix tm;
    tm.labels = {0, 1};
    tm.eta = 0.1;
    tm.p_cond.resize(2, 2);
    tm.p_cond << 0.3, 0.3, 0.7, 0.7;
    Rng rng(123);
    int hits = 0;
    const int n = 100000;
    for (int k = 0; k < n; ++k) {
        if (sample_transition(tm, 0, rng) == 0) ++hits;
    }
    const double freq = static_cast<double>(hits) / n;
    CHECK(std::abs(freq - 0.3) < 0.0046);  // 3 sigma = 3 sqrt(0.3*0.7/1e5)
}

TEST_CASE("composition of a single matrix is itself") {
    const SchmidtFrame f = basis_frame(0.6, 0.4);
    Matrix h = Matrix::Zero(4, 4);
    h(0, 3) = Complex(0.0, 0.05);
    h(3, 0) = Complex(0.0, -0.05);
    const TransitionMatrix tm = transition_matrix(f, h, 0.01);
    const TransitionMatrix composed = compose_chain({tm});
    CHECK((composed.p_cond - tm.p_cond).cwiseAbs().maxCoeff() == 0.0);
    CHECK(composed.eta == doctest::Approx(tm.eta));
}

TEST_CASE("composition of identities is the identity") {
    std::vector<TransitionMatrix> tms;
    for (int k = 0; k < 4; ++k) {
        TransitionMatrix tm;
        tm.labels = {0, 1, 2};
        tm.t = 0.1 * k;
        tm.eta = 0.1;
        tm.p_cond = RealMatrix::Identity(3, 3);
        tms.push_back(tm);
    }
    const TransitionMatrix composed = compose_chain(tms);
    CHECK((composed.p_cond - RealMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(composed.eta == doctest::Approx(0.4));
}

TEST_CASE("two-step composition equals explicit path enumeration") {
    Rng rng(10);
    auto random_stochastic = [&](double t) {
        TransitionMatrix tm;
        tm.labels = {0, 1, 2};
        tm.t = t;
        tm.eta = 0.1;
        tm.p_cond.resize(3, 3);
        for (Index j = 0; j < 3; ++j) {
            double total = 0.0;
            for (Index i = 0; i < 3; ++i) {
                tm.p_cond(i, j) = rng.uniform01();
                total += tm.p_cond(i, j);
            }
            tm.p_cond.col(j) /= total;
        }
        return tm;
    };
    const TransitionMatrix a = random_stochastic(0.0);
    const TransitionMatrix b = random_stochastic(0.1);
    const TransitionMatrix composed = compose_chain({a, b});
    for (Index i = 0; i < 3; ++i) {
        for (Index k = 0; k < 3; ++k) {
            double brute = 0.0;
            for (Index j = 0; j < 3; ++j) brute += b.p_cond(i, j) * a.p_cond(j, k);
            CHECK(composed.p_cond(i, k) == doctest::Approx(brute).epsilon(1e-14));
        }
        CHECK(std::abs(composed.p_cond.col(i).sum() - 1.0) < 1e-12);
    }
}

TEST_CASE("composition rejects label or time misalignment") {
    TransitionMatrix a, b;
    a.labels = {0, 1};
    a.t = 0.0;
    a.eta = 0.1;
    a.p_cond = RealMatrix::Identity(2, 2);
    b = a;
    b.labels = {0, 2};
    b.t = 0.1;
    CHECK_THROWS_AS(compose_chain({a, b}), CompositionError);
    b.labels = {0, 1};
    b.t = 0.25;
    CHECK_THROWS_AS(compose_chain({a, b}), CompositionError);
}

TEST_CASE("verify_flow vanishes for a static step") {
    const SchmidtFrame f = basis_frame(0.7, 0.3);
    const TransitionMatrix tm = transition_matrix(f, Matrix::Zero(4, 4), 0.01);
    CHECK(verify_flow(f, f, tm) <= 1e-12);

    SchmidtFrame other = f;
    other.labels = {0, 2};
    CHECK_THROWS_AS(verify_flow(f, other, tm), ValidationError);
}

TEST_SUITE_END();
