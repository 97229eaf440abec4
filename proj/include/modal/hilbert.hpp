// hilbert.hpp — dense complex linear algebra for small bipartite Hilbert spaces:
// tensor products, partial traces, Hermitian eigendecomposition, exact unitary
// stepping via a precomputed spectral decomposition.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>

#include "modal/errors.hpp"

namespace modal {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Dense diagonalization stays cheap up to here; configurable per call site.
inline constexpr Index kMaxTotalDim = 4096;

inline constexpr double kNormTol = 1e-10;
inline constexpr double kHermTol = 1e-12;

// ------------------------------ joint states --------------------------------

// Pure state on H_A (x) H_E, amplitudes row-major in (a, e): amps[a*dim_e + e].
// This index convention is load-bearing: partial traces, mirror extraction and
// the scenario builders all assume it.
struct JointState {
    Index dim_a{0};
    Index dim_e{0};
    Vector amps;

    Complex& at(Index a, Index e) { return amps[a * dim_e + e]; }
    Complex at(Index a, Index e) const { return amps[a * dim_e + e]; }

    double squared_norm() const { return amps.squaredNorm(); }

    // View as a dim_a x dim_e matrix M with M(a, e) = amps[(a, e)].
    auto as_matrix() const {
        using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        return Eigen::Map<const RowMajor>(amps.data(), dim_a, dim_e);
    }
};

void validate_joint(const JointState& psi, const char* where);

// ------------------------------ small helpers -------------------------------

Vector basis_state(Index dim, Index i);
Vector kron(const Vector& a, const Vector& b);
Matrix kron(const Matrix& a, const Matrix& b);
double max_abs(const Matrix& m);
bool is_hermitian(const Matrix& m, double tol = kHermTol);

// ------------------------------ operations ----------------------------------

// |a> (x) |b> with the (a, e) row-major convention.
JointState tensor_product(const Vector& a, const Vector& b, Index max_dim = kMaxTotalDim);

// rho_A[a][a'] = sum_e Psi(a,e) conj(Psi(a',e)).
Matrix partial_trace_env(const JointState& psi);

// rho_B for a three-factor state grouped as (front (x) mid) (x) env, tracing
// out front and env. psi.dim_a must equal dim_front*dim_mid.
Matrix partial_trace_middle(const JointState& psi, Index dim_front, Index dim_mid);

// Regroup ((front (x) mid), env) -> (mid, (front (x) env)). Pure index shuffle.
JointState promote_middle_factor(const JointState& psi, Index dim_front, Index dim_mid);

struct Eigensystem {
    RealVector values;  // ascending
    Matrix vectors;     // orthonormal columns, aligned with values
};

// Hermitian eigendecomposition. Throws ValidationError if the input is not
// square or deviates from Hermiticity by more than herm_tol.
Eigensystem eigh(const Matrix& h, double herm_tol = kHermTol);

// Exact one-step propagator exp(-i H eta) built once from the spectral
// decomposition of H and reused for every step (hbar = 1 throughout).
class SpectralPropagator {
public:
    explicit SpectralPropagator(const Matrix& h_total);

    Vector apply(const Vector& psi, double t) const;
    JointState step(const JointState& psi, double eta) const;

    const RealVector& energies() const { return eig_.values; }

private:
    Eigensystem eig_;
};

// Convenience wrapper: one exact step without caching the decomposition.
JointState evolve_step(const JointState& psi, const Matrix& h_total, double eta);

}  // namespace modal
