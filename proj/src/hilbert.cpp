#include "modal/hilbert.hpp"

#include <cmath>
#include <string>

namespace modal {

void validate_joint(const JointState& psi, const char* where) {
    if (psi.dim_a <= 0 || psi.dim_e <= 0) {
        throw ValidationError(std::string(where) + ": dimensions must be positive");
    }
    if (psi.amps.size() != psi.dim_a * psi.dim_e) {
        throw ValidationError(std::string(where) + ": amplitude length does not match dim_a*dim_e");
    }
    if (std::abs(psi.squared_norm() - 1.0) > kNormTol) {
        throw ValidationError(std::string(where) + ": state is not normalized");
    }
}

Vector basis_state(Index dim, Index i) {
    if (dim <= 0 || i < 0 || i >= dim) throw ValidationError("basis_state: index out of range");
    Vector v = Vector::Zero(dim);
    v[i] = 1.0;
    return v;
}

Vector kron(const Vector& a, const Vector& b) {
    Vector out(a.size() * b.size());
    for (Index i = 0; i < a.size(); ++i) {
        out.segment(i * b.size(), b.size()) = a[i] * b;
    }
    return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    return max_abs(m - m.adjoint()) <= tol;
}

JointState tensor_product(const Vector& a, const Vector& b, Index max_dim) {
    if (a.size() <= 0 || b.size() <= 0) throw ValidationError("tensor_product: empty factor");
    if (a.size() * b.size() > max_dim) {
        throw SizeError("tensor_product: total dimension " + std::to_string(a.size() * b.size()) +
                        " exceeds maximum " + std::to_string(max_dim));
    }
    if (std::abs(a.squaredNorm() - 1.0) > kNormTol || std::abs(b.squaredNorm() - 1.0) > kNormTol) {
        throw ValidationError("tensor_product: factors must be normalized");
    }
    JointState out;
    out.dim_a = a.size();
    out.dim_e = b.size();
    out.amps = kron(a, b);
    return out;
}

Matrix partial_trace_env(const JointState& psi) {
    validate_joint(psi, "partial_trace_env");
    auto m = psi.as_matrix();
    return m * m.adjoint();
}

Matrix partial_trace_middle(const JointState& psi, Index dim_front, Index dim_mid) {
    if (psi.dim_a != dim_front * dim_mid) {
        throw ValidationError("partial_trace_middle: dim_a does not factor as front*mid");
    }
    const Index de = psi.dim_e;
    Matrix out = Matrix::Zero(dim_mid, dim_mid);
    for (Index b = 0; b < dim_mid; ++b) {
        for (Index bp = 0; bp < dim_mid; ++bp) {
            Complex sum = 0.0;
            for (Index f = 0; f < dim_front; ++f) {
                const Index base = (f * dim_mid + b) * de;
                const Index basep = (f * dim_mid + bp) * de;
                for (Index e = 0; e < de; ++e) {
                    sum += psi.amps[base + e] * std::conj(psi.amps[basep + e]);
                }
            }
            out(b, bp) = sum;
        }
    }
    return out;
}

JointState promote_middle_factor(const JointState& psi, Index dim_front, Index dim_mid) {
    if (psi.dim_a != dim_front * dim_mid) {
        throw ValidationError("promote_middle_factor: dim_a does not factor as front*mid");
    }
    const Index de = psi.dim_e;
    JointState out;
    out.dim_a = dim_mid;
    out.dim_e = dim_front * de;
    out.amps.resize(psi.amps.size());
    for (Index f = 0; f < dim_front; ++f) {
        for (Index b = 0; b < dim_mid; ++b) {
            for (Index e = 0; e < de; ++e) {
                out.amps[b * (dim_front * de) + f * de + e] = psi.amps[(f * dim_mid + b) * de + e];
            }
        }
    }
    return out;
}

Eigensystem eigh(const Matrix& h, double herm_tol) {
    if (h.rows() != h.cols() || h.rows() == 0) {
        throw ValidationError("eigh: matrix must be square and non-empty");
    }
    if (!is_hermitian(h, herm_tol)) {
        throw ValidationError("eigh: matrix is not Hermitian within tolerance");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    if (solver.info() != Eigen::Success) {
        throw Error("eigh: eigendecomposition failed to converge");
    }
    return Eigensystem{solver.eigenvalues(), solver.eigenvectors()};
}

SpectralPropagator::SpectralPropagator(const Matrix& h_total) : eig_(eigh(h_total)) {}

Vector SpectralPropagator::apply(const Vector& psi, double t) const {
    if (psi.size() != eig_.vectors.rows()) {
        throw ValidationError("SpectralPropagator: state dimension mismatch");
    }
    Vector coeffs = eig_.vectors.adjoint() * psi;
    for (Index k = 0; k < coeffs.size(); ++k) {
        coeffs[k] *= std::polar(1.0, -eig_.values[k] * t);
    }
    return eig_.vectors * coeffs;
}

JointState SpectralPropagator::step(const JointState& psi, double eta) const {
    JointState out = psi;
    out.amps = apply(psi.amps, eta);
    return out;
}

JointState evolve_step(const JointState& psi, const Matrix& h_total, double eta) {
    if (eta <= 0.0) throw ValidationError("evolve_step: eta must be positive");
    if (h_total.rows() != psi.dim_a * psi.dim_e) {
        throw ValidationError("evolve_step: Hamiltonian dimension mismatch");
    }
    return SpectralPropagator(h_total).step(psi, eta);
}

}  // namespace modal
