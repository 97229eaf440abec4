#include "modal/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "modal/rng.hpp"

namespace modal {

namespace {

Matrix sigma_x() {
    Matrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

Matrix sigma_y() {
    Matrix m(2, 2);
    m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
    return m;
}

Matrix sigma_z() {
    Matrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

// Draw order per state: re0, im0, re1, im1, ... in [-1, 1), then normalize.
Vector random_state(Rng& rng, Index dim) {
    Vector v(dim);
    while (true) {
        for (Index i = 0; i < dim; ++i) {
            const double re = rng.uniform(-1.0, 1.0);
            const double im = rng.uniform(-1.0, 1.0);
            v[i] = Complex(re, im);
        }
        const double n = v.norm();
        if (n > 1e-6) return v / n;
    }
}

void check_total_dim(Index dim_a, Index dim_e, const char* where) {
    if (dim_a * dim_e > kMaxTotalDim) {
        throw SizeError(std::string(where) + ": total dimension " +
                        std::to_string(dim_a * dim_e) + " exceeds maximum " +
                        std::to_string(kMaxTotalDim));
    }
}

}  // namespace

Matrix scenario_h_total(const Scenario& sc) {
    const Matrix ia = Matrix::Identity(sc.dim_a, sc.dim_a);
    const Matrix ie = Matrix::Identity(sc.dim_e, sc.dim_e);
    return kron(sc.h_a, ie) + kron(ia, sc.h_e) + sc.h_int;
}

std::vector<std::string> scenario_warnings(const Scenario& sc) {
    std::vector<std::string> out;
    if (!sc.is_static && max_abs(sc.h_int) == 0.0) {
        out.push_back("interaction Hamiltonian is zero but scenario is not flagged static");
    }
    const double hmax = max_abs(scenario_h_total(sc));
    if (sc.eta * hmax > 0.5) {
        out.push_back("eta*max|H| = " + std::to_string(sc.eta * hmax) +
                      " > 0.5; step is large relative to the fastest scale");
    }
    if (sc.dim_e < 4 * sc.dim_a) {
        out.push_back("dim_e < 4*dim_a; the environment is not much larger than the subsystem");
    }
    return out;
}

Matrix shift_generator(Index dim) {
    if (dim < 2) throw ValidationError("shift_generator: dim must be >= 2");
    // G = sum_m (2 pi m / dim) |f_m><f_m| with Fourier modes f_m; then
    // exp(-i G) is exactly the one-site cyclic shift.
    Matrix g = Matrix::Zero(dim, dim);
    const double base = 2.0 * std::numbers::pi / static_cast<double>(dim);
    for (Index m = 0; m < dim; ++m) {
        Vector f(dim);
        for (Index x = 0; x < dim; ++x) {
            f[x] = std::polar(1.0 / std::sqrt(static_cast<double>(dim)),
                              base * static_cast<double>(m * x));
        }
        g += (base * static_cast<double>(m)) * (f * f.adjoint());
    }
    return 0.5 * (g + Matrix(g.adjoint()));
}

Matrix qubit_op(const Matrix& op, int k, int n) {
    if (k < 0 || k >= n) throw ValidationError("qubit_op: qubit index out of range");
    const Index left = Index{1} << k;
    const Index right = Index{1} << (n - k - 1);
    return kron(kron(Matrix::Identity(left, left), op), Matrix::Identity(right, right));
}

Scenario build_spin_bath(int n_env_qubits, double coupling_scale, std::uint64_t seed,
                         double eta, int n_steps, double eps_null) {
    if (n_env_qubits < 1 || n_env_qubits > 11) {
        throw ValidationError("build_spin_bath: n_env_qubits must lie in [1, 11]");
    }
    if (eta <= 0.0 || n_steps < 1) {
        throw ValidationError("build_spin_bath: eta and n_steps must be positive");
    }
    const Index dim_e = Index{1} << n_env_qubits;
    check_total_dim(2, dim_e, "build_spin_bath");

    Rng rng(splitmix64(seed));
    std::vector<double> fields(n_env_qubits), couplings(n_env_qubits);
    for (auto& b : fields) b = 0.5 * rng.uniform(0.5, 1.5);
    for (auto& g : couplings) g = coupling_scale * rng.uniform(0.5, 1.5);

    Scenario sc;
    sc.dim_a = 2;
    sc.dim_e = dim_e;
    sc.h_a = 0.5 * sigma_z();
    sc.h_e = Matrix::Zero(dim_e, dim_e);
    sc.h_int = Matrix::Zero(2 * dim_e, 2 * dim_e);
    for (int k = 0; k < n_env_qubits; ++k) {
        sc.h_e += fields[k] * qubit_op(sigma_z(), k, n_env_qubits);
        sc.h_int += couplings[k] * kron(sigma_x(), qubit_op(sigma_x(), k, n_env_qubits));
    }

    Vector sys = random_state(rng, 2);
    Vector bath = random_state(rng, 2);
    for (int k = 1; k < n_env_qubits; ++k) bath = kron(bath, random_state(rng, 2));
    sc.initial = tensor_product(sys, bath);

    sc.eta = eta;
    sc.n_steps = n_steps;
    sc.eps_null = eps_null;
    sc.seed = seed;
    sc.is_static = (coupling_scale == 0.0);
    sc.model = "spin_bath";
    sc.metadata = "qubit in a random-field sigma_x spin bath, " +
                  std::to_string(n_env_qubits) + " bath qubits";
    return sc;
}

Scenario build_measurement(Complex c_plus, Complex c_minus, Index pointer_dim,
                           int n_env_qubits, double pointer_coupling, double coupling_scale,
                           std::uint64_t seed, double eta, int n_steps, double eps_null) {
    if (pointer_dim < 2) throw ValidationError("build_measurement: pointer_dim must be >= 2");
    if (n_env_qubits < 1 || n_env_qubits > 11) {
        throw ValidationError("build_measurement: n_env_qubits must lie in [1, 11]");
    }
    if (eta <= 0.0 || n_steps < 1) {
        throw ValidationError("build_measurement: eta and n_steps must be positive");
    }
    if (std::abs(std::norm(c_plus) + std::norm(c_minus) - 1.0) > kNormTol) {
        throw ValidationError("build_measurement: |c_plus|^2 + |c_minus|^2 must equal 1");
    }
    const Index dim_a = 2 * pointer_dim;
    const Index dim_e = Index{1} << n_env_qubits;
    check_total_dim(dim_a, dim_e, "build_measurement");

    const double t_measure = eta * static_cast<double>(n_steps);

    // Record probes: bath qubits rotated by the measured qubit's sigma_z so
    // the two branch environments become exactly orthogonal at t_measure.
    // Only engaged when the pointer actually moves.
    const int n_rec =
        pointer_coupling != 0.0 ? std::clamp(n_env_qubits - 3, 1, 3) : 0;
    const int n_gen = n_env_qubits - n_rec;
    const double rec_rate = std::numbers::pi / (4.0 * t_measure);
    const double g_vn = pointer_coupling / t_measure;

    Rng rng(splitmix64(seed));
    std::vector<double> fields(n_gen), couplings(n_gen);
    for (auto& b : fields) b = 0.5 * rng.uniform(0.5, 1.5);
    for (auto& g : couplings) g = coupling_scale * rng.uniform(0.5, 1.5);

    Matrix xpos = Matrix::Zero(pointer_dim, pointer_dim);
    for (Index d = 0; d < pointer_dim; ++d) {
        xpos(d, d) = static_cast<double>(d) - 0.5 * static_cast<double>(pointer_dim - 1);
    }

    Scenario sc;
    sc.dim_a = dim_a;
    sc.dim_e = dim_e;
    sc.h_a = 0.5 * kron(sigma_z(), Matrix::Identity(pointer_dim, pointer_dim));
    if (g_vn != 0.0) sc.h_a += g_vn * kron(sigma_z(), shift_generator(pointer_dim));
    sc.h_e = Matrix::Zero(dim_e, dim_e);
    sc.h_int = Matrix::Zero(dim_a * dim_e, dim_a * dim_e);
    const Matrix id_dev = Matrix::Identity(pointer_dim, pointer_dim);
    for (int r = 0; r < n_rec; ++r) {
        sc.h_int += rec_rate * kron(kron(sigma_z(), id_dev), qubit_op(sigma_y(), r, n_env_qubits));
    }
    for (int k = 0; k < n_gen; ++k) {
        sc.h_e += fields[k] * qubit_op(sigma_z(), n_rec + k, n_env_qubits);
        sc.h_int += couplings[k] *
                    kron(kron(Matrix::Identity(2, 2), xpos),
                         qubit_op(sigma_x(), n_rec + k, n_env_qubits));
    }

    Vector qubit(2);
    qubit << c_plus, c_minus;
    Vector device = basis_state(pointer_dim, 0);
    Vector bath = Vector::Ones(1);
    for (int r = 0; r < n_rec; ++r) bath = kron(bath, basis_state(2, 0));
    for (int k = 0; k < n_gen; ++k) bath = kron(bath, random_state(rng, 2));
    sc.initial = tensor_product(kron(qubit, device), bath);

    sc.eta = eta;
    sc.n_steps = n_steps;
    sc.eps_null = eps_null;
    sc.seed = seed;
    sc.is_static = (pointer_coupling == 0.0 && coupling_scale == 0.0);
    sc.model = "measurement";
    sc.metadata = "sigma_z premeasurement, pointer_dim " + std::to_string(pointer_dim) + ", " +
                  std::to_string(n_rec) + " record + " + std::to_string(n_gen) +
                  " generic bath qubits";
    sc.measurement = MeasurementSpec{c_plus, c_minus, pointer_dim, t_measure};
    return sc;
}

Scenario build_tripartite(int n_env_qubits, double ab_coupling, double coupling_scale,
                          std::uint64_t seed, double eta, int n_steps, double eps_null) {
    if (n_env_qubits < 2 || n_env_qubits > 10) {
        throw ValidationError("build_tripartite: n_env_qubits must lie in [2, 10]");
    }
    if (eta <= 0.0 || n_steps < 1) {
        throw ValidationError("build_tripartite: eta and n_steps must be positive");
    }
    const Index dim_e = Index{1} << n_env_qubits;
    check_total_dim(4, dim_e, "build_tripartite");

    // First half of the bath monitors qubit A, second half qubit B; disjoint
    // halves keep the zero-coupling case exactly factorized.
    const int n_a = (n_env_qubits + 1) / 2;

    Rng rng(splitmix64(seed));
    std::vector<double> fields(n_env_qubits), couplings(n_env_qubits);
    for (auto& b : fields) b = 0.5 * rng.uniform(0.5, 1.5);
    for (auto& g : couplings) g = coupling_scale * rng.uniform(0.5, 1.5);

    const Matrix i2 = Matrix::Identity(2, 2);
    Scenario sc;
    sc.dim_a = 4;
    sc.dim_e = dim_e;
    sc.h_a = 0.5 * kron(sigma_z(), i2) + 0.45 * kron(i2, sigma_z()) +
             ab_coupling * kron(sigma_x(), sigma_x());
    sc.h_e = Matrix::Zero(dim_e, dim_e);
    sc.h_int = Matrix::Zero(4 * dim_e, 4 * dim_e);
    for (int k = 0; k < n_env_qubits; ++k) {
        sc.h_e += fields[k] * qubit_op(sigma_z(), k, n_env_qubits);
        const Matrix side = k < n_a ? kron(sigma_x(), i2) : kron(i2, sigma_x());
        sc.h_int += couplings[k] * kron(side, qubit_op(sigma_x(), k, n_env_qubits));
    }

    Vector sys = kron(random_state(rng, 2), random_state(rng, 2));
    Vector bath = random_state(rng, 2);
    for (int k = 1; k < n_env_qubits; ++k) bath = kron(bath, random_state(rng, 2));
    sc.initial = tensor_product(sys, bath);

    sc.eta = eta;
    sc.n_steps = n_steps;
    sc.eps_null = eps_null;
    sc.seed = seed;
    sc.is_static = (coupling_scale == 0.0);
    sc.model = "tripartite";
    sc.metadata = "two qubits in disjoint bath halves, ab_coupling " +
                  std::to_string(ab_coupling);
    sc.tripartite = TripartiteSpec{2, 2, ab_coupling};
    return sc;
}

double delta_estimate(const DeltaParams& params) {
    if (!(params.n_dof > 0.0) || !(params.sep >= 0.0) || !(params.micro > 0.0)) {
        throw ValidationError("delta_estimate: parameters must be positive (sep may be zero)");
    }
    const double ratio = params.sep / params.micro;
    return -(params.n_dof * (ratio * ratio));
}

}  // namespace modal
