// scenario.hpp — concrete desk-scale models: spin-bath equilibration, a
// two-outcome pointer measurement, a tripartite pair of systems in one bath,
// and the macroscopic-distinctness estimate.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "modal/hilbert.hpp"

namespace modal {

// Two-outcome measurement data. Branch states are derived quantities; see
// measurement_branches / branch_density_matrices in ensemble.hpp.
struct MeasurementSpec {
    Complex c_plus{1.0, 0.0};
    Complex c_minus{0.0, 0.0};
    Index pointer_dim{2};
    double t_measure{0.0};
};

// Composite subsystem A = A1 (x) A2 sharing one bath; used by the emergent
// joint-probability check.
struct TripartiteSpec {
    Index dim_a1{2};
    Index dim_a2{2};
    double ab_coupling{0.0};
};

struct Scenario {
    Index dim_a{0};
    Index dim_e{0};
    Matrix h_a;     // dim_a x dim_a
    Matrix h_e;     // dim_e x dim_e
    Matrix h_int;   // joint (dim_a*dim_e) square
    double eta{0.0};
    int n_steps{0};
    JointState initial;
    double eps_null{1e-8};
    bool is_static{false};  // flagged zero-interaction scenario
    std::uint64_t seed{0};
    std::string model;      // "spin_bath" | "measurement" | "tripartite" | "custom"
    std::string metadata;
    std::optional<MeasurementSpec> measurement;
    std::optional<TripartiteSpec> tripartite;
};

// H_A (x) 1 + 1 (x) H_E + H_int.
Matrix scenario_h_total(const Scenario& sc);

// Non-fatal contract checks: unflagged zero interaction, step too large
// relative to the fastest Hamiltonian scale, environment not much larger
// than the subsystem.
std::vector<std::string> scenario_warnings(const Scenario& sc);

// ------------------------------- builders -----------------------------------

// Single qubit coupled to n_env_qubits bath spins through sigma_x sigma_x
// terms with seeded random strengths; random product initial state.
Scenario build_spin_bath(int n_env_qubits, double coupling_scale, std::uint64_t seed,
                         double eta = 0.05, int n_steps = 400, double eps_null = 1e-8);

// Premeasurement of sigma_z of one qubit by a finite pointer. Subsystem A is
// {measured qubit (x) pointer}; the bath supplies record probes (rotated to
// exact branch orthogonality at t_measure) plus generic spins monitoring the
// pointer position. pointer_coupling is the pointer displacement in sites
// accumulated over the run; coupling_scale scales the pointer-bath couplings.
Scenario build_measurement(Complex c_plus, Complex c_minus, Index pointer_dim,
                           int n_env_qubits, double pointer_coupling, double coupling_scale,
                           std::uint64_t seed, double eta = 0.005, int n_steps = 3200,
                           double eps_null = 1e-7);

// Two qubits, each monitored by its own half of the bath, optionally coupled
// to each other with strength ab_coupling.
Scenario build_tripartite(int n_env_qubits, double ab_coupling, double coupling_scale,
                          std::uint64_t seed, double eta = 0.02, int n_steps = 150,
                          double eps_null = 1e-8);

// ---------------------------- distinctness scale ----------------------------

struct DeltaParams {
    double n_dof{0.0};  // degrees of freedom
    double sep{0.0};    // macroscopic separation (m)
    double micro{0.0};  // microscopic wave-function scale (m)
};

// ln Delta = -N (L/l)^2, in log space because Delta itself underflows any
// floating-point format.
double delta_estimate(const DeltaParams& params);

// ------------------------------ shared pieces -------------------------------

// Hermitian generator of the cyclic shift on dim sites: exp(-i G) moves
// |x> -> |x+1 mod dim> exactly.
Matrix shift_generator(Index dim);

// op acting on qubit k of n (qubit 0 = most significant factor).
Matrix qubit_op(const Matrix& op, int k, int n);

}  // namespace modal
