#include "modal/scenario_json.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <set>

namespace modal {

namespace {

using nlohmann::json;

void require_keys(const json& doc, const std::set<std::string>& required,
                  const std::set<std::string>& optional) {
    for (const auto& key : required) {
        if (!doc.contains(key)) throw ValidationError("scenario: missing field '" + key + "'");
    }
    for (const auto& [key, value] : doc.items()) {
        if (!required.count(key) && !optional.count(key)) {
            throw ValidationError("scenario: unknown field '" + key + "'");
        }
    }
}

double get_number(const json& doc, const std::string& key) {
    const auto& v = doc.at(key);
    if (!v.is_number()) throw ValidationError("scenario: field '" + key + "' must be a number");
    return v.get<double>();
}

int get_int(const json& doc, const std::string& key) {
    const auto& v = doc.at(key);
    if (!v.is_number_integer()) {
        throw ValidationError("scenario: field '" + key + "' must be an integer");
    }
    return v.get<int>();
}

std::uint64_t get_seed(const json& doc) {
    const auto& v = doc.at("seed");
    if (!v.is_number_unsigned() && !v.is_number_integer()) {
        throw ValidationError("scenario: field 'seed' must be a non-negative integer");
    }
    if (v.is_number_integer() && v.get<std::int64_t>() < 0) {
        throw ValidationError("scenario: field 'seed' must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

// Upper-triangle entry list {row, col, re, im} with implied Hermitian completion.
Matrix parse_hermitian(const json& arr, Index dim, const std::string& name) {
    if (!arr.is_array()) {
        throw ValidationError("scenario: field '" + name + "' must be an array of entries");
    }
    Matrix h = Matrix::Zero(dim, dim);
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> seen(dim, dim);
    seen.setConstant(false);
    for (const auto& entry : arr) {
        require_keys(entry, {"row", "col", "re", "im"}, {});
        const int row = get_int(entry, "row");
        const int col = get_int(entry, "col");
        if (row < 0 || col < 0 || row >= dim || col >= dim) {
            throw ValidationError("scenario: " + name + " entry index out of range");
        }
        if (row > col) {
            throw ValidationError("scenario: " + name +
                                  " entries must lie on or above the diagonal");
        }
        if (seen(row, col)) {
            throw ValidationError("scenario: duplicate " + name + " entry");
        }
        seen(row, col) = true;
        const double re = get_number(entry, "re");
        const double im = get_number(entry, "im");
        if (row == col && im != 0.0) {
            throw ValidationError("scenario: " + name + " diagonal entries must be real");
        }
        h(row, col) = Complex(re, im);
        if (row != col) h(col, row) = Complex(re, -im);
    }
    return h;
}

Scenario parse_custom(const json& doc) {
    require_keys(doc,
                 {"model", "eta", "n_steps", "seed", "eps_null", "dims", "h_a", "h_e", "h_int",
                  "initial"},
                 {"static"});
    const auto& dims = doc.at("dims");
    if (!dims.is_array() || dims.size() != 2) {
        throw ValidationError("scenario: 'dims' must be [dim_a, dim_e]");
    }
    const Index dim_a = dims[0].get<Index>();
    const Index dim_e = dims[1].get<Index>();
    if (dim_a < 1 || dim_e < 1) throw ValidationError("scenario: dims must be positive");
    if (dim_a * dim_e > kMaxTotalDim) {
        throw SizeError("scenario: total dimension exceeds maximum " +
                        std::to_string(kMaxTotalDim));
    }

    Scenario sc;
    sc.dim_a = dim_a;
    sc.dim_e = dim_e;
    sc.h_a = parse_hermitian(doc.at("h_a"), dim_a, "h_a");
    sc.h_e = parse_hermitian(doc.at("h_e"), dim_e, "h_e");
    sc.h_int = parse_hermitian(doc.at("h_int"), dim_a * dim_e, "h_int");

    const auto& init = doc.at("initial");
    if (!init.is_array() || static_cast<Index>(init.size()) != dim_a * dim_e) {
        throw ValidationError("scenario: 'initial' must list dim_a*dim_e amplitudes");
    }
    Vector amps(dim_a * dim_e);
    for (Index i = 0; i < amps.size(); ++i) {
        const auto& entry = init[static_cast<std::size_t>(i)];
        require_keys(entry, {"re", "im"}, {});
        amps[i] = Complex(get_number(entry, "re"), get_number(entry, "im"));
    }
    if (std::abs(amps.squaredNorm() - 1.0) > kNormTol) {
        throw ValidationError("scenario: 'initial' state is not normalized");
    }
    sc.initial = JointState{dim_a, dim_e, std::move(amps)};
    sc.is_static = doc.value("static", false) || max_abs(sc.h_int) == 0.0;
    sc.model = "custom";
    sc.metadata = "custom dense Hamiltonian";
    return sc;
}

}  // namespace

Scenario parse_scenario(const json& doc) {
    if (!doc.is_object()) throw ValidationError("scenario: document must be a JSON object");
    if (!doc.contains("model")) throw ValidationError("scenario: missing field 'model'");
    const std::string model = doc.at("model").get<std::string>();

    const double eta = doc.contains("eta") ? get_number(doc, "eta") : 0.0;
    const int n_steps = doc.contains("n_steps") ? get_int(doc, "n_steps") : 0;
    const double eps_null = doc.contains("eps_null") ? get_number(doc, "eps_null") : -1.0;
    if (eta <= 0.0) throw ValidationError("scenario: 'eta' must be positive");
    if (n_steps < 1) throw ValidationError("scenario: 'n_steps' must be at least 1");
    if (eps_null < 0.0 || eps_null >= 1.0) {
        throw ValidationError("scenario: 'eps_null' must lie in [0, 1)");
    }

    if (model == "spin_bath") {
        require_keys(doc, {"model", "eta", "n_steps", "seed", "eps_null", "n_env_qubits",
                           "coupling_scale"},
                     {});
        return build_spin_bath(get_int(doc, "n_env_qubits"), get_number(doc, "coupling_scale"),
                               get_seed(doc), eta, n_steps, eps_null);
    }
    if (model == "measurement") {
        require_keys(doc,
                     {"model", "eta", "n_steps", "seed", "eps_null", "n_env_qubits",
                      "coupling_scale", "pointer_dim", "pointer_coupling", "c_plus_re",
                      "c_plus_im", "c_minus_re", "c_minus_im"},
                     {});
        const Complex c_plus(get_number(doc, "c_plus_re"), get_number(doc, "c_plus_im"));
        const Complex c_minus(get_number(doc, "c_minus_re"), get_number(doc, "c_minus_im"));
        return build_measurement(c_plus, c_minus, get_int(doc, "pointer_dim"),
                                 get_int(doc, "n_env_qubits"), get_number(doc, "pointer_coupling"),
                                 get_number(doc, "coupling_scale"), get_seed(doc), eta, n_steps,
                                 eps_null);
    }
    if (model == "tripartite") {
        require_keys(doc, {"model", "eta", "n_steps", "seed", "eps_null", "n_env_qubits",
                           "coupling_scale", "ab_coupling"},
                     {});
        return build_tripartite(get_int(doc, "n_env_qubits"), get_number(doc, "ab_coupling"),
                                get_number(doc, "coupling_scale"), get_seed(doc), eta, n_steps,
                                eps_null);
    }
    if (model == "custom") {
        Scenario sc = parse_custom(doc);
        sc.eta = eta;
        sc.n_steps = n_steps;
        sc.eps_null = eps_null;
        sc.seed = get_seed(doc);
        return sc;
    }
    throw ValidationError("scenario: unknown model '" + model + "'");
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("scenario: cannot open '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("scenario: " + std::string(e.what()));
    }
    return parse_scenario(doc);
}

}  // namespace modal
