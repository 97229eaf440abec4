// run.hpp — CLI entry points as library calls: scenario loading, ensemble
// orchestration and bit-exact report emission.
#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <set>
#include <string>

namespace modal {

inline constexpr const char* kToolName = "modalsim";
inline constexpr const char* kToolVersion = "0.1.0";

struct RunConfig {
    std::string scenario_path;
    std::uint64_t master_seed{0};
    int n_trajectories{100};
    int workers{0};  // 0 = hardware concurrency; affects scheduling only
    std::string output_dir{"."};
    std::set<std::string> emit{"summary"};
};

// Exit codes are a stable contract: 0 success, 2 validation failure,
// 3 breakdown epidemic (>1% of trajectories).
int cmd_run(const RunConfig& config, std::ostream& err);

struct DiagnoseConfig {
    std::string scenario_path;  // may be empty when only --delta is requested
    std::optional<std::array<double, 3>> delta;  // N, L, ell
};

int cmd_diagnose(const DiagnoseConfig& config, std::ostream& out, std::ostream& err);

}  // namespace modal
