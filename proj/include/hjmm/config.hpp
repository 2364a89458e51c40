#pragma once

#include <hjmm/grid.hpp>
#include <hjmm/initial_curve.hpp>
#include <hjmm/levy_model.hpp>
#include <hjmm/market.hpp>
#include <hjmm/solver.hpp>
#include <hjmm/volatility.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace hjmm {

inline constexpr int kConfigVersion = 1;

struct McSettings {
    std::size_t n_paths = 1000;
    std::uint64_t master_seed = 1;
    double eps = 1e-3;
    double z_limit = 4.0;
    std::vector<Checkpoint> checkpoints;  // empty: default tensor grid
};

struct OutputSettings {
    std::string dir = "hjmm_out";
    bool csv = true;
    bool json = true;
};

struct RunConfig {
    int version = kConfigVersion;
    LevyModelSpec levy;
    VolatilitySpec vol;
    InitialCurve r0;
    GridSpec grid;
    SolverOptions solver;
    McSettings mc;
    OutputSettings outputs;
};

/// Parses and cross-validates a config document. Every problem found is
/// collected; the thrown ConfigError lists them all, each prefixed by the
/// JSON path or the violated assumption label (A1)-(A4).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace hjmm
