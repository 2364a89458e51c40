#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace hjmm {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kConfig = 1;
inline constexpr int kExplosion = 2;
inline constexpr int kIndeterminate = 3;
inline constexpr int kNotConverged = 4;
inline constexpr int kVerifyFailed = 5;
inline constexpr int kMcFailed = 6;
}  // namespace exit_code

struct CliOptions {
    std::string config;
    std::optional<std::uint64_t> seed;  // overrides mc.master_seed
    unsigned threads = 1;
    std::optional<std::string> out;  // overrides outputs.dir
    bool allow_explosive = false;
};

/// Level from HJMM_LOG (trace, debug, info, warn, error, critical, off); default warn.
void init_logging();

int cmd_classify(const CliOptions& opt);
int cmd_solve(const CliOptions& opt);
int cmd_verify(const CliOptions& opt);
int cmd_mc(const CliOptions& opt);

}  // namespace hjmm
