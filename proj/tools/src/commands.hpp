#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "config.hpp"

namespace vortexlab::cli {

enum ExitCode : int { kPass = 0, kUsage = 1, kFlagged = 2 };

struct Invocation {
    Command command = Command::steady;
    std::string config_path;
    std::filesystem::path out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
};

/// Loads the config, runs the command and writes its outputs. Config and
/// precondition errors go to `err` and return kUsage.
int run(const Invocation& inv, std::ostream& log, std::ostream& err);

/// Runs with an already parsed config (seed and jobs overrides applied).
int run_config(Command command, const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);

std::optional<Command> command_from_name(const std::string& name);

}  // namespace vortexlab::cli
