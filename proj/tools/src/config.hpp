#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vortexlab/green.hpp"
#include "vortexlab/rearrangement.hpp"

namespace vortexlab::cli {

/// Parse or validation failure at a position of the config text (1-based;
/// line 0 means the file as a whole).
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, int column, const std::string& message)
        : std::runtime_error(message), line_(line), column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

struct Entry {
    std::string value;
    int line = 0;
    int column = 0;  ///< column of the value
};

/// Sections of key = value lines. '#' starts a comment; ';' only at the
/// start of a line.
class IniDocument {
public:
    static IniDocument parse(const std::string& text);

    const Entry* find(const std::string& section, const std::string& key) const;
    const std::map<std::string, std::map<std::string, Entry>>& sections() const { return sections_; }
    int section_line(const std::string& section) const;

private:
    std::map<std::string, std::map<std::string, Entry>> sections_;
    std::map<std::string, int> section_lines_;
};

enum class Command { steady, sweep, krmin, evolve, diagnose };

struct RunConfig {
    DomainSpec domain = DomainSpec::unit_disk();
    int n = 128;
    /// Grid resolution overrides for individual core radii.
    std::vector<std::pair<double, int>> overrides;

    double kappa1 = 1.0;
    double kappa2 = -1.0;
    std::vector<double> eps{0.1};
    double p = 2.0;
    ProfileKind profile = ProfileKind::patch;
    double gamma = 1.0;

    std::uint64_t seed = 0;
    int jobs = 1;
    SolverOptions solver;

    std::string init = "kr_seed";
    int max_iterations = 500;
    int residual_tests = 32;

    double margin = 0.0;  ///< 0 selects 6h
    int stride = 8;

    std::string mode = "pv";
    double dt = 1e-3;
    double t_end = 10.0;
    int sample_every = 10;
    std::vector<Point> points;
    std::vector<double> strengths;
    double delta0 = 0.0;  ///< perturbation size relative to |zeta|_p
    double turnovers = 10.0;
    double drift_limit = 0.05;

    int instances = 100;
    int samples = 20;

    std::string text;  ///< raw config contents
    IniDocument document;

    int resolution_for(double eps) const;
    RearrangementSpec spec_for(double eps) const;
};

/// Parses and validates the config for `command`.
RunConfig parse_config(const std::string& text, Command command);
RunConfig load_config(const std::string& path, Command command);

/// "path:line:column: message".
std::string format_error(const std::string& path, const ConfigError& e);

}  // namespace vortexlab::cli
