#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "vortexlab/asymptotics.hpp"
#include "vortexlab/euler.hpp"
#include "vortexlab/kirchhoff_routh.hpp"
#include "vortexlab/rearrangement.hpp"

namespace vortexlab {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a64(std::string_view bytes);

/// Identifies the inputs an output file was produced from.
struct Provenance {
    std::uint64_t config_hash = 0;
    std::vector<int> grid_n;
    double tolerance = 0.0;
    int max_refinements = 0;
    std::uint64_t seed = 0;

    std::string hash_hex() const;
    /// Single line without the leading '#'.
    std::string line() const;
};

/// "# <provenance>" line, "nx ny h", then ny rows of nx values over the full
/// bounding lattice (zero outside the domain).
void write_field_dump(std::ostream& out, const ScalarField& f, const Provenance& prov);
void write_field_dump(const std::filesystem::path& path, const ScalarField& f, const Provenance& prov);
/// Reads the values back onto `grid`; throws IoError on size mismatch.
ScalarField read_field_dump(std::istream& in, const GridPtr& grid);

/// Binary 8-bit PGM (top row = largest y) with min/max scaling, plus a
/// sidecar "<path>.json" holding min, max and provenance.
void write_pgm(const std::filesystem::path& path, const ScalarField& f, const Provenance& prov);

/// JSON documents (two-space indentation, trailing newline).
std::string to_json(const SteadyState& st, const RearrangementSpec& spec, const Provenance& prov);
std::string to_json(const KRMinimum& m, double kappa1, double kappa2, double margin, const Provenance& prov);
std::string to_json(const SweepVerdict& v, const Provenance& prov);

/// CSV with a leading "# provenance" line.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records, const Provenance& prov);
void write_trajectory_csv(std::ostream& out, const PVTrajectory& traj, const Provenance& prov);
void write_stability_csv(std::ostream& out, const StabilityResult& result, const Provenance& prov);

/// Shortest round-trip decimal form of a double.
std::string format_number(double v);

/// Writes `text` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace vortexlab
