#include "vortexlab/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace vortexlab {

using nlohmann::ordered_json;

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string Provenance::hash_hex() const {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << config_hash;
    return os.str();
}

std::string Provenance::line() const {
    std::ostringstream os;
    os << "vortexlab config_hash=" << hash_hex() << " n=";
    for (std::size_t i = 0; i < grid_n.size(); ++i) os << (i ? "," : "") << grid_n[i];
    os << " tolerance=" << format_number(tolerance) << " max_refinements=" << max_refinements << " seed=" << seed;
    return os.str();
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

namespace {

std::vector<double> full_lattice(const ScalarField& f) {
    const Grid& g = f.grid();
    std::vector<double> v(static_cast<std::size_t>(g.nx()) * static_cast<std::size_t>(g.ny()), 0.0);
    for (CellId c = 0; c < static_cast<CellId>(g.size()); ++c) {
        v[static_cast<std::size_t>(g.iy(c)) * static_cast<std::size_t>(g.nx()) + static_cast<std::size_t>(g.ix(c))] = f[c];
    }
    return v;
}

ordered_json provenance_json(const Provenance& prov) {
    return ordered_json{{"config_hash", prov.hash_hex()},
                        {"grid_n", prov.grid_n},
                        {"tolerance", prov.tolerance},
                        {"max_refinements", prov.max_refinements},
                        {"seed", prov.seed}};
}

ordered_json point_json(Point p) { return ordered_json::array({p.x, p.y}); }

// NaN and infinities become null.
ordered_json number_json(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

}  // namespace

void write_field_dump(std::ostream& out, const ScalarField& f, const Provenance& prov) {
    const Grid& g = f.grid();
    out << "# " << prov.line() << '\n';
    out << g.nx() << ' ' << g.ny() << ' ' << format_number(g.h()) << '\n';
    const auto v = full_lattice(f);
    for (int iy = 0; iy < g.ny(); ++iy) {
        for (int ix = 0; ix < g.nx(); ++ix) {
            if (ix) out << ' ';
            out << format_number(v[static_cast<std::size_t>(iy) * static_cast<std::size_t>(g.nx()) + static_cast<std::size_t>(ix)]);
        }
        out << '\n';
    }
}

void write_field_dump(const std::filesystem::path& path, const ScalarField& f, const Provenance& prov) {
    std::ostringstream os;
    write_field_dump(os, f, prov);
    write_text(path, os.str());
}

ScalarField read_field_dump(std::istream& in, const GridPtr& grid) {
    std::string line;
    while (in.peek() == '#') std::getline(in, line);
    int nx = 0, ny = 0;
    double h = 0.0;
    if (!(in >> nx >> ny >> h)) throw IoError("field dump: missing 'nx ny h' header");
    if (nx != grid->nx() || ny != grid->ny()) throw IoError("field dump: lattice size does not match the grid");
    ScalarField f(grid, 0.0);
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            std::string token;
            if (!(in >> token)) throw IoError("field dump: truncated data");
            double v = 0.0;
            const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
            if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
                throw IoError("field dump: bad value '" + token + "'");
            }
            if (const CellId c = grid->at(ix, iy); c != kNoCell) f[c] = v;
        }
    }
    return f;
}

void write_pgm(const std::filesystem::path& path, const ScalarField& f, const Provenance& prov) {
    const Grid& g = f.grid();
    const auto v = full_lattice(f);
    const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    std::ostringstream os;
    os << "P5\n# " << prov.line() << '\n' << g.nx() << ' ' << g.ny() << "\n255\n";
    for (int iy = g.ny() - 1; iy >= 0; --iy) {
        for (int ix = 0; ix < g.nx(); ++ix) {
            const double x = v[static_cast<std::size_t>(iy) * static_cast<std::size_t>(g.nx()) + static_cast<std::size_t>(ix)];
            const double s = hi > lo ? (x - lo) / (hi - lo) : 0.0;
            os.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * s))));
        }
    }
    write_text(path, os.str());
    ordered_json side{{"min", lo}, {"max", hi}, {"scaling", "pixel = round(255 * (value - min) / (max - min))"},
                      {"provenance", provenance_json(prov)}};
    write_text(path.string() + ".json", side.dump(2) + "\n");
}

std::string to_json(const SteadyState& st, const RearrangementSpec& spec, const Provenance& prov) {
    ordered_json j;
    j["provenance"] = provenance_json(prov);
    j["spec"] = {{"eps1", spec.eps1},
                 {"eps2", spec.eps2},
                 {"kappa1", spec.kappa1},
                 {"kappa2", spec.kappa2},
                 {"p", spec.p},
                 {"profile", spec.profile == ProfileKind::patch ? "patch" : "parabolic"},
                 {"gamma", spec.gamma}};
    j["converged"] = st.converged;
    j["iterations"] = st.iterations;
    j["message"] = st.message;
    j["energy"] = st.energy;
    j["mu1"] = number_json(st.mu1);
    j["mu2"] = number_json(st.mu2);
    j["core_cells"] = {{"positive", st.core_positive.size()}, {"negative", st.core_negative.size()}};
    j["centers"] = {{"positive", point_json(st.center_positive)},
                    {"negative", st.core_negative.empty() ? ordered_json(nullptr) : point_json(st.center_negative)}};
    j["diameters"] = {{"positive", st.diameter_positive}, {"negative", st.diameter_negative}};
    ordered_json seeds = ordered_json::array();
    for (const auto& p : st.seed_points) seeds.push_back(point_json(p));
    j["seed_points"] = seeds;
    j["residual"] = st.residual;
    j["energies"] = st.energies;
    return j.dump(2) + "\n";
}

std::string to_json(const KRMinimum& m, double kappa1, double kappa2, double margin, const Provenance& prov) {
    ordered_json j;
    j["provenance"] = provenance_json(prov);
    j["kappa"] = {kappa1, kappa2};
    j["margin"] = margin;
    j["x1"] = point_json(m.positive);
    j["x2"] = point_json(m.negative);
    j["value"] = m.value;
    j["gradient_norm"] = m.gradient_norm;
    const PairSignature s = pair_signature(m.positive, m.negative);
    j["signature"] = {s.r1, s.r2, s.separation};
    j["degenerate"] = m.degenerate;
    j["scan_resolution"] = m.scan_resolution;
    j["scanned_pairs"] = m.scanned_pairs;
    j["starts"] = m.starts;
    j["iterations"] = m.iterations;
    return j.dump(2) + "\n";
}

std::string to_json(const SweepVerdict& v, const Provenance& prov) {
    ordered_json j;
    j["provenance"] = provenance_json(prov);
    j["all_pass"] = v.all_pass();
    ordered_json checks = ordered_json::array();
    for (const auto& c : v.checks) {
        checks.push_back({{"name", c.name},
                          {"pass", c.pass},
                          {"value", number_json(c.value)},
                          {"threshold", number_json(c.threshold)},
                          {"detail", c.detail}});
    }
    j["checks"] = checks;
    j["centers"] = {{"reference_positive", point_json(v.centers.reference_positive)},
                    {"reference_negative", point_json(v.centers.reference_negative)},
                    {"reference_signature", {v.centers.reference.r1, v.centers.reference.r2, v.centers.reference.separation}},
                    {"distances", v.centers.distances},
                    {"h", v.centers.h}};
    ordered_json d1 = ordered_json::array();
    ordered_json d2 = ordered_json::array();
    for (const double x : v.multipliers.d1) d1.push_back(number_json(x));
    for (const double x : v.multipliers.d2) d2.push_back(number_json(x));
    j["multipliers"] = {{"d1", d1},
                        {"d2", d2},
                        {"spread1", number_json(v.multipliers.spread1)},
                        {"spread2", number_json(v.multipliers.spread2)}};
    return j.dump(2) + "\n";
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records, const Provenance& prov) {
    out << "# " << prov.line() << '\n';
    out << "eps1,eps2,n,E,E_plus,E_minus,I,mu1,mu2,diam_plus,diam_minus,X_plus_x,X_plus_y,X_minus_x,X_minus_y,"
           "delta_plus,delta_minus,seed_energy,residual,iterations,converged,ascent,monotone_violations\n";
    for (const auto& r : records) {
        const double row[] = {r.eps1,
                              r.eps2,
                              static_cast<double>(r.n),
                              r.energy,
                              r.energy_positive,
                              r.energy_negative,
                              r.interaction,
                              r.mu1,
                              r.mu2,
                              r.diameter_positive,
                              r.diameter_negative,
                              r.center_positive.x,
                              r.center_positive.y,
                              r.center_negative.x,
                              r.center_negative.y,
                              r.profile_positive,
                              r.profile_negative,
                              r.seed_energy,
                              r.residual};
        for (const double v : row) out << format_number(v) << ',';
        out << r.iterations << ',' << (r.converged ? 1 : 0) << ',' << (r.ascent ? 1 : 0) << ','
            << r.monotone_violations << '\n';
    }
}

void write_trajectory_csv(std::ostream& out, const PVTrajectory& traj, const Provenance& prov) {
    out << "# " << prov.line() << '\n';
    if (traj.truncated) out << "# truncated: " << traj.message << '\n';
    out << 't';
    const std::size_t k = traj.positions.empty() ? 0 : traj.positions.front().size();
    for (std::size_t i = 1; i <= k; ++i) out << ",x" << i << ",y" << i;
    out << ",W\n";
    for (std::size_t s = 0; s < traj.times.size(); ++s) {
        out << format_number(traj.times[s]);
        for (const auto& p : traj.positions[s]) out << ',' << format_number(p.x) << ',' << format_number(p.y);
        out << ',' << format_number(traj.energies[s]) << '\n';
    }
}

void write_stability_csv(std::ostream& out, const StabilityResult& result, const Provenance& prov) {
    out << "# " << prov.line() << '\n';
    if (result.blown_up) out << "# aborted: " << result.message << '\n';
    out << "t,d,integral,max_abs\n";
    for (const auto& s : result.series) {
        out << format_number(s.t) << ',' << format_number(s.distance) << ',' << format_number(s.integral) << ','
            << format_number(s.max_abs) << '\n';
    }
}

}  // namespace vortexlab
