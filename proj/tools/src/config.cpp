#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace vortexlab::cli {

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s{
        {"run", {"seed", "jobs"}},
        {"domain", {"kind", "width", "height", "vertices"}},
        {"grid", {"n", "overrides"}},
        {"vortex", {"kappa1", "kappa2", "eps", "p", "profile", "gamma"}},
        {"solver", {"tolerance", "max_refinements"}},
        {"maximize", {"init", "max_iterations", "residual_tests"}},
        {"krmin", {"margin", "stride"}},
        {"evolve", {"mode", "dt", "t_end", "sample_every", "points", "strengths", "delta0", "turnovers", "drift_limit"}},
        {"diagnose", {"instances", "samples"}},
    };
    return s;
}

std::string trim(const std::string& s, std::size_t& offset) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        offset = s.size();
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    offset = b;
    return s.substr(b, e - b + 1);
}

/// Splits on `sep`, keeping the column of each trimmed piece.
std::vector<std::pair<std::string, int>> split(const std::string& s, char sep, int column) {
    std::vector<std::pair<std::string, int>> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto end = std::min(s.find(sep, start), s.size());
        std::size_t off = 0;
        const std::string piece = trim(s.substr(start, end - start), off);
        if (!piece.empty()) out.emplace_back(piece, column + static_cast<int>(start + off));
        start = end + 1;
    }
    return out;
}

double to_double(const std::string& token, int line, int column) {
    double v = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size() || !std::isfinite(v)) {
        throw ConfigError(line, column, "expected a number, got '" + token + "'");
    }
    return v;
}

long long to_integer(const std::string& token, int line, int column) {
    long long v = 0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
        throw ConfigError(line, column, "expected an integer, got '" + token + "'");
    }
    return v;
}

class Reader {
public:
    explicit Reader(const IniDocument& doc) : doc_(doc) {}

    const Entry* entry(const std::string& s, const std::string& k) const { return doc_.find(s, k); }

    void number(const std::string& s, const std::string& k, double& out) const {
        if (const Entry* e = entry(s, k)) out = to_double(e->value, e->line, e->column);
    }
    template <typename Int>
    void integer(const std::string& s, const std::string& k, Int& out) const {
        if (const Entry* e = entry(s, k)) out = static_cast<Int>(to_integer(e->value, e->line, e->column));
    }
    void text(const std::string& s, const std::string& k, std::string& out) const {
        if (const Entry* e = entry(s, k)) out = e->value;
    }
    void numbers(const std::string& s, const std::string& k, std::vector<double>& out) const {
        if (const Entry* e = entry(s, k)) {
            out.clear();
            for (const auto& [tok, col] : split(e->value, ',', e->column)) out.push_back(to_double(tok, e->line, col));
        }
    }
    /// "x y; x y; ..."
    void points(const std::string& s, const std::string& k, std::vector<Point>& out) const {
        if (const Entry* e = entry(s, k)) {
            out.clear();
            for (const auto& [pair, col] : split(e->value, ';', e->column)) {
                std::istringstream is(pair);
                std::string a, b, extra;
                is >> a >> b;
                if (a.empty() || b.empty() || (is >> extra)) {
                    throw ConfigError(e->line, col, "expected a point 'x y', got '" + pair + "'");
                }
                const auto bcol = col + static_cast<int>(pair.find(b, a.size()));
                out.push_back({to_double(a, e->line, col), to_double(b, e->line, bcol)});
            }
        }
    }

    [[noreturn]] void fail(const std::string& s, const std::string& k, const std::string& message) const {
        if (const Entry* e = entry(s, k)) throw ConfigError(e->line, e->column, message);
        throw ConfigError(doc_.section_line(s), 1, message);
    }

private:
    const IniDocument& doc_;
};

}  // namespace

IniDocument IniDocument::parse(const std::string& text) {
    IniDocument doc;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string content = raw;
        // ';' separates points, so it only comments out whole lines
        if (const auto c = content.find('#'); c != std::string::npos) content.resize(c);
        if (const auto first = content.find_first_not_of(" \t"); first != std::string::npos && content[first] == ';') {
            content.clear();
        }
        std::size_t off = 0;
        const std::string body = trim(content, off);
        if (body.empty()) continue;
        const int col = static_cast<int>(off) + 1;
        if (body.front() == '[') {
            if (body.back() != ']') throw ConfigError(line, col, "unterminated section header");
            std::size_t inner = 0;
            section = trim(body.substr(1, body.size() - 2), inner);
            if (!schema().contains(section)) throw ConfigError(line, col + 1 + static_cast<int>(inner), "unknown section [" + section + "]");
            if (doc.section_lines_.contains(section)) throw ConfigError(line, col, "duplicate section [" + section + "]");
            doc.section_lines_[section] = line;
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError(line, col, "expected 'key = value'");
        if (section.empty()) throw ConfigError(line, col, "key outside of a section");
        std::size_t koff = 0, voff = 0;
        const std::string key = trim(body.substr(0, eq), koff);
        const std::string value = trim(body.substr(eq + 1), voff);
        if (key.empty()) throw ConfigError(line, col, "missing key before '='");
        if (!schema().at(section).contains(key)) {
            throw ConfigError(line, col + static_cast<int>(koff), "unknown key '" + key + "' in section [" + section + "]");
        }
        auto& keys = doc.sections_[section];
        if (keys.contains(key)) throw ConfigError(line, col + static_cast<int>(koff), "duplicate key '" + key + "'");
        const int vcol = value.empty() ? col + static_cast<int>(eq) + 1 : col + static_cast<int>(eq + 1 + voff);
        keys[key] = Entry{value, line, vcol};
    }
    return doc;
}

const Entry* IniDocument::find(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
}

int IniDocument::section_line(const std::string& section) const {
    const auto it = section_lines_.find(section);
    return it == section_lines_.end() ? 0 : it->second;
}

int RunConfig::resolution_for(double e) const {
    for (const auto& [eps_value, n_value] : overrides) {
        if (std::abs(eps_value - e) <= 1e-12 * std::max(1.0, e)) return n_value;
    }
    return n;
}

RearrangementSpec RunConfig::spec_for(double e) const {
    RearrangementSpec s;
    s.eps1 = e;
    s.eps2 = kappa2 == 0.0 ? 0.0 : e;
    s.kappa1 = kappa1;
    s.kappa2 = kappa2;
    s.p = p;
    s.profile = profile;
    s.gamma = gamma;
    return s;
}

RunConfig parse_config(const std::string& text, Command command) {
    RunConfig cfg;
    cfg.text = text;
    cfg.document = IniDocument::parse(text);
    const Reader r(cfg.document);

    r.integer("run", "seed", cfg.seed);
    r.integer("run", "jobs", cfg.jobs);
    if (cfg.jobs < 1) r.fail("run", "jobs", "jobs must be at least 1");

    std::string kind = "disk";
    r.text("domain", "kind", kind);
    if (kind == "disk" || kind == "unit_disk") {
        cfg.domain = DomainSpec::unit_disk();
    } else if (kind == "rectangle") {
        double w = 1.0, h = 1.0;
        r.number("domain", "width", w);
        r.number("domain", "height", h);
        try {
            cfg.domain = DomainSpec::rectangle(w, h);
        } catch (const GeometryError& e) {
            r.fail("domain", "width", e.what());
        }
    } else if (kind == "polygon") {
        std::vector<Point> v;
        r.points("domain", "vertices", v);
        try {
            cfg.domain = DomainSpec::polygon(v);
        } catch (const GeometryError& e) {
            r.fail("domain", "vertices", e.what());
        }
    } else {
        r.fail("domain", "kind", "unknown domain kind '" + kind + "' (expected disk, rectangle or polygon)");
    }

    r.integer("grid", "n", cfg.n);
    if (cfg.n < 16) r.fail("grid", "n", "grid resolution n must be at least 16");
    if (const Entry* e = r.entry("grid", "overrides")) {
        for (const auto& [tok, col] : split(e->value, ',', e->column)) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos) throw ConfigError(e->line, col, "expected 'eps:n', got '" + tok + "'");
            const double ev = to_double(tok.substr(0, colon), e->line, col);
            const auto nv = to_integer(tok.substr(colon + 1), e->line, col + static_cast<int>(colon) + 1);
            if (nv < 16) throw ConfigError(e->line, col, "grid resolution n must be at least 16");
            cfg.overrides.emplace_back(ev, static_cast<int>(nv));
        }
    }

    r.number("vortex", "kappa1", cfg.kappa1);
    r.number("vortex", "kappa2", cfg.kappa2);
    r.numbers("vortex", "eps", cfg.eps);
    r.number("vortex", "p", cfg.p);
    r.number("vortex", "gamma", cfg.gamma);
    std::string profile = "patch";
    r.text("vortex", "profile", profile);
    if (profile == "patch") {
        cfg.profile = ProfileKind::patch;
    } else if (profile == "parabolic") {
        cfg.profile = ProfileKind::parabolic;
        if (!(cfg.gamma > 0.0)) r.fail("vortex", "gamma", "gamma must be positive");
    } else {
        r.fail("vortex", "profile", "unknown profile '" + profile + "' (expected patch or parabolic)");
    }
    if (!(cfg.p > 1.0)) r.fail("vortex", "p", "p must be greater than 1");

    r.number("solver", "tolerance", cfg.solver.tolerance);
    r.integer("solver", "max_refinements", cfg.solver.max_refinements);
    if (!(cfg.solver.tolerance > 0.0)) r.fail("solver", "tolerance", "tolerance must be positive");
    if (cfg.solver.max_refinements < 0) r.fail("solver", "max_refinements", "max_refinements must be >= 0");

    r.text("maximize", "init", cfg.init);
    r.integer("maximize", "max_iterations", cfg.max_iterations);
    r.integer("maximize", "residual_tests", cfg.residual_tests);
    if (cfg.init != "kr_seed" && cfg.init != "random") {
        r.fail("maximize", "init", "unknown init '" + cfg.init + "' (expected kr_seed or random)");
    }
    if (cfg.max_iterations < 1) r.fail("maximize", "max_iterations", "max_iterations must be positive");
    if (cfg.residual_tests < 10) r.fail("maximize", "residual_tests", "residual_tests must be at least 10");

    r.number("krmin", "margin", cfg.margin);
    r.integer("krmin", "stride", cfg.stride);
    if (cfg.stride < 1) r.fail("krmin", "stride", "stride must be positive");

    r.text("evolve", "mode", cfg.mode);
    r.number("evolve", "dt", cfg.dt);
    r.number("evolve", "t_end", cfg.t_end);
    r.integer("evolve", "sample_every", cfg.sample_every);
    r.points("evolve", "points", cfg.points);
    r.numbers("evolve", "strengths", cfg.strengths);
    r.number("evolve", "delta0", cfg.delta0);
    r.number("evolve", "turnovers", cfg.turnovers);
    r.number("evolve", "drift_limit", cfg.drift_limit);

    r.integer("diagnose", "instances", cfg.instances);
    r.integer("diagnose", "samples", cfg.samples);

    const double h = 1.0 / cfg.n;
    if (cfg.margin != 0.0 && cfg.margin < 6.0 * h) r.fail("krmin", "margin", "margin must be at least 6h");

    auto require_pair_regime = [&](bool allow_single) {
        if (cfg.kappa1 * cfg.kappa2 > 0.0 || !(cfg.kappa1 > 0.0) || cfg.kappa2 > 0.0 ||
            (!allow_single && cfg.kappa2 == 0.0)) {
            r.fail("vortex", cfg.kappa1 > 0.0 ? "kappa2" : "kappa1",
                   allow_single ? "strengths must satisfy kappa1 > 0 > kappa2 (or kappa2 = 0 for a single core)"
                                : "strengths must satisfy kappa1 > 0 > kappa2");
        }
    };
    auto require_resolved = [&](const std::vector<double>& list) {
        for (const double e : list) {
            if (!(e > 0.0)) r.fail("vortex", "eps", "eps values must be positive");
            const int ne = cfg.resolution_for(e);
            if (e * ne < 8.0 - 1e-9) {
                std::ostringstream os;
                os << "eps = " << e << " is too small for n = " << ne << ": cores need eps/h >= 8 (n >= "
                   << std::ceil(8.0 / e) << ")";
                r.fail("vortex", "eps", os.str());
            }
        }
    };

    switch (command) {
        case Command::steady:
            require_pair_regime(true);
            if (cfg.eps.size() != 1) r.fail("vortex", "eps", "steady takes exactly one eps value");
            require_resolved(cfg.eps);
            break;
        case Command::sweep:
            require_pair_regime(true);
            if (cfg.eps.empty()) r.fail("vortex", "eps", "empty eps list");
            require_resolved(cfg.eps);
            break;
        case Command::krmin:
            if (!(cfg.kappa1 * cfg.kappa2 < 0.0)) {
                r.fail("vortex", "kappa2", "strengths must have opposite signs: the minimization covers kappa1 > 0 > kappa2");
            }
            break;
        case Command::evolve:
            if (cfg.mode == "pv") {
                if (!(cfg.dt > 0.0)) r.fail("evolve", "dt", "dt must be positive");
                if (!(cfg.t_end >= 0.0)) r.fail("evolve", "t_end", "t_end must be nonnegative");
                if (cfg.points.size() != cfg.strengths.size()) {
                    r.fail("evolve", "strengths", "need one strength per point");
                }
                if (cfg.points.empty() && !(cfg.kappa1 * cfg.kappa2 < 0.0)) {
                    r.fail("vortex", "kappa2", "without points the pair starts at the kr_minimize pair, which needs kappa1 > 0 > kappa2");
                }
                for (const double s : cfg.strengths) {
                    if (s == 0.0) r.fail("evolve", "strengths", "strengths must be nonzero");
                }
            } else if (cfg.mode == "pde") {
                require_pair_regime(true);
                if (cfg.eps.size() != 1) r.fail("vortex", "eps", "evolve takes exactly one eps value");
                require_resolved(cfg.eps);
                if (cfg.delta0 < 0.0 || cfg.delta0 > 0.1) r.fail("evolve", "delta0", "delta0 must lie in [0, 0.1]");
                if (!(cfg.turnovers > 0.0)) r.fail("evolve", "turnovers", "turnovers must be positive");
                if (cfg.dt < 0.0) r.fail("evolve", "dt", "dt must be nonnegative (0 picks the CFL limit)");
            } else {
                r.fail("evolve", "mode", "unknown mode '" + cfg.mode + "' (expected pv or pde)");
            }
            if (cfg.sample_every < 1) r.fail("evolve", "sample_every", "sample_every must be positive");
            break;
        case Command::diagnose:
            if (cfg.instances < 1) r.fail("diagnose", "instances", "instances must be positive");
            if (cfg.samples < 20) r.fail("diagnose", "samples", "samples must be at least 20");
            break;
    }
    return cfg;
}

RunConfig load_config(const std::string& path, Command command) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(0, 0, "cannot read config file");
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config(os.str(), command);
}

std::string format_error(const std::string& path, const ConfigError& e) {
    std::ostringstream os;
    os << path;
    if (e.line() > 0) os << ':' << e.line() << ':' << e.column();
    os << ": " << e.what();
    return os.str();
}

}  // namespace vortexlab::cli
