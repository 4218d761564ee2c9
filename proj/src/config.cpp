#include "helivort/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "helivort/error.hpp"
#include "helivort/format.hpp"

namespace helivort {

namespace {

std::string trim(const std::string &s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

struct Parser {
    std::string origin;
    int line = 0;

    [[noreturn]] void fail(const std::string &what) const {
        throw ConfigError(origin + ":" + std::to_string(line) + ": " + what);
    }

    double real(const std::string &key, const std::string &text) const {
        double v = 0.0;
        const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
        if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
            fail("'" + key + "' expects a number, got '" + text + "'");
        }
        return v;
    }

    long long integer(const std::string &key, const std::string &text) const {
        long long v = 0;
        const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
        if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
            fail("'" + key + "' expects an integer, got '" + text + "'");
        }
        return v;
    }
};

struct PendingBlob {
    BlobSpec spec{{0.0, 0.0}, 0.0, 1.0, 2000};
    std::set<std::string> seen;
    int line = 0;
};

}  // namespace

RunConfig parse_config(std::istream &in, const std::string &origin) {
    RunConfig out;
    SimConfig &cfg = out.sim;
    Parser p{origin};
    std::set<std::string> top_seen;
    std::vector<PendingBlob> blobs;

    for (std::string raw; std::getline(in, raw);) {
        ++p.line;
        const std::string text = trim(raw.substr(0, raw.find('#')));
        if (text.empty()) continue;
        if (text.front() == '[') {
            if (text != "[blob]") p.fail("unknown section " + text + " (only [blob] is allowed)");
            blobs.push_back({});
            blobs.back().line = p.line;
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) p.fail("expected 'key = value', got '" + text + "'");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (value.empty()) p.fail("'" + key + "' has no value");

        if (!blobs.empty()) {
            PendingBlob &b = blobs.back();
            if (!b.seen.insert(key).second) p.fail("duplicate key '" + key + "' in [blob]");
            if (key == "center_x") b.spec.center.x = p.real(key, value);
            else if (key == "center_y") b.spec.center.y = p.real(key, value);
            else if (key == "radius") b.spec.radius = p.real(key, value);
            else if (key == "gamma") b.spec.circulation = p.real(key, value);
            else if (key == "particles") b.spec.particles = static_cast<int>(p.integer(key, value));
            else p.fail("unknown [blob] key '" + key + "'");
            continue;
        }

        if (!top_seen.insert(key).second) p.fail("duplicate key '" + key + "'");
        if (key == "h") cfg.h = p.real(key, value);
        else if (key == "r_u") cfg.r_u = p.real(key, value);
        else if (key == "eps") cfg.eps = p.real(key, value);
        else if (key == "dt") cfg.dt = p.real(key, value);
        else if (key == "t_final") cfg.t_final = p.real(key, value);
        else if (key == "backend") {
            try {
                cfg.backend = parse_backend(value);
            } catch (const ConfigError &e) {
                p.fail(e.what());
            }
        } else if (key == "grid_n") cfg.grid_n = static_cast<int>(p.integer(key, value));
        else if (key == "delta") cfg.delta = p.real(key, value);
        else if (key == "eta0") cfg.eta0 = p.real(key, value);
        else if (key == "cadence") cfg.cadence = static_cast<int>(p.integer(key, value));
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(p.integer(key, value));
        else if (key == "jitter") cfg.jitter = p.real(key, value);
        else if (key == "snapshot_every") out.snapshot_every = static_cast<int>(p.integer(key, value));
        else p.fail("unknown key '" + key + "'");
    }

    for (PendingBlob &b : blobs) {
        p.line = b.line;
        if (!b.seen.contains("center_x") || !b.seen.contains("center_y")) {
            p.fail("[blob] needs center_x and center_y");
        }
        if (!b.seen.contains("radius")) {
            if (cfg.eps == 0.0) p.fail("[blob] has no radius and no top-level eps is set");
            b.spec.radius = cfg.eps;
        }
        cfg.blobs.push_back(b.spec);
    }
    if (out.snapshot_every < 0) throw ConfigError(origin + ": snapshot_every must be >= 0");
    return out;
}

RunConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    return parse_config(in, path);
}

std::string format_config(const RunConfig &rc) {
    const SimConfig &c = rc.sim;
    std::ostringstream os;
    os << "h = " << shortest(c.h) << "\n"
       << "r_u = " << shortest(c.r_u) << "\n"
       << "eps = " << shortest(c.eps) << "\n"
       << "dt = " << shortest(c.dt) << "\n"
       << "t_final = " << shortest(c.t_final) << "\n"
       << "backend = " << to_string(c.backend) << "\n"
       << "grid_n = " << c.grid_n << "\n"
       << "delta = " << shortest(c.delta) << "\n"
       << "eta0 = " << shortest(c.eta0) << "\n"
       << "cadence = " << c.cadence << "\n"
       << "seed = " << c.seed << "\n"
       << "jitter = " << shortest(c.jitter) << "\n"
       << "snapshot_every = " << rc.snapshot_every << "\n";
    for (const BlobSpec &b : c.blobs) {
        os << "\n[blob]\n"
           << "center_x = " << shortest(b.center.x) << "\n"
           << "center_y = " << shortest(b.center.y) << "\n"
           << "radius = " << shortest(b.radius) << "\n"
           << "gamma = " << shortest(b.circulation) << "\n"
           << "particles = " << b.particles << "\n";
    }
    return os.str();
}

void override_eps(SimConfig &cfg, double eps) {
    cfg.eps = eps;
    for (BlobSpec &b : cfg.blobs) b.radius = eps;
}

}  // namespace helivort
