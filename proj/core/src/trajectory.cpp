#include "mpirecon/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "mpirecon/error.hpp"

namespace mpirecon {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace

void LissajousSpec::validate() const {
    detail::require(freq_x > 0.0 && freq_y > 0.0, "LissajousSpec: frequencies must be positive");
    detail::require(freq_x != freq_y, "LissajousSpec: equal frequencies do not fill the domain");
}

Vec2 lissajous_position(const LissajousSpec& spec, double t) {
    return {std::sin(kTwoPi * spec.freq_x * t + spec.phase_x),
            std::sin(kTwoPi * spec.freq_y * t + spec.phase_y)};
}

Vec2 lissajous_velocity(const LissajousSpec& spec, double t) {
    return {kTwoPi * spec.freq_x * std::cos(kTwoPi * spec.freq_x * t + spec.phase_x),
            kTwoPi * spec.freq_y * std::cos(kTwoPi * spec.freq_y * t + spec.phase_y)};
}

std::vector<double> sample_schedule(std::size_t count) {
    detail::require(count >= 1, "sample_schedule: need at least one sample");
    std::vector<double> t(count);
    for (std::size_t l = 0; l < count; ++l)
        t[l] = static_cast<double>(l) / static_cast<double>(count);
    return t;
}

void ScanGeometry::validate() const {
    detail::require(positions.size() == times.size() && velocities.size() == times.size(),
                    "ScanGeometry: inconsistent lengths");
    for (const auto& p : positions)
        detail::require(std::abs(p[0]) <= 1.0 && std::abs(p[1]) <= 1.0,
                        "ScanGeometry: position outside [-1,1]^2");
}

ScanGeometry make_lissajous_scan(const LissajousSpec& spec, std::size_t count) {
    spec.validate();
    ScanGeometry g;
    g.times = sample_schedule(count);
    g.positions.reserve(count);
    g.velocities.reserve(count);
    for (double t : g.times) {
        auto p = lissajous_position(spec, t);
        // sin can round a hair outside [-1,1]
        p[0] = std::clamp(p[0], -1.0, 1.0);
        p[1] = std::clamp(p[1], -1.0, 1.0);
        g.positions.push_back(p);
        g.velocities.push_back(lissajous_velocity(spec, t));
    }
    return g;
}

namespace {
Vec2 rotate_quarter(const Vec2& v, int turns) {
    switch (turns) {
        case 0: return v;
        case 1: return {-v[1], v[0]};
        case 2: return {-v[0], -v[1]};
        default: return {v[1], -v[0]};
    }
}
}  // namespace

ScanGeometry rotate_scan(const ScanGeometry& geom, int quarter_turns) {
    detail::require(quarter_turns >= 0 && quarter_turns <= 3,
                    "rotate_scan: quarter_turns must be in {0,1,2,3}");
    ScanGeometry out = geom;
    for (auto& p : out.positions) p = rotate_quarter(p, quarter_turns);
    for (auto& v : out.velocities) v = rotate_quarter(v, quarter_turns);
    return out;
}

ScanGeometry merge_scans(const ScanGeometry& a, const ScanGeometry& b) {
    detail::require(!a.empty() && !b.empty(), "merge_scans: both scans must be non-empty");
    ScanGeometry out = a;
    out.times.insert(out.times.end(), b.times.begin(), b.times.end());
    out.positions.insert(out.positions.end(), b.positions.begin(), b.positions.end());
    out.velocities.insert(out.velocities.end(), b.velocities.begin(), b.velocities.end());
    return out;
}

std::size_t occupied_cells(const ScanGeometry& geom, std::size_t n) {
    std::set<std::pair<std::size_t, std::size_t>> cells;
    const auto index = [n](double x) {
        auto c = static_cast<long>(std::floor((x + 1.0) * static_cast<double>(n) / 2.0));
        return static_cast<std::size_t>(std::clamp(c, 0L, static_cast<long>(n) - 1));
    };
    for (const auto& p : geom.positions) cells.emplace(index(p[0]), index(p[1]));
    return cells.size();
}

void write_geometry_csv(const ScanGeometry& geom, std::ostream& out) {
    out << "t,rx,ry,vx,vy\n";
    for (std::size_t l = 0; l < geom.size(); ++l) {
        out << format_double(geom.times[l]) << ',' << format_double(geom.positions[l][0]) << ','
            << format_double(geom.positions[l][1]) << ',' << format_double(geom.velocities[l][0])
            << ',' << format_double(geom.velocities[l][1]) << '\n';
    }
}

void save_geometry_csv(const ScanGeometry& geom, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    write_geometry_csv(geom, out);
    if (!out) throw IoError("failed writing " + path);
}

ScanGeometry read_geometry_csv(std::istream& in) {
    ScanGeometry g;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line.rfind("t,rx,ry,vx,vy", 0) != 0) throw IoError("scan CSV: unexpected header");
            header = true;
            continue;
        }
        std::istringstream row(line);
        double v[5];
        char comma = 0;
        row >> v[0];
        for (int k = 1; k < 5; ++k) row >> comma >> v[k];
        if (!row) throw IoError("scan CSV: malformed row: " + line);
        g.times.push_back(v[0]);
        g.positions.push_back({v[1], v[2]});
        g.velocities.push_back({v[3], v[4]});
    }
    if (!header) throw IoError("scan CSV: missing header");
    return g;
}

}  // namespace mpirecon
