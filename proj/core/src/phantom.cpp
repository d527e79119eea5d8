#include "mpirecon/phantom.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mpirecon/error.hpp"

namespace mpirecon {

namespace {

bool inside_domain(const Vec2& p, double pad = 0.0) {
    return std::abs(p[0]) + pad <= 1.0 && std::abs(p[1]) + pad <= 1.0;
}

double segment_distance_sq(const Vec2& p, const Vec2& a, const Vec2& b) {
    const double abx = b[0] - a[0];
    const double aby = b[1] - a[1];
    const double len_sq = abx * abx + aby * aby;
    double t = 0.0;
    if (len_sq > 0.0) t = std::clamp(((p[0] - a[0]) * abx + (p[1] - a[1]) * aby) / len_sq, 0.0, 1.0);
    const double dx = p[0] - (a[0] + t * abx);
    const double dy = p[1] - (a[1] + t * aby);
    return dx * dx + dy * dy;
}

bool contains(const PhantomSpec& s, const Vec2& p) {
    const double dx = p[0] - s.center[0];
    const double dy = p[1] - s.center[1];
    switch (s.kind) {
        case PhantomKind::disk: return dx * dx + dy * dy < s.radius * s.radius;
        case PhantomKind::annulus: {
            const double r2 = dx * dx + dy * dy;
            return r2 < s.radius * s.radius && r2 >= s.inner_radius * s.inner_radius;
        }
        case PhantomKind::bar: {
            const double c = std::cos(s.angle);
            const double sn = std::sin(s.angle);
            const double along = c * dx + sn * dy;
            const double across = -sn * dx + c * dy;
            return std::abs(along) < s.half_length && std::abs(across) < s.half_width;
        }
        case PhantomKind::k_stroke: {
            const double r2 = 0.25 * s.stroke_width * s.stroke_width;
            for (const auto& seg : s.strokes)
                if (segment_distance_sq(p, seg[0], seg[1]) < r2) return true;
            return false;
        }
        case PhantomKind::from_file: break;
    }
    return false;
}

void write_u16_be(std::ostream& out, std::uint16_t v) {
    const char bytes[2] = {static_cast<char>(v >> 8), static_cast<char>(v & 0xFF)};
    out.write(bytes, 2);
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Next whitespace-delimited PGM header token, skipping # comments.
std::string header_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

}  // namespace

void PhantomSpec::validate() const {
    detail::require(intensity > 0.0 && intensity <= 1.0, "PhantomSpec: intensity must be in (0,1]");
    switch (kind) {
        case PhantomKind::disk:
            detail::require(radius >= 0.0, "PhantomSpec: negative radius");
            detail::require(inside_domain(center, radius), "PhantomSpec: disk leaves the domain");
            break;
        case PhantomKind::annulus:
            detail::require(inner_radius >= 0.0 && inner_radius <= radius,
                            "PhantomSpec: annulus radii out of order");
            detail::require(inside_domain(center, radius), "PhantomSpec: annulus leaves the domain");
            break;
        case PhantomKind::bar: {
            detail::require(half_length >= 0.0 && half_width >= 0.0,
                            "PhantomSpec: negative bar extent");
            const double c = std::cos(angle);
            const double s = std::sin(angle);
            for (double a : {-1.0, 1.0})
                for (double b : {-1.0, 1.0}) {
                    const Vec2 corner{center[0] + a * half_length * c - b * half_width * s,
                                      center[1] + a * half_length * s + b * half_width * c};
                    detail::require(inside_domain(corner), "PhantomSpec: bar leaves the domain");
                }
            break;
        }
        case PhantomKind::k_stroke:
            detail::require(stroke_width >= 0.0, "PhantomSpec: negative stroke width");
            for (const auto& seg : strokes)
                for (const auto& p : seg)
                    detail::require(inside_domain(p, 0.5 * stroke_width),
                                    "PhantomSpec: stroke leaves the domain");
            break;
        case PhantomKind::from_file:
            detail::require(!path.empty(), "PhantomSpec: from_file needs a path");
            break;
    }
}

PhantomSpec PhantomSpec::disk(Vec2 center, double radius, double intensity) {
    PhantomSpec s;
    s.kind = PhantomKind::disk;
    s.name = "disk";
    s.center = center;
    s.radius = radius;
    s.intensity = intensity;
    return s;
}

PhantomSpec PhantomSpec::bar(Vec2 center, double half_length, double half_width, double angle,
                             double intensity) {
    PhantomSpec s;
    s.kind = PhantomKind::bar;
    s.name = "bar";
    s.center = center;
    s.half_length = half_length;
    s.half_width = half_width;
    s.angle = angle;
    s.intensity = intensity;
    return s;
}

PhantomSpec PhantomSpec::annulus(Vec2 center, double inner_radius, double outer_radius,
                                 double intensity) {
    PhantomSpec s;
    s.kind = PhantomKind::annulus;
    s.name = "annulus";
    s.center = center;
    s.inner_radius = inner_radius;
    s.radius = outer_radius;
    s.intensity = intensity;
    return s;
}

PhantomSpec PhantomSpec::k_stroke(Vec2 stem_bottom, Vec2 stem_top, Vec2 junction, Vec2 upper_tip,
                                  Vec2 lower_tip, double stroke_width, double intensity) {
    PhantomSpec s;
    s.kind = PhantomKind::k_stroke;
    s.name = "k_stroke";
    s.strokes = {{stem_bottom, stem_top}, {junction, upper_tip}, {junction, lower_tip}};
    s.stroke_width = stroke_width;
    s.intensity = intensity;
    return s;
}

ScalarField rasterize(const PhantomSpec& spec, std::size_t nx, std::size_t ny) {
    detail::require(nx >= 8 && ny >= 8, "rasterize: grid must be at least 8x8");
    spec.validate();
    if (spec.kind == PhantomKind::from_file) {
        ScalarField loaded = load_field(spec.path);
        if (loaded.nx() == nx && loaded.ny() == ny) return loaded;
        return resample_area(loaded, nx, ny);
    }
    ScalarField out(nx, ny);
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i)
            if (contains(spec, {cell_center(i, nx), cell_center(j, ny)})) out(i, j) = spec.intensity;
    return out;
}

std::vector<PhantomSpec> builtin_phantoms() {
    auto disk = PhantomSpec::disk({0.1, -0.05}, 0.45);
    auto bar = PhantomSpec::bar({0.0, 0.05}, 0.65, 0.12, std::numbers::pi / 6.0);
    auto ring = PhantomSpec::annulus({-0.05, 0.05}, 0.3, 0.55);
    auto k = PhantomSpec::k_stroke({-0.35, -0.65}, {-0.35, 0.65}, {-0.3, -0.05}, {0.4, 0.65},
                                   {0.45, -0.65}, 0.14);
    auto k_thin = PhantomSpec::k_stroke({-0.45, -0.7}, {-0.45, 0.7}, {-0.4, 0.1}, {0.35, 0.7},
                                        {0.5, -0.7}, 0.09);
    k_thin.name = "k_stroke_thin";
    return {disk, bar, ring, k, k_thin};
}

PhantomSpec builtin_phantom(const std::string& name) {
    for (auto& p : builtin_phantoms())
        if (p.name == name) return p;
    throw InvalidArgument("unknown built-in phantom: " + name);
}

std::string range_path_for(const std::string& pgm_path) {
    const auto slash = pgm_path.find_last_of('/');
    const auto dot = pgm_path.find_last_of('.');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
        return pgm_path.substr(0, dot) + ".range";
    return pgm_path + ".range";
}

void save_field(const ScalarField& field, const std::string& pgm_path) {
    detail::require(!field.empty(), "save_field: empty field");
    const double lo = field.min();
    const double hi = field.max();
    const double span = hi - lo;
    std::ofstream out(pgm_path, std::ios::binary);
    if (!out) throw IoError("cannot open " + pgm_path + " for writing");
    out << "P5\n" << field.nx() << ' ' << field.ny() << "\n65535\n";
    // Top image row is the largest y.
    for (std::size_t jj = field.ny(); jj-- > 0;)
        for (std::size_t i = 0; i < field.nx(); ++i) {
            double q = span > 0.0 ? std::round((field(i, jj) - lo) / span * 65535.0) : 0.0;
            write_u16_be(out, static_cast<std::uint16_t>(std::clamp(q, 0.0, 65535.0)));
        }
    if (!out) throw IoError("failed writing " + pgm_path);
    const auto rpath = range_path_for(pgm_path);
    std::ofstream range(rpath, std::ios::binary);
    if (!range) throw IoError("cannot open " + rpath + " for writing");
    range << format_double(lo) << ' ' << format_double(hi) << '\n';
    if (!range) throw IoError("failed writing " + rpath);
}

ScalarField load_field(const std::string& pgm_path) {
    std::ifstream in(pgm_path, std::ios::binary);
    if (!in) throw IoError("cannot open " + pgm_path);
    if (header_token(in) != "P5") throw IoError(pgm_path + ": not a binary PGM (P5)");
    std::size_t nx = 0, ny = 0;
    long maxval = 0;
    try {
        nx = std::stoul(header_token(in));
        ny = std::stoul(header_token(in));
        maxval = std::stol(header_token(in));
    } catch (const std::exception&) {
        throw IoError(pgm_path + ": malformed PGM header");
    }
    if (nx == 0 || ny == 0 || maxval <= 0 || maxval > 65535)
        throw IoError(pgm_path + ": malformed PGM header");
    const bool wide = maxval > 255;
    std::vector<unsigned char> raw(nx * ny * (wide ? 2 : 1));
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
        throw IoError(pgm_path + ": truncated pixel data");

    double lo = 0.0, hi = 1.0;
    std::ifstream range(range_path_for(pgm_path));
    if (range) {
        if (!(range >> lo >> hi)) throw IoError(range_path_for(pgm_path) + ": malformed range");
    }
    ScalarField out(nx, ny);
    const double scale = (hi - lo) / static_cast<double>(maxval);
    for (std::size_t row = 0; row < ny; ++row)
        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t k = row * nx + i;
            const unsigned q = wide ? (raw[2 * k] << 8 | raw[2 * k + 1]) : raw[k];
            out(i, ny - 1 - row) = lo + scale * static_cast<double>(q);
        }
    return out;
}

}  // namespace mpirecon
