#include "mpirecon/forward.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "mpirecon/convolution.hpp"
#include "mpirecon/error.hpp"
#include "mpirecon/rng.hpp"

namespace mpirecon {

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Kernel samples at all grid offsets (di, dj) in [-(nx-1), nx-1] x [-(ny-1), ny-1].
struct OffsetTable {
    long mx, my;
    std::vector<SymMat2> values;

    OffsetTable(std::size_t nx, std::size_t ny, const KernelParams& params)
        : mx(static_cast<long>(nx) - 1), my(static_cast<long>(ny) - 1) {
        const double dx = 2.0 / static_cast<double>(nx);
        const double dy = 2.0 / static_cast<double>(ny);
        const double area = dx * dy;
        values.resize(static_cast<std::size_t>((2 * mx + 1) * (2 * my + 1)));
        for (long dj = -my; dj <= my; ++dj)
            for (long di = -mx; di <= mx; ++di) {
                auto k = kernel_matrix({di * dx, dj * dy}, params);
                k.a11 *= area;
                k.a12 *= area;
                k.a22 *= area;
                at(di, dj) = k;
            }
    }
    SymMat2& at(long di, long dj) {
        return values[static_cast<std::size_t>((dj + my) * (2 * mx + 1) + (di + mx))];
    }
    const SymMat2& at(long di, long dj) const {
        return values[static_cast<std::size_t>((dj + my) * (2 * mx + 1) + (di + mx))];
    }
};

}  // namespace

void ScanSeries::validate() const {
    geometry.validate();
    detail::require(signals.size() == geometry.size(), "ScanSeries: signal count mismatch");
}

MatrixField core_response_field(const ScalarField& rho, const KernelParams& params) {
    params.validate();
    detail::require(!rho.empty(), "core_response_field: empty density");
    const auto table = std::make_shared<OffsetTable>(rho.nx(), rho.ny(), params);
    std::vector<LinearConvolution::Stencil> stencils = {
        [table](long di, long dj) { return table->at(di, dj).a11; },
        [table](long di, long dj) { return table->at(di, dj).a12; },
        [table](long di, long dj) { return table->at(di, dj).a22; },
    };
    LinearConvolution conv(rho.nx(), rho.ny(), stencils);
    auto channels = conv.apply_many(rho);
    MatrixField out;
    out.a11 = std::move(channels[0]);
    out.a12 = channels[1];
    out.a21 = std::move(channels[1]);
    out.a22 = std::move(channels[2]);
    return out;
}

ScalarField trace_convolution(const ScalarField& rho, const KernelParams& params) {
    params.validate();
    const double dx = rho.dx();
    const double dy = rho.dy();
    const double area = dx * dy;
    LinearConvolution conv(rho.nx(), rho.ny(), [&](long di, long dj) {
        return area * kernel_trace({di * dx, dj * dy}, params);
    });
    return conv.apply(rho);
}

Mat2 evaluate_field(const MatrixField& field, const Vec2& p) {
    return {interpolate_bilinear(field.a11, p), interpolate_bilinear(field.a12, p),
            interpolate_bilinear(field.a21, p), interpolate_bilinear(field.a22, p)};
}

std::vector<Vec2> simulate_signal(const MatrixField& field, const ScanGeometry& geom) {
    geom.validate();
    std::vector<Vec2> s(geom.size());
    for (std::size_t l = 0; l < geom.size(); ++l)
        s[l] = evaluate_field(field, geom.positions[l]).apply(geom.velocities[l]);
    return s;
}

std::vector<Vec2> add_noise(const std::vector<Vec2>& signals, double fraction, std::uint64_t seed) {
    detail::require(fraction >= 0.0, "add_noise: fraction must be non-negative");
    if (fraction == 0.0) return signals;
    double peak = 0.0;
    for (const auto& s : signals) peak = std::max(peak, std::hypot(s[0], s[1]));
    const double eps = fraction * peak;
    SeededGenerator gen(seed);
    std::vector<Vec2> out(signals.size());
    for (std::size_t l = 0; l < signals.size(); ++l) {
        const auto n = gen.normal_pair();
        out[l] = {signals[l][0] + eps * n[0], signals[l][1] + eps * n[1]};
    }
    return out;
}

void write_series_csv(const ScanSeries& series, std::ostream& out) {
    series.validate();
    out << "# h=" << format_double(series.h) << " fraction=" << format_double(series.noise_fraction)
        << " seed=" << series.seed << '\n';
    out << "t,rx,ry,vx,vy,sx,sy\n";
    const auto& g = series.geometry;
    for (std::size_t l = 0; l < g.size(); ++l) {
        out << format_double(g.times[l]) << ',' << format_double(g.positions[l][0]) << ','
            << format_double(g.positions[l][1]) << ',' << format_double(g.velocities[l][0]) << ','
            << format_double(g.velocities[l][1]) << ',' << format_double(series.signals[l][0])
            << ',' << format_double(series.signals[l][1]) << '\n';
    }
}

void save_series_csv(const ScanSeries& series, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    write_series_csv(series, out);
    if (!out) throw IoError("failed writing " + path);
}

ScanSeries read_series_csv(std::istream& in) {
    ScanSeries s;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream meta(line.substr(1));
            std::string item;
            while (meta >> item) {
                const auto eq = item.find('=');
                if (eq == std::string::npos) continue;
                const auto key = item.substr(0, eq);
                const auto value = item.substr(eq + 1);
                try {
                    if (key == "h") s.h = std::stod(value);
                    else if (key == "fraction") s.noise_fraction = std::stod(value);
                    else if (key == "seed") s.seed = std::stoull(value);
                } catch (const std::exception&) {
                    throw IoError("series CSV: malformed metadata: " + line);
                }
            }
            continue;
        }
        if (!header) {
            if (line.rfind("t,rx,ry,vx,vy,sx,sy", 0) != 0)
                throw IoError("series CSV: unexpected header");
            header = true;
            continue;
        }
        std::istringstream row(line);
        double v[7];
        char comma = 0;
        row >> v[0];
        for (int k = 1; k < 7; ++k) row >> comma >> v[k];
        if (!row) throw IoError("series CSV: malformed row: " + line);
        s.geometry.times.push_back(v[0]);
        s.geometry.positions.push_back({v[1], v[2]});
        s.geometry.velocities.push_back({v[3], v[4]});
        s.signals.push_back({v[5], v[6]});
    }
    if (!header) throw IoError("series CSV: missing header");
    return s;
}

ScanSeries load_series_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return read_series_csv(in);
}

}  // namespace mpirecon
