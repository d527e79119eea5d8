#include "mpirecon/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>

#include "mpirecon/error.hpp"

namespace mpirecon {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw InvalidArgument("config: " + key + " expects a number, got '" + v + "'");
    }
}

long long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw InvalidArgument("config: " + key + " expects an integer, got '" + v + "'");
    }
}

std::size_t parse_size(const std::string& key, const std::string& v) {
    const auto i = parse_int(key, v);
    if (i < 0) throw InvalidArgument("config: " + key + " must be non-negative");
    return static_cast<std::size_t>(i);
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw InvalidArgument("config: " + key + " expects true or false, got '" + v + "'");
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

struct Entry {
    std::string key;
    std::function<void(PipelineConfig&, const std::string&)> set;
    std::function<std::string(const PipelineConfig&)> get;
};

#define MPIRECON_DOUBLE(KEY, FIELD)                                                       \
    Entry {                                                                                \
        KEY, [](PipelineConfig& c, const std::string& v) { c.FIELD = parse_double(KEY, v); }, \
            [](const PipelineConfig& c) { return fmt(c.FIELD); }                           \
    }
#define MPIRECON_SIZE(KEY, FIELD)                                                       \
    Entry {                                                                              \
        KEY, [](PipelineConfig& c, const std::string& v) { c.FIELD = parse_size(KEY, v); }, \
            [](const PipelineConfig& c) { return std::to_string(c.FIELD); }              \
    }
#define MPIRECON_INT(KEY, FIELD)                                                    \
    Entry {                                                                          \
        KEY,                                                                         \
            [](PipelineConfig& c, const std::string& v) {                            \
                c.FIELD = static_cast<int>(parse_int(KEY, v));                       \
            },                                                                       \
            [](const PipelineConfig& c) { return std::to_string(c.FIELD); }          \
    }
#define MPIRECON_BOOL(KEY, FIELD)                                                       \
    Entry {                                                                              \
        KEY, [](PipelineConfig& c, const std::string& v) { c.FIELD = parse_bool(KEY, v); }, \
            [](const PipelineConfig& c) { return fmt_bool(c.FIELD); }                    \
    }

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table = {
        MPIRECON_DOUBLE("kernel.h", kernel.h),
        MPIRECON_DOUBLE("kernel.series_threshold", kernel.series_threshold),
        MPIRECON_DOUBLE("trajectory.freq_x", lissajous.freq_x),
        MPIRECON_DOUBLE("trajectory.freq_y", lissajous.freq_y),
        MPIRECON_DOUBLE("trajectory.phase_x", lissajous.phase_x),
        MPIRECON_DOUBLE("trajectory.phase_y", lissajous.phase_y),
        MPIRECON_SIZE("trajectory.samples", samples),
        MPIRECON_BOOL("trajectory.merge_rotated", merge_rotated),
        MPIRECON_SIZE("grids.fine_nx", fine_nx),
        MPIRECON_SIZE("grids.recon_nx", recon_nx),
        MPIRECON_SIZE("grids.coeff_n", coeff_n),
        MPIRECON_INT("core.order", order),
        MPIRECON_DOUBLE("core.lambda", lambda),
        MPIRECON_DOUBLE("core.tol", core_tol),
        MPIRECON_INT("core.max_iter", core_max_iter),
        MPIRECON_DOUBLE("core.ridge", ridge),
        Entry{"core.solver",
              [](PipelineConfig& c, const std::string& v) {
                  if (v == "cg") c.core_solver = CoreSolverKind::cg;
                  else if (v == "direct") c.core_solver = CoreSolverKind::direct;
                  else throw InvalidArgument("config: core.solver must be cg or direct");
              },
              [](const PipelineConfig& c) {
                  return std::string(c.core_solver == CoreSolverKind::cg ? "cg" : "direct");
              }},
        Entry{"deconv.mode",
              [](PipelineConfig& c, const std::string& v) {
                  if (v == "hqs") c.deconv_mode = DeconvMode::hqs;
                  else if (v == "quadratic") c.deconv_mode = DeconvMode::quadratic;
                  else throw InvalidArgument("config: deconv.mode must be hqs or quadratic");
              },
              [](const PipelineConfig& c) {
                  return std::string(c.deconv_mode == DeconvMode::hqs ? "hqs" : "quadratic");
              }},
        MPIRECON_DOUBLE("deconv.mu", mu),
        MPIRECON_DOUBLE("deconv.nu0", nu0),
        MPIRECON_INT("deconv.iters", deconv_iters),
        Entry{"deconv.denoiser",
              [](PipelineConfig& c, const std::string& v) {
                  if (v == "gaussian_blur") c.denoiser.kind = DenoiserKind::gaussian_blur;
                  else if (v == "identity") c.denoiser.kind = DenoiserKind::identity;
                  else if (v == "external") c.denoiser.kind = DenoiserKind::external;
                  else
                      throw InvalidArgument(
                          "config: deconv.denoiser must be gaussian_blur, identity or external");
              },
              [](const PipelineConfig& c) {
                  switch (c.denoiser.kind) {
                  case DenoiserKind::gaussian_blur: return std::string("gaussian_blur");
                  case DenoiserKind::identity: return std::string("identity");
                  case DenoiserKind::external: return std::string("external");
                  }
                  return std::string();
              }},
        MPIRECON_DOUBLE("deconv.blur_factor", denoiser.blur_factor),
        Entry{"deconv.command", [](PipelineConfig& c, const std::string& v) { c.denoiser.command = v; },
              [](const PipelineConfig& c) { return c.denoiser.command; }},
        Entry{"deconv.exchange_dir",
              [](PipelineConfig& c, const std::string& v) { c.denoiser.exchange_dir = v; },
              [](const PipelineConfig& c) { return c.denoiser.exchange_dir; }},
        Entry{"deconv.timeout_ms",
              [](PipelineConfig& c, const std::string& v) {
                  c.denoiser.timeout = std::chrono::milliseconds(parse_int("deconv.timeout_ms", v));
              },
              [](const PipelineConfig& c) { return std::to_string(c.denoiser.timeout.count()); }},
        MPIRECON_BOOL("deconv.clamp_nonneg", clamp_nonneg),
        MPIRECON_DOUBLE("noise.fraction", noise_fraction),
        Entry{"noise.seed",
              [](PipelineConfig& c, const std::string& v) {
                  try {
                      std::size_t pos = 0;
                      c.seed = std::stoull(v, &pos);
                      if (pos != v.size() || v.front() == '-') throw std::invalid_argument(v);
                  } catch (const std::exception&) {
                      throw InvalidArgument("config: noise.seed expects an unsigned integer");
                  }
              },
              [](const PipelineConfig& c) { return std::to_string(c.seed); }},
        Entry{"phantom.name", [](PipelineConfig& c, const std::string& v) { c.phantom = v; },
              [](const PipelineConfig& c) { return c.phantom; }},
    };
    return table;
}

#undef MPIRECON_DOUBLE
#undef MPIRECON_SIZE
#undef MPIRECON_INT
#undef MPIRECON_BOOL

const Entry& find_entry(const std::string& key) {
    for (const auto& e : entries())
        if (e.key == key) return e;
    throw InvalidArgument("config: unknown key '" + key + "'");
}

}  // namespace

void PipelineConfig::validate() const {
    kernel.validate();
    lissajous.validate();
    detail::require(samples >= 1, "config: trajectory.samples must be positive");
    detail::require(fine_nx >= 8 && recon_nx >= 8, "config: grids must be at least 8x8");
    detail::require(recon_nx <= fine_nx, "config: reconstruction grid must not exceed the fine grid");
    detail::require(coeff_n >= 1, "config: grids.coeff_n must be positive");
    detail::require(order == 1 || order == 2, "config: core.order must be 1 or 2");
    detail::require(std::isfinite(lambda) && lambda > 0.0, "config: core.lambda must be positive");
    detail::require(core_tol > 0.0 && core_max_iter > 0, "config: invalid core solver settings");
    detail::require(ridge >= 0.0, "config: core.ridge must be non-negative");
    detail::require(std::isfinite(mu) && mu > 0.0, "config: deconv.mu must be positive");
    detail::require(std::isfinite(nu0) && nu0 > 0.0, "config: deconv.nu0 must be positive");
    detail::require(deconv_iters >= 1, "config: deconv.iters must be at least 1");
    detail::require(denoiser.blur_factor >= 0.0, "config: deconv.blur_factor must be non-negative");
    detail::require(denoiser.timeout.count() > 0, "config: deconv.timeout_ms must be positive");
    detail::require(denoiser.kind != DenoiserKind::external || !denoiser.command.empty(),
                    "config: external denoiser needs deconv.command");
    detail::require(noise_fraction >= 0.0 && std::isfinite(noise_fraction),
                    "config: noise.fraction must be non-negative");
    detail::require(!phantom.empty(), "config: phantom.name must not be empty");
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
    find_entry(key).set(*this, trim(value));
}

std::string PipelineConfig::get(const std::string& key) const { return find_entry(key).get(*this); }

std::vector<std::string> PipelineConfig::keys() {
    std::vector<std::string> out;
    for (const auto& e : entries()) out.push_back(e.key);
    return out;
}

std::vector<std::string> PipelineConfig::preset_names() {
    return {"exp1_order1", "exp1_order2", "exp2_order1", "exp2_order2"};
}

PipelineConfig PipelineConfig::preset(const std::string& name) {
    PipelineConfig c;
    if (name == "exp1_order1") {
        c.order = 1;
        c.lambda = 0.08;
        c.mu = 0.05;
    } else if (name == "exp1_order2") {
        c.order = 2;
        c.lambda = 0.01;
        c.mu = 0.01;
    } else if (name == "exp2_order1") {
        c.merge_rotated = true;
        c.order = 1;
        c.lambda = 1.0;
        c.mu = 0.05;
    } else if (name == "exp2_order2") {
        c.merge_rotated = true;
        c.order = 2;
        c.lambda = 0.004;
        c.mu = 0.01;
    } else {
        throw InvalidArgument("unknown preset '" + name + "'");
    }
    return c;
}

void apply_config_text(PipelineConfig& config, std::istream& in) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key=value");
        config.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    }
}

PipelineConfig load_config(const std::string& path, PipelineConfig base) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    apply_config_text(base, in);
    return base;
}

void write_config(const PipelineConfig& config, std::ostream& out) {
    for (const auto& e : entries()) out << e.key << '=' << e.get(config) << '\n';
}

}  // namespace mpirecon
