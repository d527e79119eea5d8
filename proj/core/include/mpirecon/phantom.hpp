#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mpirecon/grid.hpp"

namespace mpirecon {

enum class PhantomKind { disk, bar, annulus, k_stroke, from_file };

/// Geometric description of a binary ground-truth particle distribution.
///
/// Only the fields relevant to `kind` are used:
///  - disk:     center, radius
///  - bar:      center, half_length, half_width, angle (radians)
///  - annulus:  center, inner_radius, radius
///  - k_stroke: strokes (polyline segments), stroke_width
///  - from_file: path (PGM with range sidecar)
struct PhantomSpec {
    PhantomKind kind = PhantomKind::disk;
    std::string name = "disk";
    Vec2 center{0.0, 0.0};
    double radius = 0.5;
    double inner_radius = 0.0;
    double half_length = 0.5;
    double half_width = 0.1;
    double angle = 0.0;
    std::vector<std::array<Vec2, 2>> strokes;
    double stroke_width = 0.1;
    double intensity = 1.0;
    std::string path;

    void validate() const;

    static PhantomSpec disk(Vec2 center, double radius, double intensity = 1.0);
    static PhantomSpec bar(Vec2 center, double half_length, double half_width, double angle,
                           double intensity = 1.0);
    static PhantomSpec annulus(Vec2 center, double inner_radius, double outer_radius,
                               double intensity = 1.0);
    /// Three-stroke letter k: a vertical stem plus two arms meeting at `junction`.
    static PhantomSpec k_stroke(Vec2 stem_bottom, Vec2 stem_top, Vec2 junction, Vec2 upper_tip,
                                Vec2 lower_tip, double stroke_width, double intensity = 1.0);
};

/// Binary raster: a cell takes `intensity` if its center lies inside the shape.
ScalarField rasterize(const PhantomSpec& spec, std::size_t nx, std::size_t ny);

/// The built-in evaluation suite: disk, bar, annulus and two letter-k variants.
std::vector<PhantomSpec> builtin_phantoms();

/// Looks up a built-in phantom by name (disk, bar, annulus, k_stroke, k_stroke_thin).
PhantomSpec builtin_phantom(const std::string& name);

/// Sidecar path `<stem>.range` for a `<stem>.pgm` image path.
std::string range_path_for(const std::string& pgm_path);

/// Writes a 16-bit binary PGM (P5, maxval 65535, big-endian) plus the
/// `.range` sidecar holding the physical min and max.
void save_field(const ScalarField& field, const std::string& pgm_path);

/// Reads a field written by save_field. Without a sidecar the samples are
/// mapped to [0, 1].
ScalarField load_field(const std::string& pgm_path);

}  // namespace mpirecon
