#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "helarm/errors.hpp"

namespace helarm {

// Parametric description of one trimmed-helicoid lattice segment. All
// lengths in mm, all angles in radians.
struct HelicoidDesign {
    std::string name;
    int helicoid_count = 0;     // number of helicoids per handedness
    double sector_angle = 0.0;  // angular width of the annular-sector profile
    double inner_radius = 0.0;
    double outer_radius = 0.0;
    double radial_width = 0.0;  // must equal outer_radius - inner_radius
    double axial_rise = 0.0;    // rise per helical sweep
    int layer_count = 0;        // mirrored layer pairs along the axis
};

// Quantities derived from a HelicoidDesign.
struct DerivedGeometry {
    double twist_angle = 0.0;       // rotation per sweep, pi / helicoid_count
    double mid_radius = 0.0;
    double helix_angle_inner = 0.0;
    double helix_angle_mid = 0.0;
    double helix_angle_outer = 0.0;
    double thickness_inner = 0.0;
    double thickness_mid = 0.0;
    double thickness_outer = 0.0;
    double strut_length_mid = 0.0;  // length of one sweep at the mid radius
    double segment_height = 0.0;    // 2 * axial_rise * layer_count
};

HelicoidDesign make_design(const std::string& name, int helicoid_count,
                           double sector_angle, double inner_radius,
                           double outer_radius, double axial_rise,
                           int layer_count);

// The four reference designs (N4, N4T, N6, N8).
const std::vector<HelicoidDesign>& builtin_designs();
const HelicoidDesign& builtin_design(const std::string& name);

// Throws ValidationError naming the offending field.
void validate_design(const HelicoidDesign& design);

double helix_angle(const HelicoidDesign& design, double radius);
double strut_thickness(const HelicoidDesign& design, double radius);

DerivedGeometry derive(const HelicoidDesign& design);

// Centerline of one full-height helical strut at the mid radius. Strut
// start azimuths are spaced pi/N apart; the helix rises over the full
// segment height with a total twist of +-2*pi.
std::vector<Eigen::Vector3d> strut_centerline(const HelicoidDesign& design,
                                              int strut_index, int handedness,
                                              int samples);

struct TriangleMesh {
    std::vector<Eigen::Vector3d> vertices;
    std::vector<std::array<std::int32_t, 3>> triangles;
};

struct MeshOptions {
    double plate_thickness = 4.0;  // end plate discs; 0 disables them
    int sweep_steps = 64;          // sweep subdivisions per layer
    int arc_segments = 8;          // chords per profile arc
    int plate_segments = 96;       // circle subdivisions of the end plates
};

// Swept helical wedges (4*N*M closed solids) plus optional end plates.
// Every connected component is closed, so the combined mesh is watertight
// and its signed volume is the sum of the wedge and plate volumes.
TriangleMesh generate_mesh(const HelicoidDesign& design,
                           const MeshOptions& options = {});

// Every edge shared by exactly two triangles, consistently wound.
bool is_watertight(const TriangleMesh& mesh);
double signed_volume(const TriangleMesh& mesh);

// ASCII OBJ, 1-based face indices.
void write_obj(const TriangleMesh& mesh, std::ostream& out);

// Sealed air channel wound helically inside the strut material.
struct ChannelPath {
    int channel_id = 0;
    double start_azimuth = 0.0;  // radians
    double radius = 0.0;         // centerline radius, mm
    double wrap_angle = 0.0;     // total wrap over the segment height
    double diameter = 0.0;
    std::vector<Eigen::Vector3d> points;
    double rest_length = 0.0;    // mm
    double rest_volume = 0.0;    // mm^3
};

struct ChannelOptions {
    double depth_to_wall = 1.75;  // outer surface to channel wall
    double diameter = 2.0;
    int count = 6;
    int samples = 256;
};

std::vector<ChannelPath> route_channels(const HelicoidDesign& design,
                                        const ChannelOptions& options = {});

// Mid-height azimuth of a channel, used as its bending-sensitivity
// direction.
double channel_mid_azimuth(const ChannelPath& channel);

} // namespace helarm
