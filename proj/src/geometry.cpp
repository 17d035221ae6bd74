#include "helarm/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include <Eigen/Geometry>

namespace helarm {

namespace {

constexpr double kPi = std::numbers::pi;

double twist_angle_of(const HelicoidDesign& d) {
    return kPi / static_cast<double>(d.helicoid_count);
}

} // namespace

HelicoidDesign make_design(const std::string& name, int helicoid_count,
                           double sector_angle, double inner_radius,
                           double outer_radius, double axial_rise,
                           int layer_count) {
    HelicoidDesign d;
    d.name = name;
    d.helicoid_count = helicoid_count;
    d.sector_angle = sector_angle;
    d.inner_radius = inner_radius;
    d.outer_radius = outer_radius;
    d.radial_width = outer_radius - inner_radius;
    d.axial_rise = axial_rise;
    d.layer_count = layer_count;
    validate_design(d);
    return d;
}

const std::vector<HelicoidDesign>& builtin_designs() {
    static const std::vector<HelicoidDesign> designs = {
        make_design("N4", 4, 18.0 * kPi / 180.0, 18.0, 30.0, 9.0, 4),
        make_design("N4T", 4, 24.0 * kPi / 180.0, 18.0, 30.0, 9.0, 4),
        make_design("N6", 6, 12.0 * kPi / 180.0, 18.0, 30.0, 9.0, 6),
        make_design("N8", 8, 9.0 * kPi / 180.0, 18.0, 30.0, 9.0, 8),
    };
    return designs;
}

const HelicoidDesign& builtin_design(const std::string& name) {
    for (const auto& d : builtin_designs()) {
        if (d.name == name) return d;
    }
    throw ValidationError("unknown design name: " + name);
}

void validate_design(const HelicoidDesign& design) {
    if (design.helicoid_count < 1)
        throw ValidationError("helicoid_count must be a positive integer");
    if (design.layer_count < 1)
        throw ValidationError("layer_count must be a positive integer");
    if (design.inner_radius <= 0.0)
        throw ValidationError("inner_radius must be positive");
    if (design.outer_radius <= design.inner_radius)
        throw ValidationError("outer_radius must exceed inner_radius");
    if (design.sector_angle <= 0.0)
        throw ValidationError("sector_angle must be positive");
    if (design.axial_rise <= 0.0)
        throw ValidationError("axial_rise must be positive");
    const double expected_width = design.outer_radius - design.inner_radius;
    if (std::abs(design.radial_width - expected_width) >
        1e-9 * std::max(1.0, design.outer_radius))
        throw ValidationError(
            "radial_width must equal outer_radius - inner_radius");
}

double helix_angle(const HelicoidDesign& design, double radius) {
    return std::atan2(design.axial_rise, radius * twist_angle_of(design));
}

double strut_thickness(const HelicoidDesign& design, double radius) {
    const double phi = twist_angle_of(design);
    const double h = design.axial_rise;
    return radius * design.sector_angle * h /
           std::sqrt(h * h + radius * phi * (radius * phi));
}

DerivedGeometry derive(const HelicoidDesign& design) {
    validate_design(design);
    DerivedGeometry g;
    g.twist_angle = twist_angle_of(design);
    g.mid_radius = 0.5 * (design.inner_radius + design.outer_radius);
    g.helix_angle_inner = helix_angle(design, design.inner_radius);
    g.helix_angle_mid = helix_angle(design, g.mid_radius);
    g.helix_angle_outer = helix_angle(design, design.outer_radius);
    g.thickness_inner = strut_thickness(design, design.inner_radius);
    g.thickness_mid = strut_thickness(design, g.mid_radius);
    g.thickness_outer = strut_thickness(design, design.outer_radius);
    const double h = design.axial_rise;
    const double rm_phi = g.mid_radius * g.twist_angle;
    g.strut_length_mid = std::sqrt(h * h + rm_phi * rm_phi);
    g.segment_height = 2.0 * h * static_cast<double>(design.layer_count);
    return g;
}

std::vector<Eigen::Vector3d> strut_centerline(const HelicoidDesign& design,
                                              int strut_index, int handedness,
                                              int samples) {
    validate_design(design);
    if (strut_index < 0 || strut_index >= 2 * design.helicoid_count)
        throw ValidationError("strut_index out of range");
    if (samples < 2) throw ValidationError("samples must be at least 2");
    if (handedness != 1 && handedness != -1)
        throw ValidationError("handedness must be +1 or -1");

    const DerivedGeometry g = derive(design);
    const double start =
        static_cast<double>(strut_index) * kPi / design.helicoid_count;
    std::vector<Eigen::Vector3d> points;
    points.reserve(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        const double s = static_cast<double>(i) / (samples - 1);
        const double az = start + handedness * 2.0 * kPi * s;
        points.emplace_back(g.mid_radius * std::cos(az),
                            g.mid_radius * std::sin(az),
                            g.segment_height * s);
    }
    return points;
}

namespace {

// Builds one closed component into `mesh` from rings of equal vertex count.
// `loop` holds directed boundary-edge index pairs of the ring polygon; caps
// are supplied by the caller as triangle index triples into ring 0 / ring
// last. Orientation is fixed afterwards by the signed-volume check.
struct ComponentBuilder {
    TriangleMesh& mesh;
    std::int32_t base;
    std::size_t tri_start;

    explicit ComponentBuilder(TriangleMesh& m)
        : mesh(m),
          base(static_cast<std::int32_t>(m.vertices.size())),
          tri_start(m.triangles.size()) {}

    void add_triangle(std::int32_t a, std::int32_t b, std::int32_t c) {
        mesh.triangles.push_back({base + a, base + b, base + c});
    }

    // Flip the component if its signed volume came out negative.
    void orient_outward() {
        double vol = 0.0;
        for (std::size_t i = tri_start; i < mesh.triangles.size(); ++i) {
            const auto& t = mesh.triangles[i];
            const Eigen::Vector3d& a = mesh.vertices[t[0]];
            const Eigen::Vector3d& b = mesh.vertices[t[1]];
            const Eigen::Vector3d& c = mesh.vertices[t[2]];
            vol += a.dot(b.cross(c));
        }
        if (vol < 0.0) {
            for (std::size_t i = tri_start; i < mesh.triangles.size(); ++i)
                std::swap(mesh.triangles[i][1], mesh.triangles[i][2]);
        }
    }
};

// One helical wedge: the annular-sector profile screw-swept over a single
// layer (rise h, twist +-phi). Emitted as a closed solid.
void append_wedge(TriangleMesh& mesh, const HelicoidDesign& d,
                  double center_azimuth, int direction, double z0,
                  const MeshOptions& opt) {
    const double phi = kPi / d.helicoid_count;
    const double h = d.axial_rise;
    const int steps = opt.sweep_steps;
    const int m = opt.arc_segments;
    const int ring_size = 2 * (m + 1);

    ComponentBuilder comp(mesh);

    for (int k = 0; k <= steps; ++k) {
        const double s = static_cast<double>(k) / steps;
        const double az = center_azimuth + direction * phi * s;
        const double z = z0 + h * s;
        for (int j = 0; j <= m; ++j) {
            const double a = az - 0.5 * d.sector_angle +
                             d.sector_angle * static_cast<double>(j) / m;
            comp.mesh.vertices.emplace_back(d.inner_radius * std::cos(a),
                                            d.inner_radius * std::sin(a), z);
        }
        for (int j = 0; j <= m; ++j) {
            const double a = az - 0.5 * d.sector_angle +
                             d.sector_angle * static_cast<double>(j) / m;
            comp.mesh.vertices.emplace_back(d.outer_radius * std::cos(a),
                                            d.outer_radius * std::sin(a), z);
        }
    }

    const auto inner = [&](int ring, int j) {
        return static_cast<std::int32_t>(ring * ring_size + j);
    };
    const auto outer = [&](int ring, int j) {
        return static_cast<std::int32_t>(ring * ring_size + (m + 1) + j);
    };

    // Directed boundary loop of the profile polygon: inner arc forward,
    // radial edge out, outer arc backward, radial edge in.
    std::vector<std::pair<int, int>> loop;
    for (int j = 0; j < m; ++j) loop.emplace_back(inner(0, j), inner(0, j + 1));
    loop.emplace_back(inner(0, m), outer(0, m));
    for (int j = m; j > 0; --j) loop.emplace_back(outer(0, j), outer(0, j - 1));
    loop.emplace_back(outer(0, 0), inner(0, 0));

    const int stride = ring_size;
    for (int k = 0; k < steps; ++k) {
        for (const auto& [u, v] : loop) {
            const std::int32_t u0 = u + k * stride;
            const std::int32_t v0 = v + k * stride;
            const std::int32_t u1 = u + (k + 1) * stride;
            const std::int32_t v1 = v + (k + 1) * stride;
            comp.add_triangle(u0, v0, v1);
            comp.add_triangle(u0, v1, u1);
        }
    }

    // Caps: quad strip between the inner and outer arcs. Bottom winding is
    // the reverse of the top so boundary edges pair with the side walls.
    for (int j = 0; j < m; ++j) {
        comp.add_triangle(inner(0, j), outer(0, j), outer(0, j + 1));
        comp.add_triangle(inner(0, j), outer(0, j + 1), inner(0, j + 1));
        comp.add_triangle(inner(steps, j), inner(steps, j + 1),
                          outer(steps, j + 1));
        comp.add_triangle(inner(steps, j), outer(steps, j + 1),
                          outer(steps, j));
    }

    comp.orient_outward();
}

void append_disc(TriangleMesh& mesh, double radius, double z0, double z1,
                 int segments) {
    ComponentBuilder comp(mesh);
    for (int k = 0; k < 2; ++k) {
        const double z = (k == 0) ? z0 : z1;
        for (int j = 0; j < segments; ++j) {
            const double a = 2.0 * kPi * j / segments;
            comp.mesh.vertices.emplace_back(radius * std::cos(a),
                                            radius * std::sin(a), z);
        }
    }
    const std::int32_t c0 = static_cast<std::int32_t>(2 * segments);
    const std::int32_t c1 = c0 + 1;
    comp.mesh.vertices.emplace_back(0.0, 0.0, z0);
    comp.mesh.vertices.emplace_back(0.0, 0.0, z1);

    for (int j = 0; j < segments; ++j) {
        const std::int32_t a = j;
        const std::int32_t b = (j + 1) % segments;
        comp.add_triangle(c0, b, a);
        comp.add_triangle(c1, segments + a, segments + b);
        comp.add_triangle(a, b, segments + b);
        comp.add_triangle(a, segments + b, segments + a);
    }
    comp.orient_outward();
}

} // namespace

TriangleMesh generate_mesh(const HelicoidDesign& design,
                           const MeshOptions& options) {
    validate_design(design);
    if (design.sector_angle * design.helicoid_count > kPi)
        throw ValidationError(
            "overlapping wedges: sector_angle * helicoid_count exceeds pi");
    if (options.sweep_steps < 1 || options.arc_segments < 1 ||
        options.plate_segments < 3)
        throw ValidationError("mesh subdivision counts out of range");

    const int n = design.helicoid_count;
    const int layers = 2 * design.layer_count;
    const double phi = kPi / n;
    const double h = design.axial_rise;

    TriangleMesh mesh;
    // Layer k holds N right-handed and N left-handed wedges; each wedge
    // continues the strut helix of the layer below, so consecutive layers
    // are the axially mirrored images of each other.
    for (int k = 0; k < layers; ++k) {
        const double z0 = h * k;
        for (int i = 0; i < n; ++i) {
            const double right = 2.0 * kPi * i / n + phi * k;
            const double left = (2.0 * i + 1.0) * kPi / n - phi * k;
            append_wedge(mesh, design, right, +1, z0, options);
            append_wedge(mesh, design, left, -1, z0, options);
        }
    }

    if (options.plate_thickness > 0.0) {
        const double height = 2.0 * h * design.layer_count;
        append_disc(mesh, design.outer_radius, -options.plate_thickness, 0.0,
                    options.plate_segments);
        append_disc(mesh, design.outer_radius, height,
                    height + options.plate_thickness, options.plate_segments);
    }
    return mesh;
}

bool is_watertight(const TriangleMesh& mesh) {
    std::unordered_set<std::uint64_t> directed;
    directed.reserve(mesh.triangles.size() * 3);
    const auto key = [](std::int32_t a, std::int32_t b) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a))
                << 32) |
               static_cast<std::uint32_t>(b);
    };
    for (const auto& t : mesh.triangles) {
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) return false;
        for (int e = 0; e < 3; ++e) {
            const std::int32_t a = t[e];
            const std::int32_t b = t[(e + 1) % 3];
            if (!directed.insert(key(a, b)).second) return false;
        }
    }
    for (const std::uint64_t k : directed) {
        const std::uint64_t rev = (k << 32) | (k >> 32);
        if (directed.find(rev) == directed.end()) return false;
    }
    return true;
}

double signed_volume(const TriangleMesh& mesh) {
    double six_vol = 0.0;
    for (const auto& t : mesh.triangles) {
        const Eigen::Vector3d& a = mesh.vertices[t[0]];
        const Eigen::Vector3d& b = mesh.vertices[t[1]];
        const Eigen::Vector3d& c = mesh.vertices[t[2]];
        six_vol += a.dot(b.cross(c));
    }
    return six_vol / 6.0;
}

void write_obj(const TriangleMesh& mesh, std::ostream& out) {
    char line[128];
    for (const auto& v : mesh.vertices) {
        std::snprintf(line, sizeof(line), "v %.9g %.9g %.9g\n", v.x(), v.y(),
                      v.z());
        out << line;
    }
    for (const auto& t : mesh.triangles) {
        std::snprintf(line, sizeof(line), "f %d %d %d\n", t[0] + 1, t[1] + 1,
                      t[2] + 1);
        out << line;
    }
}

std::vector<ChannelPath> route_channels(const HelicoidDesign& design,
                                        const ChannelOptions& options) {
    validate_design(design);
    if (options.count < 0) throw ValidationError("channel count must be >= 0");
    if (options.count == 0) return {};
    if (options.diameter <= 0.0)
        throw ValidationError("channel diameter must be positive");
    if (options.samples < 2)
        throw ValidationError("channel samples must be at least 2");

    const double inner_wall =
        design.outer_radius - options.depth_to_wall - options.diameter;
    if (inner_wall <= design.inner_radius ||
        options.depth_to_wall <= 0.0)
        throw ValidationError("channel radius outside strut material");

    const double radius =
        design.outer_radius - options.depth_to_wall - 0.5 * options.diameter;
    const double height =
        2.0 * design.axial_rise * static_cast<double>(design.layer_count);
    const double wrap = 2.0 * kPi;

    std::vector<ChannelPath> channels;
    channels.reserve(static_cast<std::size_t>(options.count));
    for (int c = 0; c < options.count; ++c) {
        ChannelPath ch;
        ch.channel_id = c;
        ch.start_azimuth = 2.0 * kPi * c / options.count;
        ch.radius = radius;
        ch.wrap_angle = wrap;
        ch.diameter = options.diameter;
        ch.rest_length =
            std::sqrt(height * height + radius * wrap * (radius * wrap));
        ch.rest_volume =
            kPi * 0.25 * options.diameter * options.diameter * ch.rest_length;
        ch.points.reserve(static_cast<std::size_t>(options.samples));
        for (int i = 0; i < options.samples; ++i) {
            const double s = static_cast<double>(i) / (options.samples - 1);
            const double a = ch.start_azimuth + wrap * s;
            ch.points.emplace_back(radius * std::cos(a), radius * std::sin(a),
                                   height * s);
        }
        channels.push_back(std::move(ch));
    }
    return channels;
}

double channel_mid_azimuth(const ChannelPath& channel) {
    return channel.start_azimuth + 0.5 * channel.wrap_angle;
}

} // namespace helarm
