#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "helarm/geometry.hpp"

using namespace helarm;

namespace {
constexpr double kPi = std::numbers::pi;

struct TableRow {
    const char* name;
    int n;
    double sector_deg;
    double twist_deg;
    double t_inner;
    double t_outer;
};

// Published reference values for the four designs.
constexpr TableRow kTable[] = {
    {"N4", 4, 18.0, 45.0, 3.04, 3.36},
    {"N4T", 4, 24.0, 45.0, 4.05, 4.48},
    {"N6", 6, 12.0, 30.0, 2.60, 3.12},
    {"N8", 8, 9.0, 22.5, 2.22, 2.86},
};
} // namespace

TEST_CASE("reference designs reproduce the published table") {
    for (const auto& row : kTable) {
        const auto& design = builtin_design(row.name);
        const auto d = derive(design);
        CAPTURE(row.name);
        CHECK(design.helicoid_count == row.n);
        CHECK(design.sector_angle ==
              doctest::Approx(row.sector_deg * kPi / 180.0).epsilon(1e-12));
        CHECK(d.twist_angle == kPi / row.n); // exact by construction
        CHECK(std::abs(d.thickness_inner - row.t_inner) < 0.005);
        CHECK(std::abs(d.thickness_outer - row.t_outer) < 0.005);
    }
}

TEST_CASE("derived quantities at the mid radius") {
    const auto d = derive(builtin_design("N6"));
    CHECK(d.mid_radius == 24.0);
    CHECK(d.strut_length_mid == doctest::Approx(15.456832).epsilon(1e-6));
    CHECK(d.thickness_mid == doctest::Approx(2.926792).epsilon(1e-6));
    CHECK(d.helix_angle_mid ==
          doctest::Approx(35.6101 * kPi / 180.0).epsilon(1e-5));
    CHECK(d.segment_height == 108.0);
    CHECK(derive(builtin_design("N4")).segment_height == 72.0);
    CHECK(derive(builtin_design("N8")).segment_height == 144.0);
}

TEST_CASE("thickness equals the arc-length projection of the sector") {
    // The closed form must match t(r) = r*theta*sin(alpha(r)) everywhere.
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> radius(5.0, 50.0);
    std::uniform_real_distribution<double> sector(0.05, 0.5);
    std::uniform_real_distribution<double> rise(3.0, 15.0);
    std::uniform_int_distribution<int> count(3, 10);
    for (int i = 0; i < 1000; ++i) {
        const double r_i = radius(rng);
        const double r_o = r_i + radius(rng);
        const auto design = make_design("rand", count(rng), sector(rng), r_i,
                                        r_o, rise(rng), count(rng));
        const double r = r_i + (r_o - r_i) * (i / 999.0);
        const double alpha = helix_angle(design, r);
        const double projected = r * design.sector_angle * std::sin(alpha);
        CHECK(strut_thickness(design, r) ==
              doctest::Approx(projected).epsilon(1e-12));
    }
}

TEST_CASE("design validation names the offending field") {
    CHECK_THROWS_AS(make_design("bad", 0, 0.2, 18, 30, 9, 4), ValidationError);
    CHECK_THROWS_AS(make_design("bad", 4, -0.2, 18, 30, 9, 4), ValidationError);
    CHECK_THROWS_AS(make_design("bad", 4, 0.2, 30, 18, 9, 4), ValidationError);
    CHECK_THROWS_AS(make_design("bad", 4, 0.2, 18, 30, -9, 4), ValidationError);

    auto design = builtin_design("N6");
    design.radial_width = 10.0; // no longer r_o - r_i
    try {
        validate_design(design);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("radial_width") != std::string::npos);
    }
    CHECK_THROWS_AS(builtin_design("N5"), ValidationError);
}

TEST_CASE("strut centerline endpoints and length") {
    const auto& n6 = builtin_design("N6");

    const auto ends = strut_centerline(n6, 0, +1, 2);
    REQUIRE(ends.size() == 2);
    CHECK(ends.front().isApprox(Eigen::Vector3d(24.0, 0.0, 0.0), 1e-12));
    // A full revolution returns to the start azimuth at the top plane.
    CHECK(ends.back().isApprox(Eigen::Vector3d(24.0, 0.0, 108.0), 1e-9));

    const auto line = strut_centerline(n6, 0, +1, 256);
    double length = 0.0;
    for (std::size_t i = 1; i < line.size(); ++i)
        length += (line[i] - line[i - 1]).norm();
    CHECK(std::abs(length - 12.0 * 15.456832) < 0.2);
    CHECK(line.front().z() == 0.0);
    CHECK(line.back().z() == doctest::Approx(108.0).epsilon(1e-12));

    const auto& n4 = builtin_design("N4");
    const auto start = strut_centerline(n4, 3, +1, 2).front();
    CHECK(std::atan2(start.y(), start.x()) ==
          doctest::Approx(135.0 * kPi / 180.0).epsilon(1e-12));

    CHECK_THROWS_AS(strut_centerline(n6, 12, +1, 2), ValidationError);
    CHECK_THROWS_AS(strut_centerline(n6, 0, +1, 1), ValidationError);
}

TEST_CASE("lattice meshes are watertight and conserve volume") {
    for (const auto& row : {kTable[0], kTable[2]}) {
        const auto& design = builtin_design(row.name);
        MeshOptions options;
        options.plate_thickness = 0.0;
        const auto mesh = generate_mesh(design, options);
        CAPTURE(row.name);
        CHECK(is_watertight(mesh));
        const double volume = signed_volume(mesh);
        const int n = design.helicoid_count;
        const double wedge = 0.5 * design.sector_angle *
                             (design.outer_radius * design.outer_radius -
                              design.inner_radius * design.inner_radius) *
                             design.axial_rise;
        const double expected = 4.0 * n * design.layer_count * wedge;
        CHECK(volume > 0.0);
        CHECK(std::abs(volume - expected) / expected < 0.01);
    }
    // N6 single-wedge analytic volume, for the record: 542.87 mm^3.
    const auto& n6 = builtin_design("N6");
    const double wedge = 0.5 * n6.sector_angle * (900.0 - 324.0) * 9.0;
    CHECK(wedge == doctest::Approx(542.867).epsilon(1e-4));
}

TEST_CASE("end plates add their disc volume") {
    const auto& n4 = builtin_design("N4");
    MeshOptions with_plates;
    with_plates.plate_thickness = 4.0;
    MeshOptions without;
    without.plate_thickness = 0.0;
    const double delta = signed_volume(generate_mesh(n4, with_plates)) -
                         signed_volume(generate_mesh(n4, without));
    const double disc = kPi * 30.0 * 30.0 * 4.0;
    CHECK(std::abs(delta - 2.0 * disc) / (2.0 * disc) < 0.01);
    CHECK(is_watertight(generate_mesh(n4, with_plates)));
}

TEST_CASE("overlapping wedges are rejected") {
    // sector * N > pi leaves no room for the mirrored family
    const auto fat = make_design("fat", 6, 0.6, 18, 30, 9, 6);
    CHECK_THROWS_AS(generate_mesh(fat), ValidationError);
}

TEST_CASE("obj export format") {
    const auto& n4 = builtin_design("N4");
    MeshOptions coarse;
    coarse.plate_thickness = 0.0;
    coarse.sweep_steps = 2;
    coarse.arc_segments = 1;
    const auto mesh = generate_mesh(n4, coarse);
    std::ostringstream out;
    write_obj(mesh, out);
    std::istringstream in(out.str());
    std::string line;
    std::size_t v = 0, f = 0;
    int max_index = 0;
    while (std::getline(in, line)) {
        REQUIRE(!line.empty());
        if (line[0] == 'v') ++v;
        if (line[0] == 'f') {
            ++f;
            int a, b, c;
            REQUIRE(std::sscanf(line.c_str(), "f %d %d %d", &a, &b, &c) == 3);
            REQUIRE(std::min({a, b, c}) >= 1); // 1-based indices
            max_index = std::max({max_index, a, b, c});
        }
    }
    CHECK(v == mesh.vertices.size());
    CHECK(f == mesh.triangles.size());
    CHECK(max_index == static_cast<int>(mesh.vertices.size()));
}

TEST_CASE("channel routing") {
    const auto& n6 = builtin_design("N6");
    const auto channels = route_channels(n6);
    REQUIRE(channels.size() == 6);
    for (std::size_t c = 0; c < channels.size(); ++c) {
        const auto& ch = channels[c];
        CHECK(ch.radius == doctest::Approx(27.25).epsilon(1e-12));
        CHECK(ch.start_azimuth ==
              doctest::Approx(c * kPi / 3.0).epsilon(1e-12));
        CHECK(ch.wrap_angle == doctest::Approx(2.0 * kPi).epsilon(1e-12));
        CHECK(ch.rest_length == doctest::Approx(202.433).epsilon(1e-4));
        CHECK(ch.rest_volume ==
              doctest::Approx(kPi * 1.0 * ch.rest_length).epsilon(1e-9));
        // stated length must agree with the sampled polyline
        double poly = 0.0;
        for (std::size_t i = 1; i < ch.points.size(); ++i)
            poly += (ch.points[i] - ch.points[i - 1]).norm();
        CHECK(std::abs(poly - ch.rest_length) / ch.rest_length < 1e-3);
        CHECK(channel_mid_azimuth(ch) ==
              doctest::Approx(ch.start_azimuth + kPi).epsilon(1e-12));
    }

    ChannelOptions none;
    none.count = 0;
    CHECK(route_channels(n6, none).empty());

    ChannelOptions too_deep;
    too_deep.depth_to_wall = 11.0; // channel would cross the inner radius
    CHECK_THROWS_AS(route_channels(n6, too_deep), ValidationError);
}
