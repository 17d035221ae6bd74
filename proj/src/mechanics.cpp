#include "helarm/mechanics.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

namespace helarm {

void validate_material(const MaterialModel& material) {
    if (material.youngs_modulus <= 0.0)
        throw ValidationError("youngs_modulus must be positive");
}

double axial_stiffness(const HelicoidDesign& design,
                       const MaterialModel& material) {
    validate_material(material);
    const DerivedGeometry g = derive(design);
    const double t = g.thickness_mid;
    const double second_moment = design.radial_width * t * t * t / 12.0;
    const double cos_a = std::cos(g.helix_angle_mid);
    const double length = g.strut_length_mid;
    return 12.0 * material.youngs_modulus * second_moment /
           (length * length * length * cos_a * cos_a);
}

double bending_stiffness(const HelicoidDesign& design,
                         const MaterialModel& material) {
    const DerivedGeometry g = derive(design);
    const double correction =
        9.0 * g.mid_radius /
        (2.0 * design.helicoid_count * design.axial_rise);
    // I_c / A for the equivalent cylinder reduces to r_m^2 / 4.
    return axial_stiffness(design, material) * g.mid_radius * g.mid_radius /
           4.0 * correction;
}

std::vector<StiffnessReport> design_report(
    std::span<const HelicoidDesign> designs, const MaterialModel& material) {
    std::vector<StiffnessReport> reports;
    reports.reserve(designs.size());
    for (const auto& d : designs) {
        const DerivedGeometry g = derive(d);
        StiffnessReport r;
        r.design = d.name;
        r.axial_stiffness = axial_stiffness(d, material);
        r.bending_stiffness = bending_stiffness(d, material);
        const double t = g.thickness_mid;
        r.second_moment = d.radial_width * t * t * t / 12.0;
        r.cylinder_second_moment =
            std::numbers::pi * std::pow(g.mid_radius, 4) / 4.0;
        r.cylinder_area = std::numbers::pi * g.mid_radius * g.mid_radius;
        r.correction =
            9.0 * g.mid_radius / (2.0 * d.helicoid_count * d.axial_rise);
        reports.push_back(std::move(r));
    }
    return reports;
}

void write_report_csv(std::span<const StiffnessReport> reports,
                      std::ostream& out) {
    out << "design,k_ax_N_per_mm,k_bend_Nmm_per_rad,I_mm4,correction\n";
    char line[192];
    for (const auto& r : reports) {
        std::snprintf(line, sizeof(line), "%s,%.6g,%.6g,%.6g,%.6g\n",
                      r.design.c_str(), r.axial_stiffness, r.bending_stiffness,
                      r.second_moment, r.correction);
        out << line;
    }
}

nlohmann::json report_to_json(std::span<const StiffnessReport> reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) {
        arr.push_back({{"design", r.design},
                       {"k_ax_N_per_mm", r.axial_stiffness},
                       {"k_bend_Nmm_per_rad", r.bending_stiffness},
                       {"I_mm4", r.second_moment},
                       {"I_c_mm4", r.cylinder_second_moment},
                       {"A_mm2", r.cylinder_area},
                       {"correction", r.correction}});
    }
    return arr;
}

} // namespace helarm
