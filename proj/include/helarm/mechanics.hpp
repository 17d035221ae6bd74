#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "helarm/geometry.hpp"

#include "json.hpp"

namespace helarm {

struct MaterialModel {
    double youngs_modulus = 2.48;  // N/mm^2
};

// Small-deflection prediction for one design. Valid until the struts come
// into contact; the large-deformation regime is outside this model.
struct StiffnessReport {
    std::string design;
    double axial_stiffness = 0.0;    // N/mm
    double bending_stiffness = 0.0;  // N*mm/rad
    double second_moment = 0.0;      // strut cross-section, mm^4
    double cylinder_second_moment = 0.0;  // equivalent cylinder, mm^4
    double cylinder_area = 0.0;           // mm^2
    double correction = 0.0;  // wave-spring factor 9*r_m / (2*N*h)
};

void validate_material(const MaterialModel& material);

double axial_stiffness(const HelicoidDesign& design,
                       const MaterialModel& material);
double bending_stiffness(const HelicoidDesign& design,
                         const MaterialModel& material);

std::vector<StiffnessReport> design_report(
    std::span<const HelicoidDesign> designs, const MaterialModel& material);

void write_report_csv(std::span<const StiffnessReport> reports,
                      std::ostream& out);
nlohmann::json report_to_json(std::span<const StiffnessReport> reports);

} // namespace helarm
