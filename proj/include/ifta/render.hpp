#pragma once

#include <span>
#include <string>
#include <vector>

#include "ifta/alert.hpp"
#include "ifta/io.hpp"

namespace ifta {

// Cohort color palette; index 0/1 are the red/blue shades, unlabeled
// vectors (cohort_id -1) render gray.
const std::vector<std::string>& cohort_palette();
std::string cohort_color(int cohort_id);

// One SVG 1.1 document for one frame: viewBox "0 0 w h" (identity
// transform, link coordinates appear verbatim), arrows at vector
// origins colored by cohort, sensitive locations as circles.
std::string render_frame_svg(std::span<const LinkRow> links, int frame,
                             double width, double height,
                             std::span<const SensitiveLocation> locations = {});

}  // namespace ifta
