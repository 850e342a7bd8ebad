#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "rigidflow/image.hpp"

namespace rigidflow {

// Flow image, P6 PPM bytes: green/blue/red intensities proportional to
// |S_x|, |S_y|, |S_z|, normalized by vmax and clamped.
std::vector<uint8_t> viz_flow(const Imaged& S, double vmax = 0.15);

// Label image with a deterministic palette keyed on label id.
std::vector<uint8_t> viz_labels(const Imagei& labels);

void write_bytes(const std::filesystem::path& file,
                 const std::vector<uint8_t>& bytes);

}  // namespace rigidflow
