#pragma once

#include <string>

#include "hw/image.hpp"

namespace hw::imagecore {

/// Loads a PNG or binary PPM/PGM (maxval 255). Values map to v/255.
Image load_image(const std::string& path);

/// Writes a grayscale image as binary PGM (debug dumps and synth frames).
void save_pgm(const Image& img, const std::string& path);

}  // namespace hw::imagecore
