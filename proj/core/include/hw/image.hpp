#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace hw {

/// Dense image, row-major, channel-interleaved, values in [0,1].
struct Image {
    int width = 0;
    int height = 0;
    int channels = 0;  // 1 or 3
    std::vector<float> data;

    Image() = default;
    Image(int w, int h, int c, float fill = 0.0f)
        : width(w), height(h), channels(c),
          data(static_cast<std::size_t>(w) * h * c, fill) {
        if (w < 1 || h < 1 || (c != 1 && c != 3))
            throw std::invalid_argument("Image: bad dimensions");
    }

    float& at(int x, int y, int c) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    float at(int x, int y, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::size_t size() const { return data.size(); }
};

/// Dense layer output, height x width x depth, row-major with depth fastest.
struct FeatureMap {
    int height = 0;
    int width = 0;
    int depth = 0;
    std::vector<float> data;

    FeatureMap() = default;
    FeatureMap(int h, int w, int z, float fill = 0.0f)
        : height(h), width(w), depth(z),
          data(static_cast<std::size_t>(h) * w * z, fill) {
        if (h < 1 || w < 1 || z < 1)
            throw std::invalid_argument("FeatureMap: bad dimensions");
    }

    float& at(int y, int x, int z) {
        return data[(static_cast<std::size_t>(y) * width + x) * depth + z];
    }
    float at(int y, int x, int z) const {
        return data[(static_cast<std::size_t>(y) * width + x) * depth + z];
    }
    std::size_t size() const { return data.size(); }
};

struct PyramidLevel {
    double ratio = 1.0;
    Image image;
};

/// Multi-scale stack of a single image; ratios strictly increasing, last = 1.
struct Pyramid {
    std::vector<PyramidLevel> levels;
};

struct FeatureLevel {
    double ratio = 1.0;
    FeatureMap map;
};

/// Multi-scale stack of feature maps (one per pyramid level).
struct FeaturePyramid {
    std::vector<FeatureLevel> levels;
};

namespace imagecore {

Image to_grayscale(const Image& img);

/// Bilinear resampling with half-pixel-centered coordinates.
Image resize(const Image& img, int new_w, int new_h);

/// Aspect-preserving resize: new_w = round(width * h / height).
Image resize_to_height(const Image& img, int h);

/// One level per ratio; ratios strictly increasing in (0,1], last must be 1.
/// Dimensions round half away from zero, minimum 1x1.
Pyramid build_pyramid(const Image& img, const std::vector<double>& ratios);

}  // namespace imagecore
}  // namespace hw
