#include "hw/image.hpp"

#include <algorithm>
#include <cmath>

namespace hw::imagecore {

Image to_grayscale(const Image& img) {
    if (img.channels == 1) return img;
    Image out(img.width, img.height, 1);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            out.at(x, y, 0) = 0.299f * img.at(x, y, 0) + 0.587f * img.at(x, y, 1) +
                              0.114f * img.at(x, y, 2);
    return out;
}

Image resize(const Image& img, int new_w, int new_h) {
    if (new_w < 1 || new_h < 1)
        throw std::invalid_argument("resize: target dimensions must be positive");
    if (new_w == img.width && new_h == img.height) return img;

    Image out(new_w, new_h, img.channels);
    const double sx = static_cast<double>(img.width) / new_w;
    const double sy = static_cast<double>(img.height) / new_h;
    for (int y = 0; y < new_h; ++y) {
        // Half-pixel-centered mapping, clamped to the source grid.
        double fy = (y + 0.5) * sy - 0.5;
        fy = std::clamp(fy, 0.0, static_cast<double>(img.height - 1));
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, img.height - 1);
        const float wy = static_cast<float>(fy - y0);
        for (int x = 0; x < new_w; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            fx = std::clamp(fx, 0.0, static_cast<double>(img.width - 1));
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const float wx = static_cast<float>(fx - x0);
            for (int c = 0; c < img.channels; ++c) {
                const float top = (1.0f - wx) * img.at(x0, y0, c) + wx * img.at(x1, y0, c);
                const float bot = (1.0f - wx) * img.at(x0, y1, c) + wx * img.at(x1, y1, c);
                out.at(x, y, c) = (1.0f - wy) * top + wy * bot;
            }
        }
    }
    return out;
}

Image resize_to_height(const Image& img, int h) {
    const int w = std::max(1, static_cast<int>(std::lround(
                                  static_cast<double>(img.width) * h / img.height)));
    return resize(img, w, h);
}

namespace {
int scaled_dim(int base, double ratio) {
    // Round half away from zero; floor at 1.
    return std::max(1, static_cast<int>(std::lround(base * ratio)));
}
}  // namespace

Pyramid build_pyramid(const Image& img, const std::vector<double>& ratios) {
    if (ratios.empty()) throw std::invalid_argument("build_pyramid: empty ratio list");
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        if (ratios[i] <= 0.0 || ratios[i] > 1.0)
            throw std::invalid_argument("build_pyramid: ratio outside (0,1]");
        if (i > 0 && ratios[i] <= ratios[i - 1])
            throw std::invalid_argument("build_pyramid: ratios must be strictly increasing");
    }
    Pyramid pyr;
    pyr.levels.reserve(ratios.size());
    for (double r : ratios) {
        PyramidLevel lvl;
        lvl.ratio = r;
        lvl.image = (r == 1.0) ? img
                               : resize(img, scaled_dim(img.width, r), scaled_dim(img.height, r));
        pyr.levels.push_back(std::move(lvl));
    }
    return pyr;
}

}  // namespace hw::imagecore
