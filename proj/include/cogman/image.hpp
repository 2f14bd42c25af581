#pragma once

#include <filesystem>
#include <vector>

namespace cogman {

// Single-channel image with intensities in [0, 1], row-major.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<float> pixels;

  Image() = default;
  Image(int w, int h, float fill = 0.0f);

  float& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  float at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  bool empty() const { return pixels.empty(); }
  std::size_t size() const { return pixels.size(); }
};

// Binary graymap ("P5", maxval 255). Values are clamped to [0, 1] and rounded.
void write_pgm(const std::filesystem::path& path, const Image& img);
Image read_pgm(const std::filesystem::path& path);

}  // namespace cogman
