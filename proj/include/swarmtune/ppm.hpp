#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <vector>

namespace swarmtune {

// 8-bit RGB image, rows top to bottom, channels interleaved.
struct PpmImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // 3 * width * height bytes
};

// Binary PPM (P6, maxval 255) decode/encode. Parse errors name the offending
// file so a bad image inside a large dataset tree is easy to locate.
PpmImage read_ppm(std::istream& in, const std::string& name);
PpmImage read_ppm(const std::filesystem::path& path);
void write_ppm(std::ostream& out, const PpmImage& image);
void write_ppm(const std::filesystem::path& path, const PpmImage& image);

// Nearest-neighbour resample: out(y, x) = in(floor(y*h_in/h_out), floor(x*w_in/w_out)).
PpmImage resize_nearest(const PpmImage& image, int out_height, int out_width);

}  // namespace swarmtune
