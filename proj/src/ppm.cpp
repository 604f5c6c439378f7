#include "swarmtune/ppm.hpp"

#include <cctype>
#include <fstream>
#include <string>

#include "swarmtune/errors.hpp"

namespace swarmtune {

namespace {

[[noreturn]] void fail(const std::string& name, const std::string& what) {
  throw ParseError(name + ": " + what);
}

// Reads the next header token, skipping whitespace and '#' comments (which a
// P6 header may carry anywhere before the pixel data).
std::string next_token(std::istream& in, const std::string& name) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  if (c == EOF) fail(name, "truncated header");
  std::string token;
  while (c != EOF && !std::isspace(c) && c != '#') {
    token.push_back(static_cast<char>(c));
    c = in.get();
  }
  // The terminator is not part of the token: leave it in the stream so the
  // mandatory single separator before the pixel bytes stays observable.
  if (c != EOF) in.unget();
  return token;
}

int parse_header_int(const std::string& token, const std::string& name, const char* field) {
  if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos) {
    fail(name, std::string("invalid ") + field + " '" + token + "'");
  }
  long value = std::stol(token);
  if (value <= 0 || value > 1 << 20) {
    fail(name, std::string(field) + " out of range: " + token);
  }
  return static_cast<int>(value);
}

}  // namespace

PpmImage read_ppm(std::istream& in, const std::string& name) {
  // Magic must be exactly "P6": plain-text P3 and greyscale P5 are rejected.
  char magic[2];
  if (!in.read(magic, 2) || magic[0] != 'P' || magic[1] != '6') {
    fail(name, "expected P6 magic");
  }
  const int width = parse_header_int(next_token(in, name), name, "width");
  const int height = parse_header_int(next_token(in, name), name, "height");
  const std::string maxval = next_token(in, name);
  if (maxval != "255") fail(name, "unsupported maxval '" + maxval + "' (only 255)");
  // Exactly one whitespace byte separates the header from the pixel stream.
  const int sep = in.get();
  if (sep == EOF || !std::isspace(sep)) fail(name, "missing separator after maxval");

  PpmImage image;
  image.width = width;
  image.height = height;
  image.pixels.resize(static_cast<std::size_t>(3) * width * height);
  in.read(reinterpret_cast<char*>(image.pixels.data()),
          static_cast<std::streamsize>(image.pixels.size()));
  if (static_cast<std::size_t>(in.gcount()) != image.pixels.size()) {
    fail(name, "truncated pixel data");
  }
  return image;
}

PpmImage read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  return read_ppm(in, path.string());
}

void write_ppm(std::ostream& out, const PpmImage& image) {
  if (image.width <= 0 || image.height <= 0 ||
      image.pixels.size() != static_cast<std::size_t>(3) * image.width * image.height) {
    throw DimensionError("ppm image dimensions do not match pixel buffer");
  }
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
}

void write_ppm(const std::filesystem::path& path, const PpmImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(path.string() + ": cannot open file for writing");
  write_ppm(out, image);
  if (!out) throw InputError(path.string() + ": write failed");
}

PpmImage resize_nearest(const PpmImage& image, int out_height, int out_width) {
  if (out_height <= 0 || out_width <= 0) {
    throw DimensionError("resize target must be positive");
  }
  PpmImage out;
  out.width = out_width;
  out.height = out_height;
  out.pixels.resize(static_cast<std::size_t>(3) * out_width * out_height);
  for (int y = 0; y < out_height; ++y) {
    const int sy = static_cast<int>(static_cast<long>(y) * image.height / out_height);
    for (int x = 0; x < out_width; ++x) {
      const int sx = static_cast<int>(static_cast<long>(x) * image.width / out_width);
      const std::size_t src = (static_cast<std::size_t>(sy) * image.width + sx) * 3;
      const std::size_t dst = (static_cast<std::size_t>(y) * out_width + x) * 3;
      out.pixels[dst] = image.pixels[src];
      out.pixels[dst + 1] = image.pixels[src + 1];
      out.pixels[dst + 2] = image.pixels[src + 2];
    }
  }
  return out;
}

}  // namespace swarmtune
