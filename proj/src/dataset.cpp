#include "swarmtune/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

#include "swarmtune/errors.hpp"
#include "swarmtune/ppm.hpp"
#include "swarmtune/rng.hpp"

namespace swarmtune {

namespace {

// Split assignment and the synthetic generator draw from decorrelated streams
// of the caller's seed so adding texture draws never perturbs the split.
constexpr std::uint64_t kSplitStream = 0x53504c49;   // "SPLI"
constexpr std::uint64_t kTextureStream = 0x54455854; // "TEXT"

// Fixed split seed for directory loads: repeated loads of the same tree must
// agree on the partition without any configuration.
constexpr std::uint64_t kDirectorySplitSeed = 101;

struct TextureFamily {
  const char* name;
  std::array<double, 3> base;  // RGB in [0,1]
  double frequency;            // diagonal stripes per image
};

// Earth-tone palettes, ordered so class indices match lexicographic names.
constexpr TextureFamily kFamilies[4] = {
    {"clay", {0.62, 0.36, 0.26}, 6.0},
    {"loam", {0.45, 0.32, 0.20}, 3.0},
    {"peat", {0.16, 0.12, 0.09}, 9.0},
    {"sand", {0.86, 0.77, 0.55}, 1.5},
};

}  // namespace

void validate_dataset(const Dataset& data) {
  if (data.images.rank() != 4) throw InputError("dataset images must have rank 4 [N,H,W,C]");
  const std::size_t n = data.images.dim(0);
  if (data.labels.size() != n) throw InputError("dataset label count does not match image count");
  if (data.class_names.empty()) throw InputError("dataset has no classes");
  for (int label : data.labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= data.class_names.size()) {
      throw InputError("dataset label out of range");
    }
  }
  for (double v : data.images.values()) {
    if (!(v >= 0.0 && v <= 1.0)) throw InputError("dataset pixel outside [0,1]");
  }
  std::set<std::size_t> seen;
  for (std::size_t i : data.train_indices) seen.insert(i);
  for (std::size_t i : data.test_indices) {
    if (!seen.insert(i).second) throw InputError("dataset train/test splits overlap");
  }
  if (seen.size() != n || (n > 0 && *seen.rbegin() >= n)) {
    throw InputError("dataset split does not cover all indices exactly once");
  }
}

void assign_stratified_split(Dataset& data, double test_fraction, std::uint64_t split_seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test fraction must be inside (0,1)");
  }
  Rng rng(mix_seed(split_seed, kSplitStream));
  data.train_indices.clear();
  data.test_indices.clear();
  for (std::size_t c = 0; c < data.class_names.size(); ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < data.labels.size(); ++i) {
      if (static_cast<std::size_t>(data.labels[i]) == c) members.push_back(i);
    }
    if (members.empty()) continue;
    rng.shuffle(members);
    std::size_t n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(members.size())));
    if (members.size() == 1) {
      n_test = 0;  // lone sample goes to train
    } else {
      n_test = std::clamp<std::size_t>(n_test, 1, members.size() - 1);
    }
    data.test_indices.insert(data.test_indices.end(), members.begin(), members.begin() + n_test);
    data.train_indices.insert(data.train_indices.end(), members.begin() + n_test, members.end());
  }
  std::sort(data.train_indices.begin(), data.train_indices.end());
  std::sort(data.test_indices.begin(), data.test_indices.end());
}

Dataset generate_synthetic_dataset(std::size_t per_class, int height, int width,
                                   std::uint64_t seed) {
  if (per_class < 2) throw ConfigError("synthetic dataset needs at least 2 images per class");
  if (height <= 0 || width <= 0 || height % 2 != 0 || width % 2 != 0) {
    throw ConfigError("synthetic image dimensions must be positive and even");
  }

  constexpr std::size_t kNumClasses = 4;
  const std::size_t n = kNumClasses * per_class;
  Dataset data;
  data.images = Tensor({n, static_cast<std::size_t>(height), static_cast<std::size_t>(width), 3});
  data.labels.resize(n);
  for (const auto& family : kFamilies) data.class_names.emplace_back(family.name);

  Rng rng(mix_seed(seed, kTextureStream));
  double* px = data.images.data();
  std::size_t image_index = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto& family = kFamilies[c];
    for (std::size_t k = 0; k < per_class; ++k, ++image_index) {
      data.labels[image_index] = static_cast<int>(c);
      const double brightness = rng.uniform(0.9, 1.1);
      const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
          // Diagonal sinusoidal banding at a class-specific frequency gives
          // each family a texture on top of its base colour.
          const double t = static_cast<double>(x + y) / static_cast<double>(width + height);
          const double wave =
              0.08 * std::sin(2.0 * std::numbers::pi * family.frequency * t + phase);
          for (int ch = 0; ch < 3; ++ch) {
            const double noise = rng.uniform(-0.04, 0.04);
            *px++ = std::clamp(family.base[ch] * brightness + wave + noise, 0.0, 1.0);
          }
        }
      }
    }
  }

  assign_stratified_split(data, 0.2, seed);
  return data;
}

Dataset load_dataset(const std::filesystem::path& root, int target_height, int target_width) {
  if (target_height <= 0 || target_width <= 0) {
    throw ConfigError("dataset target size must be positive");
  }
  if (!std::filesystem::is_directory(root)) {
    throw ConfigError("dataset directory not found: " + root.string());
  }

  std::vector<std::string> class_names;
  for (const auto& entry : std::filesystem::directory_iterator(root)) {
    if (entry.is_directory()) class_names.push_back(entry.path().filename().string());
  }
  std::sort(class_names.begin(), class_names.end());
  if (class_names.empty()) {
    throw ConfigError("dataset directory has no class subdirectories: " + root.string());
  }

  std::vector<std::pair<std::filesystem::path, int>> files;
  for (std::size_t c = 0; c < class_names.size(); ++c) {
    std::vector<std::filesystem::path> class_files;
    for (const auto& entry : std::filesystem::directory_iterator(root / class_names[c])) {
      if (entry.is_regular_file() && entry.path().extension() == ".ppm") {
        class_files.push_back(entry.path());
      }
    }
    std::sort(class_files.begin(), class_files.end());
    if (class_files.empty()) {
      throw ConfigError("class directory holds no .ppm files: " + (root / class_names[c]).string());
    }
    for (auto& path : class_files) files.emplace_back(std::move(path), static_cast<int>(c));
  }

  Dataset data;
  data.class_names = std::move(class_names);
  data.images = Tensor({files.size(), static_cast<std::size_t>(target_height),
                        static_cast<std::size_t>(target_width), 3});
  data.labels.resize(files.size());

  double* px = data.images.data();
  const std::size_t per_image = static_cast<std::size_t>(3) * target_height * target_width;
  for (std::size_t i = 0; i < files.size(); ++i) {
    data.labels[i] = files[i].second;
    PpmImage image = read_ppm(files[i].first);
    if (image.height != target_height || image.width != target_width) {
      image = resize_nearest(image, target_height, target_width);
    }
    for (std::size_t j = 0; j < per_image; ++j) px[j] = image.pixels[j] / 255.0;
    px += per_image;
  }

  assign_stratified_split(data, 0.2, kDirectorySplitSeed);
  return data;
}

void write_ppm_tree(const Dataset& data, const std::filesystem::path& root) {
  validate_dataset(data);
  std::filesystem::create_directories(root);
  std::vector<std::size_t> counters(data.class_names.size(), 0);
  for (const auto& name : data.class_names) std::filesystem::create_directories(root / name);

  const std::size_t per_image = static_cast<std::size_t>(3) * data.height() * data.width();
  if (data.channels() != 3) throw InputError("ppm export requires 3-channel images");
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int label = data.labels[i];
    const std::string& cls = data.class_names[static_cast<std::size_t>(label)];
    char suffix[16];
    std::snprintf(suffix, sizeof suffix, "_%03zu.ppm", counters[static_cast<std::size_t>(label)]++);
    PpmImage image;
    image.height = data.height();
    image.width = data.width();
    image.pixels.resize(per_image);
    const double* px = data.images.data() + i * per_image;
    for (std::size_t j = 0; j < per_image; ++j) {
      image.pixels[j] = static_cast<std::uint8_t>(std::lround(px[j] * 255.0));
    }
    write_ppm(root / cls / (cls + suffix), image);
  }
}

}  // namespace swarmtune
