#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "swarmtune/tensor.hpp"

namespace swarmtune {

// Labelled image collection with a baked-in train/test partition. Pixel values
// live in [0,1]; labels index into class_names.
struct Dataset {
  Tensor images;  // [N, H, W, C]
  std::vector<int> labels;
  std::vector<std::string> class_names;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;

  std::size_t size() const { return labels.size(); }
  int height() const { return static_cast<int>(images.dim(1)); }
  int width() const { return static_cast<int>(images.dim(2)); }
  int channels() const { return static_cast<int>(images.dim(3)); }
  std::size_t num_classes() const { return class_names.size(); }
};

// Throws InputError when the structural invariants don't hold (shape/label
// agreement, disjoint and exhaustive split, pixels in [0,1]).
void validate_dataset(const Dataset& data);

// Per class: shuffle the class's indices with a dedicated generator seeded
// from split_seed, reserve ~test_fraction of them (at least one) for test,
// rest for train. Indices come back sorted for reproducible batch order.
void assign_stratified_split(Dataset& data, double test_fraction, std::uint64_t split_seed);

// Four procedurally textured classes with distinct base colours and stripe
// frequencies plus per-image brightness/phase jitter and pixel noise; 80/20
// stratified split. Same seed, same bytes.
Dataset generate_synthetic_dataset(std::size_t per_class, int height, int width,
                                   std::uint64_t seed);

// Loads `<root>/<class_name>/*.ppm` (binary P6, maxval 255). Class labels
// follow lexicographic directory order; images are nearest-neighbour resized
// to target_height x target_width and rescaled by 1/255; 80/20 stratified
// split with a fixed seed so repeated loads agree.
Dataset load_dataset(const std::filesystem::path& root, int target_height, int target_width);

// Writes the dataset back out as a PPM tree in load_dataset's layout,
// quantizing pixels to 8 bits.
void write_ppm_tree(const Dataset& data, const std::filesystem::path& root);

}  // namespace swarmtune
