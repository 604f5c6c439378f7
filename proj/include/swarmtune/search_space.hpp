#pragma once

#include <string>
#include <vector>

#include "swarmtune/rng.hpp"

namespace swarmtune {

enum class ParamKind { Integer, Continuous };

/// Box bounds for one tunable parameter. Integer parameters carry whole
/// bounds and are represented as reals until decoded.
struct ParamSpec {
  std::string name;
  ParamKind kind = ParamKind::Continuous;
  double lower = 0.0;
  double upper = 0.0;
};

/// A point in search space: one raw real coordinate per parameter, in the
/// order the owning SearchSpace declares them.
using Position = std::vector<double>;

/// Decoded, typed form of a point in the standard four-parameter space.
struct HyperParams {
  int num_filters = 0;
  int dense_units = 0;
  double dropout_rate = 0.0;
  double learning_rate = 0.0;

  bool operator==(const HyperParams&) const = default;
};

class SearchSpace {
 public:
  /// Validates the specs: lower <= upper, whole bounds for integer
  /// parameters, unique names. Throws ConfigError naming the offender.
  explicit SearchSpace(std::vector<ParamSpec> params);

  /// The stock space: num_filters [8,32] and dense_units [32,128] integer,
  /// dropout_rate [0.1,0.5] and learning_rate [1e-4,1e-2] continuous.
  static SearchSpace standard();

  std::size_t size() const { return params_.size(); }
  const ParamSpec& param(std::size_t i) const { return params_[i]; }
  const std::vector<ParamSpec>& params() const { return params_; }

  /// Each coordinate uniform in [lower, upper]; integer parameters are
  /// sampled as reals and stay real until decode.
  Position sample(Rng& rng) const;

  /// Clamp every coordinate into its bounds.
  Position clip(const Position& pos) const;

  bool contains(const Position& pos) const;

  /// Rounding per parameter kind: integer -> nearest whole number, ties
  /// away from zero; continuous -> unchanged. Requires an in-bounds
  /// position (clip first); throws DomainError otherwise.
  std::vector<double> decode_values(const Position& pos) const;

  /// decode_values mapped onto the four standard fields.
  /// Requires a four-parameter space.
  HyperParams decode(const Position& pos) const;

  /// Inverse of decode for in-bounds hyperparameters.
  Position encode(const HyperParams& hp) const;

 private:
  void check_dimension(const Position& pos) const;

  std::vector<ParamSpec> params_;
};

}  // namespace swarmtune
