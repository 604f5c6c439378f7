#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "swarmtune/dataset.hpp"
#include "swarmtune/rng.hpp"
#include "swarmtune/search_space.hpp"
#include "swarmtune/tensor.hpp"

namespace swarmtune {

// One conv/pool block followed by two dense layers:
//   conv 3x3 same-padding stride 1, ReLU -> 2x2 max-pool stride 2 -> flatten
//   -> dense(N_d), ReLU -> inverted dropout(p) -> dense(num_classes), softmax.
struct CnnModel {
  Tensor conv_kernels;   // [N_f, 3, 3, C]
  Tensor conv_bias;      // [N_f]
  Tensor dense1_weights; // [N_f*(H/2)*(W/2), N_d]
  Tensor dense1_bias;    // [N_d]
  Tensor dense2_weights; // [N_d, num_classes]
  Tensor dense2_bias;    // [num_classes]
  double dropout_rate = 0.0;
  int in_height = 0;
  int in_width = 0;
  int in_channels = 0;

  int num_filters() const { return static_cast<int>(conv_kernels.dim(0)); }
  int dense_units() const { return static_cast<int>(dense1_bias.size()); }
  int num_classes() const { return static_cast<int>(dense2_bias.size()); }
  std::size_t flattened_dim() const { return dense1_weights.dim(0); }
};

// Gradient buffers shaped exactly like the model's parameters.
struct CnnGrads {
  Tensor conv_kernels;
  Tensor conv_bias;
  Tensor dense1_weights;
  Tensor dense1_bias;
  Tensor dense2_weights;
  Tensor dense2_bias;
};

// Model parameters in a fixed traversal order (shared by grads, Adam moments,
// and serialization so they never disagree about layout).
std::vector<Tensor*> parameter_tensors(CnnModel& model);
std::vector<const Tensor*> parameter_tensors(const CnnModel& model);
std::vector<Tensor*> parameter_tensors(CnnGrads& grads);
std::vector<const Tensor*> parameter_tensors(const CnnGrads& grads);

// He-normal kernels and dense weights (sigma = sqrt(2/fan_in)), zero biases.
CnnModel build_model(int num_filters, int dense_units, double dropout_rate, int height,
                     int width, int channels, int num_classes, Rng& rng);
CnnGrads make_grads_like(const CnnModel& model);

// Full forward pass to class probabilities [B, num_classes]. The training
// variant draws inverted-dropout masks from rng (one draw per example per
// dense unit); the inference variant applies no dropout.
Tensor forward(const CnnModel& model, const Tensor& batch);
Tensor forward(const CnnModel& model, const Tensor& batch, bool training, Rng& rng);

// Post-ReLU conv activations [B, H, W, N_f], straight off the same pass the
// full forward uses. For inspection and conv-layer verification.
Tensor conv_features(const CnnModel& model, const Tensor& batch);

// Inverted-dropout mask: each slot becomes 0 with probability dropout_rate,
// otherwise 1/(1 - dropout_rate), so mask * activation preserves expectation.
void fill_dropout_mask(std::vector<double>& mask, double dropout_rate, Rng& rng);

// Mean cross-entropy over the batch plus parameter gradients (accumulated into
// grads, which is overwritten). Dropout masks are drawn from rng only when
// training is true. Throws DivergenceError when the loss is not finite.
// correct_count, when given, receives the number of argmax-correct examples.
double loss_and_grads(const CnnModel& model, const Tensor& batch, const std::vector<int>& labels,
                      bool training, Rng* rng, CnnGrads& grads,
                      std::size_t* correct_count = nullptr);

// Adam with bias correction; moments are zero-born and step_count increments
// once per adam_step.
struct AdamState {
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
  std::size_t step_count = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

AdamState make_adam_state(const CnnModel& model);

// One parameter array: m <- b1*m+(1-b1)*g; v <- b2*v+(1-b2)*g^2; bias-correct;
// theta <- theta - lr * m_hat / (sqrt(v_hat) + eps). step is the post-increment
// step count (1 on the first update).
void adam_update(std::size_t n, double* param, const double* grad, double* m, double* v,
                 std::size_t step, double learning_rate, double beta1, double beta2,
                 double epsilon);

void adam_step(CnnModel& model, const CnnGrads& grads, AdamState& state, double learning_rate);

struct EpochStats {
  double loss = 0.0;
  double accuracy = 0.0;
};

struct TrainResult {
  CnnModel model;
  std::vector<EpochStats> history;  // one entry per epoch
};

// Builds a model from the hyperparameters and trains it on the dataset's train
// split: per-epoch shuffle, mini-batch Adam at hp.learning_rate. Weight init,
// shuffling, and dropout all derive from seed, so identical seeds give
// identical parameters. Propagates DivergenceError from non-finite losses.
TrainResult train(const HyperParams& hp, const Dataset& data, std::size_t epochs,
                  std::size_t batch_size, std::uint64_t seed);

struct EvalResult {
  double accuracy = 0.0;
  std::vector<int> predictions;  // aligned with data.test_indices
};

// Accuracy over the test split; argmax ties break toward the lowest class.
EvalResult evaluate_model(const CnnModel& model, const Dataset& data);

// Model snapshots in the TCNN container format.
void save_model(const CnnModel& model, const std::filesystem::path& path);
CnnModel load_model(const std::filesystem::path& path);

}  // namespace swarmtune
