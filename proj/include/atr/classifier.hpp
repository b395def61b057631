#pragma once

// Single-observation probabilistic classifiers: multinomial logistic regression
// and a leaky-ReLU multilayer perceptron, both trained from scratch.
//
// Extension point: anything implementing ProbabilisticClassifier can be plugged
// into the fusion pipeline (classify_trajectory) in place of ClassifierModel.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "atr/probability.hpp"

namespace atr {

/// One radar's feature vector at one time step.
struct Observation {
  std::vector<double> rcs_dbsm;
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;
};

struct LabeledDataset {
  std::vector<Observation> samples;
  std::vector<int> labels;
  std::size_t num_classes = 0;

  std::size_t size() const { return samples.size(); }
  void validate() const;
};

/// Floor applied to every predicted probability before renormalization.
inline constexpr double kProbabilityFloor = 1e-9;

class ProbabilisticClassifier {
 public:
  virtual ~ProbabilisticClassifier() = default;
  virtual std::size_t num_classes() const = 0;
  virtual ClassProbVector predict_proba(const Observation& x) const = 0;
};

enum class ModelKind { LogReg, Mlp };
std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

/// Fully connected layer, weights row-major (out x in).
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;
  std::vector<double> bias;
};

/// Which raw features feed the model: the F RCS values, optionally followed by
/// the folded azimuth and the elevation.
struct FeatureSpec {
  std::size_t num_freqs = 0;
  bool use_angles = true;
  std::size_t dim() const { return num_freqs + (use_angles ? 2 : 0); }
};

/// Raw (unstandardized) feature vector. Azimuth is folded into [0, 180] with the
/// same symmetry rule as the signature lookup.
void extract_features(const Observation& x, const FeatureSpec& spec, std::span<double> out);

class ClassifierModel final : public ProbabilisticClassifier {
 public:
  ClassifierModel() = default;
  /// Zero-initialized model (all weights and biases 0, identity standardization).
  ClassifierModel(ModelKind kind, FeatureSpec features, std::size_t num_classes,
                  std::vector<std::size_t> hidden = {});

  ModelKind kind() const { return kind_; }
  const FeatureSpec& features() const { return features_; }
  std::size_t num_classes() const override { return num_classes_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  double leaky_slope() const { return leaky_slope_; }

  const std::vector<double>& feature_mean() const { return mean_; }
  const std::vector<double>& feature_std() const { return std_; }
  /// Sets standardization statistics; zero stds are replaced by 1.
  void set_standardization(std::vector<double> mean, std::vector<double> std);
  void standardize(std::span<const double> raw, std::span<double> out) const;

  ClassProbVector predict_proba(const Observation& x) const override;
  /// Softmax output for an already standardized feature vector, without the floor.
  std::vector<double> predict_standardized(std::span<const double> z) const;

  std::size_t num_parameters() const;
  /// Flattened parameters: per layer, weights then bias.
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> params);

  bool operator==(const ClassifierModel&) const;

 private:
  friend ClassifierModel load_model(std::istream& in);

  ModelKind kind_ = ModelKind::LogReg;
  FeatureSpec features_;
  std::size_t num_classes_ = 0;
  double leaky_slope_ = 0.01;
  std::vector<double> mean_;
  std::vector<double> std_;
  std::vector<DenseLayer> layers_;
};

/// Standardized design matrix (row-major n x d) plus labels.
struct TrainingBatch {
  std::vector<double> features;
  std::vector<int> labels;
  std::size_t dim = 0;
  std::size_t size() const { return labels.size(); }
};

/// Mean cross-entropy + (l2 / 2) * ||weights||^2 (biases unpenalized) over the
/// batch. When grad is non-null it receives d(loss)/d(parameters()) by backprop.
double loss_and_gradient(const ClassifierModel& model, const TrainingBatch& batch, double l2,
                         std::vector<double>* grad);

struct LogRegHyper {
  double learning_rate = 0.0;  // <= 0: 1 / smoothness bound of the loss
  std::size_t epochs = 500;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
  bool use_angles = true;
};

struct MlpHyper {
  std::vector<std::size_t> hidden{50, 50, 50};
  double learning_rate = 0.01;
  double momentum = 0.9;
  std::size_t epochs = 60;
  std::size_t batch_size = 64;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
  bool use_angles = true;
};

/// Full-batch gradient descent on the L2-regularized cross-entropy.
ClassifierModel train_logreg(const LabeledDataset& data, const LogRegHyper& hyper,
                             std::vector<double>* loss_history = nullptr);

/// Mini-batch SGD with momentum; throws NumericalError if the loss diverges.
ClassifierModel train_mlp(const LabeledDataset& data, const MlpHyper& hyper,
                          std::vector<double>* loss_history = nullptr);

/// Standardization statistics are fit by the trainers; this applies a model's
/// statistics to a dataset.
TrainingBatch make_batch(const ClassifierModel& model, const LabeledDataset& data);

// Model file: text header + little-endian float64 weights (docs/file_formats.md).
void save_model(const ClassifierModel& model, std::ostream& out);
void save_model(const ClassifierModel& model, const std::filesystem::path& path);
ClassifierModel load_model(std::istream& in);
ClassifierModel load_model(const std::filesystem::path& path);

}  // namespace atr
