#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "atr/classifier.hpp"
#include "atr/error.hpp"
#include "atr/rng.hpp"
#include "atr/simd/kernels.hpp"

namespace atr {
namespace {

void check_trainable(const LabeledDataset& data) {
  data.validate();
  std::set<int> present(data.labels.begin(), data.labels.end());
  if (present.size() < 2) throw InputError("training data must contain at least 2 classes");
  if (data.num_classes < 2) throw InputError("classifier needs at least 2 classes");
}

/// z-score statistics of the raw features.
void fit_standardization(ClassifierModel& model, const LabeledDataset& data) {
  const std::size_t d = model.features().dim();
  std::vector<double> raw(d), mean(d, 0.0), m2(d, 0.0);
  // Welford accumulation
  for (std::size_t i = 0; i < data.size(); ++i) {
    extract_features(data.samples[i], model.features(), raw);
    const double cnt = static_cast<double>(i + 1);
    for (std::size_t j = 0; j < d; ++j) {
      const double delta = raw[j] - mean[j];
      mean[j] += delta / cnt;
      m2[j] += delta * (raw[j] - mean[j]);
    }
  }
  std::vector<double> sd(d);
  for (std::size_t j = 0; j < d; ++j) sd[j] = std::sqrt(m2[j] / static_cast<double>(data.size()));
  model.set_standardization(std::move(mean), std::move(sd));
}

FeatureSpec spec_for(const LabeledDataset& data, bool use_angles) {
  return FeatureSpec{data.samples.front().rcs_dbsm.size(), use_angles};
}

}  // namespace

ClassifierModel train_logreg(const LabeledDataset& data, const LogRegHyper& hyper,
                             std::vector<double>* loss_history) {
  check_trainable(data);
  if (hyper.l2 < 0.0) throw ConfigError("l2 weight must be >= 0");
  ClassifierModel model(ModelKind::LogReg, spec_for(data, hyper.use_angles), data.num_classes);
  fit_standardization(model, data);
  const TrainingBatch batch = make_batch(model, data);

  // The softmax cross-entropy Hessian in the logits is bounded by 1/2, so the
  // loss is L-smooth with L <= (mean ||[x, 1]||^2) / 2 + l2.
  double sq = 0.0;
  for (double v : batch.features) sq += v * v;
  const double smoothness = 0.5 * (sq / static_cast<double>(batch.size()) + 1.0) + hyper.l2;
  const double lr = hyper.learning_rate > 0.0 ? hyper.learning_rate : 1.0 / smoothness;

  std::vector<double> params = model.parameters();
  std::vector<double> grad;
  if (loss_history) loss_history->clear();
  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    const double loss = loss_and_gradient(model, batch, hyper.l2, &grad);
    if (!std::isfinite(loss)) throw NumericalError("logistic regression training diverged");
    if (loss_history) loss_history->push_back(loss);
    simd::axpy(-lr, grad, params);
    model.set_parameters(params);
  }
  if (loss_history) loss_history->push_back(loss_and_gradient(model, batch, hyper.l2, nullptr));
  return model;
}

ClassifierModel train_mlp(const LabeledDataset& data, const MlpHyper& hyper,
                          std::vector<double>* loss_history) {
  check_trainable(data);
  if (hyper.batch_size == 0) throw ConfigError("batch size must be >= 1");
  if (hyper.hidden.empty()) throw ConfigError("MLP needs at least one hidden layer");
  if (!(hyper.learning_rate > 0.0) || hyper.momentum < 0.0 || hyper.momentum >= 1.0) {
    throw ConfigError("invalid MLP learning rate or momentum");
  }
  ClassifierModel model(ModelKind::Mlp, spec_for(data, hyper.use_angles), data.num_classes,
                        hyper.hidden);
  fit_standardization(model, data);
  const TrainingBatch all = make_batch(model, data);

  Rng rng = make_rng(hyper.seed, {0x31c9});
  // Glorot-uniform weights, zero biases.
  for (DenseLayer& L : model.layers()) {
    const double bound = std::sqrt(6.0 / static_cast<double>(L.in + L.out));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (double& w : L.weights) w = u(rng);
  }

  std::vector<double> params = model.parameters();
  std::vector<double> velocity(params.size(), 0.0);
  std::vector<double> grad;
  std::vector<std::size_t> order(all.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  TrainingBatch mb;
  mb.dim = all.dim;
  if (loss_history) loss_history->clear();

  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += hyper.batch_size) {
      const std::size_t end = std::min(order.size(), start + hyper.batch_size);
      mb.features.resize((end - start) * mb.dim);
      mb.labels.resize(end - start);
      for (std::size_t i = start; i < end; ++i) {
        std::copy_n(all.features.begin() + order[i] * all.dim, all.dim,
                    mb.features.begin() + (i - start) * mb.dim);
        mb.labels[i - start] = all.labels[order[i]];
      }
      const double loss = loss_and_gradient(model, mb, hyper.l2, &grad);
      if (!std::isfinite(loss)) throw NumericalError("MLP training diverged (non-finite loss)");
      epoch_loss += loss * static_cast<double>(end - start);
      for (std::size_t p = 0; p < params.size(); ++p) {
        velocity[p] = hyper.momentum * velocity[p] - hyper.learning_rate * grad[p];
        params[p] += velocity[p];
      }
      model.set_parameters(params);
    }
    epoch_loss /= static_cast<double>(all.size());
    if (!std::isfinite(epoch_loss)) throw NumericalError("MLP training diverged");
    if (loss_history) loss_history->push_back(epoch_loss);
  }
  return model;
}

}  // namespace atr
