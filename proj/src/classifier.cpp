#include "atr/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "atr/error.hpp"
#include "atr/signature_store.hpp"
#include "atr/simd/kernels.hpp"

namespace atr {

std::string to_string(ModelKind kind) { return kind == ModelKind::LogReg ? "logreg" : "mlp"; }

ModelKind parse_model_kind(const std::string& name) {
  if (name == "logreg") return ModelKind::LogReg;
  if (name == "mlp") return ModelKind::Mlp;
  throw ConfigError("unknown model kind '" + name + "' (expected logreg or mlp)");
}

void LabeledDataset::validate() const {
  if (samples.empty()) throw InputError("dataset is empty");
  if (labels.size() != samples.size()) throw ShapeError("dataset labels/samples size mismatch");
  if (num_classes < 1) throw InputError("dataset needs num_classes >= 1");
  const std::size_t f = samples.front().rcs_dbsm.size();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= num_classes) {
      throw InputError("class id out of range in dataset");
    }
    const Observation& o = samples[i];
    if (o.rcs_dbsm.size() != f) throw ShapeError("inconsistent RCS vector length in dataset");
    if (!std::isfinite(o.azimuth_deg) || !std::isfinite(o.elevation_deg)) {
      throw InputError("non-finite angle in dataset");
    }
    for (double v : o.rcs_dbsm)
      if (!std::isfinite(v)) throw InputError("non-finite RCS value in dataset");
  }
}

void extract_features(const Observation& x, const FeatureSpec& spec, std::span<double> out) {
  if (x.rcs_dbsm.size() != spec.num_freqs) {
    throw ShapeError("observation has " + std::to_string(x.rcs_dbsm.size()) +
                     " RCS values, model expects " + std::to_string(spec.num_freqs));
  }
  if (out.size() != spec.dim()) throw ShapeError("feature buffer size mismatch");
  for (std::size_t i = 0; i < spec.num_freqs; ++i) {
    if (!std::isfinite(x.rcs_dbsm[i])) throw InputError("non-finite RCS feature");
    out[i] = x.rcs_dbsm[i];
  }
  if (spec.use_angles) {
    if (!std::isfinite(x.azimuth_deg) || !std::isfinite(x.elevation_deg)) {
      throw InputError("non-finite angle feature");
    }
    out[spec.num_freqs] = fold_azimuth(x.azimuth_deg);
    out[spec.num_freqs + 1] = x.elevation_deg;
  }
}

ClassifierModel::ClassifierModel(ModelKind kind, FeatureSpec features, std::size_t num_classes,
                                 std::vector<std::size_t> hidden)
    : kind_(kind), features_(features), num_classes_(num_classes) {
  if (num_classes < 2) throw InputError("classifier needs at least 2 classes");
  if (features.dim() == 0) throw InputError("classifier needs at least one feature");
  if (kind == ModelKind::LogReg && !hidden.empty()) {
    throw InputError("logistic regression has no hidden layers");
  }
  mean_.assign(features.dim(), 0.0);
  std_.assign(features.dim(), 1.0);
  std::size_t in = features.dim();
  hidden.push_back(num_classes);
  for (std::size_t out : hidden) {
    if (out == 0) throw InputError("layer sizes must be positive");
    layers_.push_back(DenseLayer{in, out, std::vector<double>(in * out, 0.0),
                                 std::vector<double>(out, 0.0)});
    in = out;
  }
}

void ClassifierModel::set_standardization(std::vector<double> mean, std::vector<double> std) {
  if (mean.size() != features_.dim() || std.size() != features_.dim()) {
    throw ShapeError("standardization statistics size mismatch");
  }
  for (double& s : std)
    if (!(s > 0.0) || !std::isfinite(s)) s = 1.0;
  mean_ = std::move(mean);
  std_ = std::move(std);
}

void ClassifierModel::standardize(std::span<const double> raw, std::span<double> out) const {
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = (raw[i] - mean_[i]) / std_[i];
}

namespace {

/// Per-sample forward buffers: pre-activations and activations of each layer.
struct ForwardTrace {
  std::vector<std::vector<double>> pre;  // z_l
  std::vector<std::vector<double>> act;  // a_l; act[0] is the input
};

void forward(const ClassifierModel& m, std::span<const double> input, ForwardTrace& tr) {
  const auto& layers = m.layers();
  const auto& k = simd::active();
  tr.pre.resize(layers.size());
  tr.act.resize(layers.size() + 1);
  tr.act[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const DenseLayer& L = layers[l];
    auto& z = tr.pre[l];
    z.resize(L.out);
    const double* a = tr.act[l].data();
    for (std::size_t r = 0; r < L.out; ++r) {
      z[r] = L.bias[r] + k.dot(L.weights.data() + r * L.in, a, L.in);
    }
    auto& next = tr.act[l + 1];
    next = z;
    if (l + 1 < layers.size()) {
      for (double& v : next) v = v > 0.0 ? v : m.leaky_slope() * v;
    }
  }
}

/// In-place softmax; returns log-sum-exp of the input logits.
double softmax_inplace(std::vector<double>& v) {
  const double mx = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double& x : v) {
    x = std::exp(x - mx);
    sum += x;
  }
  for (double& x : v) x /= sum;
  return mx + std::log(sum);
}

}  // namespace

std::vector<double> ClassifierModel::predict_standardized(std::span<const double> z) const {
  if (z.size() != features_.dim()) throw ShapeError("feature vector size mismatch");
  ForwardTrace tr;
  forward(*this, z, tr);
  std::vector<double> p = tr.act.back();
  softmax_inplace(p);
  return p;
}

ClassProbVector ClassifierModel::predict_proba(const Observation& x) const {
  if (layers_.empty()) throw InputError("classifier is not initialized");
  std::vector<double> raw(features_.dim());
  extract_features(x, features_, raw);
  standardize(raw, raw);
  return ClassProbVector::normalize(predict_standardized(raw)).floored(kProbabilityFloor);
}

std::size_t ClassifierModel::num_parameters() const {
  std::size_t n = 0;
  for (const auto& L : layers_) n += L.weights.size() + L.bias.size();
  return n;
}

std::vector<double> ClassifierModel::parameters() const {
  std::vector<double> p;
  p.reserve(num_parameters());
  for (const auto& L : layers_) {
    p.insert(p.end(), L.weights.begin(), L.weights.end());
    p.insert(p.end(), L.bias.begin(), L.bias.end());
  }
  return p;
}

void ClassifierModel::set_parameters(std::span<const double> params) {
  if (params.size() != num_parameters()) throw ShapeError("parameter vector size mismatch");
  std::size_t off = 0;
  for (auto& L : layers_) {
    std::copy_n(params.begin() + off, L.weights.size(), L.weights.begin());
    off += L.weights.size();
    std::copy_n(params.begin() + off, L.bias.size(), L.bias.begin());
    off += L.bias.size();
  }
}

bool ClassifierModel::operator==(const ClassifierModel& o) const {
  if (kind_ != o.kind_ || features_.num_freqs != o.features_.num_freqs ||
      features_.use_angles != o.features_.use_angles || num_classes_ != o.num_classes_ ||
      leaky_slope_ != o.leaky_slope_ || mean_ != o.mean_ || std_ != o.std_ ||
      layers_.size() != o.layers_.size()) {
    return false;
  }
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto &a = layers_[l], &b = o.layers_[l];
    if (a.in != b.in || a.out != b.out || a.weights != b.weights || a.bias != b.bias) return false;
  }
  return true;
}

TrainingBatch make_batch(const ClassifierModel& model, const LabeledDataset& data) {
  TrainingBatch batch;
  batch.dim = model.features().dim();
  batch.features.resize(data.size() * batch.dim);
  batch.labels = data.labels;
  std::vector<double> raw(batch.dim);
  for (std::size_t i = 0; i < data.size(); ++i) {
    extract_features(data.samples[i], model.features(), raw);
    model.standardize(raw, std::span<double>(batch.features.data() + i * batch.dim, batch.dim));
  }
  return batch;
}

double loss_and_gradient(const ClassifierModel& model, const TrainingBatch& batch, double l2,
                         std::vector<double>* grad) {
  const auto& layers = model.layers();
  const auto& k = simd::active();
  const std::size_t n = batch.size();
  if (n == 0) throw InputError("empty training batch");
  if (batch.dim != model.features().dim()) throw ShapeError("batch feature size mismatch");

  std::vector<std::size_t> offsets(layers.size());
  std::size_t total = 0;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    offsets[l] = total;
    total += layers[l].weights.size() + layers[l].bias.size();
  }
  if (grad) grad->assign(total, 0.0);

  ForwardTrace tr;
  std::vector<double> delta, prev;
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    forward(model, std::span<const double>(batch.features.data() + i * batch.dim, batch.dim), tr);
    std::vector<double>& p = tr.act.back();
    const auto y = static_cast<std::size_t>(batch.labels[i]);
    const double logit_y = p[y];
    loss += softmax_inplace(p) - logit_y;
    if (!grad) continue;
    delta = p;
    delta[y] -= 1.0;
    for (std::size_t l = layers.size(); l-- > 0;) {
      const DenseLayer& L = layers[l];
      double* gw = grad->data() + offsets[l];
      double* gb = gw + L.weights.size();
      const double* a = tr.act[l].data();
      for (std::size_t r = 0; r < L.out; ++r) {
        k.axpy(delta[r], a, gw + r * L.in, L.in);
        gb[r] += delta[r];
      }
      if (l == 0) break;
      prev.assign(L.in, 0.0);
      for (std::size_t r = 0; r < L.out; ++r) k.axpy(delta[r], L.weights.data() + r * L.in, prev.data(), L.in);
      const auto& z = tr.pre[l - 1];
      for (std::size_t j = 0; j < L.in; ++j) prev[j] *= z[j] > 0.0 ? 1.0 : model.leaky_slope();
      delta.swap(prev);
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  loss *= inv_n;
  if (grad)
    for (double& g : *grad) g *= inv_n;
  if (l2 > 0.0) {
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const auto& w = layers[l].weights;
      loss += 0.5 * l2 * k.dot(w.data(), w.data(), w.size());
      if (grad) k.axpy(l2, w.data(), grad->data() + offsets[l], w.size());
    }
  }
  return loss;
}

}  // namespace atr
