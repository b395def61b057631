#include <cmath>
#include <fstream>

#include "atr/classifier.hpp"
#include "atr/error.hpp"
#include "io_util.hpp"

namespace atr {
namespace {
constexpr const char* kMagic = "ATR-CLASSIFIER";
}

void save_model(const ClassifierModel& model, std::ostream& out) {
  std::string h = std::string(kMagic) + "\n";
  h += "version: 1\n";
  h += "kind: " + to_string(model.kind()) + "\n";
  h += "classes: " + std::to_string(model.num_classes()) + "\n";
  h += "num_freqs: " + std::to_string(model.features().num_freqs) + "\n";
  h += std::string("use_angles: ") + (model.features().use_angles ? "1" : "0") + "\n";
  h += "leaky_slope: " + io::format_double(model.leaky_slope()) + "\n";
  h += "layers: " + std::to_string(model.layers().front().in);
  for (const auto& L : model.layers()) h += " " + std::to_string(L.out);
  h += "\ndata: f64le\n";
  out.write(h.data(), static_cast<std::streamsize>(h.size()));
  io::write_f64le(out, model.feature_mean());
  io::write_f64le(out, model.feature_std());
  io::write_f64le(out, model.parameters());
  if (!out) throw InputError("failed writing model");
}

void save_model(const ClassifierModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  save_model(model, out);
}

ClassifierModel load_model(std::istream& in) {
  io::HeaderReader hr(in);
  hr.expect_exact(kMagic);
  auto single = [&](const char* key) {
    auto t = hr.expect_key(key);
    if (t.size() != 1) hr.fail(std::string(key) + " takes one value");
    return t[0];
  };
  if (hr.to_int(single("version")) != 1) hr.fail("unsupported model version");
  const std::string kind_name = single("kind");
  ModelKind kind;
  try {
    kind = parse_model_kind(kind_name);
  } catch (const ConfigError&) {
    hr.fail("unknown model kind '" + kind_name + "'");
  }
  const long long classes = hr.to_int(single("classes"));
  const long long nf = hr.to_int(single("num_freqs"));
  const long long angles = hr.to_int(single("use_angles"));
  const double slope = hr.to_double(single("leaky_slope"));
  auto layer_tokens = hr.expect_key("layers");
  if (layer_tokens.size() < 2) hr.fail("layers needs input and output sizes");
  std::vector<std::size_t> sizes;
  for (const auto& t : layer_tokens) {
    const long long v = hr.to_int(t);
    if (v < 1) hr.fail("layer sizes must be positive");
    sizes.push_back(static_cast<std::size_t>(v));
  }
  if (single("data") != "f64le") hr.fail("payload encoding must be f64le");
  if (classes < 2 || nf < 1 || (angles != 0 && angles != 1)) hr.fail("invalid model header");

  const FeatureSpec spec{static_cast<std::size_t>(nf), angles == 1};
  if (sizes.front() != spec.dim() || sizes.back() != static_cast<std::size_t>(classes)) {
    throw ShapeError("model layer sizes disagree with feature/class counts");
  }
  std::vector<std::size_t> hidden(sizes.begin() + 1, sizes.end() - 1);
  if (kind == ModelKind::LogReg && !hidden.empty()) {
    throw ShapeError("logreg model must not have hidden layers");
  }
  ClassifierModel model(kind, spec, static_cast<std::size_t>(classes), hidden);
  model.leaky_slope_ = slope;

  const std::size_t header_bytes = hr.offset();
  const std::string payload = hr.read_payload();
  const std::size_t d = spec.dim();
  const std::size_t count = 2 * d + model.num_parameters();
  if (payload.size() != count * 8) {
    throw ShapeError("model payload has " + std::to_string(payload.size()) + " bytes at offset " +
                     std::to_string(header_bytes) + ", expected " + std::to_string(count * 8));
  }
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    values[i] = io::decode_f64le(payload.data() + 8 * i);
    if (!std::isfinite(values[i])) throw InputError("non-finite model parameter");
  }
  model.set_standardization({values.begin(), values.begin() + d},
                            {values.begin() + d, values.begin() + 2 * d});
  model.set_parameters(std::span<const double>(values).subspan(2 * d));
  return model;
}

ClassifierModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open model file '" + path.string() + "'");
  return load_model(in);
}

}  // namespace atr
