#include "atr/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "atr/error.hpp"
#include "atr/simd/kernels.hpp"

namespace atr {

std::string to_string(FusionKind kind) {
  switch (kind) {
    case FusionKind::Obf: return "obf";
    case FusionKind::Soft: return "soft";
    case FusionKind::Hard: return "hard";
    case FusionKind::Max: return "max";
    case FusionKind::Random: return "random";
  }
  return "unknown";
}

FusionKind parse_fusion_kind(const std::string& name) {
  for (FusionKind k : {FusionKind::Obf, FusionKind::Soft, FusionKind::Hard, FusionKind::Max,
                       FusionKind::Random}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown fusion rule '" + name + "' (expected obf, soft, hard, max, random)");
}

void FusionRule::validate(std::size_t k) const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("hard-voting epsilon must be in (0, 1)");
  if (prior.size() != 0) {
    if (prior.size() != k) throw ConfigError("fusion prior has the wrong number of classes");
    for (double p : prior.values())
      if (!(p > 0.0)) throw ConfigError("fusion prior entries must be > 0");
  }
}

namespace {

std::size_t check_inputs(std::span<const ClassProbVector> per_radar) {
  if (per_radar.empty()) throw InputError("fusion needs at least one radar");
  const std::size_t k = per_radar.front().size();
  if (k == 0) throw InputError("empty probability vector");
  for (const auto& p : per_radar)
    if (p.size() != k) throw ShapeError("per-radar probability vectors differ in length");
  return k;
}

}  // namespace

ClassProbVector fuse_obf(std::span<const ClassProbVector> per_radar, const ClassProbVector& prior) {
  const std::size_t k = check_inputs(per_radar);
  if (prior.size() != k) throw ShapeError("prior length does not match class count");
  if (per_radar.size() == 1) return per_radar.front();
  const double exponent = 1.0 - static_cast<double>(per_radar.size());
  std::vector<double> acc(k), logs(k);
  for (std::size_t c = 0; c < k; ++c) {
    if (!(prior[c] > 0.0)) throw InputError("OBF prior entries must be > 0");
    acc[c] = exponent * std::log(prior[c]);
  }
  for (const auto& p : per_radar) {
    for (std::size_t c = 0; c < k; ++c) logs[c] = std::log(p[c]);
    simd::add(logs, acc);
  }
  return ClassProbVector::from_log_weights(acc);
}

ClassProbVector fuse_obf(std::span<const ClassProbVector> per_radar) {
  return fuse_obf(per_radar, ClassProbVector::uniform(check_inputs(per_radar)));
}

ClassProbVector fuse_soft(std::span<const ClassProbVector> per_radar) {
  const std::size_t k = check_inputs(per_radar);
  std::vector<double> acc(k, 0.0);
  for (const auto& p : per_radar) simd::add(p.values(), acc);
  for (double& v : acc) v /= static_cast<double>(per_radar.size());
  return ClassProbVector::normalize(std::move(acc));
}

ClassProbVector fuse_hard(std::span<const ClassProbVector> per_radar, double epsilon,
                          Rng& tie_rng) {
  const std::size_t k = check_inputs(per_radar);
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InputError("epsilon must be in (0, 1)");
  std::vector<std::size_t> votes(k, 0);
  for (const auto& p : per_radar) ++votes[p.argmax()];
  const std::size_t top = *std::max_element(votes.begin(), votes.end());
  std::vector<std::size_t> tied;
  for (std::size_t c = 0; c < k; ++c)
    if (votes[c] == top) tied.push_back(c);
  std::size_t winner = tied.front();
  if (tied.size() > 1) {
    std::uniform_int_distribution<std::size_t> pick(0, tied.size() - 1);
    winner = tied[pick(tie_rng)];
  }
  const double kd = static_cast<double>(k);
  std::vector<double> w(k, epsilon / kd);
  w[winner] = 1.0 - kd * epsilon / (kd + 1.0);
  return ClassProbVector::normalize(std::move(w));
}

ClassProbVector fuse_max(std::span<const ClassProbVector> per_radar) {
  check_inputs(per_radar);
  std::vector<double> acc(per_radar.front().values().begin(), per_radar.front().values().end());
  for (std::size_t j = 1; j < per_radar.size(); ++j) simd::max(per_radar[j].values(), acc);
  return ClassProbVector::normalize(std::move(acc));
}

ClassProbVector fuse_random(std::size_t k, Rng& rng) {
  if (k < 2) throw InputError("random fusion needs k >= 2");
  std::gamma_distribution<double> gamma(1.0 / static_cast<double>(k), 1.0);
  std::vector<double> w(k);
  for (;;) {
    double sum = 0.0;
    for (double& x : w) {
      x = gamma(rng);
      sum += x;
    }
    if (sum > 0.0 && std::isfinite(sum)) break;
  }
  return ClassProbVector::normalize(std::move(w));
}

ClassProbVector fuse(const FusionRule& rule, std::span<const ClassProbVector> per_radar, Rng& rng) {
  switch (rule.kind) {
    case FusionKind::Obf:
      return rule.prior.size() == 0 ? fuse_obf(per_radar) : fuse_obf(per_radar, rule.prior);
    case FusionKind::Soft: return fuse_soft(per_radar);
    case FusionKind::Hard: return fuse_hard(per_radar, rule.epsilon, rng);
    case FusionKind::Max: return fuse_max(per_radar);
    case FusionKind::Random: return fuse_random(check_inputs(per_radar), rng);
  }
  throw InputError("unknown fusion rule");
}

PosteriorState PosteriorState::uniform(std::size_t k) {
  return PosteriorState{ClassProbVector::uniform(k), std::vector<double>(k, 0.0), 0};
}

PosteriorState rbc_update(const PosteriorState& state, const ClassProbVector& fused) {
  const std::size_t k = state.log_posterior.size();
  if (fused.size() != k) throw ShapeError("fused vector length does not match posterior");
  std::vector<double> next(state.log_posterior);
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < k; ++c) {
    next[c] += std::log(std::max(fused[c], kProbabilityFloor));
    mx = std::max(mx, next[c]);
  }
  for (double& v : next) v -= mx;
  PosteriorState out;
  out.posterior = ClassProbVector::from_log_weights(next);
  out.log_posterior = std::move(next);
  out.t = state.t + 1;
  return out;
}

std::vector<PosteriorState> classify_predictions(
    const std::vector<std::vector<ClassProbVector>>& predictions, const FusionRule& rule, Rng& rng) {
  if (predictions.empty()) throw ShapeError("trajectory has no time steps");
  const std::size_t k = predictions.front().at(0).size();
  rule.validate(k);
  std::vector<PosteriorState> states;
  states.reserve(predictions.size());
  PosteriorState state = PosteriorState::uniform(k);
  for (const auto& step : predictions) {
    state = rbc_update(state, fuse(rule, step, rng));
    states.push_back(state);
  }
  return states;
}

std::vector<PosteriorState> classify_trajectory(
    std::span<const ProbabilisticClassifier* const> models, const ObservationGrid& observations,
    const FusionRule& rule, Rng& rng) {
  if (observations.empty()) throw ShapeError("trajectory has no time steps");
  const std::size_t j = observations.front().size();
  if (j == 0) throw ShapeError("trajectory has no radars");
  if (models.size() != 1 && models.size() != j) {
    throw ShapeError("need one shared classifier or one per radar");
  }
  std::vector<std::vector<ClassProbVector>> preds(observations.size());
  for (std::size_t t = 0; t < observations.size(); ++t) {
    if (observations[t].size() != j) throw ShapeError("radar count changes across time steps");
    preds[t].reserve(j);
    for (std::size_t r = 0; r < j; ++r) {
      const ProbabilisticClassifier* m = models.size() == 1 ? models[0] : models[r];
      preds[t].push_back(m->predict_proba(observations[t][r]));
    }
  }
  return classify_predictions(preds, rule, rng);
}

}  // namespace atr
