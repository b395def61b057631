#pragma once

// Single-time-step fusion of per-radar class posteriors and the recursive
// Bayesian posterior update across time.

#include <span>
#include <string>
#include <vector>

#include "atr/classifier.hpp"
#include "atr/probability.hpp"
#include "atr/rng.hpp"

namespace atr {

enum class FusionKind { Obf, Soft, Hard, Max, Random };
std::string to_string(FusionKind kind);
FusionKind parse_fusion_kind(const std::string& name);

struct FusionRule {
  FusionKind kind = FusionKind::Obf;
  double epsilon = 0.007;  // hard-voting smoothing
  ClassProbVector prior;   // OBF prior; empty means uniform

  void validate(std::size_t k) const;
};

/// P(C)^(1-J) * prod_j P(C | x_j), normalized; computed in log space.
ClassProbVector fuse_obf(std::span<const ClassProbVector> per_radar, const ClassProbVector& prior);
ClassProbVector fuse_obf(std::span<const ClassProbVector> per_radar);  // uniform prior

/// Arithmetic mean of the per-radar vectors.
ClassProbVector fuse_soft(std::span<const ClassProbVector> per_radar);

/// Majority vote of per-radar argmax decisions. The modal class gets
/// 1 - K*eps/(K+1), every other class eps/K, then the vector is renormalized.
/// Modal ties are broken uniformly at random with tie_rng.
ClassProbVector fuse_hard(std::span<const ClassProbVector> per_radar, double epsilon, Rng& tie_rng);

/// Per-class maximum across radars, renormalized.
ClassProbVector fuse_max(std::span<const ClassProbVector> per_radar);

/// One draw from the symmetric Dirichlet with concentration 1/k.
ClassProbVector fuse_random(std::size_t k, Rng& rng);

/// Dispatches on rule.kind; rng is consumed only by hard (ties) and random.
ClassProbVector fuse(const FusionRule& rule, std::span<const ClassProbVector> per_radar, Rng& rng);

/// Recursive posterior. log_posterior is kept max-normalized (max entry 0) so
/// long products never underflow.
struct PosteriorState {
  ClassProbVector posterior;
  std::vector<double> log_posterior;
  std::size_t t = 0;

  static PosteriorState uniform(std::size_t k);
  std::size_t decision() const { return posterior.argmax(); }
};

/// posterior_t ∝ fused ⊙ posterior_{t-1}. Fused entries below the probability
/// floor are raised to it.
PosteriorState rbc_update(const PosteriorState& state, const ClassProbVector& fused);

/// Observations of one trajectory: steps x radars.
using ObservationGrid = std::vector<std::vector<Observation>>;

/// Per step: predict per radar, fuse, update. models holds either one shared
/// classifier or one per radar. Returns L posterior states (t = 1..L).
std::vector<PosteriorState> classify_trajectory(
    std::span<const ProbabilisticClassifier* const> models, const ObservationGrid& observations,
    const FusionRule& rule, Rng& rng);

/// Same recursion from precomputed per-radar predictions (steps x radars).
std::vector<PosteriorState> classify_predictions(
    const std::vector<std::vector<ClassProbVector>>& predictions, const FusionRule& rule, Rng& rng);

}  // namespace atr
