#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace atr {

/// Probability vector over K classes: entries in [0, 1] summing to 1 within 1e-9.
class ClassProbVector {
 public:
  static constexpr double kSumTolerance = 1e-9;

  ClassProbVector() = default;

  static ClassProbVector uniform(std::size_t k);
  /// Validates an already-normalized vector.
  static ClassProbVector from_probabilities(std::vector<double> probs);
  /// Normalizes non-negative finite weights with a positive sum.
  static ClassProbVector normalize(std::vector<double> weights);
  /// Softmax of log-weights with max subtraction; -inf entries map to 0.
  static ClassProbVector from_log_weights(std::span<const double> log_weights);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> values() const { return probs_; }
  /// Index of the largest entry; ties go to the lowest index.
  std::size_t argmax() const;

  /// Raises entries to at least floor, then renormalizes.
  ClassProbVector floored(double floor) const;

  bool operator==(const ClassProbVector&) const = default;

 private:
  explicit ClassProbVector(std::vector<double> probs) : probs_(std::move(probs)) {}
  std::vector<double> probs_;
};

/// True when v satisfies the ClassProbVector invariants.
bool is_valid_distribution(std::span<const double> v, double tol = ClassProbVector::kSumTolerance);

std::size_t argmax_lowest(std::span<const double> v);

}  // namespace atr
