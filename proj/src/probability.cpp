#include "atr/probability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "atr/error.hpp"

namespace atr {

bool is_valid_distribution(std::span<const double> v, double tol) {
  if (v.empty()) return false;
  double sum = 0.0;
  for (double p : v) {
    if (!(p >= 0.0 && p <= 1.0)) return false;
    sum += p;
  }
  return std::abs(sum - 1.0) <= tol;
}

std::size_t argmax_lowest(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

ClassProbVector ClassProbVector::uniform(std::size_t k) {
  if (k == 0) throw InputError("probability vector needs at least one class");
  return ClassProbVector(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

ClassProbVector ClassProbVector::from_probabilities(std::vector<double> probs) {
  if (!is_valid_distribution(probs)) throw InputError("not a valid probability vector");
  return ClassProbVector(std::move(probs));
}

ClassProbVector ClassProbVector::normalize(std::vector<double> weights) {
  if (weights.empty()) throw InputError("probability vector needs at least one class");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("weights must be finite and >= 0");
    sum += w;
  }
  if (!(sum > 0.0)) throw NumericalError("weights sum to zero");
  for (double& w : weights) w /= sum;
  return ClassProbVector(std::move(weights));
}

ClassProbVector ClassProbVector::from_log_weights(std::span<const double> log_weights) {
  if (log_weights.empty()) throw InputError("probability vector needs at least one class");
  double mx = -std::numeric_limits<double>::infinity();
  for (double l : log_weights) {
    if (std::isnan(l) || l == std::numeric_limits<double>::infinity()) {
      throw NumericalError("log-weights must not be NaN or +inf");
    }
    mx = std::max(mx, l);
  }
  if (mx == -std::numeric_limits<double>::infinity()) {
    throw NumericalError("all log-weights are -inf");
  }
  std::vector<double> w(log_weights.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(log_weights[i] - mx);
    sum += w[i];
  }
  for (double& x : w) x /= sum;
  return ClassProbVector(std::move(w));
}

std::size_t ClassProbVector::argmax() const { return argmax_lowest(probs_); }

ClassProbVector ClassProbVector::floored(double floor) const {
  std::vector<double> w(probs_);
  for (double& x : w) x = std::max(x, floor);
  return normalize(std::move(w));
}

}  // namespace atr
