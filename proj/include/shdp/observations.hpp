#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "shdp/errors.hpp"

namespace shdp {

// Groups consecutive observations so one hidden step covers framesPerState of
// them; the trailing partial group is kept. The step likelihood is the product
// of its members' likelihoods (conditionally independent given the state).
inline std::vector<std::pair<int, int>> tieMinDuration(int numObs, int framesPerState) {
  if (framesPerState < 1)
    throw InvalidParameterError("tieMinDuration: framesPerState must be >= 1");
  std::vector<std::pair<int, int>> spans;
  for (int b = 0; b < numObs; b += framesPerState)
    spans.emplace_back(b, std::min(b + framesPerState, numObs));
  return spans;
}

// One chain's observation sequence: a real matrix (one row per observation)
// for Gaussian families, or a symbol sequence for the multinomial family.
// Mixed streams are rejected at load time. `spans` maps hidden steps to
// observation index ranges (identity unless duration tying is on).
struct ObsSet {
  bool discrete = false;
  Eigen::MatrixXd real;     // numObs x d
  Eigen::VectorXi symbols;  // numObs
  int vocab = 0;
  std::vector<std::pair<int, int>> spans;

  int numObs() const {
    return discrete ? static_cast<int>(symbols.size()) : static_cast<int>(real.rows());
  }
  int dim() const { return discrete ? 0 : static_cast<int>(real.cols()); }
  int numSteps() const { return static_cast<int>(spans.size()); }
  bool grouped() const { return numSteps() != numObs(); }

  static ObsSet fromReal(Eigen::MatrixXd y, int framesPerState = 1) {
    ObsSet o;
    o.discrete = false;
    o.real = std::move(y);
    if (!o.real.allFinite()) throw InvalidParameterError("ObsSet: non-finite observation");
    o.spans = tieMinDuration(static_cast<int>(o.real.rows()), framesPerState);
    return o;
  }

  static ObsSet fromSymbols(Eigen::VectorXi sym, int vocab, int framesPerState = 1) {
    ObsSet o;
    o.discrete = true;
    o.symbols = std::move(sym);
    o.vocab = vocab;
    if ((o.symbols.array() < 0).any() || (o.symbols.array() >= vocab).any())
      throw InvalidParameterError("ObsSet: symbol outside [0, vocab)");
    o.spans = tieMinDuration(static_cast<int>(o.symbols.size()), framesPerState);
    return o;
  }

  Eigen::VectorXd meanVector() const {
    if (discrete) throw UnsupportedOperationError("ObsSet: mean of discrete data");
    return real.colwise().mean();
  }

  Eigen::MatrixXd covarianceMatrix() const {
    if (discrete) throw UnsupportedOperationError("ObsSet: covariance of discrete data");
    Eigen::MatrixXd centered = real.rowwise() - real.colwise().mean();
    return (centered.transpose() * centered) / std::max<double>(1.0, real.rows() - 1.0);
  }
};

}  // namespace shdp
