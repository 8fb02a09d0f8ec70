#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>

#include "shdp/counts.hpp"
#include "shdp/emissions.hpp"
#include "shdp/hyperparams.hpp"
#include "shdp/prob.hpp"

namespace shdp {

// Expected transition row under the sticky prior:
//   E[pi_jk] = (alpha*beta_k + kappa*delta(j,k)) / (alpha+kappa).
inline ProbVector expectedTransitionRow(const ProbVector& beta, const Hyperparams& hp, int j) {
  Eigen::VectorXd row = hp.alpha() * beta.vec();
  row[j] += hp.kappa();
  row /= hp.alphaPlusKappa;
  return ProbVector::checked(std::move(row), 1e-12);
}

// Dirichlet parameter vector of the sticky transition prior for row j:
//   (alpha*beta_1, ..., alpha*beta_j + kappa, ..., alpha*beta_L).
inline Eigen::VectorXd transitionRowPrior(const Eigen::Ref<const Eigen::VectorXd>& beta,
                                          const Hyperparams& hp, int j) {
  Eigen::VectorXd a = hp.alpha() * beta;
  a[j] += hp.kappa();
  return a;
}

// One Gibbs configuration. In direct (collapsed) mode `beta` has K+1 entries,
// the last being the remainder mass, and `pi`/`psi` stay empty; in blocked
// mode `beta` has L entries and `pi` holds the L transition rows. `z` is per
// hidden step; `s` (DP emissions only) is per observation.
struct ModelState {
  Eigen::VectorXd beta;
  Eigen::MatrixXd pi;
  Eigen::MatrixXd psi;
  Eigen::VectorXi z;
  Eigen::VectorXi s;
  CountTables counts;
  Hyperparams hp;
  std::shared_ptr<EmissionModel> emissions;

  int numSteps() const { return static_cast<int>(z.size()); }
};

// Versioned structured-text snapshot (JSON) for resuming chains. Emission
// sufficient statistics are not stored; they are rebuilt from (z, s) and the
// data on load. `rngState` optionally carries the chain generator stream.
std::string serializeModelState(const ModelState& state, const std::string& rngState = "");
// Restores everything except the emission model's data binding: the caller
// supplies a freshly constructed emission model over the same ObsSet.
void deserializeModelState(const std::string& text, ModelState& state, std::string* rngState);

}  // namespace shdp
