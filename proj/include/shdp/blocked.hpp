#pragma once

#include <Eigen/Dense>
#include <memory>

#include "shdp/hyper.hpp"
#include "shdp/state.hpp"

namespace shdp {

struct TruncationConfig {
  int L = 20;
  int LPrime = 1;

  void validate() const {
    if (L < 2) throw InvalidParameterError("TruncationConfig: L must be >= 2");
    if (LPrime < 1) throw InvalidParameterError("TruncationConfig: LPrime must be >= 1");
  }
};

// Backward messages in log domain, normalized per time step. Row t of
// logValues is the normalized log message into step t (boundary row T-1 is
// all zeros); logNorms has one entry per contraction, including the initial
// one, so logNorms.sum() recovers log p(y_{1:T} | pi, theta, init).
struct MessageTable {
  Eigen::MatrixXd logValues;  // T x L
  Eigen::VectorXd logNorms;   // T

  double logLik() const { return logNorms.sum(); }
};

// Backward recursion m_t(k) = sum_j pi_k(j) f_j(y_{t+1}) m_{t+1}(j) over the
// per-step emission log-likelihood table logF (T x L). `init` is the
// distribution of z_1 and enters only the final contraction.
MessageTable backwardMessages(const Eigen::Ref<const Eigen::MatrixXd>& logF,
                              const Eigen::Ref<const Eigen::MatrixXd>& pi,
                              const Eigen::Ref<const Eigen::VectorXd>& init);

// Joint draw of z_{1:T} from p(z | y, pi, theta): forward sampling against
// the backward messages.
Eigen::VectorXi forwardSampleZ(const Eigen::Ref<const Eigen::MatrixXd>& logF,
                               const Eigen::Ref<const Eigen::MatrixXd>& pi,
                               const MessageTable& messages,
                               const Eigen::Ref<const Eigen::VectorXd>& init, Rng& rng);

// pi_k ~ Dir(alpha*beta_1 + n_k1, ..., alpha*beta_k + kappa + n_kk, ...).
Eigen::MatrixXd sampleTransitions(const Eigen::MatrixXi& n,
                                  const Eigen::Ref<const Eigen::VectorXd>& beta,
                                  const Hyperparams& hp, Rng& rng);

// beta ~ Dir(gamma/L + mBar_{.1}, ..., gamma/L + mBar_{.L}).
Eigen::VectorXd sampleBetaWeakLimit(const Eigen::MatrixXi& mBar, double gamma, int L, Rng& rng);

// psi_k ~ Dir(sigma/L' + n'_k1, ..., sigma/L' + n'_kL').
Eigen::MatrixXd samplePsi(const Eigen::MatrixXi& nPrime, double sigma, int LPrime, Rng& rng);

struct BlockedSweepReport {
  int occupiedStates = 0;  // distinct labels in z
  double dataLogLik = 0.0;  // log p(y | pi, theta) under the params z was drawn with
};

// Weak-limit truncated blocked Gibbs sampler (DP-emission variant jointly
// resamples (z, s)). The initial-state distribution of the chain is beta;
// isolated here so the convention lives in one place.
struct BlockedSamplerOptions {
  bool dpEmissions = false;
  TruncationConfig trunc;
  bool sampleHypers = true;
  bool sampleRho = true;
  bool sampleSigma = true;
  // Sparse-Dirichlet ablation: beta pinned at uniform, beta/gamma updates off.
  bool betaFixedUniform = false;
  int hyperInnerIters = 50;
};

class BlockedSampler {
 public:
  using Options = BlockedSamplerOptions;

  BlockedSampler(std::shared_ptr<EmissionModel> emissions, Hyperparams hp, Options opt = Options());

  // Draws theta from the base measure, beta from its symmetric Dirichlet, pi
  // (and psi) from the induced priors, hyperparameters from their priors, then
  // block-samples z (and s).
  void init(Rng& rng);

  BlockedSweepReport sweep(Rng& rng);

  // Per-step emission log-likelihood table under the current parameters,
  // marginalized over mixture components with the current psi in DP mode.
  Eigen::MatrixXd emissionLogLikMatrix() const;

  const Eigen::VectorXd& initialDistribution() const { return state_.beta; }

  const ModelState& state() const { return state_; }
  ModelState& state() { return state_; }
  const Options& options() const { return opt_; }

 private:
  void resampleSequences(Rng& rng, BlockedSweepReport& rep);
  void rebuildCounts();
  void sampleHyperparameters(Rng& rng);

  ModelState state_;
  Options opt_;
  AuxVars aux_;
};

}  // namespace shdp
