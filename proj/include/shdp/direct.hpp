#pragma once

#include <Eigen/Dense>
#include <memory>
#include <utility>

#include "shdp/hyper.hpp"
#include "shdp/state.hpp"

namespace shdp {

struct DirectSweepReport {
  int acceptedNewStates = 0;
  int K = 0;
  double jointLogLik = 0.0;
};

// Auxiliary-variable updates shared by both samplers.
//
// m_{jk} | n_{jk} via table simulation at concentration alpha*beta_k +
// kappa*delta(j,k); w_j ~ Binomial(m_jj, rho/(rho + beta_j(1-rho)));
// mBar = m off the diagonal, m_jj - w_j on it.
void sampleTableCounts(CountTables& ct, const Eigen::Ref<const Eigen::VectorXd>& beta,
                       const Hyperparams& hp, Rng& rng);
void sampleOverrideTotals(CountTables& ct, const Eigen::Ref<const Eigen::VectorXd>& beta,
                          const Hyperparams& hp, Rng& rng);
void computeConsideredTables(CountTables& ct);

// beta | mBar ~ Dir(mBar_{.1}, ..., mBar_{.K}, gamma); returns K+1 weights with
// the remainder mass last. Zero-count cells draw exactly zero mass; entries are
// floored at 1e-300 so downstream logs stay finite.
Eigen::VectorXd sampleBetaDirect(const Eigen::MatrixXi& mBar, double gamma, Rng& rng);

// Sequential prior draw of (beta, z) from the collapsed sticky HDP-HMM:
// z_1 ~ beta, z_t | z_{1:t-1}, beta from the marginal transition predictive,
// new states extending beta by Beta(1, gamma) stick-breaking. This is the
// forward side of prior-reproduction checks and the shape of the sampler's
// own initialization.
std::pair<Eigen::VectorXd, Eigen::VectorXi> samplePriorStatePath(int T, const Hyperparams& hp,
                                                                 Rng& rng);

// Collapsed (Rao-Blackwellized) direct-assignment Gibbs sampler; the
// DP-emission variant block-samples (z_t, s_t).
struct DirectSamplerOptions {
  bool dpEmissions = false;
  // 0 = unbounded components per state (Chinese-restaurant form);
  // >= 1 = weak-limit truncation with the Dirichlet-multinomial predictive.
  int componentCap = 0;
  bool sampleHypers = true;
  bool sampleRho = true;    // false pins rho (rho = 0 gives the kappa = 0 model)
  bool sampleSigma = true;  // DP mode only
  int hyperInnerIters = 50;
};

class DirectSampler {
 public:
  using Options = DirectSamplerOptions;

  DirectSampler(std::shared_ptr<EmissionModel> emissions, Hyperparams hp, Options opt = Options());

  // Samples hyperparameters and beta from their priors, then assigns z_t
  // sequentially, treating each observation as the last one seen.
  void init(Rng& rng);

  DirectSweepReport sweep(Rng& rng);

  // Resamples a single z_t (and s_t in DP mode); exposed for direct checks.
  void resampleZt(int t, Rng& rng);

  // Log weights over the K+1 state candidates for time t, conditioned on
  // caches that exclude t (call detach(t) first).
  Eigen::VectorXd zLogWeights(int t) const;

  void detach(int t);
  void attach(int t, int k, int comp, Rng& rng);

  // log p(z, s, y | beta, hyperparameters): transition factor with pi
  // marginalized, component factor with psi marginalized, and the collapsed
  // emission marginal.
  double jointLogLik() const;

  void removeEmptyStates();
  void sampleAuxiliaryAndBeta(Rng& rng);
  void sampleHyperparameters(Rng& rng);

  int numStates() const { return K_; }
  const ModelState& state() const { return state_; }
  ModelState& state() { return state_; }
  const Options& options() const { return opt_; }

 private:
  Eigen::VectorXd componentLogWeights(int k, int t) const;
  int chooseComponent(int k, int t, Rng& rng) const;

  ModelState state_;
  Options opt_;
  AuxVars aux_;
  int K_ = 0;
  int newStates_ = 0;
};

}  // namespace shdp
