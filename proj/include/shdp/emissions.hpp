#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "shdp/observations.hpp"
#include "shdp/prob.hpp"
#include "shdp/rng.hpp"

namespace shdp {

// log of the multivariate gamma function.
double logMultivariateGamma(int d, double a);

// Emission family behind the samplers. Observations are addressed by index
// into the shared ObsSet. States are k in [0,K); mixture families also carry
// a component index j (0 for everything else).
//
// Two usage modes share the sufficient-statistic caches:
//   collapsed    (direct sampler)  -- predictiveLogLik marginalizes theta
//   instantiated (blocked sampler) -- samplePriorParams/samplePosteriorParams
//                                     draw theta, instLogLik evaluates it
class EmissionModel {
 public:
  explicit EmissionModel(std::shared_ptr<const ObsSet> obs) : obs_(std::move(obs)) {}
  virtual ~EmissionModel() = default;

  const ObsSet& obs() const { return *obs_; }
  int numStates() const { return K_; }
  virtual int numComponents(int) const { return 1; }

  virtual std::string family() const = 0;
  virtual bool supportsCollapsed() const = 0;
  virtual bool isMixture() const { return false; }

  // Allocates caches (and parameter slots) for K states with KPrime components
  // each; clears all assignments.
  virtual void setShape(int K, int KPrime) = 0;
  virtual void clearAssignments() = 0;

  // Dynamic label management for the direct sampler.
  virtual void addState() = 0;
  virtual void removeState(int k) = 0;
  virtual void addComponent(int k);
  virtual void removeComponent(int k, int j);

  virtual void add(int k, int j, int t) = 0;
  virtual void remove(int k, int j, int t) = 0;
  virtual int count(int k, int j) const = 0;

  // Collapsed predictive log p(y_t | observations assigned to (k,j), base).
  virtual double predictiveLogLik(int k, int j, int t) const;
  // Predictive under an empty cache (new state / new component).
  virtual double priorPredictiveLogLik(int t) const;
  // log marginal of all currently assigned observations given the partition.
  virtual double assignedMarginalLogLik() const;

  virtual void samplePriorParams(Rng& rng) = 0;
  virtual void samplePosteriorParams(Rng& rng) = 0;
  virtual double instLogLik(int k, int j, int t) const = 0;
  // Bulk form, one entry per observation; Gaussian families vectorize this.
  virtual void instLogLikColumn(int k, int j, Eigen::Ref<Eigen::VectorXd> out) const;

  virtual std::unique_ptr<EmissionModel> clone() const = 0;

 protected:
  std::shared_ptr<const ObsSet> obs_;
  int K_ = 0;
  int KPrime_ = 1;
};

// Cached first/second-moment statistics for one Gaussian cell.
struct GaussStats {
  int n = 0;
  Eigen::VectorXd sumY;
  Eigen::MatrixXd sumYY;

  void init(int d) {
    n = 0;
    sumY = Eigen::VectorXd::Zero(d);
    sumYY = Eigen::MatrixXd::Zero(d, d);
  }
  void add(const Eigen::Ref<const Eigen::VectorXd>& y) {
    ++n;
    sumY += y;
    sumYY += y * y.transpose();
  }
  void remove(const Eigen::Ref<const Eigen::VectorXd>& y) {
    --n;
    sumY -= y;
    sumYY -= y * y.transpose();
  }
};

// Gaussian state parameters with the Cholesky pieces needed for fast
// log-density evaluation.
struct GaussParam {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
  Eigen::LLT<Eigen::MatrixXd> llt;
  double logNormConst = 0.0;  // -(d/2)log(2pi) - (1/2)log|Sigma|

  void set(Eigen::VectorXd m, Eigen::MatrixXd s);
  double logLik(const Eigen::Ref<const Eigen::VectorXd>& y) const;
};

// 1. Normal-inverse-Wishart base; conjugate, so the direct sampler's
//    collapsed Student-t predictive is available.
class GaussianConjugateEmission : public EmissionModel {
 public:
  GaussianConjugateEmission(std::shared_ptr<const ObsSet> obs, NIWParams base);

  std::string family() const override { return "gaussian-conjugate"; }
  bool supportsCollapsed() const override { return true; }

  void setShape(int K, int KPrime) override;
  void clearAssignments() override;
  void addState() override;
  void removeState(int k) override;

  void add(int k, int j, int t) override;
  void remove(int k, int j, int t) override;
  int count(int k, int j) const override { return stats_[k].n; }

  double predictiveLogLik(int k, int j, int t) const override;
  double priorPredictiveLogLik(int t) const override;
  double assignedMarginalLogLik() const override;

  void samplePriorParams(Rng& rng) override;
  void samplePosteriorParams(Rng& rng) override;
  double instLogLik(int k, int j, int t) const override;
  void instLogLikColumn(int k, int j, Eigen::Ref<Eigen::VectorXd> out) const override;

  std::unique_ptr<EmissionModel> clone() const override;

  const NIWParams& base() const { return base_; }
  const GaussParam& param(int k) const { return params_[k]; }
  void setParam(int k, Eigen::VectorXd mu, Eigen::MatrixXd sigma) {
    params_[k].set(std::move(mu), std::move(sigma));
  }

 private:
  NIWParams base_;
  std::vector<GaussStats> stats_;
  std::vector<GaussParam> params_;
};

// 2. Independent Normal prior on the mean, inverse-Wishart on the covariance;
//    non-conjugate, so only the instantiated path exists. Posterior draws
//    alternate mu | Sigma and Sigma | mu for `innerSweeps` rounds.
class GaussianNonConjugateEmission : public EmissionModel {
 public:
  GaussianNonConjugateEmission(std::shared_ptr<const ObsSet> obs, Eigen::VectorXd priorMean,
                               Eigen::MatrixXd priorMeanCov, double iwDof,
                               Eigen::MatrixXd iwScale, int innerSweeps = 5);

  std::string family() const override { return "gaussian-nonconjugate"; }
  bool supportsCollapsed() const override { return false; }

  void setShape(int K, int KPrime) override;
  void clearAssignments() override;
  void addState() override;
  void removeState(int k) override;

  void add(int k, int j, int t) override;
  void remove(int k, int j, int t) override;
  int count(int k, int j) const override { return stats_[k].n; }

  void samplePriorParams(Rng& rng) override;
  void samplePosteriorParams(Rng& rng) override;
  double instLogLik(int k, int j, int t) const override;
  void instLogLikColumn(int k, int j, Eigen::Ref<Eigen::VectorXd> out) const override;

  std::unique_ptr<EmissionModel> clone() const override;

  const GaussParam& param(int k) const { return params_[k]; }
  void setParam(int k, Eigen::VectorXd mu, Eigen::MatrixXd sigma) {
    params_[k].set(std::move(mu), std::move(sigma));
  }

 private:
  Eigen::VectorXd mu0_;
  Eigen::MatrixXd sigma0_;
  double nu_;
  Eigen::MatrixXd iwScale_;
  int innerSweeps_;
  std::vector<GaussStats> stats_;
  std::vector<GaussParam> params_;
};

// 3. Symmetric Dirichlet prior over a finite vocabulary.
class MultinomialEmission : public EmissionModel {
 public:
  MultinomialEmission(std::shared_ptr<const ObsSet> obs, double dirichletWeight);

  std::string family() const override { return "multinomial"; }
  bool supportsCollapsed() const override { return true; }

  void setShape(int K, int KPrime) override;
  void clearAssignments() override;
  void addState() override;
  void removeState(int k) override;

  void add(int k, int j, int t) override;
  void remove(int k, int j, int t) override;
  int count(int k, int j) const override { return totals_[k]; }

  double predictiveLogLik(int k, int j, int t) const override;
  double priorPredictiveLogLik(int t) const override;
  double assignedMarginalLogLik() const override;

  void samplePriorParams(Rng& rng) override;
  void samplePosteriorParams(Rng& rng) override;
  double instLogLik(int k, int j, int t) const override;

  std::unique_ptr<EmissionModel> clone() const override;

  double dirichletWeight() const { return eta_; }
  const Eigen::VectorXd& logProbs(int k) const { return logTheta_[k]; }
  void setLogProbs(int k, Eigen::VectorXd lp) { logTheta_[k] = std::move(lp); }

 private:
  double eta_;
  std::vector<Eigen::VectorXi> counts_;  // per state, length vocab
  std::vector<int> totals_;
  std::vector<Eigen::VectorXd> logTheta_;
};

// 4. Per-state DP mixture of Gaussians. The component axis is dynamic in
//    collapsed mode (direct sampler) and fixed at the weak-limit truncation in
//    instantiated mode. Conjugate (NIW) and non-conjugate (Normal + IW) bases
//    are both supported; the collapsed path requires the conjugate base, and
//    the tied-covariance option requires the non-conjugate one.
class DPMixGaussianEmission : public EmissionModel {
 public:
  struct Base {
    bool conjugate = true;
    NIWParams niw;               // conjugate mode
    Eigen::VectorXd priorMean;   // non-conjugate mode
    Eigen::MatrixXd priorMeanCov;
    double iwDof = 0.0;
    Eigen::MatrixXd iwScale;
  };

  DPMixGaussianEmission(std::shared_ptr<const ObsSet> obs, Base base,
                        bool tiedCovariance = false, int innerSweeps = 5);

  std::string family() const override { return "dp-mix-gaussian"; }
  bool supportsCollapsed() const override { return base_.conjugate && !tiedCovariance_; }
  bool isMixture() const override { return true; }
  int numComponents(int k) const override { return static_cast<int>(stats_[k].size()); }

  void setShape(int K, int KPrime) override;
  void clearAssignments() override;
  void addState() override;
  void removeState(int k) override;
  void addComponent(int k) override;
  void removeComponent(int k, int j) override;

  void add(int k, int j, int t) override;
  void remove(int k, int j, int t) override;
  int count(int k, int j) const override { return stats_[k][j].n; }

  double predictiveLogLik(int k, int j, int t) const override;
  double priorPredictiveLogLik(int t) const override;
  double assignedMarginalLogLik() const override;

  void samplePriorParams(Rng& rng) override;
  void samplePosteriorParams(Rng& rng) override;
  double instLogLik(int k, int j, int t) const override;
  void instLogLikColumn(int k, int j, Eigen::Ref<Eigen::VectorXd> out) const override;

  std::unique_ptr<EmissionModel> clone() const override;

  bool tiedCovariance() const { return tiedCovariance_; }
  const Base& base() const { return base_; }
  const GaussParam& param(int k, int j) const { return params_[k][j]; }
  void setParam(int k, int j, Eigen::VectorXd mu, Eigen::MatrixXd sigma) {
    params_[k][j].set(std::move(mu), std::move(sigma));
  }

 private:
  void sampleComponentPrior(GaussParam& p, Rng& rng) const;
  void samplePosteriorNonConjugateCell(const GaussStats& st, GaussParam& p, Rng& rng);

  Base base_;
  bool tiedCovariance_;
  int innerSweeps_;
  std::vector<std::vector<GaussStats>> stats_;
  std::vector<std::vector<GaussParam>> params_;
};

}  // namespace shdp
