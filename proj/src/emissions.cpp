#include "shdp/emissions.hpp"

#include <cmath>

namespace shdp {

double logMultivariateGamma(int d, double a) {
  double r = 0.25 * d * (d - 1) * std::log(M_PI);
  for (int i = 0; i < d; ++i) r += std::lgamma(a - 0.5 * i);
  return r;
}

namespace {

// log marginal likelihood of the observations summarized by `st` under an NIW
// base: the ratio of posterior to prior normalizers.
double niwMarginalLogLik(const NIWParams& prior, const GaussStats& st) {
  if (st.n == 0) return 0.0;
  const int d = prior.dim();
  NIWParams post = prior.posterior(st.n, st.sumY, st.sumYY);
  auto logDet = [](const Eigen::MatrixXd& m) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
      throw DecompositionError("niwMarginalLogLik: scale not SPD");
    double ld = 0.0;
    for (int i = 0; i < m.rows(); ++i) ld += 2.0 * std::log(llt.matrixL()(i, i));
    return ld;
  };
  return -0.5 * st.n * d * std::log(M_PI) +
         logMultivariateGamma(d, 0.5 * post.dof) - logMultivariateGamma(d, 0.5 * prior.dof) +
         0.5 * prior.dof * logDet(prior.scaleMatrix) - 0.5 * post.dof * logDet(post.scaleMatrix) +
         0.5 * d * (std::log(prior.pseudocount) - std::log(post.pseudocount));
}

}  // namespace

void GaussParam::set(Eigen::VectorXd m, Eigen::MatrixXd s) {
  mu = std::move(m);
  sigma = std::move(s);
  llt.compute(sigma);
  if (llt.info() != Eigen::Success)
    throw DecompositionError("GaussParam: covariance not SPD");
  double logDet = 0.0;
  for (int i = 0; i < sigma.rows(); ++i) logDet += 2.0 * std::log(llt.matrixL()(i, i));
  logNormConst = -0.5 * (sigma.rows() * std::log(2.0 * M_PI) + logDet);
}

double GaussParam::logLik(const Eigen::Ref<const Eigen::VectorXd>& y) const {
  Eigen::VectorXd diff = y - mu;
  return logNormConst - 0.5 * diff.dot(llt.solve(diff));
}

// --- EmissionModel defaults --------------------------------------------------

void EmissionModel::addComponent(int) {
  throw UnsupportedOperationError("addComponent: not a mixture family");
}
void EmissionModel::removeComponent(int, int) {
  throw UnsupportedOperationError("removeComponent: not a mixture family");
}
double EmissionModel::predictiveLogLik(int, int, int) const {
  throw UnsupportedOperationError(family() + ": collapsed predictive unavailable");
}
double EmissionModel::priorPredictiveLogLik(int) const {
  throw UnsupportedOperationError(family() + ": collapsed predictive unavailable");
}
double EmissionModel::assignedMarginalLogLik() const {
  throw UnsupportedOperationError(family() + ": collapsed marginal unavailable");
}
void EmissionModel::instLogLikColumn(int k, int j, Eigen::Ref<Eigen::VectorXd> out) const {
  for (int t = 0; t < obs().numObs(); ++t) out[t] = instLogLik(k, j, t);
}

// --- GaussianConjugateEmission ----------------------------------------------

GaussianConjugateEmission::GaussianConjugateEmission(std::shared_ptr<const ObsSet> obs,
                                                     NIWParams base)
    : EmissionModel(std::move(obs)), base_(std::move(base)) {
  base_.validate();
  if (this->obs().discrete)
    throw InvalidParameterError("gaussian-conjugate: needs real-valued observations");
  if (base_.dim() != this->obs().dim())
    throw InvalidParameterError("gaussian-conjugate: base dimension mismatch");
}

void GaussianConjugateEmission::setShape(int K, int KPrime) {
  K_ = K;
  KPrime_ = KPrime;
  stats_.assign(K, GaussStats{});
  for (auto& s : stats_) s.init(base_.dim());
  params_.assign(K, GaussParam{});
}

void GaussianConjugateEmission::clearAssignments() {
  for (auto& s : stats_) s.init(base_.dim());
}

void GaussianConjugateEmission::addState() {
  GaussStats s;
  s.init(base_.dim());
  stats_.push_back(std::move(s));
  params_.emplace_back();
  ++K_;
}

void GaussianConjugateEmission::removeState(int k) {
  stats_.erase(stats_.begin() + k);
  params_.erase(params_.begin() + k);
  --K_;
}

void GaussianConjugateEmission::add(int k, int, int t) { stats_[k].add(obs().real.row(t)); }

void GaussianConjugateEmission::remove(int k, int, int t) {
  if (stats_[k].n <= 0) throw InternalConsistencyError("emission cache underflow");
  stats_[k].remove(obs().real.row(t));
}

double GaussianConjugateEmission::predictiveLogLik(int k, int, int t) const {
  const GaussStats& st = stats_[k];
  if (st.n == 0) return priorPredictiveLogLik(t);
  return base_.posterior(st.n, st.sumY, st.sumYY).predictiveLogLik(obs().real.row(t));
}

double GaussianConjugateEmission::priorPredictiveLogLik(int t) const {
  return base_.predictiveLogLik(obs().real.row(t));
}

double GaussianConjugateEmission::assignedMarginalLogLik() const {
  double total = 0.0;
  for (const auto& st : stats_) total += niwMarginalLogLik(base_, st);
  return total;
}

void GaussianConjugateEmission::samplePriorParams(Rng& rng) {
  for (auto& p : params_) {
    auto [mu, sigma] = sampleNIW(base_, rng);
    p.set(std::move(mu), std::move(sigma));
  }
}

void GaussianConjugateEmission::samplePosteriorParams(Rng& rng) {
  for (int k = 0; k < K_; ++k) {
    const GaussStats& st = stats_[k];
    NIWParams post = st.n == 0 ? base_ : base_.posterior(st.n, st.sumY, st.sumYY);
    auto [mu, sigma] = sampleNIW(post, rng);
    params_[k].set(std::move(mu), std::move(sigma));
  }
}

double GaussianConjugateEmission::instLogLik(int k, int, int t) const {
  return params_[k].logLik(obs().real.row(t));
}

void GaussianConjugateEmission::instLogLikColumn(int k, int,
                                                 Eigen::Ref<Eigen::VectorXd> out) const {
  const GaussParam& p = params_[k];
  Eigen::MatrixXd diff = obs().real.rowwise() - p.mu.transpose();
  Eigen::MatrixXd solved = p.llt.matrixL().solve(diff.transpose());
  out = p.logNormConst - 0.5 * solved.colwise().squaredNorm().array();
}

std::unique_ptr<EmissionModel> GaussianConjugateEmission::clone() const {
  return std::make_unique<GaussianConjugateEmission>(*this);
}

// --- GaussianNonConjugateEmission ---------------------------------------------

GaussianNonConjugateEmission::GaussianNonConjugateEmission(
    std::shared_ptr<const ObsSet> obs, Eigen::VectorXd priorMean, Eigen::MatrixXd priorMeanCov,
    double iwDof, Eigen::MatrixXd iwScale, int innerSweeps)
    : EmissionModel(std::move(obs)),
      mu0_(std::move(priorMean)),
      sigma0_(std::move(priorMeanCov)),
      nu_(iwDof),
      iwScale_(std::move(iwScale)),
      innerSweeps_(innerSweeps) {
  const int d = this->obs().dim();
  if (this->obs().discrete)
    throw InvalidParameterError("gaussian-nonconjugate: needs real-valued observations");
  if (mu0_.size() != d || sigma0_.rows() != d || iwScale_.rows() != d)
    throw InvalidParameterError("gaussian-nonconjugate: prior dimension mismatch");
  if (!(nu_ > d - 1)) throw InvalidParameterError("gaussian-nonconjugate: iw dof too small");
  if (innerSweeps_ < 1) throw InvalidParameterError("gaussian-nonconjugate: innerSweeps >= 1");
}

void GaussianNonConjugateEmission::setShape(int K, int KPrime) {
  K_ = K;
  KPrime_ = KPrime;
  stats_.assign(K, GaussStats{});
  for (auto& s : stats_) s.init(static_cast<int>(mu0_.size()));
  params_.assign(K, GaussParam{});
}

void GaussianNonConjugateEmission::clearAssignments() {
  for (auto& s : stats_) s.init(static_cast<int>(mu0_.size()));
}

void GaussianNonConjugateEmission::addState() {
  GaussStats s;
  s.init(static_cast<int>(mu0_.size()));
  stats_.push_back(std::move(s));
  params_.emplace_back();
  ++K_;
}

void GaussianNonConjugateEmission::removeState(int k) {
  stats_.erase(stats_.begin() + k);
  params_.erase(params_.begin() + k);
  --K_;
}

void GaussianNonConjugateEmission::add(int k, int, int t) { stats_[k].add(obs().real.row(t)); }

void GaussianNonConjugateEmission::remove(int k, int, int t) {
  if (stats_[k].n <= 0) throw InternalConsistencyError("emission cache underflow");
  stats_[k].remove(obs().real.row(t));
}

void GaussianNonConjugateEmission::samplePriorParams(Rng& rng) {
  for (auto& p : params_) {
    Eigen::MatrixXd sigma = sampleInverseWishart(nu_, iwScale_, rng);
    Eigen::VectorXd mu = sampleMvNormal(mu0_, sigma0_, rng);
    p.set(std::move(mu), std::move(sigma));
  }
}

void GaussianNonConjugateEmission::samplePosteriorParams(Rng& rng) {
  const int d = static_cast<int>(mu0_.size());
  Eigen::MatrixXd prec0 = sigma0_.llt().solve(Eigen::MatrixXd::Identity(d, d));
  for (int k = 0; k < K_; ++k) {
    const GaussStats& st = stats_[k];
    if (st.n == 0) {
      Eigen::MatrixXd sigma = sampleInverseWishart(nu_, iwScale_, rng);
      Eigen::VectorXd mu = sampleMvNormal(mu0_, sigma0_, rng);
      params_[k].set(std::move(mu), std::move(sigma));
      continue;
    }
    Eigen::VectorXd mu = params_[k].mu.size() == d ? params_[k].mu : mu0_;
    Eigen::MatrixXd sigma;
    for (int it = 0; it < innerSweeps_; ++it) {
      Eigen::MatrixXd scatter = st.sumYY - st.sumY * mu.transpose() -
                                mu * st.sumY.transpose() + st.n * mu * mu.transpose();
      scatter = 0.5 * (scatter + scatter.transpose()).eval();
      sigma = sampleInverseWishart(nu_ + st.n, iwScale_ + scatter, rng);
      Eigen::MatrixXd precK = sigma.llt().solve(Eigen::MatrixXd::Identity(d, d));
      Eigen::MatrixXd postPrec = prec0 + st.n * precK;
      Eigen::LLT<Eigen::MatrixXd> lltPrec(postPrec);
      if (lltPrec.info() != Eigen::Success)
        throw DecompositionError("gaussian-nonconjugate: singular posterior precision");
      Eigen::MatrixXd postCov = lltPrec.solve(Eigen::MatrixXd::Identity(d, d));
      postCov = 0.5 * (postCov + postCov.transpose()).eval();
      Eigen::VectorXd postMean = postCov * (prec0 * mu0_ + precK * st.sumY);
      mu = sampleMvNormal(postMean, postCov, rng);
    }
    params_[k].set(std::move(mu), std::move(sigma));
  }
}

double GaussianNonConjugateEmission::instLogLik(int k, int, int t) const {
  return params_[k].logLik(obs().real.row(t));
}

void GaussianNonConjugateEmission::instLogLikColumn(int k, int,
                                                    Eigen::Ref<Eigen::VectorXd> out) const {
  const GaussParam& p = params_[k];
  Eigen::MatrixXd diff = obs().real.rowwise() - p.mu.transpose();
  Eigen::MatrixXd solved = p.llt.matrixL().solve(diff.transpose());
  out = p.logNormConst - 0.5 * solved.colwise().squaredNorm().array();
}

std::unique_ptr<EmissionModel> GaussianNonConjugateEmission::clone() const {
  return std::make_unique<GaussianNonConjugateEmission>(*this);
}

// --- MultinomialEmission -------------------------------------------------------

MultinomialEmission::MultinomialEmission(std::shared_ptr<const ObsSet> obs,
                                         double dirichletWeight)
    : EmissionModel(std::move(obs)), eta_(dirichletWeight) {
  if (!this->obs().discrete)
    throw InvalidParameterError("multinomial: needs symbol observations");
  if (this->obs().vocab < 2) throw InvalidParameterError("multinomial: vocab must be >= 2");
  if (!(eta_ > 0.0)) throw InvalidParameterError("multinomial: Dirichlet weight must be positive");
}

void MultinomialEmission::setShape(int K, int KPrime) {
  K_ = K;
  KPrime_ = KPrime;
  counts_.assign(K, Eigen::VectorXi::Zero(obs().vocab));
  totals_.assign(K, 0);
  logTheta_.assign(K, Eigen::VectorXd::Zero(obs().vocab));
}

void MultinomialEmission::clearAssignments() {
  for (auto& c : counts_) c.setZero();
  totals_.assign(totals_.size(), 0);
}

void MultinomialEmission::addState() {
  counts_.push_back(Eigen::VectorXi::Zero(obs().vocab));
  totals_.push_back(0);
  logTheta_.push_back(Eigen::VectorXd::Zero(obs().vocab));
  ++K_;
}

void MultinomialEmission::removeState(int k) {
  counts_.erase(counts_.begin() + k);
  totals_.erase(totals_.begin() + k);
  logTheta_.erase(logTheta_.begin() + k);
  --K_;
}

void MultinomialEmission::add(int k, int, int t) {
  counts_[k][obs().symbols[t]] += 1;
  totals_[k] += 1;
}

void MultinomialEmission::remove(int k, int, int t) {
  if (counts_[k][obs().symbols[t]] <= 0)
    throw InternalConsistencyError("emission cache underflow");
  counts_[k][obs().symbols[t]] -= 1;
  totals_[k] -= 1;
}

double MultinomialEmission::predictiveLogLik(int k, int, int t) const {
  const int v = obs().symbols[t];
  return std::log((eta_ + counts_[k][v]) / (eta_ * obs().vocab + totals_[k]));
}

double MultinomialEmission::priorPredictiveLogLik(int) const {
  return -std::log(static_cast<double>(obs().vocab));
}

double MultinomialEmission::assignedMarginalLogLik() const {
  const int V = obs().vocab;
  double total = 0.0;
  for (int k = 0; k < K_; ++k) {
    if (totals_[k] == 0) continue;
    total += std::lgamma(eta_ * V) - std::lgamma(eta_ * V + totals_[k]);
    for (int v = 0; v < V; ++v)
      if (counts_[k][v] > 0) total += std::lgamma(eta_ + counts_[k][v]) - std::lgamma(eta_);
  }
  return total;
}

void MultinomialEmission::samplePriorParams(Rng& rng) {
  Eigen::VectorXd alpha = Eigen::VectorXd::Constant(obs().vocab, eta_);
  for (int k = 0; k < K_; ++k)
    logTheta_[k] = sampleDirichlet(alpha, rng).vec().array().max(1e-300).log();
}

void MultinomialEmission::samplePosteriorParams(Rng& rng) {
  for (int k = 0; k < K_; ++k) {
    Eigen::VectorXd alpha = counts_[k].cast<double>().array() + eta_;
    logTheta_[k] = sampleDirichlet(alpha, rng).vec().array().max(1e-300).log();
  }
}

double MultinomialEmission::instLogLik(int k, int, int t) const {
  return logTheta_[k][obs().symbols[t]];
}

std::unique_ptr<EmissionModel> MultinomialEmission::clone() const {
  return std::make_unique<MultinomialEmission>(*this);
}

// --- DPMixGaussianEmission -----------------------------------------------------

DPMixGaussianEmission::DPMixGaussianEmission(std::shared_ptr<const ObsSet> obs, Base base,
                                             bool tiedCovariance, int innerSweeps)
    : EmissionModel(std::move(obs)),
      base_(std::move(base)),
      tiedCovariance_(tiedCovariance),
      innerSweeps_(innerSweeps) {
  if (this->obs().discrete)
    throw InvalidParameterError("dp-mix-gaussian: needs real-valued observations");
  const int d = this->obs().dim();
  if (base_.conjugate) {
    base_.niw.validate();
    if (base_.niw.dim() != d) throw InvalidParameterError("dp-mix-gaussian: base dim mismatch");
    if (tiedCovariance_)
      throw UnsupportedOperationError(
          "dp-mix-gaussian: tied covariance requires the non-conjugate base");
  } else {
    if (base_.priorMean.size() != d || base_.priorMeanCov.rows() != d ||
        base_.iwScale.rows() != d)
      throw InvalidParameterError("dp-mix-gaussian: base dim mismatch");
    if (!(base_.iwDof > d - 1)) throw InvalidParameterError("dp-mix-gaussian: iw dof too small");
  }
}

void DPMixGaussianEmission::setShape(int K, int KPrime) {
  K_ = K;
  KPrime_ = KPrime;
  const int d = obs().dim();
  stats_.assign(K, std::vector<GaussStats>(KPrime));
  for (auto& row : stats_)
    for (auto& s : row) s.init(d);
  params_.assign(K, std::vector<GaussParam>(KPrime));
}

void DPMixGaussianEmission::clearAssignments() {
  const int d = obs().dim();
  for (auto& row : stats_)
    for (auto& s : row) s.init(d);
}

void DPMixGaussianEmission::addState() {
  const int d = obs().dim();
  std::vector<GaussStats> row(KPrime_);
  for (auto& s : row) s.init(d);
  stats_.push_back(std::move(row));
  params_.emplace_back(KPrime_);
  ++K_;
}

void DPMixGaussianEmission::removeState(int k) {
  stats_.erase(stats_.begin() + k);
  params_.erase(params_.begin() + k);
  --K_;
}

void DPMixGaussianEmission::addComponent(int k) {
  GaussStats s;
  s.init(obs().dim());
  stats_[k].push_back(std::move(s));
  params_[k].emplace_back();
}

void DPMixGaussianEmission::removeComponent(int k, int j) {
  if (stats_[k][j].n != 0)
    throw InternalConsistencyError("removeComponent: component not empty");
  stats_[k].erase(stats_[k].begin() + j);
  params_[k].erase(params_[k].begin() + j);
}

void DPMixGaussianEmission::add(int k, int j, int t) { stats_[k][j].add(obs().real.row(t)); }

void DPMixGaussianEmission::remove(int k, int j, int t) {
  if (stats_[k][j].n <= 0) throw InternalConsistencyError("emission cache underflow");
  stats_[k][j].remove(obs().real.row(t));
}

double DPMixGaussianEmission::predictiveLogLik(int k, int j, int t) const {
  if (!supportsCollapsed())
    throw UnsupportedOperationError("dp-mix-gaussian: collapsed predictive needs conjugate base");
  const GaussStats& st = stats_[k][j];
  if (st.n == 0) return priorPredictiveLogLik(t);
  return base_.niw.posterior(st.n, st.sumY, st.sumYY).predictiveLogLik(obs().real.row(t));
}

double DPMixGaussianEmission::priorPredictiveLogLik(int t) const {
  if (!supportsCollapsed())
    throw UnsupportedOperationError("dp-mix-gaussian: collapsed predictive needs conjugate base");
  return base_.niw.predictiveLogLik(obs().real.row(t));
}

double DPMixGaussianEmission::assignedMarginalLogLik() const {
  if (!supportsCollapsed())
    throw UnsupportedOperationError("dp-mix-gaussian: collapsed marginal needs conjugate base");
  double total = 0.0;
  for (const auto& row : stats_)
    for (const auto& st : row) total += niwMarginalLogLik(base_.niw, st);
  return total;
}

void DPMixGaussianEmission::sampleComponentPrior(GaussParam& p, Rng& rng) const {
  if (base_.conjugate) {
    auto [mu, sigma] = sampleNIW(base_.niw, rng);
    p.set(std::move(mu), std::move(sigma));
  } else {
    Eigen::MatrixXd sigma = sampleInverseWishart(base_.iwDof, base_.iwScale, rng);
    Eigen::VectorXd mu = sampleMvNormal(base_.priorMean, base_.priorMeanCov, rng);
    p.set(std::move(mu), std::move(sigma));
  }
}

void DPMixGaussianEmission::samplePriorParams(Rng& rng) {
  for (auto& row : params_) {
    GaussParam shared;
    if (tiedCovariance_) {
      shared.sigma = sampleInverseWishart(base_.iwDof, base_.iwScale, rng);
    }
    for (auto& p : row) {
      if (tiedCovariance_) {
        Eigen::VectorXd mu = sampleMvNormal(base_.priorMean, base_.priorMeanCov, rng);
        p.set(std::move(mu), shared.sigma);
      } else {
        sampleComponentPrior(p, rng);
      }
    }
  }
}

void DPMixGaussianEmission::samplePosteriorParams(Rng& rng) {
  const int d = obs().dim();
  if (!tiedCovariance_) {
    for (int k = 0; k < K_; ++k) {
      for (int j = 0; j < numComponents(k); ++j) {
        const GaussStats& st = stats_[k][j];
        if (st.n == 0) {
          sampleComponentPrior(params_[k][j], rng);
          continue;
        }
        if (base_.conjugate) {
          NIWParams post = base_.niw.posterior(st.n, st.sumY, st.sumYY);
          auto [mu, sigma] = sampleNIW(post, rng);
          params_[k][j].set(std::move(mu), std::move(sigma));
        } else {
          samplePosteriorNonConjugateCell(st, params_[k][j], rng);
        }
      }
    }
    return;
  }

  // Tied covariances: within state k all components share one Sigma_k, drawn
  // from IW(nu + sum_j n_kj, S + pooled residual scatter); means are then
  // Gaussian-conjugate given the shared covariance.
  Eigen::MatrixXd prec0 = base_.priorMeanCov.llt().solve(Eigen::MatrixXd::Identity(d, d));
  for (int k = 0; k < K_; ++k) {
    Eigen::MatrixXd sigma = params_[k][0].sigma.size() > 0
                                ? params_[k][0].sigma
                                : base_.iwScale / std::max(1.0, base_.iwDof - d - 1);
    std::vector<Eigen::VectorXd> mus(numComponents(k));
    for (int j = 0; j < numComponents(k); ++j)
      mus[j] = params_[k][j].mu.size() == d ? params_[k][j].mu : base_.priorMean;
    for (int it = 0; it < innerSweeps_; ++it) {
      Eigen::MatrixXd precK = sigma.llt().solve(Eigen::MatrixXd::Identity(d, d));
      for (int j = 0; j < numComponents(k); ++j) {
        const GaussStats& st = stats_[k][j];
        if (st.n == 0) {
          mus[j] = sampleMvNormal(base_.priorMean, base_.priorMeanCov, rng);
          continue;
        }
        Eigen::MatrixXd postPrec = prec0 + st.n * precK;
        Eigen::MatrixXd postCov = postPrec.llt().solve(Eigen::MatrixXd::Identity(d, d));
        postCov = 0.5 * (postCov + postCov.transpose()).eval();
        Eigen::VectorXd postMean = postCov * (prec0 * base_.priorMean + precK * st.sumY);
        mus[j] = sampleMvNormal(postMean, postCov, rng);
      }
      double pooledN = 0.0;
      Eigen::MatrixXd pooled = base_.iwScale;
      for (int j = 0; j < numComponents(k); ++j) {
        const GaussStats& st = stats_[k][j];
        if (st.n == 0) continue;
        pooledN += st.n;
        pooled += st.sumYY - st.sumY * mus[j].transpose() - mus[j] * st.sumY.transpose() +
                  st.n * mus[j] * mus[j].transpose();
      }
      pooled = 0.5 * (pooled + pooled.transpose()).eval();
      sigma = sampleInverseWishart(base_.iwDof + pooledN, pooled, rng);
    }
    for (int j = 0; j < numComponents(k); ++j) params_[k][j].set(mus[j], sigma);
  }
}

void DPMixGaussianEmission::samplePosteriorNonConjugateCell(const GaussStats& st, GaussParam& p,
                                                            Rng& rng) {
  const int d = obs().dim();
  Eigen::MatrixXd prec0 = base_.priorMeanCov.llt().solve(Eigen::MatrixXd::Identity(d, d));
  Eigen::VectorXd mu = p.mu.size() == d ? p.mu : base_.priorMean;
  Eigen::MatrixXd sigma;
  for (int it = 0; it < innerSweeps_; ++it) {
    Eigen::MatrixXd scatter = st.sumYY - st.sumY * mu.transpose() - mu * st.sumY.transpose() +
                              st.n * mu * mu.transpose();
    scatter = 0.5 * (scatter + scatter.transpose()).eval();
    sigma = sampleInverseWishart(base_.iwDof + st.n, base_.iwScale + scatter, rng);
    Eigen::MatrixXd precK = sigma.llt().solve(Eigen::MatrixXd::Identity(d, d));
    Eigen::MatrixXd postPrec = prec0 + st.n * precK;
    Eigen::MatrixXd postCov = postPrec.llt().solve(Eigen::MatrixXd::Identity(d, d));
    postCov = 0.5 * (postCov + postCov.transpose()).eval();
    Eigen::VectorXd postMean = postCov * (prec0 * base_.priorMean + precK * st.sumY);
    mu = sampleMvNormal(postMean, postCov, rng);
  }
  p.set(std::move(mu), std::move(sigma));
}

double DPMixGaussianEmission::instLogLik(int k, int j, int t) const {
  return params_[k][j].logLik(obs().real.row(t));
}

void DPMixGaussianEmission::instLogLikColumn(int k, int j,
                                             Eigen::Ref<Eigen::VectorXd> out) const {
  const GaussParam& p = params_[k][j];
  Eigen::MatrixXd diff = obs().real.rowwise() - p.mu.transpose();
  Eigen::MatrixXd solved = p.llt.matrixL().solve(diff.transpose());
  out = p.logNormConst - 0.5 * solved.colwise().squaredNorm().array();
}

std::unique_ptr<EmissionModel> DPMixGaussianEmission::clone() const {
  return std::make_unique<DPMixGaussianEmission>(*this);
}

}  // namespace shdp
