#include "shdp/direct.hpp"

#include <cmath>

namespace shdp {

namespace {
constexpr double kBetaFloor = 1e-300;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void growSquare(Eigen::MatrixXi& m, int newK) {
  Eigen::MatrixXi next = Eigen::MatrixXi::Zero(newK, newK);
  next.topLeftCorner(m.rows(), m.cols()) = m;
  m = std::move(next);
}

void dropRowCol(Eigen::MatrixXi& m, int k) {
  const int K = static_cast<int>(m.rows());
  Eigen::MatrixXi next(K - 1, K - 1);
  int rr = 0;
  for (int r = 0; r < K; ++r) {
    if (r == k) continue;
    int cc = 0;
    for (int c = 0; c < K; ++c) {
      if (c == k) continue;
      next(rr, cc++) = m(r, c);
    }
    ++rr;
  }
  m = std::move(next);
}

void dropRow(Eigen::MatrixXi& m, int k) {
  Eigen::MatrixXi next(m.rows() - 1, m.cols());
  int rr = 0;
  for (int r = 0; r < m.rows(); ++r) {
    if (r == k) continue;
    next.row(rr++) = m.row(r);
  }
  m = std::move(next);
}

}  // namespace

void sampleTableCounts(CountTables& ct, const Eigen::Ref<const Eigen::VectorXd>& beta,
                       const Hyperparams& hp, Rng& rng) {
  const int K = static_cast<int>(ct.n.rows());
  ct.m = Eigen::MatrixXi::Zero(K, K);
  const double alpha = hp.alpha();
  const double kappa = hp.kappa();
  for (int j = 0; j < K; ++j) {
    for (int k = 0; k < K; ++k) {
      const int njk = ct.n(j, k);
      if (njk == 0) continue;
      const double conc = std::max(alpha * beta[k] + (j == k ? kappa : 0.0), kBetaFloor);
      ct.m(j, k) = sampleCRT(njk, conc, rng);
    }
  }
}

void sampleOverrideTotals(CountTables& ct, const Eigen::Ref<const Eigen::VectorXd>& beta,
                          const Hyperparams& hp, Rng& rng) {
  const int K = static_cast<int>(ct.m.rows());
  ct.w = Eigen::VectorXi::Zero(K);
  const double rho = hp.rho;
  if (rho == 0.0) return;
  for (int j = 0; j < K; ++j) {
    const int mjj = ct.m(j, j);
    if (mjj == 0) continue;
    const double p = rho / (rho + beta[j] * (1.0 - rho));
    ct.w[j] = sampleBinomial(mjj, p, rng);
  }
}

void computeConsideredTables(CountTables& ct) {
  ct.mBar = ct.m;
  for (int j = 0; j < ct.m.rows(); ++j) {
    ct.mBar(j, j) = ct.m(j, j) - ct.w[j];
    if (ct.mBar(j, j) < 0)
      throw InternalConsistencyError("computeConsideredTables: negative considered count");
  }
}

Eigen::VectorXd sampleBetaDirect(const Eigen::MatrixXi& mBar, double gamma, Rng& rng) {
  const int K = static_cast<int>(mBar.cols());
  Eigen::VectorXd alpha(K + 1);
  for (int k = 0; k < K; ++k) alpha[k] = static_cast<double>(mBar.col(k).sum());
  alpha[K] = gamma;
  Eigen::VectorXd beta = sampleDirichletAllowZeros(alpha, rng);
  return beta.array().max(kBetaFloor);
}

std::pair<Eigen::VectorXd, Eigen::VectorXi> samplePriorStatePath(int T, const Hyperparams& hp,
                                                                 Rng& rng) {
  const double alpha = hp.alpha();
  const double kappa = hp.kappa();
  const double apk = hp.alphaPlusKappa;
  Eigen::VectorXd beta(1);
  beta[0] = 1.0;  // remainder only
  Eigen::VectorXi z(T);
  Eigen::MatrixXi n(0, 0);
  int K = 0;
  for (int t = 0; t < T; ++t) {
    Eigen::VectorXd w(K + 1);
    if (t == 0) {
      for (int k = 0; k < K; ++k) w[k] = beta[k];
      w[K] = beta[K];
    } else {
      const int j = z[t - 1];
      const double nj = n.row(j).sum();
      for (int k = 0; k < K; ++k)
        w[k] = (alpha * beta[k] + n(j, k) + (j == k ? kappa : 0.0)) / (apk + nj);
      w[K] = alpha * beta[K] / (apk + nj);
    }
    int k = sampleCategorical(w, rng);
    if (k == K) {
      double b = sampleBeta(1.0, hp.gamma, rng);
      double rem = beta[K];
      beta.conservativeResize(K + 2);
      beta[K] = std::max(b * rem, kBetaFloor);
      beta[K + 1] = std::max((1.0 - b) * rem, kBetaFloor);
      growSquare(n, K + 1);
      ++K;
    }
    z[t] = k;
    if (t > 0) n(z[t - 1], k) += 1;
  }
  return {std::move(beta), std::move(z)};
}

DirectSampler::DirectSampler(std::shared_ptr<EmissionModel> emissions, Hyperparams hp,
                             Options opt)
    : opt_(opt) {
  hp.validate();
  state_.hp = hp;
  state_.emissions = std::move(emissions);
  const ObsSet& obs = state_.emissions->obs();
  if (obs.grouped())
    throw UnsupportedOperationError("direct sampler: duration-tied observations unsupported");
  if (opt_.dpEmissions != state_.emissions->isMixture())
    throw InvalidParameterError("direct sampler: emission family does not match dpEmissions");
  if (!state_.emissions->supportsCollapsed())
    throw UnsupportedOperationError(
        "direct sampler: emission family has no collapsed predictive (blocked-only family)");
  if (opt_.componentCap < 0)
    throw InvalidParameterError("direct sampler: componentCap must be >= 0");
  state_.z = Eigen::VectorXi::Constant(obs.numObs(), -1);
  if (opt_.dpEmissions) state_.s = Eigen::VectorXi::Constant(obs.numObs(), -1);
  state_.beta = Eigen::VectorXd::Ones(1);
  state_.counts.resizeStates(0, opt_.componentCap);
  state_.emissions->setShape(0, opt_.componentCap);
  K_ = 0;
}

void DirectSampler::init(Rng& rng) {
  Hyperparams& hp = state_.hp;
  if (opt_.sampleHypers) {
    hp.gamma = sampleGamma(hp.gammaPrior.a, hp.gammaPrior.b, rng);
    hp.alphaPlusKappa = sampleGamma(hp.alphaKappaPrior.a, hp.alphaKappaPrior.b, rng);
    if (opt_.sampleRho) hp.rho = sampleBeta(hp.rhoPrior.c, hp.rhoPrior.d, rng);
    if (opt_.dpEmissions && opt_.sampleSigma)
      hp.sigma = sampleGamma(hp.sigmaPrior.a, hp.sigmaPrior.b, rng);
  }
  K_ = 0;
  state_.beta = Eigen::VectorXd::Ones(1);
  state_.counts.resizeStates(0, opt_.componentCap);
  state_.emissions->setShape(0, opt_.componentCap);
  state_.z.setConstant(-1);
  if (opt_.dpEmissions) state_.s.setConstant(-1);

  const int T = static_cast<int>(state_.z.size());
  for (int t = 0; t < T; ++t) {
    Eigen::VectorXd lw = zLogWeights(t);
    int k = sampleCategoricalLog(lw, rng);
    int comp = 0;
    if (opt_.dpEmissions && k < K_) comp = chooseComponent(k, t, rng);
    else if (opt_.dpEmissions && k == K_ && opt_.componentCap > 1)
      comp = rng.uniformInt(opt_.componentCap);
    attach(t, k, comp, rng);
  }
  removeEmptyStates();
  sampleAuxiliaryAndBeta(rng);
}

int DirectSampler::chooseComponent(int k, int t, Rng& rng) const {
  Eigen::VectorXd cw = componentLogWeights(k, t);
  if (cw.size() == 1) return 0;
  return sampleCategoricalLog(cw, rng);
}

Eigen::VectorXd DirectSampler::componentLogWeights(int k, int t) const {
  const EmissionModel& em = *state_.emissions;
  const double sigma = state_.hp.sigma;
  const int C = em.numComponents(k);
  double tot = 0.0;
  for (int j = 0; j < C; ++j) tot += em.count(k, j);
  if (opt_.componentCap == 0) {
    Eigen::VectorXd lw(C + 1);
    for (int j = 0; j < C; ++j) {
      const int njk = em.count(k, j);
      lw[j] = njk > 0 ? std::log(static_cast<double>(njk)) - std::log(sigma + tot) +
                            em.predictiveLogLik(k, j, t)
                      : kNegInf;
    }
    lw[C] = std::log(sigma) - std::log(sigma + tot) + em.priorPredictiveLogLik(t);
    return lw;
  }
  Eigen::VectorXd lw(C);
  const double cell = sigma / opt_.componentCap;
  for (int j = 0; j < C; ++j)
    lw[j] = std::log(cell + em.count(k, j)) - std::log(sigma + tot) +
            em.predictiveLogLik(k, j, t);
  return lw;
}

Eigen::VectorXd DirectSampler::zLogWeights(int t) const {
  const Eigen::VectorXd& beta = state_.beta;
  const Eigen::MatrixXi& n = state_.counts.n;
  const Hyperparams& hp = state_.hp;
  const double alpha = hp.alpha();
  const double kappa = hp.kappa();
  const double apk = hp.alphaPlusKappa;
  const int T = static_cast<int>(state_.z.size());
  const int j = t > 0 ? state_.z[t - 1] : -1;
  const int l = t < T - 1 ? state_.z[t + 1] : -1;

  Eigen::VectorXd lw(K_ + 1);
  for (int k = 0; k < K_; ++k) {
    double inc = j >= 0 ? alpha * beta[k] + n(j, k) + (j == k ? kappa : 0.0) : beta[k];
    double logOut = 0.0;
    if (l >= 0) {
      const double selfIn = (j == k) ? 1.0 : 0.0;
      double num = alpha * beta[l] + n(k, l) + (k == l ? kappa : 0.0) + selfIn * (k == l ? 1.0 : 0.0);
      double den = apk + n.row(k).sum() + selfIn;
      logOut = std::log(num) - std::log(den);
    }
    double lik = opt_.dpEmissions ? logSumExp(componentLogWeights(k, t))
                                  : state_.emissions->predictiveLogLik(k, 0, t);
    lw[k] = std::log(std::max(inc, kBetaFloor)) + logOut + lik;
  }
  double incNew = j >= 0 ? alpha * beta[K_] : beta[K_];
  double logOutNew = l >= 0 ? std::log(alpha * beta[l] + kBetaFloor) - std::log(apk) : 0.0;
  lw[K_] = std::log(std::max(incNew, kBetaFloor)) + logOutNew +
           state_.emissions->priorPredictiveLogLik(t);
  return lw;
}

void DirectSampler::detach(int t) {
  const int k = state_.z[t];
  if (k < 0) throw InternalConsistencyError("detach: time step not assigned");
  const int T = static_cast<int>(state_.z.size());
  if (t > 0 && state_.z[t - 1] >= 0) state_.counts.n(state_.z[t - 1], k) -= 1;
  if (t < T - 1 && state_.z[t + 1] >= 0) state_.counts.n(k, state_.z[t + 1]) -= 1;
  int comp = 0;
  if (opt_.dpEmissions) {
    comp = state_.s[t];
    state_.counts.nPrime(k, comp) -= 1;
  }
  state_.emissions->remove(k, comp, t);
  state_.z[t] = -1;
  if (opt_.dpEmissions) state_.s[t] = -1;
}

void DirectSampler::attach(int t, int k, int comp, Rng& rng) {
  const int T = static_cast<int>(state_.z.size());
  if (k == K_) {
    double b = sampleBeta(1.0, state_.hp.gamma, rng);
    double rem = state_.beta[K_];
    state_.beta.conservativeResize(K_ + 2);
    state_.beta[K_] = std::max(b * rem, kBetaFloor);
    state_.beta[K_ + 1] = std::max((1.0 - b) * rem, kBetaFloor);
    growSquare(state_.counts.n, K_ + 1);
    {
      Eigen::MatrixXi np = Eigen::MatrixXi::Zero(K_ + 1, state_.counts.nPrime.cols());
      np.topRows(K_) = state_.counts.nPrime;
      state_.counts.nPrime = std::move(np);
    }
    state_.emissions->addState();
    ++K_;
    ++newStates_;
  }
  if (opt_.dpEmissions) {
    if (opt_.componentCap == 0 && comp == state_.emissions->numComponents(k))
      state_.emissions->addComponent(k);
    if (comp >= state_.counts.nPrime.cols()) {
      Eigen::MatrixXi np = Eigen::MatrixXi::Zero(K_, comp + 1);
      np.leftCols(state_.counts.nPrime.cols()) = state_.counts.nPrime;
      state_.counts.nPrime = std::move(np);
    }
    state_.counts.nPrime(k, comp) += 1;
    state_.s[t] = comp;
  }
  state_.z[t] = k;
  if (t > 0 && state_.z[t - 1] >= 0) state_.counts.n(state_.z[t - 1], k) += 1;
  if (t < T - 1 && state_.z[t + 1] >= 0) state_.counts.n(k, state_.z[t + 1]) += 1;
  state_.emissions->add(k, comp, t);
}

void DirectSampler::resampleZt(int t, Rng& rng) {
  if (t < 0 || t >= state_.z.size()) throw RangeError("resampleZt: time index out of range");
  detach(t);
  Eigen::VectorXd lw = zLogWeights(t);
  int k = sampleCategoricalLog(lw, rng);
  int comp = 0;
  if (opt_.dpEmissions && k < K_) comp = chooseComponent(k, t, rng);
  else if (opt_.dpEmissions && k == K_ && opt_.componentCap > 1)
    comp = rng.uniformInt(opt_.componentCap);
  attach(t, k, comp, rng);
}

void DirectSampler::removeEmptyStates() {
  Eigen::VectorXi occupancy = Eigen::VectorXi::Zero(K_);
  for (Eigen::Index t = 0; t < state_.z.size(); ++t) occupancy[state_.z[t]] += 1;
  for (int k = K_ - 1; k >= 0; --k) {
    if (occupancy[k] > 0) continue;
    state_.beta[K_] += state_.beta[k];  // fold the dead state's mass into the remainder
    for (int i = k; i < K_; ++i) state_.beta[i] = state_.beta[i + 1];
    state_.beta.conservativeResize(K_);
    dropRowCol(state_.counts.n, k);
    dropRow(state_.counts.nPrime, k);
    state_.emissions->removeState(k);
    for (Eigen::Index t = 0; t < state_.z.size(); ++t)
      if (state_.z[t] > k) state_.z[t] -= 1;
    --K_;
  }
  if (opt_.dpEmissions && opt_.componentCap == 0) {
    // Drop emptied mixture components and compact the labels.
    for (int k = 0; k < K_; ++k) {
      for (int j = state_.emissions->numComponents(k) - 1; j >= 0; --j) {
        if (state_.emissions->count(k, j) > 0) continue;
        state_.emissions->removeComponent(k, j);
        for (Eigen::Index t = 0; t < state_.s.size(); ++t)
          if (state_.z[t] == k && state_.s[t] > j) state_.s[t] -= 1;
      }
    }
    int maxC = 1;
    for (int k = 0; k < K_; ++k) maxC = std::max(maxC, state_.emissions->numComponents(k));
    state_.counts.nPrime = Eigen::MatrixXi::Zero(K_, maxC);
    for (Eigen::Index t = 0; t < state_.s.size(); ++t)
      state_.counts.nPrime(state_.z[t], state_.s[t]) += 1;
  }
}

void DirectSampler::sampleAuxiliaryAndBeta(Rng& rng) {
  sampleTableCounts(state_.counts, state_.beta.head(K_), state_.hp, rng);
  sampleOverrideTotals(state_.counts, state_.beta.head(K_), state_.hp, rng);
  computeConsideredTables(state_.counts);
  state_.beta = sampleBetaDirect(state_.counts.mBar, state_.hp.gamma, rng);
}

void DirectSampler::sampleHyperparameters(Rng& rng) {
  Hyperparams& hp = state_.hp;
  Eigen::VectorXi mRow = state_.counts.m.rowwise().sum();
  Eigen::VectorXi nRow = state_.counts.n.rowwise().sum();
  hp.alphaPlusKappa = sampleAlphaPlusKappa(hp.alphaPlusKappa, mRow, nRow, hp.alphaKappaPrior,
                                           aux_, rng, opt_.hyperInnerIters);
  hp.gamma = sampleGammaConc(hp.gamma, computeKBar(state_.counts.mBar), state_.counts.mBar.sum(),
                             hp.gammaPrior, aux_, rng, opt_.hyperInnerIters);
  if (opt_.sampleRho)
    hp.rho = sampleRho(state_.counts.w.sum(), state_.counts.m.sum(), hp.rhoPrior, rng);
  if (opt_.dpEmissions && opt_.sampleSigma) {
    Eigen::VectorXi kPrime(K_), occ(K_);
    for (int k = 0; k < K_; ++k) {
      int nk = 0, ck = 0;
      for (int j = 0; j < state_.emissions->numComponents(k); ++j) {
        const int c = state_.emissions->count(k, j);
        nk += c;
        if (c > 0) ++ck;
      }
      kPrime[k] = ck;
      occ[k] = nk;
    }
    hp.sigma =
        sampleSigmaConc(hp.sigma, kPrime, occ, hp.sigmaPrior, aux_, rng, opt_.hyperInnerIters);
  }
}

DirectSweepReport DirectSampler::sweep(Rng& rng) {
  newStates_ = 0;
  const int T = static_cast<int>(state_.z.size());
  for (int t = 0; t < T; ++t) resampleZt(t, rng);
  removeEmptyStates();
  sampleAuxiliaryAndBeta(rng);
  if (opt_.sampleHypers) sampleHyperparameters(rng);
  DirectSweepReport rep;
  rep.acceptedNewStates = newStates_;
  rep.K = K_;
  rep.jointLogLik = jointLogLik();
  return rep;
}

double DirectSampler::jointLogLik() const {
  const Hyperparams& hp = state_.hp;
  const double alpha = hp.alpha();
  const double kappa = hp.kappa();
  const double apk = hp.alphaPlusKappa;
  const Eigen::VectorXd& beta = state_.beta;
  const Eigen::MatrixXi& n = state_.counts.n;
  double ll = std::log(std::max(beta[state_.z[0]], kBetaFloor));
  for (int j = 0; j < K_; ++j) {
    const int nj = n.row(j).sum();
    if (nj == 0) continue;
    ll += std::lgamma(apk) - std::lgamma(apk + nj);
    for (int k = 0; k < K_; ++k) {
      if (n(j, k) == 0) continue;
      const double cell = std::max(alpha * beta[k] + (j == k ? kappa : 0.0), kBetaFloor);
      ll += std::lgamma(cell + n(j, k)) - std::lgamma(cell);
    }
  }
  if (opt_.dpEmissions) {
    const double sigma = hp.sigma;
    for (int k = 0; k < K_; ++k) {
      int nk = 0, ck = 0;
      double comps = 0.0;
      for (int j = 0; j < state_.emissions->numComponents(k); ++j) {
        const int c = state_.emissions->count(k, j);
        if (c == 0) continue;
        nk += c;
        ++ck;
        if (opt_.componentCap == 0)
          comps += std::lgamma(static_cast<double>(c));
        else
          comps += std::lgamma(sigma / opt_.componentCap + c) -
                   std::lgamma(sigma / opt_.componentCap);
      }
      if (nk == 0) continue;
      ll += std::lgamma(sigma) - std::lgamma(sigma + nk) + comps;
      if (opt_.componentCap == 0) ll += ck * std::log(sigma);
    }
  }
  ll += state_.emissions->assignedMarginalLogLik();
  return ll;
}

}  // namespace shdp
