#include "shdp/blocked.hpp"

#include <cmath>

#include "shdp/direct.hpp"

namespace shdp {

namespace {
constexpr double kBetaFloor = 1e-300;

void validateLogF(const Eigen::Ref<const Eigen::MatrixXd>& logF) {
  for (Eigen::Index i = 0; i < logF.size(); ++i) {
    const double v = logF.data()[i];
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
      throw InvalidParameterError("backwardMessages: non-finite emission log-density");
  }
}
}  // namespace

MessageTable backwardMessages(const Eigen::Ref<const Eigen::MatrixXd>& logF,
                              const Eigen::Ref<const Eigen::MatrixXd>& pi,
                              const Eigen::Ref<const Eigen::VectorXd>& init) {
  const int T = static_cast<int>(logF.rows());
  const int L = static_cast<int>(logF.cols());
  if (T < 1) throw InvalidParameterError("backwardMessages: empty sequence");
  if (pi.rows() != L || pi.cols() != L || init.size() != L)
    throw InvalidParameterError("backwardMessages: shape mismatch");
  for (int k = 0; k < L; ++k)
    if (std::abs(pi.row(k).sum() - 1.0) > 1e-8)
      throw InvalidParameterError("backwardMessages: pi row not normalized");
  validateLogF(logF);

  MessageTable msg;
  msg.logValues.resize(T, L);
  msg.logNorms.resize(T);
  Eigen::VectorXd bhat = Eigen::VectorXd::Ones(L);
  msg.logValues.row(T - 1).setZero();
  for (int t = T - 2; t >= 0; --t) {
    const double shift = logF.row(t + 1).maxCoeff();
    if (!std::isfinite(shift))
      throw DegenerateDistributionError("backwardMessages: all emissions impossible at a step");
    Eigen::VectorXd g =
        (logF.row(t + 1).transpose().array() - shift).exp() * bhat.array();
    Eigen::VectorXd u = pi * g;
    const double c = u.sum();
    if (!(c > 0.0) || !std::isfinite(c))
      throw DegenerateDistributionError("backwardMessages: message vanished");
    bhat = u / c;
    msg.logValues.row(t) = bhat.array().log();
    msg.logNorms[t + 1] = std::log(c) + shift;
  }
  // Initial contraction against the z_1 distribution.
  const double shift0 = logF.row(0).maxCoeff();
  if (!std::isfinite(shift0))
    throw DegenerateDistributionError("backwardMessages: all emissions impossible at t=1");
  const double c0 = (init.array() * (logF.row(0).transpose().array() - shift0).exp() *
                     bhat.array())
                        .sum();
  if (!(c0 > 0.0) || !std::isfinite(c0))
    throw DegenerateDistributionError("backwardMessages: initial contraction vanished");
  msg.logNorms[0] = std::log(c0) + shift0;
  return msg;
}

Eigen::VectorXi forwardSampleZ(const Eigen::Ref<const Eigen::MatrixXd>& logF,
                               const Eigen::Ref<const Eigen::MatrixXd>& pi,
                               const MessageTable& messages,
                               const Eigen::Ref<const Eigen::VectorXd>& init, Rng& rng) {
  const int T = static_cast<int>(logF.rows());
  const int L = static_cast<int>(logF.cols());
  Eigen::MatrixXd logPi = pi.array().log();
  Eigen::VectorXd logInit = init.array().max(kBetaFloor).log();
  Eigen::VectorXi z(T);
  Eigen::VectorXd lw =
      logInit + logF.row(0).transpose() + messages.logValues.row(0).transpose();
  z[0] = sampleCategoricalLog(lw, rng);
  for (int t = 1; t < T; ++t) {
    lw = logPi.row(z[t - 1]).transpose() + logF.row(t).transpose() +
         messages.logValues.row(t).transpose();
    z[t] = sampleCategoricalLog(lw, rng);
  }
  return z;
}

Eigen::MatrixXd sampleTransitions(const Eigen::MatrixXi& n,
                                  const Eigen::Ref<const Eigen::VectorXd>& beta,
                                  const Hyperparams& hp, Rng& rng) {
  const int L = static_cast<int>(beta.size());
  if (n.rows() != L || n.cols() != L)
    throw InvalidParameterError("sampleTransitions: count shape mismatch");
  Eigen::MatrixXd pi(L, L);
  for (int k = 0; k < L; ++k) {
    Eigen::VectorXd a = transitionRowPrior(beta, hp, k) + n.row(k).transpose().cast<double>();
    pi.row(k) = sampleDirichletAllowZeros(a, rng);
  }
  return pi;
}

Eigen::VectorXd sampleBetaWeakLimit(const Eigen::MatrixXi& mBar, double gamma, int L, Rng& rng) {
  if (mBar.cols() != L) throw InvalidParameterError("sampleBetaWeakLimit: shape mismatch");
  Eigen::VectorXd a(L);
  for (int k = 0; k < L; ++k) a[k] = gamma / L + mBar.col(k).sum();
  return sampleDirichlet(a, rng).vec().array().max(kBetaFloor);
}

Eigen::MatrixXd samplePsi(const Eigen::MatrixXi& nPrime, double sigma, int LPrime, Rng& rng) {
  if (nPrime.cols() != LPrime) throw InvalidParameterError("samplePsi: shape mismatch");
  Eigen::MatrixXd psi(nPrime.rows(), LPrime);
  for (int k = 0; k < nPrime.rows(); ++k) {
    Eigen::VectorXd a =
        nPrime.row(k).transpose().cast<double>().array() + sigma / LPrime;
    psi.row(k) = sampleDirichlet(a, rng).vec().array().max(kBetaFloor);
  }
  return psi;
}

BlockedSampler::BlockedSampler(std::shared_ptr<EmissionModel> emissions, Hyperparams hp,
                               Options opt)
    : opt_(opt) {
  hp.validate();
  opt_.trunc.validate();
  state_.hp = hp;
  state_.emissions = std::move(emissions);
  if (opt_.dpEmissions != state_.emissions->isMixture())
    throw InvalidParameterError("blocked sampler: emission family does not match dpEmissions");
  if (!opt_.dpEmissions) opt_.trunc.LPrime = 1;
  const ObsSet& obs = state_.emissions->obs();
  const int L = opt_.trunc.L;
  const int LP = opt_.trunc.LPrime;
  state_.z = Eigen::VectorXi::Constant(obs.numSteps(), -1);
  if (opt_.dpEmissions) state_.s = Eigen::VectorXi::Constant(obs.numObs(), -1);
  state_.beta = Eigen::VectorXd::Constant(L, 1.0 / L);
  state_.counts.resizeStates(L, LP);
  state_.emissions->setShape(L, LP);
}

void BlockedSampler::init(Rng& rng) {
  Hyperparams& hp = state_.hp;
  const int L = opt_.trunc.L;
  const int LP = opt_.trunc.LPrime;
  if (opt_.sampleHypers) {
    hp.gamma = sampleGamma(hp.gammaPrior.a, hp.gammaPrior.b, rng);
    hp.alphaPlusKappa = sampleGamma(hp.alphaKappaPrior.a, hp.alphaKappaPrior.b, rng);
    if (opt_.sampleRho) hp.rho = sampleBeta(hp.rhoPrior.c, hp.rhoPrior.d, rng);
    if (opt_.dpEmissions && opt_.sampleSigma)
      hp.sigma = sampleGamma(hp.sigmaPrior.a, hp.sigmaPrior.b, rng);
  }
  state_.emissions->samplePriorParams(rng);
  if (opt_.betaFixedUniform) {
    state_.beta = Eigen::VectorXd::Constant(L, 1.0 / L);
  } else {
    state_.beta =
        sampleDirichlet(Eigen::VectorXd::Constant(L, hp.gamma / L), rng).vec().array().max(
            kBetaFloor);
  }
  state_.pi = sampleTransitions(Eigen::MatrixXi::Zero(L, L), state_.beta, hp, rng);
  if (opt_.dpEmissions)
    state_.psi = samplePsi(Eigen::MatrixXi::Zero(L, LP), hp.sigma, LP, rng);
  BlockedSweepReport rep;
  resampleSequences(rng, rep);
}

Eigen::MatrixXd BlockedSampler::emissionLogLikMatrix() const {
  const EmissionModel& em = *state_.emissions;
  const ObsSet& obs = em.obs();
  const int L = opt_.trunc.L;
  const int LP = opt_.trunc.LPrime;
  const int numObs = obs.numObs();
  const int T = obs.numSteps();
  Eigen::MatrixXd perObs(numObs, L);
  if (!opt_.dpEmissions) {
    Eigen::VectorXd col(numObs);
    for (int k = 0; k < L; ++k) {
      em.instLogLikColumn(k, 0, col);
      perObs.col(k) = col;
    }
  } else {
    Eigen::MatrixXd comp(numObs, LP);
    Eigen::VectorXd col(numObs);
    for (int k = 0; k < L; ++k) {
      for (int j = 0; j < LP; ++j) {
        em.instLogLikColumn(k, j, col);
        comp.col(j) = col.array() + std::log(state_.psi(k, j));
      }
      Eigen::VectorXd rowMax = comp.rowwise().maxCoeff();
      perObs.col(k) =
          rowMax.array() + ((comp.colwise() - rowMax).array().exp().rowwise().sum()).log();
    }
  }
  if (!obs.grouped()) return perObs;
  Eigen::MatrixXd logF(T, L);
  for (int t = 0; t < T; ++t) {
    const auto& span = obs.spans[t];
    logF.row(t) = perObs.middleRows(span.first, span.second - span.first).colwise().sum();
  }
  return logF;
}

void BlockedSampler::resampleSequences(Rng& rng, BlockedSweepReport& rep) {
  Eigen::MatrixXd logF = emissionLogLikMatrix();
  MessageTable msg = backwardMessages(logF, state_.pi, state_.beta);
  state_.z = forwardSampleZ(logF, state_.pi, msg, state_.beta, rng);
  rep.dataLogLik = msg.logLik();
  if (opt_.dpEmissions) {
    const EmissionModel& em = *state_.emissions;
    const ObsSet& obs = em.obs();
    const int LP = opt_.trunc.LPrime;
    Eigen::MatrixXd logPsi = state_.psi.array().log();
    Eigen::VectorXd lw(LP);
    for (int t = 0; t < obs.numSteps(); ++t) {
      const int k = state_.z[t];
      for (int i = obs.spans[t].first; i < obs.spans[t].second; ++i) {
        for (int j = 0; j < LP; ++j) lw[j] = logPsi(k, j) + em.instLogLik(k, j, i);
        state_.s[i] = sampleCategoricalLog(lw, rng);
      }
    }
  }
  rebuildCounts();
  Eigen::VectorXi occ = Eigen::VectorXi::Zero(opt_.trunc.L);
  for (Eigen::Index t = 0; t < state_.z.size(); ++t) occ[state_.z[t]] += 1;
  rep.occupiedStates = static_cast<int>((occ.array() > 0).count());
}

void BlockedSampler::rebuildCounts() {
  const ObsSet& obs = state_.emissions->obs();
  state_.counts.n.setZero();
  state_.counts.nPrime.setZero();
  EmissionModel& em = *state_.emissions;
  em.clearAssignments();
  for (int t = 0; t < obs.numSteps(); ++t) {
    if (t > 0) state_.counts.n(state_.z[t - 1], state_.z[t]) += 1;
    for (int i = obs.spans[t].first; i < obs.spans[t].second; ++i) {
      const int j = opt_.dpEmissions ? state_.s[i] : 0;
      if (opt_.dpEmissions) state_.counts.nPrime(state_.z[t], j) += 1;
      em.add(state_.z[t], j, i);
    }
  }
}

void BlockedSampler::sampleHyperparameters(Rng& rng) {
  Hyperparams& hp = state_.hp;
  Eigen::VectorXi mRow = state_.counts.m.rowwise().sum();
  Eigen::VectorXi nRow = state_.counts.n.rowwise().sum();
  hp.alphaPlusKappa = sampleAlphaPlusKappa(hp.alphaPlusKappa, mRow, nRow, hp.alphaKappaPrior,
                                           aux_, rng, opt_.hyperInnerIters);
  if (!opt_.betaFixedUniform)
    hp.gamma = sampleGammaConc(hp.gamma, computeKBar(state_.counts.mBar),
                               state_.counts.mBar.sum(), hp.gammaPrior, aux_, rng,
                               opt_.hyperInnerIters);
  if (opt_.sampleRho)
    hp.rho = sampleRho(state_.counts.w.sum(), state_.counts.m.sum(), hp.rhoPrior, rng);
  if (opt_.dpEmissions && opt_.sampleSigma) {
    const int L = opt_.trunc.L;
    Eigen::VectorXi kPrime(L), occCounts(L);
    for (int k = 0; k < L; ++k) {
      kPrime[k] = static_cast<int>((state_.counts.nPrime.row(k).array() > 0).count());
      occCounts[k] = state_.counts.nPrime.row(k).sum();
    }
    hp.sigma =
        sampleSigmaConc(hp.sigma, kPrime, occCounts, hp.sigmaPrior, aux_, rng,
                        opt_.hyperInnerIters);
  }
}

BlockedSweepReport BlockedSampler::sweep(Rng& rng) {
  BlockedSweepReport rep;
  resampleSequences(rng, rep);
  sampleTableCounts(state_.counts, state_.beta, state_.hp, rng);
  sampleOverrideTotals(state_.counts, state_.beta, state_.hp, rng);
  computeConsideredTables(state_.counts);
  if (!opt_.betaFixedUniform)
    state_.beta = sampleBetaWeakLimit(state_.counts.mBar, state_.hp.gamma, opt_.trunc.L, rng);
  state_.pi = sampleTransitions(state_.counts.n, state_.beta, state_.hp, rng);
  if (opt_.dpEmissions)
    state_.psi = samplePsi(state_.counts.nPrime, state_.hp.sigma, opt_.trunc.LPrime, rng);
  state_.emissions->samplePosteriorParams(rng);
  if (opt_.sampleHypers) sampleHyperparameters(rng);
  return rep;
}

}  // namespace shdp
