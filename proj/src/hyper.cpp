#include "shdp/hyper.hpp"

#include <cmath>

namespace shdp {

double sampleAlphaPlusKappa(double current, const Eigen::VectorXi& mRowTotals,
                            const Eigen::VectorXi& nRowTotals, const GammaPrior& prior,
                            AuxVars& aux, Rng& rng, int innerIters) {
  const Eigen::Index J = nRowTotals.size();
  if (mRowTotals.size() != J)
    throw InvalidParameterError("sampleAlphaPlusKappa: table/draw count length mismatch");
  double conc = current;
  const double mTotal = mRowTotals.sum();
  aux.r = Eigen::VectorXd::Ones(J);
  aux.sInd = Eigen::VectorXi::Zero(J);
  for (int it = 0; it < innerIters; ++it) {
    double sumLogR = 0.0;
    double sumS = 0.0;
    for (Eigen::Index j = 0; j < J; ++j) {
      const int nj = nRowTotals[j];
      if (nj == 0) {
        aux.r[j] = 1.0;
        aux.sInd[j] = 0;
        continue;
      }
      aux.r[j] = sampleBeta(conc + 1.0, static_cast<double>(nj), rng);
      aux.sInd[j] = sampleBernoulli(nj / (nj + conc), rng) ? 1 : 0;
      sumLogR += std::log(std::max(aux.r[j], 1e-300));
      sumS += aux.sInd[j];
    }
    const double shape = prior.a + mTotal - sumS;
    const double rate = prior.b - sumLogR;
    if (!(rate > 0.0)) throw InternalConsistencyError("sampleAlphaPlusKappa: non-positive rate");
    if (!(shape > 0.0))
      throw InternalConsistencyError("sampleAlphaPlusKappa: non-positive shape");
    conc = sampleGamma(shape, rate, rng);
  }
  return conc;
}

double sampleGammaConc(double current, int kBar, int mBarTotal, const GammaPrior& prior,
                       AuxVars& aux, Rng& rng, int innerIters) {
  if (mBarTotal < 1) return sampleGamma(prior.a, prior.b, rng);
  double conc = current;
  for (int it = 0; it < innerIters; ++it) {
    aux.eta = sampleBeta(conc + 1.0, static_cast<double>(mBarTotal), rng);
    const double rate = prior.b - std::log(std::max(aux.eta, 1e-300));
    const double odds = (prior.a + kBar - 1.0) / (mBarTotal * rate);
    const bool upper = sampleBernoulli(odds / (1.0 + odds), rng);
    const double shape = upper ? prior.a + kBar : prior.a + kBar - 1.0;
    conc = sampleGamma(shape, rate, rng);
  }
  return conc;
}

double sampleSigmaConc(double current, const Eigen::VectorXi& kPrimePerState,
                       const Eigen::VectorXi& drawCounts, const GammaPrior& prior, AuxVars& aux,
                       Rng& rng, int innerIters) {
  const Eigen::Index J = drawCounts.size();
  if (kPrimePerState.size() != J)
    throw InvalidParameterError("sampleSigmaConc: component/draw count length mismatch");
  double conc = current;
  const double kTotal = kPrimePerState.sum();
  aux.rPrime = Eigen::VectorXd::Ones(J);
  aux.sPrime = Eigen::VectorXi::Zero(J);
  for (int it = 0; it < innerIters; ++it) {
    double sumLogR = 0.0;
    double sumS = 0.0;
    for (Eigen::Index j = 0; j < J; ++j) {
      const int nj = drawCounts[j];
      if (nj == 0) {
        aux.rPrime[j] = 1.0;
        aux.sPrime[j] = 0;
        continue;
      }
      aux.rPrime[j] = sampleBeta(conc + 1.0, static_cast<double>(nj), rng);
      aux.sPrime[j] = sampleBernoulli(nj / (nj + conc), rng) ? 1 : 0;
      sumLogR += std::log(std::max(aux.rPrime[j], 1e-300));
      sumS += aux.sPrime[j];
    }
    const double shape = prior.a + kTotal - sumS;
    const double rate = prior.b - sumLogR;
    if (!(rate > 0.0)) throw InternalConsistencyError("sampleSigmaConc: non-positive rate");
    if (!(shape > 0.0)) throw InternalConsistencyError("sampleSigmaConc: non-positive shape");
    conc = sampleGamma(shape, rate, rng);
  }
  return conc;
}

double sampleRho(int wTotal, int mTotal, const BetaPrior& prior, Rng& rng) {
  if (wTotal < 0 || wTotal > mTotal)
    throw InternalConsistencyError("sampleRho: override total exceeds table total");
  return sampleBeta(wTotal + prior.c, mTotal - wTotal + prior.d, rng);
}

int computeKBar(const Eigen::MatrixXi& mBar) {
  int kBar = 0;
  for (Eigen::Index k = 0; k < mBar.cols(); ++k)
    if (mBar.col(k).sum() > 0) ++kBar;
  return kBar;
}

}  // namespace shdp
