#pragma once

#include <Eigen/Dense>

#include "shdp/counts.hpp"
#include "shdp/hyperparams.hpp"
#include "shdp/prob.hpp"
#include "shdp/rng.hpp"

namespace shdp {

// Auxiliary variables of the concentration-parameter Gibbs cycles.
struct AuxVars {
  Eigen::VectorXd r;       // per-restaurant Beta draws, (alpha+kappa) cycle
  Eigen::VectorXi sInd;    // per-restaurant Bernoulli indicators
  double eta = 0.5;        // gamma cycle
  Eigen::VectorXd rPrime;  // per-state Beta draws, sigma cycle
  Eigen::VectorXi sPrime;
};

// One update of (alpha+kappa): `innerIters` alternations of the auxiliary
// draws r_j ~ Beta(a+k+1, n_j.), s_j ~ Ber(n_j./(n_j. + a+k)) and the Gamma
// conditional Gamma(a + m.. - sum s_j, b - sum log r_j). Restaurants with
// n_j. = 0 contribute nothing and are skipped.
double sampleAlphaPlusKappa(double current, const Eigen::VectorXi& mRowTotals,
                            const Eigen::VectorXi& nRowTotals, const GammaPrior& prior,
                            AuxVars& aux, Rng& rng, int innerIters = 50);

// One update of gamma via the two-Gamma mixture: eta ~ Beta(gamma+1, mBar..),
// then gamma from Gamma(a + Kbar, b - log eta) with probability
// odds/(1+odds), odds = (a + Kbar - 1)/(mBar.. (b - log eta)), else from
// Gamma(a + Kbar - 1, b - log eta). With no informative tables the draw is
// from the prior.
double sampleGammaConc(double current, int kBar, int mBarTotal, const GammaPrior& prior,
                       AuxVars& aux, Rng& rng, int innerIters = 50);

// One update of sigma; structurally the (alpha+kappa) cycle with per-state
// component counts K'_j and per-state draw counts (occupancies).
double sampleSigmaConc(double current, const Eigen::VectorXi& kPrimePerState,
                       const Eigen::VectorXi& drawCounts, const GammaPrior& prior, AuxVars& aux,
                       Rng& rng, int innerIters = 50);

// Exact Beta draw: rho ~ Beta(sum w + c, m.. - sum w + d).
double sampleRho(int wTotal, int mTotal, const BetaPrior& prior, Rng& rng);

// Number of unique dishes with at least one informative consideration:
// Kbar = sum_k 1(mBar_{.k} > 0).
int computeKBar(const Eigen::MatrixXi& mBar);

}  // namespace shdp
