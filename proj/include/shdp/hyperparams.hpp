#pragma once

#include "shdp/errors.hpp"

namespace shdp {

// Gamma(a,b) hyperprior, rate parameterization: p(x) ~ x^{a-1} e^{-bx}.
struct GammaPrior {
  double a = 1.0;
  double b = 0.01;
};

// Beta(c,d) hyperprior.
struct BetaPrior {
  double c = 10.0;
  double d = 1.0;
};

// Concentration parameters of the sticky HDP-HMM, held as (alpha+kappa, rho)
// so that alpha = (1-rho)*(alpha+kappa) and kappa = rho*(alpha+kappa)
// reconstruct the pair exactly.
struct Hyperparams {
  double gamma = 1.0;           // top-level concentration
  double alphaPlusKappa = 1.0;  // transition-row concentration mass
  double rho = 0.0;             // self-transition proportion kappa/(alpha+kappa)
  double sigma = 1.0;           // DP-emission concentration

  GammaPrior gammaPrior;
  GammaPrior alphaKappaPrior;
  BetaPrior rhoPrior;
  GammaPrior sigmaPrior;

  double alpha() const { return (1.0 - rho) * alphaPlusKappa; }
  double kappa() const { return rho * alphaPlusKappa; }

  void validate() const {
    if (!(gamma > 0.0)) throw InvalidParameterError("Hyperparams: gamma must be positive");
    if (!(alphaPlusKappa > 0.0))
      throw InvalidParameterError("Hyperparams: alpha+kappa must be positive");
    if (rho < 0.0 || rho > 1.0) throw InvalidParameterError("Hyperparams: rho in [0,1]");
    if (!(sigma > 0.0)) throw InvalidParameterError("Hyperparams: sigma must be positive");
  }
};

}  // namespace shdp
