#pragma once

#include <Eigen/Dense>

#include "shdp/errors.hpp"
#include "shdp/rng.hpp"

namespace shdp {

// Normalized discrete distribution. Construction checks the invariants
// (entries >= 0, sum within tol of 1); the payload is a plain Eigen vector.
class ProbVector {
 public:
  ProbVector() = default;

  static ProbVector checked(Eigen::VectorXd w, double tol = 1e-10) {
    if (w.size() == 0) throw InvalidParameterError("ProbVector: empty");
    if ((w.array() < 0.0).any() || !w.allFinite())
      throw InvalidParameterError("ProbVector: negative or non-finite entry");
    if (std::abs(w.sum() - 1.0) > tol)
      throw InvalidParameterError("ProbVector: entries do not sum to 1");
    ProbVector p;
    p.w_ = std::move(w);
    return p;
  }

  const Eigen::VectorXd& vec() const { return w_; }
  double operator[](Eigen::Index i) const { return w_[i]; }
  Eigen::Index size() const { return w_.size(); }

 private:
  Eigen::VectorXd w_;
};

// Normal-inverse-Wishart parameters.
//
// Convention: scaleMatrix is the inverse-Wishart scale S (the paper-style
// product nu*Delta held as one matrix), with E[Sigma] = S / (dof - d - 1) and
// mu | Sigma ~ N(mean, Sigma / pseudocount). The prior pseudocount is the
// quantity some texts write with the same letter as an auxiliary indicator
// used in concentration resampling; it is named `pseudocount` here to keep
// the two apart.
struct NIWParams {
  double pseudocount = 1.0;
  Eigen::VectorXd mean;
  double dof = 3.0;
  Eigen::MatrixXd scaleMatrix;

  int dim() const { return static_cast<int>(mean.size()); }

  void validate() const;

  // Conjugate update from sufficient statistics of n observations:
  //   pseudocount' = pseudocount + n            dof' = dof + n
  //   pseudocount'*mean' = pseudocount*mean + sumY
  //   S' = S + sumYY + pc*mean*mean^T - pc'*mean'*mean'^T
  NIWParams posterior(double n, const Eigen::VectorXd& sumY,
                      const Eigen::MatrixXd& sumYY) const;

  // Marginal density of one observation y ~ N(mu, Sigma) with (mu, Sigma)
  // drawn from this NIW: multivariate t with dof - d + 1 degrees of freedom,
  // location mean, scale S*(pseudocount+1)/(pseudocount*(dof-d+1)).
  double predictiveLogLik(const Eigen::VectorXd& y) const;
};

// log(sum(exp(v))) with the usual max shift; -inf for an empty/all -inf input.
double logSumExp(const Eigen::Ref<const Eigen::VectorXd>& v);

// --- scalar laws -----------------------------------------------------------

double sampleGamma(double shape, double rate, Rng& rng);
// log of a Gamma(shape, rate) draw; exact for any shape > 0, immune to the
// underflow a direct draw hits when shape << 1.
double sampleLogGamma(double shape, double rate, Rng& rng);
double sampleBeta(double a, double b, Rng& rng);
int sampleBinomial(int n, double p, Rng& rng);
bool sampleBernoulli(double p, Rng& rng);

// --- vector / matrix laws --------------------------------------------------

ProbVector sampleDirichlet(const Eigen::Ref<const Eigen::VectorXd>& alpha, Rng& rng);

// Dirichlet draw where zero-concentration cells receive exactly zero mass; at
// least one entry must be positive. Returns a plain normalized vector.
Eigen::VectorXd sampleDirichletAllowZeros(const Eigen::Ref<const Eigen::VectorXd>& alpha,
                                          Rng& rng);

// First `truncation` GEM(concentration) weights; the final entry is the
// explicit remainder mass, so the returned vector has truncation+1 entries
// summing to one. Callers pick the weak-limit or remainder treatment.
ProbVector sampleStickBreaking(double concentration, int truncation, Rng& rng);

Eigen::VectorXd sampleMvNormal(const Eigen::Ref<const Eigen::VectorXd>& mean,
                               const Eigen::Ref<const Eigen::MatrixXd>& cov, Rng& rng);

// Inverse-Wishart with E[Sigma] = scale / (dof - d - 1).
Eigen::MatrixXd sampleInverseWishart(double dof,
                                     const Eigen::Ref<const Eigen::MatrixXd>& scale,
                                     Rng& rng);

std::pair<Eigen::VectorXd, Eigen::MatrixXd> sampleNIW(const NIWParams& params, Rng& rng);

// --- table counts ----------------------------------------------------------

// Number of tables opened by n sequential seatings at the given concentration
// (simulated; the pmf below is the exact law).
int sampleCRT(int n, double concentration, Rng& rng);

// Exact Antoniak pmf over {0,...,n}: p(m) proportional to s(n,m)*conc^m with
// s the unsigned Stirling numbers of the first kind, computed by the
// log-domain recurrence s(n+1,m) = n*s(n,m) + s(n,m-1). Supported for n <= 60;
// use sampleCRT beyond that.
Eigen::VectorXd antoniakPmf(int n, double concentration);

// --- densities -------------------------------------------------------------

// Multivariate Student-t log density.
double studentTLogPdf(const Eigen::Ref<const Eigen::VectorXd>& y, double dof,
                      const Eigen::Ref<const Eigen::VectorXd>& location,
                      const Eigen::Ref<const Eigen::MatrixXd>& scale);

double mvNormalLogPdf(const Eigen::Ref<const Eigen::VectorXd>& y,
                      const Eigen::Ref<const Eigen::VectorXd>& mean,
                      const Eigen::Ref<const Eigen::MatrixXd>& cov);

// --- categorical -----------------------------------------------------------

// Index drawn proportional to exp(logWeights - max). Entries may be -inf;
// throws DegenerateDistributionError when none is finite. Ties are resolved
// by the generator draw, never by index order.
int sampleCategoricalLog(const Eigen::Ref<const Eigen::VectorXd>& logWeights, Rng& rng);

// Index drawn proportional to nonnegative (unnormalized) weights.
int sampleCategorical(const Eigen::Ref<const Eigen::VectorXd>& weights, Rng& rng);

}  // namespace shdp
