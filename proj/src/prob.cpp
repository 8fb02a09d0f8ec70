#include "shdp/prob.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace shdp {

namespace {
constexpr double kLogTiny = -690.0;  // ~log(1e-300)
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logAddExp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}
}  // namespace

void NIWParams::validate() const {
  const int d = dim();
  if (d == 0) throw InvalidParameterError("NIWParams: empty mean");
  if (!(pseudocount > 0.0) || !std::isfinite(pseudocount))
    throw InvalidParameterError("NIWParams: pseudocount must be positive");
  if (!(dof > d - 1)) throw InvalidParameterError("NIWParams: dof must exceed dim-1");
  if (scaleMatrix.rows() != d || scaleMatrix.cols() != d)
    throw InvalidParameterError("NIWParams: scaleMatrix shape mismatch");
  if (((scaleMatrix - scaleMatrix.transpose()).array().abs() > 1e-12).any())
    throw InvalidParameterError("NIWParams: scaleMatrix not symmetric");
}

NIWParams NIWParams::posterior(double n, const Eigen::VectorXd& sumY,
                               const Eigen::MatrixXd& sumYY) const {
  NIWParams post;
  post.pseudocount = pseudocount + n;
  post.dof = dof + n;
  post.mean = (pseudocount * mean + sumY) / post.pseudocount;
  post.scaleMatrix = scaleMatrix + sumYY + pseudocount * mean * mean.transpose() -
                     post.pseudocount * post.mean * post.mean.transpose();
  // The subtraction can leave a tiny asymmetry; re-symmetrize.
  post.scaleMatrix = 0.5 * (post.scaleMatrix + post.scaleMatrix.transpose()).eval();
  return post;
}

double NIWParams::predictiveLogLik(const Eigen::VectorXd& y) const {
  const int d = dim();
  const double tdof = dof - d + 1;
  const Eigen::MatrixXd tScale = scaleMatrix * ((pseudocount + 1.0) / (pseudocount * tdof));
  return studentTLogPdf(y, tdof, mean, tScale);
}

double logSumExp(const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (v.size() == 0) return kNegInf;
  double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;  // all -inf (or a +inf/nan propagates)
  return m + std::log((v.array() - m).exp().sum());
}

double sampleGamma(double shape, double rate, Rng& rng) {
  if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate))
    throw InvalidParameterError("sampleGamma: shape and rate must be positive");
  if (shape < 1.0) return std::exp(sampleLogGamma(shape, rate, rng));
  return std::gamma_distribution<double>(shape, 1.0 / rate)(rng.engine());
}

double sampleLogGamma(double shape, double rate, Rng& rng) {
  if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate))
    throw InvalidParameterError("sampleLogGamma: shape and rate must be positive");
  if (shape >= 1.0) return std::log(sampleGamma(shape, rate, rng));
  // G(shape) = G(shape+1) * U^(1/shape), taken in logs.
  double g = std::gamma_distribution<double>(shape + 1.0, 1.0)(rng.engine());
  double u = rng.uniform();
  while (u <= 0.0) u = rng.uniform();
  return std::log(g) + std::log(u) / shape - std::log(rate);
}

double sampleBeta(double a, double b, Rng& rng) {
  if (!(a > 0.0) || !(b > 0.0))
    throw InvalidParameterError("sampleBeta: parameters must be positive");
  double lx = sampleLogGamma(a, 1.0, rng);
  double ly = sampleLogGamma(b, 1.0, rng);
  // x/(x+y) = 1/(1+exp(ly-lx))
  double diff = ly - lx;
  if (diff > 700.0) return std::exp(-diff);  // avoid exp overflow; result ~ e^{-diff}
  return 1.0 / (1.0 + std::exp(diff));
}

int sampleBinomial(int n, double p, Rng& rng) {
  if (n < 0 || p < 0.0 || p > 1.0)
    throw InvalidParameterError("sampleBinomial: need n >= 0 and p in [0,1]");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  return std::binomial_distribution<int>(n, p)(rng.engine());
}

bool sampleBernoulli(double p, Rng& rng) {
  if (p < 0.0 || p > 1.0) throw InvalidParameterError("sampleBernoulli: p in [0,1]");
  return rng.uniform() < p;
}

ProbVector sampleDirichlet(const Eigen::Ref<const Eigen::VectorXd>& alpha, Rng& rng) {
  if (alpha.size() < 2) throw InvalidParameterError("sampleDirichlet: need length >= 2");
  if ((alpha.array() <= 0.0).any() || !alpha.allFinite())
    throw InvalidParameterError("sampleDirichlet: entries must be positive and finite");
  // Work in logs so tiny shapes cannot underflow the whole draw to zero.
  Eigen::VectorXd lg(alpha.size());
  for (Eigen::Index i = 0; i < alpha.size(); ++i)
    lg[i] = sampleLogGamma(alpha[i], 1.0, rng);
  double lse = logSumExp(lg);
  Eigen::VectorXd w = (lg.array() - lse).exp();
  w /= w.sum();  // remove the last few ulps of drift
  return ProbVector::checked(std::move(w));
}

Eigen::VectorXd sampleDirichletAllowZeros(const Eigen::Ref<const Eigen::VectorXd>& alpha,
                                          Rng& rng) {
  Eigen::VectorXd lg(alpha.size());
  for (Eigen::Index i = 0; i < alpha.size(); ++i)
    lg[i] = alpha[i] > 0.0 ? sampleLogGamma(alpha[i], 1.0, rng) : kNegInf;
  double lse = logSumExp(lg);
  if (!std::isfinite(lse))
    throw DegenerateDistributionError("sampleDirichletAllowZeros: all cells empty");
  Eigen::VectorXd w = (lg.array() - lse).exp();
  w /= w.sum();
  return w;
}

ProbVector sampleStickBreaking(double concentration, int truncation, Rng& rng) {
  if (!(concentration > 0.0))
    throw InvalidParameterError("sampleStickBreaking: concentration must be positive");
  if (truncation <= 0)
    throw InvalidParameterError("sampleStickBreaking: truncation must be positive");
  Eigen::VectorXd w(truncation + 1);
  double remaining = 1.0;
  for (int k = 0; k < truncation; ++k) {
    double v = sampleBeta(1.0, concentration, rng);
    w[k] = v * remaining;
    remaining *= (1.0 - v);
  }
  w[truncation] = remaining;
  return ProbVector::checked(std::move(w));
}

Eigen::VectorXd sampleMvNormal(const Eigen::Ref<const Eigen::VectorXd>& mean,
                               const Eigen::Ref<const Eigen::MatrixXd>& cov, Rng& rng) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw DecompositionError("sampleMvNormal: covariance not SPD");
  Eigen::VectorXd zv(mean.size());
  for (Eigen::Index i = 0; i < zv.size(); ++i) zv[i] = rng.normal();
  return mean + llt.matrixL() * zv;
}

Eigen::MatrixXd sampleInverseWishart(double dof,
                                     const Eigen::Ref<const Eigen::MatrixXd>& scale,
                                     Rng& rng) {
  const int d = static_cast<int>(scale.rows());
  if (!(dof > d - 1)) throw InvalidParameterError("sampleInverseWishart: dof must exceed dim-1");
  Eigen::LLT<Eigen::MatrixXd> llt(scale);
  if (llt.info() != Eigen::Success)
    throw DecompositionError("sampleInverseWishart: scale not SPD");

  // Bartlett: A A^T ~ Wishart(dof, I). With S = Ls Ls^T the draw is
  // Sigma = Ls (A A^T)^{-1} Ls^T, computed via one triangular solve.
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    double chi2 = sampleGamma(0.5 * (dof - i), 0.5, rng);
    A(i, i) = std::sqrt(chi2);
    for (int j = 0; j < i; ++j) A(i, j) = rng.normal();
  }
  Eigen::MatrixXd Ls = llt.matrixL();
  Eigen::MatrixXd M =
      A.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd(Ls.transpose()));
  Eigen::MatrixXd sigma = M.transpose() * M;
  return 0.5 * (sigma + sigma.transpose());
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> sampleNIW(const NIWParams& params, Rng& rng) {
  params.validate();
  Eigen::MatrixXd sigma = sampleInverseWishart(params.dof, params.scaleMatrix, rng);
  Eigen::VectorXd mu = sampleMvNormal(params.mean, sigma / params.pseudocount, rng);
  return {std::move(mu), std::move(sigma)};
}

int sampleCRT(int n, double concentration, Rng& rng) {
  if (n < 0) throw InvalidParameterError("sampleCRT: n must be nonnegative");
  if (!(concentration > 0.0))
    throw InvalidParameterError("sampleCRT: concentration must be positive");
  int m = 0;
  for (int i = 0; i < n; ++i) {
    if (rng.uniform() < concentration / (concentration + i)) ++m;
  }
  return m;
}

Eigen::VectorXd antoniakPmf(int n, double concentration) {
  if (n < 0) throw InvalidParameterError("antoniakPmf: n must be nonnegative");
  if (!(concentration > 0.0))
    throw InvalidParameterError("antoniakPmf: concentration must be positive");
  if (n > 60) throw RangeError("antoniakPmf: supported for n <= 60 only");
  if (n == 0) {
    Eigen::VectorXd p(1);
    p[0] = 1.0;
    return p;
  }
  // Log-domain unsigned Stirling numbers of the first kind, row by row.
  std::vector<double> row(static_cast<size_t>(n) + 1, kNegInf);
  row[0] = 0.0;  // s(0,0) = 1
  for (int nn = 0; nn < n; ++nn) {
    std::vector<double> next(static_cast<size_t>(n) + 1, kNegInf);
    for (int m = 1; m <= nn + 1; ++m) {
      double a = (nn > 0 && row[m] != kNegInf) ? std::log(double(nn)) + row[m] : kNegInf;
      double b = row[m - 1];
      next[m] = logAddExp(a, b);
    }
    row.swap(next);
  }
  const double logConc = std::log(concentration);
  Eigen::VectorXd logp(n + 1);
  logp[0] = kNegInf;
  for (int m = 1; m <= n; ++m) logp[m] = row[m] + m * logConc;
  double lse = logSumExp(logp);
  Eigen::VectorXd p = (logp.array() - lse).exp();
  p[0] = 0.0;
  p /= p.sum();
  return p;
}

double studentTLogPdf(const Eigen::Ref<const Eigen::VectorXd>& y, double dof,
                      const Eigen::Ref<const Eigen::VectorXd>& location,
                      const Eigen::Ref<const Eigen::MatrixXd>& scale) {
  if (!(dof > 0.0)) throw InvalidParameterError("studentTLogPdf: dof must be positive");
  const int d = static_cast<int>(y.size());
  Eigen::LLT<Eigen::MatrixXd> llt(scale);
  if (llt.info() != Eigen::Success)
    throw DecompositionError("studentTLogPdf: scale not SPD");
  double logDet = 0.0;
  for (int i = 0; i < d; ++i) logDet += 2.0 * std::log(llt.matrixL()(i, i));
  Eigen::VectorXd diff = y - location;
  double qf = diff.dot(llt.solve(diff));
  return std::lgamma(0.5 * (dof + d)) - std::lgamma(0.5 * dof) -
         0.5 * d * (std::log(dof) + std::log(M_PI)) - 0.5 * logDet -
         0.5 * (dof + d) * std::log1p(qf / dof);
}

double mvNormalLogPdf(const Eigen::Ref<const Eigen::VectorXd>& y,
                      const Eigen::Ref<const Eigen::VectorXd>& mean,
                      const Eigen::Ref<const Eigen::MatrixXd>& cov) {
  const int d = static_cast<int>(y.size());
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw DecompositionError("mvNormalLogPdf: covariance not SPD");
  double logDet = 0.0;
  for (int i = 0; i < d; ++i) logDet += 2.0 * std::log(llt.matrixL()(i, i));
  Eigen::VectorXd diff = y - mean;
  double qf = diff.dot(llt.solve(diff));
  return -0.5 * (d * std::log(2.0 * M_PI) + logDet + qf);
}

int sampleCategoricalLog(const Eigen::Ref<const Eigen::VectorXd>& logWeights, Rng& rng) {
  if (logWeights.size() == 0)
    throw DegenerateDistributionError("sampleCategoricalLog: empty weights");
  double m = logWeights.maxCoeff();
  if (!std::isfinite(m))
    throw DegenerateDistributionError("sampleCategoricalLog: no finite weight");
  Eigen::VectorXd w = (logWeights.array() - m).max(kLogTiny).exp();
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (!std::isfinite(logWeights[i])) w[i] = 0.0;
  return sampleCategorical(w, rng);
}

int sampleCategorical(const Eigen::Ref<const Eigen::VectorXd>& weights, Rng& rng) {
  double total = weights.sum();
  if (!(total > 0.0) || !std::isfinite(total))
    throw DegenerateDistributionError("sampleCategorical: weights sum to zero");
  double u = rng.uniform() * total;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size() - 1);
}

}  // namespace shdp
