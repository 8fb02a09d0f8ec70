#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <shdp/emissions.hpp>
#include <shdp/prob.hpp>

#include "test_util.hpp"

using namespace shdp;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// CRT law by direct sequential recursion: customer i opens a table with
// probability conc/(conc+i). Independent of the Stirling-number path.
VectorXd crtPmfByRecursion(int n, double conc) {
  VectorXd p = VectorXd::Zero(n + 1);
  p[0] = 1.0;
  for (int i = 0; i < n; ++i) {
    VectorXd next = VectorXd::Zero(n + 1);
    const double pNew = conc / (conc + i);
    for (int m = 0; m <= i; ++m) {
      next[m] += p[m] * (1.0 - pNew);
      if (m + 1 <= n) next[m + 1] += p[m] * pNew;
    }
    p = next;
  }
  return p;
}

}  // namespace

TEST_CASE("dirichlet moments") {
  Rng rng(11);
  const int N = 100000;

  SUBCASE("symmetric (1,1)") {
    double acc = 0.0;
    VectorXd alpha(2);
    alpha << 1.0, 1.0;
    for (int i = 0; i < N; ++i) acc += sampleDirichlet(alpha, rng)[0];
    const double se = std::sqrt(1.0 / 12.0 / N);
    CHECK(std::abs(acc / N - 0.5) < 3 * se);
  }

  SUBCASE("asymmetric (2,6)") {
    double acc = 0.0;
    VectorXd alpha(2);
    alpha << 2.0, 6.0;
    for (int i = 0; i < N; ++i) acc += sampleDirichlet(alpha, rng)[0];
    const double var = 2.0 * 6.0 / (64.0 * 9.0);
    CHECK(std::abs(acc / N - 0.25) < 3 * std::sqrt(var / N));
  }

  SUBCASE("weak-limit cell gamma/L concentrates mass") {
    VectorXd alpha = VectorXd::Constant(20, 1.0 / 20.0);
    std::vector<double> maxes;
    for (int i = 0; i < 2000; ++i) {
      ProbVector p = sampleDirichlet(alpha, rng);  // construction checks validity
      maxes.push_back(p.vec().maxCoeff());
    }
    CHECK(testutil::median(maxes) > 0.4);
  }

  SUBCASE("rejects bad parameters") {
    VectorXd one(1);
    one << 1.0;
    CHECK_THROWS_AS(sampleDirichlet(one, rng), InvalidParameterError);
    VectorXd bad(2);
    bad << 1.0, 0.0;
    CHECK_THROWS_AS(sampleDirichlet(bad, rng), InvalidParameterError);
    bad << 1.0, std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(sampleDirichlet(bad, rng), InvalidParameterError);
  }
}

TEST_CASE("stick breaking") {
  Rng rng(13);

  SUBCASE("tiny concentration puts everything on the first stick") {
    for (int i = 0; i < 10; ++i) {
      ProbVector w = sampleStickBreaking(1e-9, 5, rng);
      CHECK(w[0] > 1.0 - 1e-6);
    }
  }

  SUBCASE("remainder is negligible at truncation 50, concentration 1") {
    for (int i = 0; i < 200; ++i) {
      ProbVector w = sampleStickBreaking(1.0, 50, rng);
      CHECK(w[50] < 0.01);
    }
  }

  SUBCASE("expected weights follow gamma^{k-1}/(1+gamma)^k") {
    const double gamma = 2.0;
    const int N = 100000;
    VectorXd acc = VectorXd::Zero(5);
    for (int i = 0; i < N; ++i) {
      ProbVector w = sampleStickBreaking(gamma, 5, rng);
      acc += w.vec().head(5);
    }
    acc /= N;
    for (int k = 0; k < 5; ++k) {
      const double expect = std::pow(gamma, k) / std::pow(1.0 + gamma, k + 1);
      CHECK(std::abs(acc[k] - expect) < 4.0 * 0.5 / std::sqrt(double(N)));
    }
  }

  SUBCASE("sums to one including remainder") {
    for (int i = 0; i < 100; ++i) {
      double conc = 0.1 + 5.0 * rng.uniform();
      int trunc = 1 + rng.uniformInt(40);
      ProbVector w = sampleStickBreaking(conc, trunc, rng);
      CHECK(std::abs(w.vec().sum() - 1.0) < 1e-10);
    }
  }

  SUBCASE("zero truncation rejected") {
    CHECK_THROWS_AS(sampleStickBreaking(1.0, 0, rng), InvalidParameterError);
  }
}

TEST_CASE("CRT sampler vs Antoniak law") {
  Rng rng(17);

  SUBCASE("degenerate counts") {
    CHECK(sampleCRT(0, 2.0, rng) == 0);
    for (int i = 0; i < 20; ++i) CHECK(sampleCRT(1, 0.7, rng) == 1);
  }

  SUBCASE("empirical law matches the exact pmf (TV < 0.01)") {
    const int reps = 100000;
    for (double conc : {0.5, 2.0, 10.0}) {
      for (int n : {2, 3, 5, 8, 12}) {
        VectorXd hist = VectorXd::Zero(n + 1);
        for (int r = 0; r < reps; ++r) hist[sampleCRT(n, conc, rng)] += 1.0;
        hist /= reps;
        CHECK(testutil::totalVariation(hist, antoniakPmf(n, conc)) < 0.01);
      }
    }
  }
}

TEST_CASE("Antoniak pmf") {
  SUBCASE("n=1 is a point mass") {
    VectorXd p = antoniakPmf(1, 3.0);
    CHECK(p[0] == doctest::Approx(0.0));
    CHECK(p[1] == doctest::Approx(1.0));
  }

  SUBCASE("n=2, conc=1: half and half") {
    VectorXd p = antoniakPmf(2, 1.0);
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(p[2] == doctest::Approx(0.5).epsilon(1e-10));
  }

  SUBCASE("n=3, conc=1: Stirling row (2,3,1) normalized") {
    VectorXd p = antoniakPmf(3, 1.0);
    CHECK(p[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    CHECK(p[2] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(p[3] == doctest::Approx(1.0 / 6.0).epsilon(1e-10));
  }

  SUBCASE("matches the sequential-seating recursion") {
    for (double conc : {0.3, 1.0, 4.0, 15.0}) {
      for (int n : {2, 5, 17, 33, 60}) {
        VectorXd a = antoniakPmf(n, conc);
        VectorXd b = crtPmfByRecursion(n, conc);
        CHECK(testutil::totalVariation(a, b) < 1e-9);
        CHECK(std::abs(a.sum() - 1.0) < 1e-10);
      }
    }
  }

  SUBCASE("range guard") {
    CHECK_THROWS_AS(antoniakPmf(61, 1.0), RangeError);
  }
}

TEST_CASE("Student-t log density") {
  VectorXd y1(1), loc1(1);
  MatrixXd sc1(1, 1);

  SUBCASE("standard Cauchy at zero") {
    y1 << 0.0;
    loc1 << 0.0;
    sc1 << 1.0;
    CHECK(studentTLogPdf(y1, 1.0, loc1, sc1) == doctest::Approx(std::log(1.0 / M_PI)).epsilon(1e-12));
  }

  SUBCASE("large dof approaches the normal") {
    y1 << 0.7;
    loc1 << 0.2;
    sc1 << 1.3;
    const double t = studentTLogPdf(y1, 1e6, loc1, sc1);
    const double n = mvNormalLogPdf(y1, loc1, sc1);
    CHECK(std::abs(t - n) < 1e-3);
  }

  SUBCASE("d=1 density integrates to one") {
    for (double dof : {1.5, 4.0, 30.0}) {
      const double scale = 2.0;
      auto f = [&](double x) {
        VectorXd y(1), l(1);
        MatrixXd s(1, 1);
        y << x;
        l << 0.5;
        s << scale;
        return std::exp(studentTLogPdf(y, dof, l, s));
      };
      const double sd = std::sqrt(scale);
      const double total = testutil::integrate(f, 0.5 - 50 * sd, 0.5 + 50 * sd, 1e-10);
      CHECK(std::abs(total - 1.0) < 1e-6);
    }
  }

  SUBCASE("d=2 matches quadrature over the NIW-marginalized Gaussian") {
    // mu integrates out analytically: p(y) = int N(y; mean, Sigma (1+1/pc)) IW(Sigma) dSigma.
    NIWParams niw;
    niw.pseudocount = 2.0;
    niw.mean = VectorXd(2);
    niw.mean << 0.5, -0.3;
    niw.dof = 6.0;
    niw.scaleMatrix = MatrixXd(2, 2);
    niw.scaleMatrix << 2.0, 0.3, 0.3, 1.0;
    VectorXd y(2);
    y << 1.1, 0.4;

    auto iwLogPdf = [&](const MatrixXd& sigma) {
      const double d = 2.0, nu = niw.dof;
      Eigen::LLT<MatrixXd> lltS(niw.scaleMatrix), lltSig(sigma);
      double logDetS = 2.0 * std::log(lltS.matrixL()(0, 0)) + 2.0 * std::log(lltS.matrixL()(1, 1));
      double logDetSig =
          2.0 * std::log(lltSig.matrixL()(0, 0)) + 2.0 * std::log(lltSig.matrixL()(1, 1));
      double tr = lltSig.solve(niw.scaleMatrix).trace();
      return 0.5 * nu * logDetS - 0.5 * nu * d * std::log(2.0) - logMultivariateGamma(2, 0.5 * nu) -
             0.5 * (nu + d + 1.0) * logDetSig - 0.5 * tr;
    };

    auto innermost = [&](double s11, double s22, double s12) {
      MatrixXd sigma(2, 2);
      sigma << s11, s12, s12, s22;
      if (sigma(0, 0) * sigma(1, 1) - sigma(0, 1) * sigma(1, 0) <= 1e-12) return 0.0;
      const double scale = 1.0 + 1.0 / niw.pseudocount;
      return std::exp(iwLogPdf(sigma) + mvNormalLogPdf(y, niw.mean, scale * sigma));
    };
    // Composite Simpson on log-scale diagonal grids; the polynomial IW tail is
    // negligible past the upper limits at this dof.
    auto simpsonWeights = [](int n) {
      VectorXd w = VectorXd::Ones(n);
      for (int i = 1; i < n - 1; ++i) w[i] = (i % 2 == 1) ? 4.0 : 2.0;
      return w;
    };
    const int nd = 257, no = 129;
    const double uLo = std::log(5e-3), uHi = std::log(40.0);
    const double hu = (uHi - uLo) / (nd - 1);
    VectorXd wd = simpsonWeights(nd), wo = simpsonWeights(no);
    double byQuadrature = 0.0;
    for (int i = 0; i < nd; ++i) {
      const double u1 = uLo + i * hu, s11 = std::exp(u1);
      for (int j = 0; j < nd; ++j) {
        const double u2 = uLo + j * hu, s22 = std::exp(u2);
        const double lim = 0.9995 * std::sqrt(s11 * s22);
        const double ho = 2.0 * lim / (no - 1);
        double inner = 0.0;
        for (int k = 0; k < no; ++k) inner += wo[k] * innermost(s11, s22, -lim + k * ho);
        inner *= ho / 3.0;
        // Jacobian of the log substitutions: ds11 ds22 = s11 s22 du1 du2.
        byQuadrature += wd[i] * wd[j] * inner * s11 * s22;
      }
    }
    byQuadrature *= (hu / 3.0) * (hu / 3.0);
    const double byFormula = std::exp(niw.predictiveLogLik(y));
    CHECK(byFormula == doctest::Approx(byQuadrature).epsilon(5e-4));
  }

  SUBCASE("non-SPD scale is a decomposition error") {
    VectorXd y(2), l(2);
    MatrixXd s(2, 2);
    y << 0, 0;
    l << 0, 0;
    s << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(studentTLogPdf(y, 3.0, l, s), DecompositionError);
  }
}

TEST_CASE("NIW sampling moments") {
  Rng rng(23);
  NIWParams niw;
  niw.pseudocount = 3.0;
  niw.mean = VectorXd(2);
  niw.mean << 1.0, -2.0;
  niw.dof = 8.0;
  niw.scaleMatrix = MatrixXd(2, 2);
  niw.scaleMatrix << 3.0, 0.5, 0.5, 2.0;

  const int N = 20000;
  VectorXd muAcc = VectorXd::Zero(2);
  MatrixXd sigAcc = MatrixXd::Zero(2, 2);
  for (int i = 0; i < N; ++i) {
    auto [mu, sigma] = sampleNIW(niw, rng);
    muAcc += mu;
    sigAcc += sigma;
  }
  muAcc /= N;
  sigAcc /= N;

  CHECK((muAcc - niw.mean).cwiseAbs().maxCoeff() < 0.05);
  MatrixXd expectSigma = niw.scaleMatrix / (niw.dof - 2.0 - 1.0);
  CHECK((sigAcc - expectSigma).cwiseAbs().maxCoeff() < 0.05);

  SUBCASE("large pseudocount pins the mean") {
    NIWParams tight = niw;
    tight.pseudocount = 1e8;
    for (int i = 0; i < 50; ++i) {
      auto [mu, sigma] = sampleNIW(tight, rng);
      CHECK((mu - tight.mean).norm() < 1e-2);
    }
  }
}

TEST_CASE("categorical sampling in log domain") {
  Rng rng(29);

  SUBCASE("minus-infinity weights never chosen") {
    VectorXd lw(2);
    lw << 0.0, -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 50; ++i) CHECK(sampleCategoricalLog(lw, rng) == 0);
  }

  SUBCASE("equal weights are a fair coin") {
    VectorXd lw(2);
    lw << -3.7, -3.7;
    int ones = 0;
    const int N = 100000;
    for (int i = 0; i < N; ++i) ones += sampleCategoricalLog(lw, rng);
    CHECK(std::abs(ones / double(N) - 0.5) < 3 * 0.5 / std::sqrt(double(N)));
  }

  SUBCASE("log(1) vs log(3)") {
    VectorXd lw(2);
    lw << std::log(1.0), std::log(3.0);
    int ones = 0;
    const int N = 100000;
    for (int i = 0; i < N; ++i) ones += sampleCategoricalLog(lw, rng);
    CHECK(std::abs(ones / double(N) - 0.75) < 3 * std::sqrt(0.1875 / N));
  }

  SUBCASE("degenerate input") {
    VectorXd lw = VectorXd::Constant(3, -std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(sampleCategoricalLog(lw, rng), DegenerateDistributionError);
  }
}

TEST_CASE("scalar law moments within 4 standard errors") {
  Rng rng(31);
  const int N = 100000;

  SUBCASE("gamma") {
    std::vector<double> xs(N);
    for (auto& x : xs) x = sampleGamma(3.5, 2.0, rng);
    CHECK(std::abs(testutil::mean(xs) - 1.75) < 4 * testutil::stderrOfMean(xs));
    // small-shape branch
    for (auto& x : xs) x = sampleGamma(0.05, 1.0, rng);
    CHECK(std::abs(testutil::mean(xs) - 0.05) < 4 * testutil::stderrOfMean(xs));
  }

  SUBCASE("beta") {
    std::vector<double> xs(N);
    for (auto& x : xs) x = sampleBeta(2.0, 5.0, rng);
    CHECK(std::abs(testutil::mean(xs) - 2.0 / 7.0) < 4 * testutil::stderrOfMean(xs));
  }

  SUBCASE("binomial and bernoulli") {
    std::vector<double> xs(N);
    for (auto& x : xs) x = sampleBinomial(20, 0.3, rng);
    CHECK(std::abs(testutil::mean(xs) - 6.0) < 4 * testutil::stderrOfMean(xs));
    for (auto& x : xs) x = sampleBernoulli(0.2, rng) ? 1.0 : 0.0;
    CHECK(std::abs(testutil::mean(xs) - 0.2) < 4 * testutil::stderrOfMean(xs));
  }

  SUBCASE("multivariate normal") {
    VectorXd mean(2);
    mean << 1.0, -1.0;
    MatrixXd cov(2, 2);
    cov << 2.0, 0.8, 0.8, 1.0;
    VectorXd acc = VectorXd::Zero(2);
    MatrixXd cross = MatrixXd::Zero(2, 2);
    for (int i = 0; i < N; ++i) {
      VectorXd x = sampleMvNormal(mean, cov, rng);
      acc += x;
      cross += (x - mean) * (x - mean).transpose();
    }
    acc /= N;
    cross /= N;
    CHECK((acc - mean).cwiseAbs().maxCoeff() < 4 * std::sqrt(2.0 / N));
    CHECK((cross - cov).cwiseAbs().maxCoeff() < 0.05);
  }

  SUBCASE("inverse Wishart mean") {
    MatrixXd scale(2, 2);
    scale << 4.0, 1.0, 1.0, 3.0;
    const double dof = 9.0;
    MatrixXd acc = MatrixXd::Zero(2, 2);
    for (int i = 0; i < N / 2; ++i) acc += sampleInverseWishart(dof, scale, rng);
    acc /= (N / 2);
    MatrixXd expect = scale / (dof - 2.0 - 1.0);
    CHECK((acc - expect).cwiseAbs().maxCoeff() < 0.05);
  }
}

TEST_CASE("fixed seed reproduces draws bit-exactly") {
  VectorXd alpha(3);
  alpha << 0.5, 1.5, 3.0;
  Rng a(99), b(99);
  for (int i = 0; i < 20; ++i) {
    CHECK(sampleGamma(1.7, 0.4, a) == sampleGamma(1.7, 0.4, b));
    CHECK(sampleDirichlet(alpha, a).vec() == sampleDirichlet(alpha, b).vec());
    CHECK(sampleCRT(9, 1.1, a) == sampleCRT(9, 1.1, b));
  }
}
