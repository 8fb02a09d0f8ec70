#pragma once

#include <Eigen/Dense>

#include "shdp/errors.hpp"

namespace shdp {

// Transition / table bookkeeping for one chain.
//
//   n(j,k)       transitions j -> k in z
//   nPrime(k,j)  observations in state k's j-th mixture component
//   m(j,k)       tables in restaurant j served dish k
//   w(j)         override total for restaurant j
//   mBar(j,k)    tables in restaurant j that considered dish k,
//                mBar(j,k) = m(j,k) - delta(j,k) * w(j)
struct CountTables {
  Eigen::MatrixXi n;
  Eigen::MatrixXi nPrime;
  Eigen::MatrixXi m;
  Eigen::VectorXi w;
  Eigen::MatrixXi mBar;

  void resizeStates(int K, int KPrime = 0) {
    n = Eigen::MatrixXi::Zero(K, K);
    m = Eigen::MatrixXi::Zero(K, K);
    w = Eigen::VectorXi::Zero(K);
    mBar = Eigen::MatrixXi::Zero(K, K);
    nPrime = Eigen::MatrixXi::Zero(K, KPrime);
  }
};

// Ground-truth tally of transition and component counts from the sequences;
// the oracle every incrementally maintained table must match.
// z holds labels in [0,K); s (may be empty) holds component labels in [0,KPrime).
inline CountTables recount(const Eigen::VectorXi& z, const Eigen::VectorXi& s, int K,
                           int KPrime) {
  CountTables ct;
  ct.resizeStates(K, KPrime);
  for (Eigen::Index t = 0; t < z.size(); ++t) {
    if (z[t] < 0 || z[t] >= K) throw InvalidParameterError("recount: state label out of range");
    if (t > 0) ct.n(z[t - 1], z[t]) += 1;
  }
  if (s.size() > 0) {
    if (s.size() != z.size())
      throw InvalidParameterError("recount: component sequence length mismatch");
    for (Eigen::Index t = 0; t < s.size(); ++t) {
      if (s[t] < 0 || s[t] >= KPrime)
        throw InvalidParameterError("recount: component label out of range");
      ct.nPrime(z[t], s[t]) += 1;
    }
  }
  return ct;
}

// Variant for duration-tied data: z is per hidden step, s per observation, and
// spans[t] = [begin,end) gives the observation indices of step t.
inline CountTables recountGrouped(const Eigen::VectorXi& z, const Eigen::VectorXi& s,
                                  const std::vector<std::pair<int, int>>& spans, int K,
                                  int KPrime) {
  CountTables ct;
  ct.resizeStates(K, KPrime);
  for (Eigen::Index t = 0; t < z.size(); ++t) {
    if (z[t] < 0 || z[t] >= K) throw InvalidParameterError("recount: state label out of range");
    if (t > 0) ct.n(z[t - 1], z[t]) += 1;
    if (s.size() > 0) {
      for (int i = spans[t].first; i < spans[t].second; ++i) {
        if (s[i] < 0 || s[i] >= KPrime)
          throw InvalidParameterError("recount: component label out of range");
        ct.nPrime(z[t], s[i]) += 1;
      }
    }
  }
  return ct;
}

}  // namespace shdp
