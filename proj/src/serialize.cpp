#include <json.hpp>

#include "shdp/state.hpp"

namespace shdp {

using nlohmann::json;

namespace {

json vecToJson(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json ivecToJson(const Eigen::VectorXi& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json matToJson(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json imatToJson(const Eigen::MatrixXi& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::VectorXd jsonToVec(const json& a) {
  Eigen::VectorXd v(a.size());
  for (size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  return v;
}

Eigen::VectorXi jsonToIvec(const json& a) {
  Eigen::VectorXi v(a.size());
  for (size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<int>();
  return v;
}

Eigen::MatrixXd jsonToMat(const json& a) {
  if (a.empty()) return Eigen::MatrixXd();
  Eigen::MatrixXd m(a.size(), a[0].size());
  for (size_t r = 0; r < a.size(); ++r)
    for (size_t c = 0; c < a[r].size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = a[r][c].get<double>();
  return m;
}

Eigen::MatrixXi jsonToImat(const json& a) {
  if (a.empty()) return Eigen::MatrixXi();
  Eigen::MatrixXi m(a.size(), a[0].size());
  for (size_t r = 0; r < a.size(); ++r)
    for (size_t c = 0; c < a[r].size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = a[r][c].get<int>();
  return m;
}

json gaussParamToJson(const GaussParam& p) {
  json j;
  j["mu"] = vecToJson(p.mu);
  j["sigma"] = matToJson(p.sigma);
  return j;
}

json emissionParamsToJson(const EmissionModel& em) {
  json j;
  j["family"] = em.family();
  if (auto* g = dynamic_cast<const GaussianConjugateEmission*>(&em)) {
    json params = json::array();
    for (int k = 0; k < em.numStates(); ++k) {
      const GaussParam& p = g->param(k);
      params.push_back(p.mu.size() ? gaussParamToJson(p) : json(nullptr));
    }
    j["params"] = std::move(params);
  } else if (auto* g2 = dynamic_cast<const GaussianNonConjugateEmission*>(&em)) {
    json params = json::array();
    for (int k = 0; k < em.numStates(); ++k) {
      const GaussParam& p = g2->param(k);
      params.push_back(p.mu.size() ? gaussParamToJson(p) : json(nullptr));
    }
    j["params"] = std::move(params);
  } else if (auto* mn = dynamic_cast<const MultinomialEmission*>(&em)) {
    json params = json::array();
    for (int k = 0; k < em.numStates(); ++k) params.push_back(vecToJson(mn->logProbs(k)));
    j["params"] = std::move(params);
  } else if (auto* dp = dynamic_cast<const DPMixGaussianEmission*>(&em)) {
    json params = json::array();
    for (int k = 0; k < em.numStates(); ++k) {
      json row = json::array();
      for (int c = 0; c < em.numComponents(k); ++c) {
        const GaussParam& p = dp->param(k, c);
        row.push_back(p.mu.size() ? gaussParamToJson(p) : json(nullptr));
      }
      params.push_back(std::move(row));
    }
    j["params"] = std::move(params);
  }
  return j;
}

}  // namespace

std::string serializeModelState(const ModelState& state, const std::string& rngState) {
  json j;
  j["format"] = "shdp-snapshot";
  j["version"] = 1;
  j["beta"] = vecToJson(state.beta);
  j["pi"] = matToJson(state.pi);
  j["psi"] = matToJson(state.psi);
  j["z"] = ivecToJson(state.z);
  j["s"] = ivecToJson(state.s);
  j["hyper"] = {{"gamma", state.hp.gamma},
                {"alphaPlusKappa", state.hp.alphaPlusKappa},
                {"rho", state.hp.rho},
                {"sigma", state.hp.sigma},
                {"gammaPrior", {state.hp.gammaPrior.a, state.hp.gammaPrior.b}},
                {"alphaKappaPrior", {state.hp.alphaKappaPrior.a, state.hp.alphaKappaPrior.b}},
                {"rhoPrior", {state.hp.rhoPrior.c, state.hp.rhoPrior.d}},
                {"sigmaPrior", {state.hp.sigmaPrior.a, state.hp.sigmaPrior.b}}};
  j["counts"] = {{"n", imatToJson(state.counts.n)},
                 {"m", imatToJson(state.counts.m)},
                 {"w", ivecToJson(state.counts.w)},
                 {"mBar", imatToJson(state.counts.mBar)},
                 {"nPrime", imatToJson(state.counts.nPrime)}};
  if (state.emissions) j["emissions"] = emissionParamsToJson(*state.emissions);
  if (!rngState.empty()) j["rng"] = rngState;
  return j.dump(1);
}

void deserializeModelState(const std::string& text, ModelState& state, std::string* rngState) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("snapshot parse error: ") + e.what());
  }
  if (!j.contains("format") || j["format"] != "shdp-snapshot")
    throw FormatError("snapshot: unexpected format tag");
  if (j["version"].get<int>() != 1) throw FormatError("snapshot: unsupported version");

  state.beta = jsonToVec(j["beta"]);
  state.pi = jsonToMat(j["pi"]);
  state.psi = jsonToMat(j["psi"]);
  state.z = jsonToIvec(j["z"]);
  state.s = jsonToIvec(j["s"]);
  const json& h = j["hyper"];
  state.hp.gamma = h["gamma"].get<double>();
  state.hp.alphaPlusKappa = h["alphaPlusKappa"].get<double>();
  state.hp.rho = h["rho"].get<double>();
  state.hp.sigma = h["sigma"].get<double>();
  state.hp.gammaPrior = {h["gammaPrior"][0].get<double>(), h["gammaPrior"][1].get<double>()};
  state.hp.alphaKappaPrior = {h["alphaKappaPrior"][0].get<double>(),
                              h["alphaKappaPrior"][1].get<double>()};
  state.hp.rhoPrior = {h["rhoPrior"][0].get<double>(), h["rhoPrior"][1].get<double>()};
  state.hp.sigmaPrior = {h["sigmaPrior"][0].get<double>(), h["sigmaPrior"][1].get<double>()};
  const json& c = j["counts"];
  state.counts.n = jsonToImat(c["n"]);
  state.counts.m = jsonToImat(c["m"]);
  state.counts.w = jsonToIvec(c["w"]);
  state.counts.mBar = jsonToImat(c["mBar"]);
  state.counts.nPrime = jsonToImat(c["nPrime"]);
  if (rngState) *rngState = j.contains("rng") ? j["rng"].get<std::string>() : "";

  // Rebuild emission caches from the sequences; restore instantiated params.
  if (state.emissions) {
    EmissionModel& em = *state.emissions;
    const auto& spans = em.obs().spans;
    const int K = state.counts.n.rows() > 0 ? static_cast<int>(state.counts.n.rows())
                                            : (state.z.size() ? state.z.maxCoeff() + 1 : 0);
    const int KP = em.isMixture()
                       ? std::max<int>(1, state.s.size() ? state.s.maxCoeff() + 1 : 1)
                       : 1;
    em.setShape(K, KP);
    for (Eigen::Index t = 0; t < state.z.size(); ++t) {
      for (int i = spans[t].first; i < spans[t].second; ++i)
        em.add(state.z[t], state.s.size() ? state.s[i] : 0, i);
    }
    if (j.contains("emissions") && j["emissions"].contains("params")) {
      const json& jp = j["emissions"]["params"];
      if (auto* g = dynamic_cast<GaussianConjugateEmission*>(&em)) {
        for (int k = 0; k < em.numStates() && k < static_cast<int>(jp.size()); ++k)
          if (!jp[k].is_null()) g->setParam(k, jsonToVec(jp[k]["mu"]), jsonToMat(jp[k]["sigma"]));
      } else if (auto* g2 = dynamic_cast<GaussianNonConjugateEmission*>(&em)) {
        for (int k = 0; k < em.numStates() && k < static_cast<int>(jp.size()); ++k)
          if (!jp[k].is_null()) g2->setParam(k, jsonToVec(jp[k]["mu"]), jsonToMat(jp[k]["sigma"]));
      } else if (auto* dp = dynamic_cast<DPMixGaussianEmission*>(&em)) {
        for (int k = 0; k < em.numStates() && k < static_cast<int>(jp.size()); ++k)
          for (int c2 = 0; c2 < em.numComponents(k) && c2 < static_cast<int>(jp[k].size()); ++c2)
            if (!jp[k][c2].is_null())
              dp->setParam(k, c2, jsonToVec(jp[k][c2]["mu"]), jsonToMat(jp[k][c2]["sigma"]));
      } else if (auto* mn = dynamic_cast<MultinomialEmission*>(&em)) {
        for (int k = 0; k < em.numStates() && k < static_cast<int>(jp.size()); ++k)
          mn->setLogProbs(k, jsonToVec(jp[k]));
      }
    }
  }
}

}  // namespace shdp
