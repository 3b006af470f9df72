#include "semimarkov/model_io.hpp"

#include "semimarkov/errors.hpp"

namespace semimarkov {

using nlohmann::json;

json model_to_json(const SemiMarkovModel& model) {
  const int n = model.n_states();
  json doc;
  doc["n_states"] = n;
  std::vector<double> h;
  h.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h.push_back(model.embedded_chain(i, j));
  doc["h"] = h;
  doc["lambda"] = std::vector<double>(model.rates.data(), model.rates.data() + model.rates.size());
  json laws = json::array();
  for (const auto& law : model.holding_laws) {
    if (const auto* e = std::get_if<ExponentialLaw>(&law)) {
      laws.push_back({{"kind", "exponential"}, {"lambda", e->rate}});
    } else if (const auto* ml = std::get_if<MittagLefflerLaw>(&law)) {
      laws.push_back({{"kind", "mittag_leffler"}, {"alpha", ml->alpha}, {"lambda", ml->rate}});
    } else {
      const auto& g = std::get<GeneralSubordinatedLaw>(law);
      if (g.builtin.empty()) {
        throw ValidationError("model_to_json: general laws with user callables cannot be serialized");
      }
      laws.push_back({{"kind", "general"}, {"builtin_exponent", g.builtin}});
    }
  }
  doc["laws"] = laws;
  doc["diagonal_jumps_allowed"] = model.diagonal_jumps_allowed;
  return doc;
}

SemiMarkovModel model_from_json(const json& doc) {
  try {
    SemiMarkovModel m;
    const int n = doc.at("n_states").get<int>();
    if (n < 1) throw ValidationError("model: n_states must be positive");
    m.embedded_chain.resize(n, n);
    const json& h = doc.at("h");
    if (h.size() == static_cast<std::size_t>(n) && h.at(0).is_array()) {
      for (int i = 0; i < n; ++i) {
        if (h[static_cast<std::size_t>(i)].size() != static_cast<std::size_t>(n)) {
          throw ValidationError("model: h row " + std::to_string(i) + " has wrong length");
        }
        for (int j = 0; j < n; ++j) m.embedded_chain(i, j) = h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].get<double>();
      }
    } else {
      if (h.size() != static_cast<std::size_t>(n) * n) throw ValidationError("model: h must have n_states^2 entries");
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m.embedded_chain(i, j) = h[static_cast<std::size_t>(i * n + j)].get<double>();
    }
    const auto lambda = doc.at("lambda").get<std::vector<double>>();
    if (lambda.size() != static_cast<std::size_t>(n)) throw ValidationError("model: lambda must have n_states entries");
    m.rates = Eigen::Map<const Eigen::VectorXd>(lambda.data(), n);
    const json& laws = doc.at("laws");
    if (laws.size() != static_cast<std::size_t>(n)) throw ValidationError("model: laws must have n_states entries");
    for (int i = 0; i < n; ++i) {
      const json& l = laws[static_cast<std::size_t>(i)];
      const std::string kind = l.at("kind").get<std::string>();
      const double rate = l.value("lambda", lambda[static_cast<std::size_t>(i)]);
      if (kind == "exponential") {
        m.holding_laws.emplace_back(ExponentialLaw{rate});
      } else if (kind == "mittag_leffler") {
        m.holding_laws.emplace_back(MittagLefflerLaw{l.at("alpha").get<double>(), rate});
      } else if (kind == "general") {
        m.holding_laws.emplace_back(builtin_law(l.at("builtin_exponent").get<std::string>()));
      } else {
        throw ValidationError("model: unknown law kind '" + kind + "'");
      }
    }
    m.diagonal_jumps_allowed = doc.value("diagonal_jumps_allowed", false);
    require_valid(m);
    return m;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("model document: ") + e.what());
  }
}

std::string serialize_model(const SemiMarkovModel& model) { return model_to_json(model).dump(2); }

SemiMarkovModel parse_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("model document: ") + e.what());
  }
  return model_from_json(doc);
}

}  // namespace semimarkov
