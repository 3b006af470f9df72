#include <catch_amalgamated.hpp>

#include "semimarkov/errors.hpp"
#include "semimarkov/model_io.hpp"

using namespace semimarkov;

TEST_CASE("model documents round-trip", "[model_io]") {
  Eigen::MatrixXd h(3, 3);
  h << 0, 0.25, 0.75, 1, 0, 0, 0.5, 0.5, 0;
  auto m = ml_model(h, Eigen::Vector3d(1.0, 2.5, 0.5), {0.3, 1.0, 0.8});
  m.holding_laws[2] = tempered_stable_law(0.8, 1.5);
  m.holding_laws[2] = builtin_law("tempered(0.8,1.5)");
  const auto text = serialize_model(m);
  const auto back = parse_model(text);
  CHECK(back.embedded_chain == m.embedded_chain);
  CHECK(back.rates == m.rates);
  CHECK(law_name(back.holding_laws[0]) == law_name(m.holding_laws[0]));
  CHECK(std::holds_alternative<ExponentialLaw>(back.holding_laws[1]));
  CHECK(std::get<GeneralSubordinatedLaw>(back.holding_laws[2]).builtin == "tempered(0.8,1.5)");
  CHECK(serialize_model(back) == text);
}

TEST_CASE("nested and flat h are both accepted", "[model_io]") {
  const char* nested = R"({"n_states": 2, "h": [[0, 1], [1, 0]], "lambda": [1, 2],
    "laws": [{"kind": "mittag_leffler", "alpha": 0.5}, {"kind": "exponential"}]})";
  const char* flat = R"({"n_states": 2, "h": [0, 1, 1, 0], "lambda": [1, 2],
    "laws": [{"kind": "mittag_leffler", "alpha": 0.5}, {"kind": "exponential"}]})";
  CHECK(serialize_model(parse_model(nested)) == serialize_model(parse_model(flat)));
}

TEST_CASE("invalid documents are rejected", "[model_io]") {
  CHECK_THROWS_AS(parse_model(R"({"n_states": 2, "h": [0, 0.5, 1, 0], "lambda": [1, 1],
    "laws": [{"kind": "exponential"}, {"kind": "exponential"}]})"), ValidationError);
  CHECK_THROWS_AS(parse_model(R"({"n_states": 1, "h": [1], "lambda": [1], "laws": [{"kind": "weibull"}]})"),
                  ValidationError);
  CHECK_THROWS_AS(parse_model("not json"), ValidationError);
  auto m = ml_model(Eigen::Matrix2d{{0, 1}, {1, 0}}, Eigen::Vector2d(1, 1), {0.5, 0.5});
  GeneralSubordinatedLaw user;
  user.laplace_exponent = [](Complex s) { return std::sqrt(s); };
  user.levy_tail = [](double t) { return 1.0 / std::sqrt(t); };
  m.holding_laws[0] = user;
  CHECK_THROWS_AS(serialize_model(m), ValidationError);
}
