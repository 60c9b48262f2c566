#include <doctest.h>

#include <sstream>

#include "stol/datagen.hpp"
#include "stol/error.hpp"
#include "stol/io.hpp"

using namespace stol;

namespace {

Dataset parse(const std::string& text) {
  std::istringstream in(text);
  return io::dataset_from_jsonl(in, "mem");
}

}  // namespace

TEST_CASE("dataset round trip is exact") {
  const MaskedDataset m = mask_labels(generate(DomainParams::defaults(), 25, 3, DomainTag::target), 5, 2);
  const std::string text = io::dataset_to_jsonl(m.data);
  const Dataset back = parse(text);
  CHECK(back.d == 2);
  CHECK(back.K == 3);
  CHECK(back.domain == DomainTag::target);
  CHECK(back.labeled_count() == 5);
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back.samples[i].x == m.data.samples[i].x);
    CHECK(back.samples[i].y == m.data.samples[i].y);
  }
  CHECK(io::dataset_to_jsonl(back) == text);
}

TEST_CASE("dataset parsing names the offending line") {
  const std::string good =
      "{\"d\":1,\"K\":2,\"domain\":\"source\"}\n"
      "{\"x\":[[0.5]],\"y\":[1]}\n";
  CHECK_NOTHROW(parse(good));
  CHECK_NOTHROW(parse(good + "\n"));
  CHECK_THROWS_WITH_AS(parse(good + "{\"x\":[[0.5]],\"y\":[1]\n"), doctest::Contains("mem:3"), Error);
  CHECK_THROWS_WITH_AS(parse(good + "{\"x\":[[0.5]],\"y\":[2]}\n"), doctest::Contains("mem:3"), Error);
  CHECK_THROWS_WITH_AS(parse(good + "{\"x\":[[0.5, 1.0]],\"y\":[0]}\n"), doctest::Contains("mem:3"), Error);
  CHECK_THROWS_WITH_AS(parse(good + "{\"x\":[[0.5]],\"y\":[0],\"z\":1}\n"),
                       doctest::Contains("unknown key"), Error);
  CHECK_THROWS_AS(parse("{\"d\":1,\"K\":2,\"domain\":\"elsewhere\"}\n"), Error);
  CHECK_THROWS_AS(parse("{\"d\":1,\"K\":2,\"domain\":\"source\",\"extra\":0}\n"), Error);
  CHECK_THROWS_AS(parse("{\"d\":0,\"K\":2,\"domain\":\"source\"}\n"), Error);
  CHECK_THROWS_AS(parse(""), Error);
  CHECK_THROWS_AS(parse(good + "{\"x\":[],\"y\":[]}\n"), Error);
  CHECK_THROWS_AS(parse(good + "{\"x\":[[0.5],[0.1]],\"y\":[0]}\n"), Error);
}

TEST_CASE("model round trip") {
  const ChainFeatureMap map(2, 2);
  Vector theta(map.dim());
  for (std::size_t j = 0; j < theta.size(); ++j) theta[j] = 0.1 * static_cast<double>(j) - 0.3;
  const LinearScorer lin(map, theta);
  const io::Model a = io::model_from_json(io::model_to_json(lin));
  REQUIRE(std::holds_alternative<LinearScorer>(a));
  CHECK(std::get<LinearScorer>(a).theta == theta);
  CHECK(io::decoding_weights(a) == theta);

  Vector w(map.dim(), 0.25);
  const TransferScorer ts(lin, w);
  const io::Model b = io::model_from_json(io::model_to_json(ts));
  REQUIRE(std::holds_alternative<TransferScorer>(b));
  CHECK(std::get<TransferScorer>(b).w == w);
  CHECK(std::get<TransferScorer>(b).source.theta == theta);
  CHECK(io::decoding_weights(b) == ts.combined_weights());
  CHECK(io::model_map(b).dim() == map.dim());
}

TEST_CASE("model parsing is strict") {
  io::json j = io::model_to_json(LinearScorer::zero(ChainFeatureMap(1, 2)));
  io::json extra = j;
  extra["bias"] = 1.0;
  CHECK_THROWS_AS(io::model_from_json(extra), Error);
  io::json short_theta = j;
  short_theta["theta"] = io::json::array({0.0, 0.0});
  CHECK_THROWS_AS(io::model_from_json(short_theta), Error);
  io::json bad_kind = j;
  bad_kind["kind"] = "kernel";
  CHECK_THROWS_AS(io::model_from_json(bad_kind), Error);
  io::json missing_w = j;
  missing_w["kind"] = "transfer";
  CHECK_THROWS_AS(io::model_from_json(missing_w), Error);
}

TEST_CASE("params round trip") {
  const DomainParams p = shift(DomainParams::defaults(), 30.0, Vector{1.0, 2.0});
  const DomainParams back = io::params_from_json(io::params_to_json(p));
  CHECK(back.d == p.d);
  CHECK(back.K == p.K);
  CHECK(back.label_prior == p.label_prior);
  CHECK(back.transition == p.transition);
  CHECK(back.means == p.means);
  CHECK(back.noise_sigma == p.noise_sigma);
  CHECK(back.emission_transform.R == p.emission_transform.R);
  CHECK(back.emission_transform.b == p.emission_transform.b);
  CHECK(back.t_min == p.t_min);
  CHECK(back.t_max == p.t_max);
  io::json j = io::params_to_json(p);
  j["unexpected"] = true;
  CHECK_THROWS_AS(io::params_from_json(j), Error);
}

TEST_CASE("predictions round trip") {
  const std::vector<Labels> preds{{0, 1, 2}, {1}, {2, 2}};
  std::istringstream in(io::predictions_to_jsonl(preds));
  CHECK(io::predictions_from_jsonl(in, "p") == preds);
  std::istringstream bad("[0,1]\n[0,\"a\"]\n");
  CHECK_THROWS_WITH_AS(io::predictions_from_jsonl(bad, "p"), doctest::Contains("p:2"), Error);
}

TEST_CASE("report json carries the trace and config") {
  TrainReport r;
  r.iterations = 2;
  r.dual_objective_trace = {0.1, 0.2};
  r.duality_gap_trace = {1e-7, 2e-7};
  r.terminated_by = Termination::iteration_cap;
  const io::json j = io::report_to_json(r, TrainConfig{});
  CHECK(j.at("iterations") == 2);
  CHECK(j.at("dual_objective_trace").size() == 2);
  CHECK(j.at("terminated_by") == "iteration_cap");
}
