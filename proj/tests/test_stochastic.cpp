#include <doctest.h>

#include <cmath>
#include <utility>
#include <vector>

#include "support/gen_points.hpp"
#include "twa/frt.hpp"
#include "twa/gen.hpp"
#include "twa/io_json.hpp"
#include "twa/metric.hpp"
#include "twa/rng.hpp"
#include "twa/stochastic.hpp"
#include "twa/transport.hpp"

using namespace twa;

namespace {

// the identity embedding of a tree's own path metric
template <class R>
StochasticEmbedding<R> identity_embedding(const MetricTree<R>& t) {
  std::vector<uint32_t> f(t.size());
  for (uint32_t i = 0; i < t.size(); ++i) f[i] = i;
  std::vector<EmbeddingComponent<R>> comps;
  comps.push_back({R(1), t, std::move(f)});
  return StochasticEmbedding<R>(pairwise_distances(t), std::move(comps));
}

}  // namespace

TEST_CASE_TEMPLATE("validate_embedding: identity is an isometry", R, double, Rational) {
  Rng rng(19);
  auto t = random_tree<R>(rng, 10);
  auto e = identity_embedding(t);
  auto report = validate_embedding(e);
  // float mode: the source matrix and path_distance sum edges in different
  // orders, so the ratio is 1 only up to rounding
  CHECK(near(report.min_ratio, R(1), 1e-12));
  CHECK(near(report.max_ratio, R(1), 1e-12));
  CHECK(report.component_noncontracting == std::vector<char>{1});
}

TEST_CASE("validate_embedding: stretch and contraction are detected") {
  // two points at distance 1 mapped to the endpoints of a length-2 edge
  auto source = FiniteMetric<double>::from_matrix(2, {0, 1, 1, 0});
  std::vector<TreeEdge<double>> edge{{0, 1, 2.0}};
  auto stretched_tree = MetricTree<double>::build(2, edge, 0);
  std::vector<EmbeddingComponent<double>> comps;
  comps.push_back({1.0, stretched_tree, {0, 1}});
  StochasticEmbedding<double> e(source, std::move(comps));
  auto report = validate_embedding(e);
  CHECK(report.max_ratio == 2.0);
  CHECK(report.argmax_a == 0);
  CHECK(report.argmax_b == 1);

  // a component mapping into a shorter edge contracts
  std::vector<TreeEdge<double>> short_edge{{0, 1, 0.5}};
  auto short_tree = MetricTree<double>::build(2, short_edge, 0);
  std::vector<EmbeddingComponent<double>> bad;
  bad.push_back({1.0, short_tree, {0, 1}});
  StochasticEmbedding<double> b(source, std::move(bad));
  try {
    validate_embedding(b);
    FAIL("expected non-contraction violation");
  } catch (const Error& err) {
    CHECK(err.code() == errc::non_contraction_violated);
  }
  auto lax = validate_embedding(b, /*strict=*/false);
  CHECK(lax.component_noncontracting == std::vector<char>{0});
}

TEST_CASE("validate_embedding requires two source points") {
  auto source = FiniteMetric<double>::from_matrix(1, {0});
  auto tiny = MetricTree<double>::build(1, {}, 0);
  std::vector<EmbeddingComponent<double>> comps;
  comps.push_back({1.0, tiny, {0}});
  StochasticEmbedding<double> e(source, std::move(comps));
  try {
    validate_embedding(e);
    FAIL("expected single_point");
  } catch (const Error& err) {
    CHECK(err.code() == errc::single_point);
  }
}

TEST_CASE("embedding construction validates weights and totality") {
  auto source = FiniteMetric<double>::from_matrix(2, {0, 1, 1, 0});
  std::vector<TreeEdge<double>> edge{{0, 1, 2.0}};
  auto tree = MetricTree<double>::build(2, edge, 0);

  std::vector<EmbeddingComponent<double>> half;
  half.push_back({0.5, tree, {0, 1}});
  CHECK_THROWS_AS(StochasticEmbedding<double>(source, std::move(half)), Error);

  std::vector<EmbeddingComponent<double>> partial;
  partial.push_back({1.0, tree, {0}});
  CHECK_THROWS_AS(StochasticEmbedding<double>(source, std::move(partial)), Error);
}

TEST_CASE("frt_sample: determinism, degenerate sizes, non-contraction") {
  Rng rng(21);
  auto metric = twatest::random_point_metric(rng, 24);

  auto a = frt_sample(metric, 99, 5);
  auto b = frt_sample(metric, 99, 5);
  auto ja = io::embedding_to_json(io::label_embedding(a, io::default_labels(metric.size())));
  auto jb = io::embedding_to_json(io::label_embedding(b, io::default_labels(metric.size())));
  CHECK(ja == jb);
  CHECK(io::embedding_to_json(io::label_embedding(frt_sample(metric, 100, 5), io::default_labels(metric.size()))) !=
        ja);

  CHECK(a.components().size() == 5);
  for (const auto& comp : a.components()) CHECK(comp.p == doctest::Approx(0.2));
  validate_embedding(a);  // throws on any contraction

  // single point: one trivial tree per component
  auto one = FiniteMetric<double>::from_matrix(1, {0});
  auto se = frt_sample(one, 3, 2);
  CHECK(se.components().size() == 2);
  CHECK(se.components()[0].tree.size() == 1);

  // two points at distance 1: leaf separation at least 1
  auto two = FiniteMetric<double>::from_matrix(2, {0, 1, 1, 0});
  auto te = frt_sample(two, 5, 40);
  for (const auto& comp : te.components()) {
    CHECK(comp.tree.path_distance(comp.f[0], comp.f[1]) >= 1.0);
  }

  CHECK_THROWS_AS(frt_sample(metric, 1, 0), Error);
}

TEST_CASE("frt_sample works in rational mode on tree metrics") {
  Rng rng(22);
  auto t = random_tree<Rational>(rng, 9);
  auto metric = pairwise_distances(t);
  auto e = frt_sample(metric, 17, 4);
  validate_embedding(e);
  Rational total(0);
  for (const auto& comp : e.components()) total += comp.p;
  CHECK(total == Rational(1));
  // bitwise determinism via serialization
  auto ja = io::embedding_to_json(io::label_embedding(e, io::default_labels(metric.size())));
  auto jb = io::embedding_to_json(io::label_embedding(frt_sample(metric, 17, 4), io::default_labels(metric.size())));
  CHECK(ja == jb);
}

TEST_CASE_TEMPLATE("lift_measure pushes through every component", R, double, Rational) {
  Rng rng(23);
  auto t = random_tree<R>(rng, 8);
  auto e = identity_embedding(t);
  auto m = random_measure<R>(rng, 8);
  auto lifted = lift_measure(e, m);
  REQUIRE(lifted.size() == 1);
  CHECK(lifted[0] == m);

  // diracs push to diracs at the image vertex
  auto dirac = Measure<R>::make({{3, R(1)}});
  CHECK(lift_measure(e, dirac)[0].mass_at(3) == R(1));
}

TEST_CASE("lift_measure collapses glued points") {
  auto source = FiniteMetric<double>::from_matrix(2, {0, 1, 1, 0});
  std::vector<TreeEdge<double>> edges{{0, 1, 1.0}, {0, 2, 1.0}};
  auto tree = MetricTree<double>::build(3, edges, 0);
  std::vector<EmbeddingComponent<double>> comps;
  comps.push_back({0.5, tree, {1, 1}});  // glue both points
  comps.push_back({0.5, tree, {1, 2}});
  StochasticEmbedding<double> e(source, std::move(comps));
  auto m = Measure<double>::make({{0, 0.5}, {1, 0.5}});
  auto lifted = lift_measure(e, m);
  REQUIRE(lifted.size() == 2);
  CHECK(lifted[0].support_size() == 1);  // first component glues to a dirac
  CHECK(lifted[1].support_size() == 2);
}

TEST_CASE_TEMPLATE("wasserstein_l1_map: identity reduces to embed_measure", R, double, Rational) {
  Rng rng(24);
  auto t = random_tree<R>(rng, 9);
  auto e = identity_embedding(t);
  auto m = random_measure<R>(rng, 9);
  CHECK(wasserstein_l1_map(e, m) == embed_measure(t, m));
}

TEST_CASE("wasserstein_l1_map on dirac pairs recovers the weighted tree distances") {
  Rng rng(25);
  auto metric = twatest::random_point_metric(rng, 12);
  auto e = frt_sample(metric, 7, 6);
  for (int probes = 0; probes < 10; ++probes) {
    uint32_t x = static_cast<uint32_t>(rng.next_below(12));
    uint32_t y = static_cast<uint32_t>(rng.next_below(12));
    if (x == y) continue;
    auto dx = Measure<double>::make({{x, 1.0}});
    auto dy = Measure<double>::make({{y, 1.0}});
    double image = l1_distance(wasserstein_l1_map(e, dx), wasserstein_l1_map(e, dy));
    double expected = 0;
    for (const auto& comp : e.components()) {
      expected += comp.p * comp.tree.path_distance(comp.f[x], comp.f[y]);
    }
    CHECK(image == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("distortion audit: identity embedding has unit ratios") {
  Rng rng(26);
  auto t = random_tree<Rational>(rng, 8);
  auto e = identity_embedding(t);
  std::vector<std::pair<Measure<Rational>, Measure<Rational>>> samples;
  for (int k = 0; k < 12; ++k) samples.push_back(random_measure_pair<Rational>(rng, 8));
  auto report = wasserstein_distortion_audit<Rational>(e, samples);
  CHECK(report.min_ratio == Rational(1));
  CHECK(report.max_ratio == Rational(1));
}

TEST_CASE("distortion audit: dirac pairs reproduce the point-level ratios") {
  Rng rng(27);
  auto metric = twatest::random_point_metric(rng, 9);
  auto e = frt_sample(metric, 31, 5);
  auto point_report = validate_embedding(e);

  std::vector<std::pair<Measure<double>, Measure<double>>> samples;
  samples.emplace_back(Measure<double>::make({{point_report.argmax_a, 1.0}}),
                       Measure<double>::make({{point_report.argmax_b, 1.0}}));
  auto report = wasserstein_distortion_audit<double>(e, samples);
  CHECK(report.max_ratio == doctest::Approx(to_double(point_report.max_ratio)).epsilon(1e-9));
}

TEST_CASE("distortion audit: sampled pairs stay inside the sandwich") {
  Rng rng(28);
  auto metric = twatest::random_point_metric(rng, 16);
  auto e = frt_sample(metric, 55, 8);
  auto d_emp = to_double(validate_embedding(e).max_ratio);

  std::vector<std::pair<Measure<double>, Measure<double>>> samples;
  for (int k = 0; k < 50; ++k) samples.push_back(random_measure_pair<double>(rng, 16));
  uint32_t skipped = 0;
  auto report = wasserstein_distortion_audit<double>(e, samples, &skipped);
  CHECK(report.min_ratio >= 1.0 - 1e-9);
  CHECK(report.max_ratio <= d_emp * (1.0 + 1e-9));
  CHECK(skipped <= 50);
}
