#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "measure.hpp"
#include "metric.hpp"
#include "num.hpp"
#include "transport.hpp"
#include "tree_ot.hpp"

namespace twa {

template <class R>
struct EmbeddingComponent {
  R p;                      // probability weight
  MetricTree<R> tree;
  std::vector<uint32_t> f;  // source point -> tree vertex
};

/// Weighted family of maps from a finite metric into metric trees. Construction
/// checks the probability vector and totality of the maps; non-contraction is
/// audited by validate_embedding().
template <class R>
class StochasticEmbedding {
 public:
  StochasticEmbedding(FiniteMetric<R> source, std::vector<EmbeddingComponent<R>> components)
      : source_(std::move(source)), components_(std::move(components)) {
    if (components_.empty()) fail(errc::invalid_argument, "embedding needs at least one component");
    R total(0);
    for (size_t i = 0; i < components_.size(); ++i) {
      const auto& comp = components_[i];
      if (comp.p < R(0)) fail(errc::invalid_argument, "component " + std::to_string(i) + " has negative weight");
      total += comp.p;
      if (comp.f.size() != source_.size()) {
        fail(errc::unmapped_point, "component " + std::to_string(i) + " does not map every source point");
      }
      for (uint32_t v : comp.f) comp.tree.check_vertex(v);
    }
    if (!near(total, R(1), tolerance::measure_sum)) {
      fail(errc::not_normalized, "component weights sum to " + std::to_string(to_double(total)) + ", expected 1");
    }
  }

  const FiniteMetric<R>& source() const { return source_; }
  std::span<const EmbeddingComponent<R>> components() const { return components_; }

 private:
  FiniteMetric<R> source_;
  std::vector<EmbeddingComponent<R>> components_;
};

/// Distortion audit result. For point-level audits argmax names the worst
/// source pair; for measure-level audits both slots hold the sample index.
template <class R>
struct DistortionReport {
  R min_ratio{};
  R max_ratio{};  // the certified empirical distortion
  uint32_t argmax_a = 0;
  uint32_t argmax_b = 0;
  std::vector<char> component_noncontracting;
};

/// Exhaustive point-pair audit: checks per-component non-contraction and
/// computes the stretch ratio sum_i p_i d_i(f_i x, f_i y) / d(x, y) over all
/// source pairs. max_ratio is the empirical distortion of this embedding.
template <class R>
DistortionReport<R> validate_embedding(const StochasticEmbedding<R>& e, bool strict = true) {
  const auto& src = e.source();
  if (src.size() < 2) fail(errc::single_point, "distortion is undefined on a single-point source");
  DistortionReport<R> report;
  report.component_noncontracting.assign(e.components().size(), 1);
  bool first = true;
  for (uint32_t x = 0; x < src.size(); ++x) {
    for (uint32_t y = x + 1; y < src.size(); ++y) {
      const R& d = src.at(x, y);
      R stretched(0);
      for (size_t i = 0; i < e.components().size(); ++i) {
        const auto& comp = e.components()[i];
        R dt = comp.tree.path_distance(comp.f[x], comp.f[y]);
        if (lt(dt, d, tolerance::non_contraction)) {
          report.component_noncontracting[i] = 0;
          if (strict) {
            fail(errc::non_contraction_violated, "component " + std::to_string(i) + " contracts points " +
                                                     std::to_string(x) + " and " + std::to_string(y));
          }
        }
        stretched += comp.p * dt;
      }
      R ratio = stretched / d;
      if (first || ratio < report.min_ratio) report.min_ratio = ratio;
      if (first || ratio > report.max_ratio) {
        report.max_ratio = ratio;
        report.argmax_a = x;
        report.argmax_b = y;
      }
      first = false;
    }
  }
  return report;
}

/// Component-wise pushforwards of a measure on the source points.
template <class R>
std::vector<Measure<R>> lift_measure(const StochasticEmbedding<R>& e, const Measure<R>& m) {
  std::vector<Measure<R>> out;
  out.reserve(e.components().size());
  for (const auto& comp : e.components()) out.push_back(pushforward<R>(comp.f, m));
  return out;
}

/// The composed ell^1 embedding of the Wasserstein space: per component, the
/// edge embedding of the pushforward, scaled by p_i, namespaced by component.
template <class R>
EmbeddingVector<R> wasserstein_l1_map(const StochasticEmbedding<R>& e, const Measure<R>& m) {
  std::vector<typename EmbeddingVector<R>::Entry> entries;
  for (size_t i = 0; i < e.components().size(); ++i) {
    const auto& comp = e.components()[i];
    EmbeddingVector<R> block = embed_measure(comp.tree, pushforward<R>(comp.f, m));
    for (const auto& b : block.entries()) {
      if (comp.p == R(0)) continue;
      entries.push_back({static_cast<uint32_t>(i), b.edge, comp.p * b.value});
    }
  }
  return EmbeddingVector<R>::from_sorted(std::move(entries));
}

/// Ratio audit over sampled measure pairs:
///   ||F(mu) - F(nu)||_1 / Wa(mu, nu)   with Wa from the transport oracle.
/// Pairs with Wa = 0 are skipped (their image distance is checked to be 0).
/// skipped_out, when given, receives that count.
template <class R>
DistortionReport<R> wasserstein_distortion_audit(const StochasticEmbedding<R>& e,
                                                 std::span<const std::pair<Measure<R>, Measure<R>>> samples,
                                                 uint32_t* skipped_out = nullptr) {
  DistortionReport<R> report;
  report.component_noncontracting = validate_embedding(e).component_noncontracting;
  uint32_t skipped = 0;
  bool first = true;
  for (uint32_t k = 0; k < samples.size(); ++k) {
    const auto& [mu, nu] = samples[k];
    R base = transport_lp(e.source(), mu, nu).value;
    R image = l1_distance(wasserstein_l1_map(e, mu), wasserstein_l1_map(e, nu));
    if (near(base, R(0), tolerance::audit_slack)) {
      if (!near(image, R(0), tolerance::audit_slack)) {
        fail(errc::internal, "image distance nonzero for identical measures in sample " + std::to_string(k));
      }
      ++skipped;
      continue;
    }
    R ratio = image / base;
    if (first || ratio < report.min_ratio) report.min_ratio = ratio;
    if (first || ratio > report.max_ratio) {
      report.max_ratio = ratio;
      report.argmax_a = k;
      report.argmax_b = k;
    }
    first = false;
  }
  if (skipped_out) *skipped_out = skipped;
  if (first) {
    // no informative pair; report the trivial ratio 1
    report.min_ratio = R(1);
    report.max_ratio = R(1);
  }
  return report;
}

}  // namespace twa
