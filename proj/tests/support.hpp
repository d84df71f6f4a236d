#pragma once

// Shared helpers for the unit and acceptance tests: random graphs, dense
// conversions, a central finite-difference checker and small fixtures.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "tidagcn/data/dataset.hpp"
#include "tidagcn/graph/cds_graph.hpp"
#include "tidagcn/model/propagation_reference.hpp"
#include "tidagcn/numeric/random.hpp"
#include "tidagcn/numeric/tensor.hpp"

namespace tidagcn::testing {

struct RandomGraph {
  std::size_t n_accounts = 0, n_items_a = 0, n_items_b = 0;
  std::vector<InteractionSequence> sequences;
  CdsGraph graph;
};

// A random CDS graph whose node count is at most max_nodes. Sequences use
// random items (repeats allowed) and random gaps spanning many buckets.
inline RandomGraph random_graph(Rng& rng, std::size_t max_nodes, const GraphOptions& options) {
  RandomGraph g;
  const std::size_t h = options.latent_users;
  // p + n*h + q <= max_nodes with p, q, n >= 1.
  g.n_accounts = 1 + rng.below(std::max<std::size_t>(1, (max_nodes - 2) / h / 2));
  const std::size_t budget = max_nodes - g.n_accounts * h;
  g.n_items_a = 1 + rng.below(budget - 1);
  g.n_items_b = 1 + rng.below(budget - g.n_items_a);
  for (std::size_t a = 0; a < g.n_accounts; ++a) {
    for (Domain d : {Domain::A, Domain::B}) {
      if (rng.uniform() < 0.25) continue;  // some accounts miss a domain
      InteractionSequence s{a, d, {}};
      const std::size_t n_items = d == Domain::A ? g.n_items_a : g.n_items_b;
      const std::size_t len = 1 + rng.below(6);
      std::int64_t t = static_cast<std::int64_t>(rng.below(1000));
      for (std::size_t e = 0; e < len; ++e) {
        s.events.push_back({rng.below(n_items), t});
        t += static_cast<std::int64_t>(std::exp(rng.uniform(0.0, 15.0)));
      }
      g.sequences.push_back(std::move(s));
    }
  }
  g.graph = build_graph(g.n_accounts, g.n_items_a, g.n_items_b, g.sequences, options);
  return g;
}

inline Tensor random_tensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0,
                            bool param = false) {
  std::vector<double> v(shape_size(shape));
  for (double& x : v) x = rng.uniform(lo, hi);
  return param ? Tensor::parameter(std::move(shape), std::move(v))
               : Tensor::from(std::move(shape), std::move(v));
}

inline reference::Mat to_mat(const Tensor& t) {
  reference::Mat m(t.rows(), reference::Vec(t.cols()));
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t c = 0; c < t.cols(); ++c) m[r][c] = t(r, c);
  }
  return m;
}

inline double max_abs_diff(const Tensor& t, const reference::Mat& m) {
  double worst = 0.0;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t c = 0; c < t.cols(); ++c) worst = std::max(worst, std::abs(t(r, c) - m[r][c]));
  }
  return worst;
}

struct GradCheck {
  double max_rel_error = 0.0;
  std::string worst;  // "param[index]"
  std::size_t checked = 0;
};

// Compares analytic gradients of loss() with central differences for every
// element of every named parameter. rel = |a - n| / max(|a|, |n|, floor).
inline GradCheck check_gradients(const std::function<Tensor()>& loss,
                                 const std::vector<std::pair<std::string, Tensor*>>& params,
                                 double h = 1e-4, double floor = 1e-6) {
  for (auto& [name, p] : params) p->zero_grad();
  loss().backward();
  std::vector<std::vector<double>> analytic;
  for (auto& [name, p] : params) {
    analytic.emplace_back(p->size(), 0.0);
    if (p->has_grad()) std::copy(p->grad().begin(), p->grad().end(), analytic.back().begin());
  }
  GradCheck out;
  NoGradGuard no_grad;
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto data = params[k].second->mutable_data();
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double saved = data[i];
      data[i] = saved + h;
      const double up = loss().item();
      data[i] = saved - h;
      const double down = loss().item();
      data[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic[k][i];
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), floor});
      ++out.checked;
      if (rel > out.max_rel_error) {
        out.max_rel_error = rel;
        out.worst = params[k].first + "[" + std::to_string(i) + "] analytic " +
                    std::to_string(a) + " numeric " + std::to_string(numeric);
      }
    }
  }
  return out;
}

// Five accounts, each with a distinct domain-A and domain-B sequence (ten
// sequences) over
// small item sets; used by the overfit oracle. Every sequence is a training
// sequence.
inline Dataset memorization_fixture() {
  Dataset ds;
  const std::size_t n_acc = 5, n_a = 12, n_b = 12;
  for (std::size_t a = 0; a < n_acc; ++a) ds.account_ids.push_back(100 + a);
  for (std::size_t i = 0; i < n_a; ++i) ds.item_ids[0].push_back(i);
  for (std::size_t i = 0; i < n_b; ++i) ds.item_ids[1].push_back(1000 + i);
  for (std::size_t a = 0; a < n_acc; ++a) {
    for (Domain d : {Domain::A, Domain::B}) {
      InteractionSequence s{a, d, {}};
      const std::size_t len = 3 + (a + index_of(d)) % 3;
      std::int64_t t = 1000 * static_cast<std::int64_t>(a);
      for (std::size_t e = 0; e < len; ++e) {
        const std::size_t n = d == Domain::A ? n_a : n_b;
        s.events.push_back({(a * (d == Domain::A ? 5 : 7) + e * (3 + a % 2)) % n, t});
        t += 120 * static_cast<std::int64_t>(1 + e + a);
      }
      ds.sequences.push_back(std::move(s));
    }
  }
  ds.validate();
  return ds;
}

}  // namespace tidagcn::testing
