#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "tidagcn/numeric/errors.hpp"
#include "tidagcn/numeric/ops.hpp"
#include "tidagcn/numeric/optim.hpp"
#include "tidagcn/numeric/segment_ops.hpp"
#include "tidagcn/numeric/sparse.hpp"

using namespace tidagcn;
using tidagcn::testing::check_gradients;
using tidagcn::testing::random_tensor;

namespace {

// Gradient check of a scalar function of the given parameters.
void expect_gradients(const std::function<Tensor()>& f, std::vector<Tensor*> ps,
                      double tol = 1e-6) {
  std::vector<std::pair<std::string, Tensor*>> named;
  for (std::size_t i = 0; i < ps.size(); ++i) named.emplace_back("p" + std::to_string(i), ps[i]);
  const auto r = check_gradients(f, named, 1e-5, 1e-6);
  INFO(r.worst);
  CHECK(r.max_rel_error < tol);
}

// Weighted sum with fixed random coefficients: a generic scalar head.
Tensor project(const Tensor& x, std::uint64_t seed) {
  Rng rng(seed);
  return sum(mul(x, random_tensor(x.shape(), rng)));
}

}  // namespace

TEST_SUITE("numeric-core") {
  TEST_CASE("tensor factories and shapes") {
    const Tensor z = Tensor::zeros({2, 3});
    CHECK(z.rows() == 2);
    CHECK(z.cols() == 3);
    CHECK(z.size() == 6);
    CHECK(Tensor::full({4}, 2.5)(3) == 2.5);
    CHECK(Tensor::scalar(7.0).item() == 7.0);
    CHECK_FALSE(z.requires_grad());
    CHECK(Tensor::parameter({1}, {1.0}).requires_grad());
    CHECK_THROWS_AS(z.item(), UsageError);
    CHECK_THROWS_AS(Tensor().shape(), UsageError);
  }

  TEST_CASE("backward requires a scalar") {
    Tensor p = Tensor::parameter({2}, {1.0, 2.0});
    CHECK_THROWS_AS(scale(p, 2.0).backward(), UsageError);
    sum(scale(p, 3.0)).backward();
    CHECK(p.grad()[0] == 3.0);
    CHECK(p.grad()[1] == 3.0);
  }

  TEST_CASE("gradients accumulate across backward calls and reset with zero_grad") {
    Tensor p = Tensor::parameter({1}, {2.0});
    sum(mul(p, p)).backward();
    sum(mul(p, p)).backward();
    CHECK(p.grad()[0] == doctest::Approx(8.0));
    p.zero_grad();
    CHECK_FALSE(p.has_grad());
  }

  TEST_CASE("no-grad scope records no history") {
    Tensor p = Tensor::parameter({1}, {2.0});
    NoGradGuard guard;
    const Tensor y = mul(p, p);
    CHECK_FALSE(y.requires_grad());
  }

  TEST_CASE("mutable_data is rejected on computed tensors") {
    Tensor p = Tensor::parameter({1}, {2.0});
    Tensor y = mul(p, p);
    CHECK_THROWS_AS(y.mutable_data(), UsageError);
  }

  TEST_CASE("shared subexpressions receive summed gradients") {
    // f = sum((x*x) + (x*x)*x) at x = 3: df/dx = 2x + 3x^2 = 33.
    Tensor x = Tensor::parameter({1}, {3.0});
    const Tensor sq = mul(x, x);
    sum(add(sq, mul(sq, x))).backward();
    CHECK(x.grad()[0] == doctest::Approx(33.0));
  }

  TEST_CASE("matmul values and shape errors") {
    const Tensor a = Tensor::from({2, 2}, {1, 2, 3, 4});
    const Tensor b = Tensor::from({2, 1}, {5, 6});
    const Tensor c = matmul(a, b);
    CHECK(c(0, 0) == 17.0);
    CHECK(c(1, 0) == 39.0);
    CHECK_THROWS_AS(matmul(b, b), DimensionError);
    CHECK(matmul_nt(a, a)(0, 1) == 11.0);  // [1,2].[3,4]
  }

  TEST_CASE("dense op gradients match finite differences") {
    Rng rng(11);
    Tensor a = random_tensor({3, 4}, rng, -1, 1, true);
    Tensor b = random_tensor({4, 2}, rng, -1, 1, true);
    Tensor c = random_tensor({3, 4}, rng, -1, 1, true);
    Tensor bias = random_tensor({4}, rng, -1, 1, true);
    Tensor nt = random_tensor({5, 4}, rng, -1, 1, true);
    expect_gradients([&] { return project(matmul(a, b), 1); }, {&a, &b});
    expect_gradients([&] { return project(matmul_nt(a, nt), 2); }, {&a, &nt});
    expect_gradients([&] { return project(add(a, c), 3); }, {&a, &c});
    expect_gradients([&] { return project(sub(a, c), 4); }, {&a, &c});
    expect_gradients([&] { return project(mul(a, c), 5); }, {&a, &c});
    expect_gradients([&] { return project(scale(a, -1.7), 6); }, {&a});
    expect_gradients([&] { return project(add_row_bias(a, bias), 7); }, {&a, &bias});
    expect_gradients([&] { return project(leaky_relu(a, 0.2), 8); }, {&a});
    expect_gradients([&] { return project(relu(a), 9); }, {&a});
    expect_gradients([&] { return project(softmax_rows(a), 10); }, {&a});
    expect_gradients([&] { return project(concat_cols(a, c), 11); }, {&a, &c});
    expect_gradients([&] { return mean(mul(a, a)); }, {&a});
    expect_gradients([&] { return project(reshape(a, {12}), 14); }, {&a});
    const std::size_t idx[] = {2, 0, 2, 1};
    expect_gradients([&] { return project(gather_rows(a, idx), 12); }, {&a});
  }

  TEST_CASE("softmax rows sum to one and are shift invariant") {
    Rng rng(3);
    const Tensor x = random_tensor({5, 7}, rng, -30, 30);
    const Tensor y = softmax_rows(x);
    for (std::size_t r = 0; r < 5; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < 7; ++c) s += y(r, c);
      CHECK(std::abs(s - 1.0) < 1e-12);
    }
    const Tensor shifted = softmax_rows(add(x, Tensor::full({5, 7}, 1000.0)));
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(shifted(i) == doctest::Approx(y(i)).epsilon(1e-12));
  }

  TEST_CASE("leaky_relu rejects slopes outside (0, 1)") {
    const Tensor x = Tensor::from({2}, {-2.0, 3.0});
    CHECK(leaky_relu(x, 0.2)(0) == doctest::Approx(-0.4));
    CHECK(leaky_relu(x, 0.2)(1) == 3.0);
    CHECK_THROWS_AS(leaky_relu(x, 0.0), ConfigError);
    CHECK_THROWS_AS(leaky_relu(x, 1.0), ConfigError);
  }

  TEST_CASE("layer_norm normalizes rows and has correct gradients") {
    Rng rng(5);
    Tensor x = random_tensor({4, 6}, rng, -3, 3, true);
    Tensor g = random_tensor({6}, rng, 0.5, 1.5, true);
    Tensor b = random_tensor({6}, rng, -1, 1, true);
    const Tensor plain = layer_norm(x, Tensor::full({6}, 1.0), Tensor::zeros({6}), 1e-12);
    for (std::size_t r = 0; r < 4; ++r) {
      double m = 0.0, v = 0.0;
      for (std::size_t c = 0; c < 6; ++c) m += plain(r, c) / 6.0;
      for (std::size_t c = 0; c < 6; ++c) v += (plain(r, c) - m) * (plain(r, c) - m) / 6.0;
      CHECK(std::abs(m) < 1e-12);
      CHECK(std::abs(v - 1.0) < 1e-9);
    }
    expect_gradients([&] { return project(layer_norm(x, g, b), 21); }, {&x, &g, &b});
  }

  TEST_CASE("cross entropy values, gradients and target checks") {
    // Uniform over four items -> ln 4.
    const std::size_t t0[] = {2};
    CHECK(cross_entropy_logits(Tensor::zeros({1, 4}), t0).item() == doctest::Approx(std::log(4.0)));
    const Tensor probs = Tensor::from({2, 4}, {0.5, 0.5, 0, 0, 0.25, 0.25, 0.25, 0.25});
    const std::size_t t1[] = {0, 3};
    CHECK(cross_entropy_probs(probs, t1).item() ==
          doctest::Approx((std::log(2.0) + std::log(4.0)) / 2.0));
    const std::size_t bad[] = {4};
    CHECK_THROWS_AS(cross_entropy_logits(Tensor::zeros({1, 4}), bad), IndexError);
    Rng rng(8);
    Tensor logits = random_tensor({3, 5}, rng, -2, 2, true);
    const std::size_t t2[] = {4, 0, 2};
    expect_gradients([&] { return cross_entropy_logits(logits, t2); }, {&logits});
    expect_gradients([&] { return cross_entropy_probs(softmax_rows(logits), t2); }, {&logits});
  }

  TEST_CASE("dropout is inverted, seeded, and the identity at rate 0") {
    const Tensor x = Tensor::full({100, 10}, 1.0);
    CHECK(dropout(x, 0.0, 1).node() == x.node());
    const Tensor y = dropout(x, 0.5, 42);
    const Tensor y2 = dropout(x, 0.5, 42);
    std::size_t kept = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      CHECK((y(i) == 0.0 || y(i) == 2.0));
      CHECK(y(i) == y2(i));
      kept += y(i) != 0.0;
    }
    CHECK(kept > 400);
    CHECK(kept < 600);
    Rng rng(2);
    Tensor p = random_tensor({4, 4}, rng, -1, 1, true);
    expect_gradients([&] { return project(dropout(p, 0.3, 7), 3); }, {&p});
  }

  TEST_CASE("xavier init respects the Glorot limit and is seeded") {
    const Tensor w = xavier_init({30, 20}, 9);
    const double limit = std::sqrt(6.0 / 50.0);
    CHECK(xavier_limit({30, 20}) == doctest::Approx(limit));
    double lo = 1.0, hi = -1.0;
    for (double v : w.data()) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(lo >= -limit);
    CHECK(hi <= limit);
    CHECK(hi > 0.8 * limit);
    CHECK(lo < -0.8 * limit);
    CHECK(xavier_init({30, 20}, 9)(17) == w(17));
    CHECK(xavier_init({30, 20}, 10)(17) != w(17));
    CHECK(w.requires_grad());
  }

  TEST_CASE("adam step matches the hand-computed update") {
    // First step with bias correction moves each weight by lr * sign(g).
    Tensor p = Tensor::parameter({2}, {1.0, -1.0});
    AdamState s;
    s.lr = 0.1;
    const std::vector<double> g = {0.5, -2.0};
    std::vector<std::span<const double>> grads{g};
    std::vector<Tensor> ps{p};
    adam_step(ps, grads, s);
    CHECK(p(0) == doctest::Approx(0.9).epsilon(1e-7));
    CHECK(p(1) == doctest::Approx(-0.9).epsilon(1e-7));
    // Second step, direct formula.
    const std::vector<double> g2 = {1.0, 0.0};
    std::vector<std::span<const double>> grads2{g2};
    adam_step(ps, grads2, s);
    const double m = 0.9 * 0.05 + 0.1 * 1.0, v = 0.999 * 0.00025 + 0.001 * 1.0;
    const double mhat = m / (1 - 0.81), vhat = v / (1 - 0.999 * 0.999);
    const double p1 = 1.0 - 0.1 * (0.05 / 0.1) / (std::sqrt(0.00025 / 0.001) + 1e-8);
    CHECK(p(0) == doctest::Approx(p1 - 0.1 * mhat / (std::sqrt(vhat) + 1e-8)).epsilon(1e-12));
  }

  TEST_CASE("adam with lr 0 leaves parameters unchanged") {
    Tensor p = Tensor::parameter({3}, {1.0, 2.0, 3.0});
    AdamState s;
    s.lr = 0.0;
    std::vector<Tensor> ps{p};
    for (int i = 0; i < 5; ++i) {
      p.zero_grad();
      sum(mul(p, p)).backward();
      adam_step(ps, s);
    }
    CHECK(p(0) == 1.0);
    CHECK(p(2) == 3.0);
  }

  TEST_CASE("sparse matrices from triplets") {
    const auto s = SparseMatrix::from_triplets(2, 3, {{1, 2, 4.0}, {0, 1, 2.0}, {0, 0, 1.0}});
    CHECK(s.nnz() == 3);
    const Tensor d = s.densify();
    CHECK(d(0, 0) == 1.0);
    CHECK(d(0, 1) == 2.0);
    CHECK(d(1, 2) == 4.0);
    CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), IndexError);
    CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 0, 2.0}}), DataError);
    const Tensor id = sparse_dense_matmul(SparseMatrix::identity(3), Tensor::full({3, 2}, 5.0));
    CHECK(id(2, 1) == 5.0);
  }

  TEST_CASE("spmm equals the densified product and has correct gradients") {
    Rng rng(17);
    std::vector<Triplet> trips;
    for (std::size_t r = 0; r < 6; ++r) {
      for (std::size_t c = 0; c < 5; ++c) {
        if (rng.uniform() < 0.4) trips.push_back({r, c, rng.uniform(-1, 1)});
      }
    }
    const auto s = SparseMatrix::from_triplets(6, 5, trips);
    Tensor x = random_tensor({5, 3}, rng, -1, 1, true);
    const Tensor sparse = sparse_dense_matmul(s, x);
    const Tensor dense = matmul(s.densify(), x);
    for (std::size_t i = 0; i < dense.size(); ++i) CHECK(std::abs(sparse(i) - dense(i)) < 1e-14);
    Tensor w = Tensor::parameter({s.nnz()}, {s.values().begin(), s.values().end()});
    expect_gradients([&] { return project(spmm(s.pattern(), w, x), 4); }, {&w, &x});
  }

  TEST_CASE("segment softmax and smoothed softmax match direct formulas") {
    Rng rng(23);
    Tensor f = random_tensor({9}, rng, -2, 2, true);
    const std::size_t off[] = {0, 4, 5, 9};
    const Tensor a = segment_softmax(f, off);
    const Tensor s = segment_smoothed_softmax(f, off, 0.5);
    for (std::size_t g = 0; g < 3; ++g) {
      double z = 0.0, total = 0.0;
      for (std::size_t i = off[g]; i < off[g + 1]; ++i) z += std::exp(f(i));
      for (std::size_t i = off[g]; i < off[g + 1]; ++i) {
        CHECK(std::abs(a(i) - std::exp(f(i)) / z) < 1e-12);
        CHECK(std::abs(s(i) - std::exp(f(i)) / std::sqrt(z)) < 1e-12);
        total += a(i);
      }
      CHECK(std::abs(total - 1.0) < 1e-12);
    }
    // beta = 0 leaves exp(f); beta = 1 is the plain softmax.
    const Tensor s0 = segment_smoothed_softmax(f, off, 0.0);
    const Tensor s1 = segment_smoothed_softmax(f, off, 1.0);
    for (std::size_t i = 0; i < 9; ++i) {
      CHECK(std::abs(s0(i) - std::exp(f(i))) < 1e-12);
      CHECK(std::abs(s1(i) - a(i)) < 1e-12);
    }
    expect_gradients([&] { return project(segment_softmax(f, off), 1); }, {&f});
    expect_gradients([&] { return project(segment_smoothed_softmax(f, off, 0.5), 2); }, {&f});
  }

  TEST_CASE("edge cosine values, zero-norm handling and gradients") {
    CsrPattern p;
    p.n_rows = p.n_cols = 3;
    p.row_ptr = {0, 2, 4, 5};
    p.col_idx = {0, 1, 1, 2, 2};
    Tensor x = Tensor::parameter({3, 2}, {1, 0, 1, 1, 0, 0});
    std::size_t hits = 0;
    const Tensor s = edge_cosine(x, p, &hits);
    CHECK(s(0) == 1.0);  // self
    CHECK(s(1) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(s(3) == 0.0);  // zero-norm neighbor
    CHECK(s(4) == 0.0);  // zero-norm self
    CHECK(hits == 2);
    Rng rng(4);
    Tensor y = random_tensor({3, 4}, rng, -1, 1, true);
    expect_gradients([&] { return project(edge_cosine(y, p), 5); }, {&y});
  }

  TEST_CASE("range attention matches enumeration and has correct gradients") {
    Rng rng(31);
    Tensor q = random_tensor({4, 3}, rng, -1, 1, true);
    Tensor k = random_tensor({4, 3}, rng, -1, 1, true);
    Tensor v = random_tensor({4, 2}, rng, -1, 1, true);
    const RowRange ranges[] = {{0, 1}, {0, 2}, {2, 4}, {0, 4}};
    const Tensor out = range_attention(q, k, v, ranges, 0.7);
    for (std::size_t i = 0; i < 4; ++i) {
      double z = 0.0;
      std::vector<double> w;
      for (std::size_t j = ranges[i].begin; j < ranges[i].end; ++j) {
        double dot = 0.0;
        for (std::size_t c = 0; c < 3; ++c) dot += q(i, c) * k(j, c);
        w.push_back(std::exp(0.7 * dot));
        z += w.back();
      }
      for (std::size_t c = 0; c < 2; ++c) {
        double expect = 0.0;
        for (std::size_t j = ranges[i].begin; j < ranges[i].end; ++j) {
          expect += w[j - ranges[i].begin] / z * v(j, c);
        }
        CHECK(std::abs(out(i, c) - expect) < 1e-12);
      }
    }
    expect_gradients([&] { return project(range_attention(q, k, v, ranges, 0.7), 6); },
                     {&q, &k, &v});
  }

  TEST_CASE("segment max picks the first maximum and routes gradients to it") {
    CsrPattern g;
    g.n_rows = 2;
    g.n_cols = 3;
    g.row_ptr = {0, 2, 3};
    g.col_idx = {0, 1, 2};
    Tensor x = Tensor::parameter({3, 2}, {1, 5, 1, 2, 7, 0});
    const Tensor m = segment_max(x, g);
    CHECK(m(0, 0) == 1.0);
    CHECK(m(0, 1) == 5.0);
    CHECK(m(1, 0) == 7.0);
    sum(m).backward();
    CHECK(x.grad()[0] == 1.0);  // tie: first row wins
    CHECK(x.grad()[2] == 0.0);
    CHECK(x.grad()[1] == 1.0);
    CsrPattern empty = g;
    empty.row_ptr = {0, 0, 3};
    CHECK_THROWS(segment_max(x, empty));
  }

  TEST_CASE("literal examples of the numeric contracts") {
    // matmul
    const Tensor m = Tensor::from({2, 2}, {1, 2, 3, 4});
    const Tensor im = matmul(Tensor::from({2, 2}, {1, 0, 0, 1}), m);
    for (std::size_t i = 0; i < 4; ++i) CHECK(im(i) == m(i));
    CHECK(matmul(Tensor::from({1, 2}, {1, 0}), Tensor::from({2, 1}, {0, 1}))(0, 0) == 0.0);
    Rng rng(99);
    const Tensor a = random_tensor({3, 4}, rng), b = random_tensor({4, 2}, rng);
    const Tensor ab = matmul(a, b);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < 4; ++k) acc += a(i, k) * b(k, j);
        CHECK(std::abs(ab(i, j) - acc) < 1e-12);
      }
    }
    // sparse
    const Tensor d = random_tensor({3, 2}, rng);
    const Tensor zero = sparse_dense_matmul(SparseMatrix::from_triplets(3, 3, {}), d);
    for (double v : zero.data()) CHECK(v == 0.0);
    // softmax
    const Tensor s0 = softmax_rows(Tensor::from({1, 2}, {0.0, 0.0}));
    CHECK(s0(0) == 0.5);
    const Tensor big = softmax_rows(Tensor::from({1, 2}, {1000.0, 1000.0}));
    CHECK(big(1) == 0.5);
    const Tensor s13 = softmax_rows(Tensor::from({1, 2}, {std::log(1.0), std::log(3.0)}));
    CHECK(s13(0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(s13(1) == doctest::Approx(0.75).epsilon(1e-15));
    // leaky_relu
    const Tensor lr = leaky_relu(Tensor::from({3}, {5.0, -1.0, 0.0}), 0.2);
    CHECK(lr(0) == 5.0);
    CHECK(lr(1) == doctest::Approx(-0.2).epsilon(1e-15));
    CHECK(lr(2) == 0.0);
    // layer_norm
    const Tensor ones = Tensor::full({2}, 1.0), zeros = Tensor::zeros({2});
    const Tensor c = layer_norm(Tensor::from({1, 2}, {3.0, 3.0}), ones, zeros);
    CHECK(c(0) == 0.0);
    CHECK(c(1) == 0.0);
    const Tensor pm = layer_norm(Tensor::from({1, 2}, {1.0, -1.0}), ones, zeros);
    CHECK(pm(0) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(pm(1) == doctest::Approx(-1.0).epsilon(1e-4));
    const Tensor aff = layer_norm(random_tensor({2, 2}, rng), zeros, Tensor::full({2}, 0.7));
    for (double v : aff.data()) CHECK(v == 0.7);
    // xavier
    const Tensor w = xavier_init({1000, 1000}, 5);
    const Tensor w2 = xavier_init({1000, 1000}, 5);
    CHECK(std::equal(w.data().begin(), w.data().end(), w2.data().begin()));
    const double limit = std::sqrt(6.0 / 2000.0);
    double total = 0.0, worst = 0.0;
    for (double v : w.data()) {
      total += v;
      worst = std::max(worst, std::abs(v));
    }
    CHECK(worst <= limit);
    const double sigma = limit / std::sqrt(3.0);
    CHECK(std::abs(total / 1e6) < 3.0 * sigma / 1000.0);
    // adam
    {
      Tensor p = Tensor::parameter({2}, {0.3, -0.4});
      AdamState st;
      std::vector<Tensor> ps{p};
      const std::vector<double> g0(2, 0.0);
      std::vector<std::span<const double>> grads{g0};
      for (int i = 0; i < 3; ++i) adam_step(ps, grads, st);
      CHECK(p(0) == 0.3);
      CHECK(p(1) == -0.4);
    }
    {
      Tensor p = Tensor::parameter({1}, {0.0});
      AdamState st;
      st.lr = 0.001;
      std::vector<Tensor> ps{p};
      const std::vector<double> g1{1.0};
      std::vector<std::span<const double>> grads{g1};
      adam_step(ps, grads, st);
      CHECK(p(0) == doctest::Approx(-0.001).epsilon(1e-6));
    }
    {
      Tensor p = Tensor::parameter({1}, {1.0});
      AdamState st;
      st.lr = 0.001;
      std::vector<Tensor> ps{p};
      for (int i = 0; i < 5000; ++i) {
        p.zero_grad();
        sum(mul(p, p)).backward();
        adam_step(ps, st);
      }
      CHECK(std::abs(p(0)) < 1e-2);
    }
    // autodiff
    Tensor x = random_tensor({2, 3}, rng, -1, 1, true);
    sum(x).backward();
    for (double g : x.grad()) CHECK(g == 1.0);
    Tensor u = Tensor::parameter({1}, {2.5}), v = Tensor::parameter({1}, {-4.0});
    sum(mul(u, v)).backward();
    CHECK(u.grad()[0] == -4.0);
    CHECK(v.grad()[0] == 2.5);
  }
}
