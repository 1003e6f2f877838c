#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qmsvm/kernel.hpp"
#include "qmsvm/qubo.hpp"
#include "qmsvm/rng.hpp"

using namespace qmsvm;

namespace {

Dataset random_subset(std::size_t m, int classes, Rng& rng) {
  Dataset d;
  d.num_classes = classes;
  d.features = Matrix(m, 3);
  for (auto& v : d.features.data()) v = rng.gaussian();
  d.labels.resize(m);
  for (auto& l : d.labels) l = static_cast<int>(rng.below(classes));
  return d;
}

std::vector<std::uint8_t> random_bits(std::size_t dim, Rng& rng) {
  std::vector<std::uint8_t> bits(dim);
  for (auto& b : bits) b = rng.coin() ? 1 : 0;
  return bits;
}

}  // namespace

TEST_CASE("decode_bits lands on the signed uniform grid") {
  SUBCASE("two bits") {
    const auto t00 = decode_bits(std::vector<std::uint8_t>{0, 0}, 1, 1, 2);
    CHECK(t00.tau(0, 0) == -1.0);
    const auto t11 = decode_bits(std::vector<std::uint8_t>{1, 1}, 1, 1, 2);
    CHECK(t11.tau(0, 0) == 1.0);
    // LSB first: bit 0 set -> sigma = 1 -> -1/3
    const auto t10 = decode_bits(std::vector<std::uint8_t>{1, 0}, 1, 1, 2);
    CHECK(t10.tau(0, 0) == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("one bit endpoints") {
    CHECK(decode_bits(std::vector<std::uint8_t>{0}, 1, 1, 1).tau(0, 0) == -1.0);
    CHECK(decode_bits(std::vector<std::uint8_t>{1}, 1, 1, 1).tau(0, 0) == 1.0);
  }
  SUBCASE("length and value validation") {
    CHECK_THROWS_AS(decode_bits(std::vector<std::uint8_t>{0, 1, 0}, 1, 1, 2),
                    DataError);
    CHECK_THROWS_AS(decode_bits(std::vector<std::uint8_t>{2, 0}, 1, 1, 2),
                    DataError);
  }
}

TEST_CASE("decoded grid is uniform and symmetric for B in 1..4") {
  for (int B = 1; B <= 4; ++B) {
    const auto denom = double((1 << B) - 1);
    std::vector<double> values;
    for (int code = 0; code < (1 << B); ++code) {
      std::vector<std::uint8_t> bits(B);
      for (int b = 0; b < B; ++b)
        bits[b] = static_cast<std::uint8_t>((code >> b) & 1);
      values.push_back(decode_bits(bits, 1, 1, B).tau(0, 0));
    }
    for (int k = 0; k < (1 << B); ++k) {
      const double expected = -1.0 + 2.0 * k / denom;
      CHECK(std::fabs(values[k] - expected) <= 1e-15);
      // complementary codes are exact negatives
      CHECK(values[k] == -values[(1 << B) - 1 - k]);
    }
    for (std::size_t k = 1; k < values.size(); ++k)
      CHECK(std::fabs((values[k] - values[k - 1]) - 2.0 / denom) <= 1e-15);
  }
}

TEST_CASE("penalty worked examples") {
  SUBCASE("balanced row with negative off-label mass") {
    SolutionMatrix T{Matrix(1, 3)};
    T.tau(0, 0) = -1.0;
    T.tau(0, 1) = 0.0;
    T.tau(0, 2) = 1.0;
    const std::vector<int> y{2};
    CHECK(penalty(T, y) == -1.0);
  }
  SUBCASE("all ones") {
    SolutionMatrix T{Matrix(1, 3, 1.0)};
    for (int label = 0; label < 3; ++label) {
      const std::vector<int> y{label};
      CHECK(penalty(T, y) == 11.0);
    }
  }
  SUBCASE("all zeros") {
    SolutionMatrix T{Matrix(1, 3, 0.0)};
    const std::vector<int> y{1};
    CHECK(penalty(T, y) == 0.0);
  }
}

TEST_CASE("objective worked examples and oracle") {
  SUBCASE("zeros") {
    SolutionMatrix T{Matrix(2, 2, 0.0)};
    Matrix K(2, 2, 1.0);
    const std::vector<int> y{0, 1};
    CHECK(objective(T, K, y, 1.0) == 0.0);
  }
  SUBCASE("hand evaluation") {
    SolutionMatrix T{Matrix(1, 2)};
    T.tau(0, 0) = 1.0;
    T.tau(0, 1) = -1.0;
    Matrix K(1, 1, 1.0);
    const std::vector<int> y{0};
    CHECK(objective(T, K, y, 1.0) == 0.0);
  }
  SUBCASE("random instances match the naive loop") {
    Rng rng(321);
    for (int trial = 0; trial < 20; ++trial) {
      const Dataset d = random_subset(3, 3, rng);
      const Matrix K = kernel_matrix(d.features, d.features, KernelParams{1.0});
      SolutionMatrix T{Matrix(3, 3)};
      for (auto& v : T.tau.data()) v = 2.0 * rng.unit() - 1.0;
      const double got = objective(T, K, d.labels, 0.7);
      const double want = oracle::objective(T.tau, K, d.labels, 0.7);
      CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("build_qubo single-variable instance") {
  Rng rng(1);
  Dataset d = random_subset(1, 1, rng);
  d.labels[0] = 0;
  Matrix K(1, 1, 1.0);
  QmsvmParams p;
  p.bits_per_var = 1;
  p.beta = 1.0;
  p.mu = 0.0;
  p.max_min_ratio.reset();
  const QuboProblem q = build_qubo(d, K, p);
  REQUIRE(q.dim() == 1);
  REQUIRE(q.entries().size() == 1);
  CHECK(q.entries()[0].i == 0);
  CHECK(q.entries()[0].j == 0);
  CHECK(q.entries()[0].value == doctest::Approx(-2.0).epsilon(1e-14));
}

TEST_CASE("energy differences reproduce decoded objective differences") {
  Rng rng(777);
  int checked = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t m = 1 + rng.below(6);
    const int classes = 2 + static_cast<int>(rng.below(2));
    const int bits_per_var = 1 + static_cast<int>(rng.below(3));
    const double betas[] = {0.0, 0.5, 1.0, 2.0};
    QmsvmParams p;
    p.bits_per_var = bits_per_var;
    p.beta = betas[rng.below(4)];
    p.mu = betas[rng.below(4)];
    p.max_min_ratio.reset();  // pruning off for the identity

    const Dataset d = random_subset(m, classes, rng);
    const Matrix K = kernel_matrix(d.features, d.features, KernelParams{1.0});
    const QuboProblem q = build_qubo(d, K, p);

    for (int pair = 0; pair < 200; ++pair) {
      const auto a1 = random_bits(q.dim(), rng);
      const auto a2 = random_bits(q.dim(), rng);
      const double de = energy(q, a1) - energy(q, a2);
      const auto t1 = decode_bits(a1, m, classes, bits_per_var);
      const auto t2 = decode_bits(a2, m, classes, bits_per_var);
      const double df =
          (oracle::objective(t1.tau, K, d.labels, p.beta) +
           p.mu * oracle::penalty(t1.tau, d.labels)) -
          (oracle::objective(t2.tau, K, d.labels, p.beta) +
           p.mu * oracle::penalty(t2.tau, d.labels));
      REQUIRE(std::fabs(de - df) <= 1e-9 * std::max(1.0, std::fabs(df)));
      ++checked;
    }
  }
  CHECK(checked == 2000);
}

TEST_CASE("qubo is upper-triangular with no stored zeros") {
  Rng rng(15);
  const Dataset d = random_subset(4, 3, rng);
  const Matrix K = kernel_matrix(d.features, d.features, KernelParams{1.0});
  QmsvmParams p;
  const QuboProblem q = build_qubo(d, K, p);
  for (const auto& e : q.entries()) {
    CHECK(e.i <= e.j);
    CHECK(e.j < q.dim());
    CHECK(e.value != 0.0);
  }
}

TEST_CASE("pruning bounds the off-diagonal magnitude ratio") {
  Rng rng(16);
  const Dataset d = random_subset(5, 3, rng);
  const Matrix K = kernel_matrix(d.features, d.features, KernelParams{1.0});
  QmsvmParams p;
  p.max_min_ratio = 15.0;
  const QuboProblem q = build_qubo(d, K, p);
  double max_abs = 0.0;
  double min_off = 1e300;
  for (const auto& e : q.entries()) {
    max_abs = std::max(max_abs, std::fabs(e.value));
    if (e.i != e.j) min_off = std::min(min_off, std::fabs(e.value));
  }
  REQUIRE(min_off < 1e300);
  CHECK(max_abs / min_off <= 15.0 + 1e-12);
}

TEST_CASE("pruned energy differs by at most pruned-count times threshold") {
  Rng rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const Dataset d = random_subset(4, 2, rng);
    const Matrix K = kernel_matrix(d.features, d.features, KernelParams{1.0});
    QmsvmParams full;
    full.max_min_ratio.reset();
    QmsvmParams pruned;
    pruned.max_min_ratio = 8.0;
    const QuboProblem qf = build_qubo(d, K, full);
    const QuboProblem qp = build_qubo(d, K, pruned);
    REQUIRE(qp.entries().size() <= qf.entries().size());
    const std::size_t dropped = qf.entries().size() - qp.entries().size();
    double max_abs = 0.0;
    for (const auto& e : qf.entries())
      max_abs = std::max(max_abs, std::fabs(e.value));
    const double threshold = max_abs / 8.0;
    for (int s = 0; s < 50; ++s) {
      const auto bits = random_bits(qf.dim(), rng);
      const double gap = std::fabs(energy(qf, bits) - energy(qp, bits));
      CHECK(gap <= double(dropped) * threshold + 1e-12);
    }
  }
}

TEST_CASE("energy evaluation") {
  SUBCASE("single entry") {
    QuboProblem q(1, {{0, 0, -2.0}}, QuboMeta{1, 1, 1, std::nullopt});
    CHECK(energy(q, std::vector<std::uint8_t>{0}) == 0.0);
    CHECK(energy(q, std::vector<std::uint8_t>{1}) == -2.0);
    CHECK_THROWS_AS(energy(q, std::vector<std::uint8_t>{1, 0}), DataError);
  }
  SUBCASE("random instance matches the dense quadratic form") {
    Rng rng(18);
    const Dataset d = random_subset(2, 3, rng);
    const Matrix K = kernel_matrix(d.features, d.features, KernelParams{1.0});
    QmsvmParams p;
    p.max_min_ratio.reset();
    const QuboProblem q = build_qubo(d, K, p);
    REQUIRE(q.dim() == 12);
    for (int s = 0; s < 100; ++s) {
      const auto bits = random_bits(q.dim(), rng);
      CHECK(energy(q, bits) ==
            doctest::Approx(oracle::energy_dense(q, bits)).epsilon(1e-12));
    }
  }
}

TEST_CASE("qubo problem validation") {
  CHECK_THROWS_AS(QuboProblem(2, {{1, 0, 1.0}}, QuboMeta{}), DataError);
  CHECK_THROWS_AS(QuboProblem(2, {{0, 2, 1.0}}, QuboMeta{}), DataError);
  CHECK_THROWS_AS(QuboProblem(2, {{0, 1, 0.0}}, QuboMeta{}), DataError);
  CHECK_THROWS_AS(QuboProblem(2, {{0, 1, 1.0}, {0, 1, 2.0}}, QuboMeta{}),
                  DataError);
}

TEST_CASE("qubo text round-trip") {
  oracle::TempDir tmp("qmsvm-qubo");
  Rng rng(19);
  const Dataset d = random_subset(3, 2, rng);
  const Matrix K = kernel_matrix(d.features, d.features, KernelParams{1.0});
  QmsvmParams p;
  const QuboProblem q = build_qubo(d, K, p);
  const auto path = tmp.file("q.txt");
  save_qubo(q, path);
  const QuboProblem r = load_qubo(path);
  CHECK(r.dim() == q.dim());
  CHECK(r.meta().subset_size == 3);
  CHECK(r.meta().num_classes == 2);
  CHECK(r.meta().bits_per_var == p.bits_per_var);
  CHECK_FALSE(r.meta().params.has_value());
  REQUIRE(r.entries().size() == q.entries().size());
  for (std::size_t i = 0; i < q.entries().size(); ++i) {
    CHECK(r.entries()[i].i == q.entries()[i].i);
    CHECK(r.entries()[i].j == q.entries()[i].j);
    CHECK(r.entries()[i].value == q.entries()[i].value);
  }
}

TEST_CASE("qubo text errors carry line numbers") {
  oracle::TempDir tmp("qmsvm-qubo");
  SUBCASE("bad header") {
    const auto path = tmp.file("h.txt");
    oracle::spit(path, "notqubo 1 1 1 1\n");
    CHECK_THROWS_WITH_AS(load_qubo(path), doctest::Contains("line 1"),
                         DataError);
  }
  SUBCASE("bad triplet") {
    const auto path = tmp.file("t.txt");
    oracle::spit(path, "qubo 2 1 1 2\n0 0 -1.0\n0 x 2.0\n");
    CHECK_THROWS_WITH_AS(load_qubo(path), doctest::Contains("line 3"),
                         DataError);
  }
}
