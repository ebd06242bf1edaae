#include "doctest.h"

#include <random>

#include "advlab/constructions.hpp"
#include "advlab/reduction.hpp"

using advlab::Rational;

namespace {

std::vector<advlab::VectorQ> line(const std::vector<Rational>& firsts, int d = 2) {
  std::vector<advlab::VectorQ> out;
  for (const auto& x : firsts) {
    advlab::VectorQ w = advlab::VectorQ::Zero(d);
    w(0) = x;
    out.push_back(w);
  }
  return out;
}

std::vector<advlab::VectorQ> random_line(std::mt19937_64& rng, std::size_t n) {
  std::vector<Rational> xs;
  Rational x(1);
  std::uniform_int_distribution<int> step(1, 20);
  for (std::size_t i = 0; i < n; ++i) {
    x -= Rational(step(rng), 40 * static_cast<int>(n));
    xs.push_back(x);
  }
  return line(xs);
}

advlab::ReluNetwork<Rational> random_net(std::mt19937_64& rng, std::vector<int> dims) {
  std::uniform_int_distribution<int> num(-40, 40);
  std::uniform_int_distribution<int> den(1, 9);
  advlab::ReluNetwork<Rational> net;
  net.dims = dims;
  for (std::size_t l = 1; l < dims.size(); ++l) {
    advlab::MatrixQ a(dims[l], dims[l - 1]);
    advlab::VectorQ b(dims[l]);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = Rational(num(rng), den(rng));
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = Rational(num(rng), den(rng) * 10);
    net.layers.push_back({a, b});
  }
  return net;
}

}  // namespace

TEST_CASE("reduce_layer hand example") {
  advlab::MatrixQ A(1, 2), B(1, 1);
  A << 1, 0;
  B << 1;
  advlab::VectorQ z(1);
  z << Rational(-1, 2);
  auto R = line({Rational(9, 10), Rational(6, 10), Rational(3, 10)});
  auto result = advlab::reduce_layer<Rational>(B, A, z, R);
  CHECK(result.segment.start == 0);
  CHECK(result.segment.length == 2);
  CHECK(result.C(0, 0) == 1);
  CHECK(result.C(0, 1) == 0);
  CHECK(result.v(0) == Rational(-1, 2));
  CHECK(advlab::pattern_string(result.pattern) == "+");
  CHECK(result.distinct_patterns == 2);
}

TEST_CASE("reduce_layer with a zero map keeps everything") {
  advlab::MatrixQ A(3, 2), B = advlab::MatrixQ::Zero(2, 3);
  A << 1, 2, -3, 1, 2, 2;
  advlab::VectorQ z(3);
  z << Rational(-1, 2), Rational(1, 4), 0;
  auto R = line({Rational(1, 2), Rational(1, 3), Rational(1, 4), Rational(1, 5)});
  auto result = advlab::reduce_layer<Rational>(B, A, z, R);
  CHECK(result.C.isZero());
  CHECK(result.v.isZero());
  CHECK(result.segment.length >= 1);
}

TEST_CASE("reduce_layer preconditions") {
  advlab::MatrixQ A(2, 2), B(1, 2);
  A << 1, 0, -1, 0;
  B << 1, 1;
  advlab::VectorQ z = advlab::VectorQ::Zero(2);
  CHECK_THROWS_AS(advlab::reduce_layer<Rational>(B, A, z, line({Rational(1, 2), Rational(1, 3)})),
                  advlab::PreconditionError);
  CHECK_THROWS_AS(advlab::reduce_layer<Rational>(B, A, z, line({Rational(1, 3), Rational(1, 2), Rational(1, 4)})),
                  advlab::PreconditionError);
  auto off = line({Rational(1, 2), Rational(1, 3), Rational(1, 4)});
  off[1](1) = 1;
  CHECK_THROWS_AS(advlab::reduce_layer<Rational>(B, A, z, off), advlab::PreconditionError);
}

TEST_CASE("reduce_layer on random layers") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    auto net = random_net(rng, {2, 3, 2});
    auto R = random_line(rng, 12);
    const auto& A = net.layers[0].weights;
    const auto& z = net.layers[0].bias;
    const auto& B = net.layers[1].weights;
    auto result = advlab::reduce_layer<Rational>(B, A, z, R);
    CHECK(result.segment.length * 4 >= 12);
    CHECK(result.C.col(1).isZero());
    for (std::size_t i = result.segment.start; i < result.segment.start + result.segment.length; ++i) {
      advlab::VectorQ hidden = (A * R[i] + z).unaryExpr([](const Rational& v) { return advlab::relu(v); });
      CHECK((B * hidden).eval() == (result.C * R[i] + result.v).eval());
    }
  }
}

TEST_CASE("collapse_on_line") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<int> dims{2};
    const int hidden = 1 + trial % 3;
    for (int l = 0; l < hidden; ++l) dims.push_back(1 + static_cast<int>(rng() % 4));
    dims.push_back(1);
    auto net = random_net(rng, dims);
    const auto product = static_cast<std::size_t>(net.hidden_product());
    auto R = random_line(rng, product + rng() % (3 * product));
    auto result = advlab::collapse_on_line(net, R);
    CHECK(result.segment.length * product >= R.size());
    CHECK(result.trace.size() == static_cast<std::size_t>(hidden));
    for (const auto& t : result.trace) CHECK(t.distinct_patterns <= t.units + 1);
    for (std::size_t i = result.segment.start; i < result.segment.start + result.segment.length; ++i) {
      CHECK(advlab::eval_network(net, R[i]) == (result.segment.M * R[i])(0) + result.segment.z(0));
    }
    auto doc = advlab::collapse_trace_to_json(result);
    CHECK(doc["layers"].size() == static_cast<std::size_t>(hidden));
  }
}

TEST_CASE("collapse of the matcher on the line is the zero map") {
  advlab::ProblemInstance inst;
  auto net = advlab::build_unstable_matcher({2, 3, 1}, inst.delta);
  std::vector<advlab::VectorQ> R;
  for (int k = 1; k <= 12; ++k) R.push_back(advlab::grid_point_at(inst, k, 0));
  auto result = advlab::collapse_on_line(net, R);
  CHECK(result.segment.M.isZero());
  CHECK(result.segment.z(0) == 0);
}

TEST_CASE("collapse of a single affine layer keeps everything") {
  advlab::ReluNetwork<Rational> net;
  net.dims = {2, 1};
  advlab::MatrixQ a(1, 2);
  a << 3, 5;
  net.layers.push_back({a, advlab::VectorQ::Constant(1, Rational(1))});
  auto R = line({Rational(1, 2), Rational(1, 3)});
  auto result = advlab::collapse_on_line(net, R);
  CHECK(result.segment.length == 2);
}

TEST_CASE("extract_misclassified on a depth-two net") {
  advlab::ReluNetwork<Rational> net;
  net.dims = {2, 1, 1};
  advlab::MatrixQ a1(1, 2), a2(1, 1);
  a1 << 1, 0;
  a2 << 1;
  net.layers.push_back({a1, advlab::VectorQ::Zero(1)});
  net.layers.push_back({a2, advlab::VectorQ::Zero(1)});
  auto W = line({Rational(6, 7), Rational(5, 7), Rational(4, 7), Rational(3, 7), Rational(2, 7), Rational(1, 7)});
  std::vector<int> labels{0, 1, 0, 1, 0, 1};
  auto g = advlab::MonotoneMap::identity();
  auto result = advlab::extract_misclassified(net, g, W, labels);
  CHECK(result.guarantee == 1);
  REQUIRE(!result.indices.empty());
  for (auto i : result.indices) CHECK(g.errs(advlab::eval_network(net, W[i]), labels[i]));

  std::vector<int> same{0, 0, 1, 0, 1, 0};
  CHECK_THROWS_AS(advlab::extract_misclassified(net, g, W, same), advlab::PreconditionError);
  auto short_w = std::vector<advlab::VectorQ>(W.begin(), W.begin() + 5);
  CHECK_THROWS_AS(advlab::extract_misclassified(net, g, short_w, {0, 1, 0, 1, 0}), advlab::PreconditionError);
}

TEST_CASE("extract_misclassified on the matcher finds the even points") {
  advlab::ProblemInstance inst;
  auto net = advlab::build_unstable_matcher({2, 1, 1}, inst.delta);
  std::vector<advlab::VectorQ> W;
  std::vector<int> labels;
  for (int k = 1; k <= 12; ++k) {
    W.push_back(advlab::grid_point_at(inst, k, 0));
    labels.push_back(advlab::classify(inst, W.back()));
  }
  auto result = advlab::extract_misclassified(net, advlab::MonotoneMap::identity(), W, labels, 2);
  CHECK(result.indices.size() >= 2);
  for (auto i : result.indices) CHECK(labels[i] == 1);
}

TEST_CASE("extract_misclassified under many monotone maps") {
  std::mt19937_64 rng(23);
  const advlab::MonotoneMap maps[] = {
      advlab::MonotoneMap::identity(), advlab::MonotoneMap::threshold(), advlab::MonotoneMap::sigmoid(),
      advlab::MonotoneMap::parse("affine:-3,1"), advlab::MonotoneMap::parse("step:0,-1,1/4,0,3/4,1/2,1")};
  for (int trial = 0; trial < 40; ++trial) {
    auto net = random_net(rng, {2, 2, 2, 1});
    const std::int64_t m = 1 + trial % 3;
    const auto t = static_cast<std::size_t>(3 * m * net.hidden_product());
    auto W = random_line(rng, t);
    std::vector<int> labels;
    const int first = static_cast<int>(rng() % 2);
    for (std::size_t i = 0; i < t; ++i) labels.push_back((first + static_cast<int>(i)) % 2);
    for (const auto& g : maps) {
      auto result = advlab::extract_misclassified(net, g, W, labels, m);
      CHECK(static_cast<std::int64_t>(result.indices.size()) >= m);
    }
  }
}
