// Copyright 2026 The thzsense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "thz/autodiff/adam.hpp"
#include "thz/autodiff/grad_check.hpp"
#include "thz/autodiff/layers.hpp"
#include "thz/autodiff/ops.hpp"
#include "thz/common/errors.hpp"

using namespace thz;
using namespace thz::ad;
using Catch::Approx;

namespace {

template <typename T>
Tensor<T> random_tensor(Shape s, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor<T> t(s);
  for (auto& v : t.values()) v = static_cast<T>(u(rng));
  return t;
}

// Plain cross-correlation with zero padding, written out loop by loop.
std::vector<double> direct_conv(const Tensor<double>& x, const Tensor<double>& w, std::size_t stride,
                                std::size_t pad) {
  const auto [B, C, L] = std::tuple{x.shape().batch, x.shape().channels, x.shape().length};
  const std::size_t O = w.shape().batch, K = w.shape().length;
  const std::size_t Lout = (L + 2 * pad - K) / stride + 1;
  std::vector<double> y(B * O * Lout, 0.0);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t o = 0; o < O; ++o)
      for (std::size_t t = 0; t < Lout; ++t) {
        double acc = 0.0;
        for (std::size_t c = 0; c < C; ++c)
          for (std::size_t k = 0; k < K; ++k) {
            const long pos = static_cast<long>(t * stride + k) - static_cast<long>(pad);
            if (pos < 0 || pos >= static_cast<long>(L)) continue;
            acc += w.at(o, c, k) * x.at(b, c, static_cast<std::size_t>(pos));
          }
        y[(b * O + o) * Lout + t] = acc;
      }
  return y;
}

}  // namespace

TEST_CASE("conv1d with a unit 1-tap filter is the identity") {
  Tape<double> tape;
  auto xt = random_tensor<double>({3, 1, 7}, 1);
  auto x = tape.constant(xt);
  auto w = tape.constant(Tensor<double>({1, 1, 1}, 1.0));
  auto y = conv1d(tape, x, w, std::nullopt, {});
  REQUIRE(tape.value(y).shape() == xt.shape());
  for (std::size_t i = 0; i < xt.size(); ++i) CHECK(tape.value(y)[i] == xt[i]);
}

TEST_CASE("full-width one-hot filter selects a bin") {
  Tape<double> tape;
  auto xt = random_tensor<double>({2, 1, 9}, 2);
  Tensor<double> wt({1, 1, 9});
  wt.at(0, 0, 4) = 1.0;
  auto y = conv1d(tape, tape.constant(xt), tape.constant(wt), std::nullopt, {});
  REQUIRE(tape.value(y).shape() == Shape{2, 1, 1});
  CHECK(tape.value(y).at(0, 0, 0) == xt.at(0, 0, 4));
  CHECK(tape.value(y).at(1, 0, 0) == xt.at(1, 0, 4));
}

TEST_CASE("conv1d matches a direct nested-loop convolution") {
  for (auto [stride, pad] : {std::pair<std::size_t, std::size_t>{1, 0}, {1, 1}, {2, 1}, {3, 2}}) {
    auto xt = random_tensor<double>({2, 3, 5}, 3);
    auto wt = random_tensor<double>({4, 3, 3}, 4);
    Tape<double> tape;
    auto y = conv1d(tape, tape.constant(xt), tape.constant(wt), std::nullopt, {stride, pad});
    const auto ref = direct_conv(xt, wt, stride, pad);
    REQUIRE(tape.value(y).size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(tape.value(y)[i] - ref[i]) < 1e-6);
  }
}

TEST_CASE("conv1d in 32-bit agrees with the 64-bit oracle") {
  auto xd = random_tensor<double>({4, 2, 33}, 5);
  auto wd = random_tensor<double>({8, 2, 3}, 6);
  Tensor<float> xf(xd.shape()), wf(wd.shape());
  for (std::size_t i = 0; i < xd.size(); ++i) xf[i] = static_cast<float>(xd[i]);
  for (std::size_t i = 0; i < wd.size(); ++i) wf[i] = static_cast<float>(wd[i]);
  Tensor<double> xr(xd.shape()), wr(wd.shape());
  for (std::size_t i = 0; i < xd.size(); ++i) xr[i] = xf[i];
  for (std::size_t i = 0; i < wd.size(); ++i) wr[i] = wf[i];
  Tape<float> tape;
  auto y = conv1d(tape, tape.constant(xf), tape.constant(wf), std::nullopt, {1, 1});
  const auto ref = direct_conv(xr, wr, 1, 1);
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(tape.value(y)[i] - ref[i]) < 1e-5);
}

TEST_CASE("conv1d is linear in its input") {
  auto a = random_tensor<double>({2, 2, 11}, 7);
  auto b = random_tensor<double>({2, 2, 11}, 8);
  auto w = random_tensor<double>({3, 2, 3}, 9);
  Tensor<double> mix(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) mix[i] = 1.5 * a[i] - 0.25 * b[i];
  Tape<double> t;
  auto ya = conv1d(t, t.constant(a), t.constant(w), std::nullopt, {1, 1});
  auto yb = conv1d(t, t.constant(b), t.constant(w), std::nullopt, {1, 1});
  auto ym = conv1d(t, t.constant(mix), t.constant(w), std::nullopt, {1, 1});
  for (std::size_t i = 0; i < t.value(ym).size(); ++i) {
    CHECK(std::abs(t.value(ym)[i] - (1.5 * t.value(ya)[i] - 0.25 * t.value(yb)[i])) < 1e-5);
  }
}

TEST_CASE("conv1d shape mismatch names both shapes") {
  Tape<double> t;
  auto x = t.constant(Tensor<double>({1, 2, 8}));
  auto w = t.constant(Tensor<double>({4, 3, 3}));
  try {
    conv1d(t, x, w, std::nullopt, {});
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("(1, 2, 8)") != std::string::npos);
    CHECK(msg.find("(4, 3, 3)") != std::string::npos);
  }
}

TEST_CASE("batch norm training statistics") {
  BatchNorm1dLayer<double> bn("bn", 3);
  auto xt = random_tensor<double>({8, 3, 16}, 10, -3.0, 5.0);
  Tape<double> tape;
  auto y = bn.forward(tape, tape.constant(xt));
  const auto& yv = tape.value(y);
  for (std::size_t c = 0; c < 3; ++c) {
    double m = 0, v = 0;
    const double n = 8 * 16;
    for (std::size_t b = 0; b < 8; ++b)
      for (std::size_t l = 0; l < 16; ++l) m += yv.at(b, c, l);
    m /= n;
    for (std::size_t b = 0; b < 8; ++b)
      for (std::size_t l = 0; l < 16; ++l) v += (yv.at(b, c, l) - m) * (yv.at(b, c, l) - m);
    v /= n;
    CHECK(std::abs(m) < 1e-6);
    CHECK(std::abs(v - 1.0) < 1e-4);
  }
  CHECK(bn.stats().initialized);
  for (double rv : bn.stats().running_var) CHECK(rv >= 0.0);
}

TEST_CASE("batch norm affine law and constant input") {
  SECTION("gamma 2, beta 1") {
    BatchNorm1dLayer<double> bn("bn", 2);
    bn.gamma().value.fill(2.0);
    bn.beta().value.fill(1.0);
    auto xt = random_tensor<double>({6, 2, 10}, 11);
    Tape<double> tape;
    const auto& yv = tape.value(bn.forward(tape, tape.constant(xt)));
    for (std::size_t c = 0; c < 2; ++c) {
      double m = 0, v = 0;
      for (std::size_t b = 0; b < 6; ++b)
        for (std::size_t l = 0; l < 10; ++l) m += yv.at(b, c, l);
      m /= 60;
      for (std::size_t b = 0; b < 6; ++b)
        for (std::size_t l = 0; l < 10; ++l) v += (yv.at(b, c, l) - m) * (yv.at(b, c, l) - m);
      CHECK(m == Approx(1.0).margin(1e-9));
      CHECK(std::sqrt(v / 60) == Approx(2.0).epsilon(1e-4));
    }
  }
  SECTION("constant channel gives zeros") {
    BatchNorm1dLayer<double> bn("bn", 1);
    Tape<double> tape;
    const auto& yv = tape.value(bn.forward(tape, tape.constant(Tensor<double>({4, 1, 5}, 3.5))));
    for (double v : yv.values()) CHECK(v == 0.0);
  }
}

TEST_CASE("batch norm running statistics and eval mode") {
  BatchNorm1dLayer<double> bn("bn", 1, 0.9, 1e-5);
  Tape<double> t0;
  bn.set_training(false);
  CHECK_THROWS_AS(bn.forward(t0, t0.constant(Tensor<double>({2, 1, 3}, 1.0))), ConfigError);

  bn.set_training(true);
  Tensor<double> x({2, 1, 2}, std::vector<double>{1, 2, 3, 4});
  Tape<double> t1;
  bn.forward(t1, t1.constant(x));
  // running stats start at (0, 1); unbiased batch variance of {1,2,3,4} is 5/3
  CHECK(bn.stats().running_mean[0] == Approx(0.1 * 2.5));
  CHECK(bn.stats().running_var[0] == Approx(0.9 + 0.1 * 5.0 / 3.0));
  Tensor<double> x2({2, 1, 2}, std::vector<double>{0, 0, 2, 2});
  Tape<double> t2;
  bn.forward(t2, t2.constant(x2));
  CHECK(bn.stats().running_mean[0] == Approx(0.9 * 0.25 + 0.1 * 1.0));
  CHECK(bn.stats().running_var[0] == Approx(0.9 * (0.9 + 0.1 * 5.0 / 3.0) + 0.1 * 4.0 / 3.0));

  bn.set_training(false);
  Tape<double> t3;
  const double rm = bn.stats().running_mean[0], rv = bn.stats().running_var[0];
  const auto& y = t3.value(bn.forward(t3, t3.constant(Tensor<double>({1, 1, 1}, 7.0))));
  CHECK(y[0] == Approx((7.0 - rm) / std::sqrt(rv + 1e-5)));

  BatchNorm1dLayer<double> single("s", 1);
  Tape<double> t4;
  CHECK_THROWS_AS(single.forward(t4, t4.constant(Tensor<double>({1, 1, 1}, 1.0))), ConfigError);
}

TEST_CASE("prelu definition") {
  PReluLayer<double> act("a", 1);
  Tape<double> t;
  Tensor<double> x({1, 1, 4}, std::vector<double>{-4, 0, 2, -1});
  const auto& y = t.value(act.forward(t, t.constant(x)));
  CHECK(y[0] == -1.0);
  CHECK(y[1] == 0.0);
  CHECK(y[2] == 2.0);
  CHECK(y[3] == -0.25);

  act.slope().value.fill(1.0);
  auto xr = random_tensor<double>({2, 1, 6}, 12);
  Tape<double> t2;
  const auto& y2 = t2.value(act.forward(t2, t2.constant(xr)));
  for (std::size_t i = 0; i < xr.size(); ++i) CHECK(y2[i] == xr[i]);
}

TEST_CASE("mse loss") {
  auto a = random_tensor<double>({3, 2, 7}, 13);
  auto b = random_tensor<double>({3, 2, 7}, 14);
  Tape<double> t;
  CHECK(t.value(mse_loss(t, t.constant(a), t.constant(a)))[0] == 0.0);
  Tensor<double> shifted(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) shifted[i] = a[i] + 2.0;
  CHECK(t.value(mse_loss(t, t.constant(shifted), t.constant(a)))[0] == Approx(4.0).epsilon(1e-12));
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  CHECK(std::abs(t.value(mse_loss(t, t.constant(a), t.constant(b)))[0] - acc / a.size()) < 1e-7);
  CHECK_THROWS_AS(mse_loss(t, t.constant(a), t.constant(Tensor<double>({3, 2, 6}))), ShapeError);
}

TEST_CASE("backward basics") {
  SECTION("single weight") {
    Parameter<double> w("w", Tensor<double>({1, 1, 1}, 1.5));
    Tape<double> t;
    auto x = t.constant(Tensor<double>({1, 1, 1}, 1.0));
    auto y = conv1d(t, x, t.parameter(w), std::nullopt, {});
    t.backward(mse_loss(t, y, t.constant(Tensor<double>({1, 1, 1}, 0.0))));
    CHECK(w.grad[0] == Approx(3.0));
  }
  SECTION("gradient is zero at the minimum") {
    auto xt = random_tensor<double>({2, 1, 5}, 15);
    Tape<double> t;
    auto x = t.leaf(xt);
    t.backward(mse_loss(t, x, t.constant(xt)));
    for (double g : t.grad(x).values()) CHECK(g == 0.0);
  }
  SECTION("non-scalar loss rejected") {
    Tape<double> t;
    auto x = t.leaf(Tensor<double>({1, 1, 3}, 1.0));
    CHECK_THROWS_AS(t.backward(x), ShapeError);
  }
  SECTION("parameters off the path get zero gradient") {
    Parameter<double> used("u", Tensor<double>({1, 1, 1}, 2.0));
    Parameter<double> unused("n", Tensor<double>({1, 1, 1}, 5.0));
    Tape<double> t;
    t.parameter(unused);
    auto y = conv1d(t, t.constant(Tensor<double>({1, 1, 1}, 1.0)), t.parameter(used), std::nullopt, {});
    t.backward(mse_loss(t, y, t.constant(Tensor<double>({1, 1, 1}))));
    CHECK(unused.grad[0] == 0.0);
    CHECK(used.grad[0] == Approx(4.0));
  }
}

// ---- finite-difference checks --------------------------------------------

namespace {

GradCheckOptions fd_options(std::uint64_t seed) {
  GradCheckOptions o;
  o.eps = 1e-5;
  o.samples = 100;
  o.seed = seed;
  return o;
}

}  // namespace

TEST_CASE("grad check: affine model is exact") {
  Conv1dLayer<double> conv("c", Conv1dConfig{2, 3, 3, 1, 1, true});
  Rng rng(16);
  conv.init_uniform(rng);
  for (auto& v : conv.bias().value.values()) v = 0.1;
  std::vector<Parameter<double>*> params;
  conv.collect(params);
  auto xt = random_tensor<double>({2, 2, 9}, 17);
  auto target = random_tensor<double>({2, 3, 9}, 18);
  // quadratic in the parameters, so central differences are exact up to rounding
  auto loss_fn = [&](Tape<double>& t) {
    auto y = conv.forward(t, t.constant(xt));
    return mse_loss(t, y, t.constant(target));
  };
  auto r = grad_check<double>(loss_fn, params, fd_options(1));
  CHECK(r.checked == params[0]->value.size() + params[1]->value.size());
  CHECK(r.max_rel_error < 1e-9);
}

TEST_CASE("grad check: conv with stride and padding") {
  Conv1dLayer<double> conv("c", Conv1dConfig{3, 4, 3, 2, 1, true});
  Rng rng(19);
  conv.init_uniform(rng);
  std::vector<Parameter<double>*> params;
  conv.collect(params);
  auto xt = random_tensor<double>({2, 3, 10}, 20);
  auto target = random_tensor<double>({2, 4, 5}, 21);
  auto r = grad_check<double>(
      [&](Tape<double>& t) { return mse_loss(t, conv.forward(t, t.constant(xt)), t.constant(target)); },
      params, fd_options(2));
  CHECK(r.max_rel_error < 1e-6);
}

TEST_CASE("grad check: batch norm in training mode") {
  BatchNorm1dLayer<double> bn("bn", 3);
  bn.gamma().value = random_tensor<double>({1, 3, 1}, 22, 0.5, 1.5);
  bn.beta().value = random_tensor<double>({1, 3, 1}, 23);
  Parameter<double> xin("x", random_tensor<double>({4, 3, 6}, 24));
  auto target = random_tensor<double>({4, 3, 6}, 25);
  std::vector<Parameter<double>*> params{&xin};
  bn.collect(params);
  auto r = grad_check<double>(
      [&](Tape<double>& t) { return mse_loss(t, bn.forward(t, t.parameter(xin)), t.constant(target)); },
      params, fd_options(3));
  CHECK(r.max_rel_error < 1e-6);
}

TEST_CASE("grad check: prelu") {
  PReluLayer<double> act("a", 2);
  // keep inputs away from the kink so central differences stay one-sided
  auto xt = random_tensor<double>({3, 2, 8}, 26, 0.1, 1.0);
  for (std::size_t i = 0; i < xt.size(); i += 2) xt[i] = -xt[i];
  Parameter<double> xin("x", xt);
  auto target = random_tensor<double>({3, 2, 8}, 27);
  std::vector<Parameter<double>*> params{&xin};
  act.collect(params);
  auto r = grad_check<double>(
      [&](Tape<double>& t) { return mse_loss(t, act.forward(t, t.parameter(xin)), t.constant(target)); },
      params, fd_options(4));
  CHECK(r.max_rel_error < 1e-6);
}

TEST_CASE("grad check: add and reshape") {
  Parameter<double> a("a", random_tensor<double>({2, 2, 4}, 28));
  Parameter<double> b("b", random_tensor<double>({4, 1, 4}, 29));
  auto target = random_tensor<double>({2, 2, 4}, 30);
  std::vector<Parameter<double>*> params{&a, &b};
  auto r = grad_check<double>(
      [&](Tape<double>& t) {
        auto rb = reshape(t, t.parameter(b), Shape{2, 2, 4});
        auto s = add(t, t.parameter(a), rb);
        return mse_loss(t, add(t, s, s), t.constant(target));
      },
      params, fd_options(5));
  CHECK(r.max_rel_error < 1e-6);
}

TEST_CASE("grad check detects a doubled gradient") {
  Conv1dLayer<double> conv("c", Conv1dConfig::same(2, 2, 3));
  Rng rng(31);
  conv.init_uniform(rng);
  std::vector<Parameter<double>*> params;
  conv.collect(params);
  auto xt = random_tensor<double>({2, 2, 8}, 32);
  auto target = random_tensor<double>({2, 2, 8}, 33);
  auto opts = fd_options(6);
  opts.corrupt = [](double g) { return 2.0 * g; };
  auto r = grad_check<double>(
      [&](Tape<double>& t) { return mse_loss(t, conv.forward(t, t.constant(xt)), t.constant(target)); },
      params, opts);
  CHECK(r.max_rel_error == Approx(0.5).margin(1e-6));
}

TEST_CASE("grad check validates its inputs") {
  Parameter<double> w("w", Tensor<double>({1, 1, 1}, 1.0));
  std::vector<Parameter<double>*> params{&w};
  auto fn = [&](Tape<double>& t) {
    return mse_loss(t, t.parameter(w), t.constant(Tensor<double>({1, 1, 1})));
  };
  GradCheckOptions o;
  o.eps = 1e-1;
  CHECK_THROWS_AS(grad_check<double>(fn, params, o), ConfigError);
  Parameter<double> bad("bad", Tensor<double>({1, 1, 1}, std::numeric_limits<double>::infinity()));
  std::vector<Parameter<double>*> bp{&bad};
  CHECK_THROWS_AS(grad_check<double>(
                      [&](Tape<double>& t) {
                        return mse_loss(t, t.parameter(bad), t.constant(Tensor<double>({1, 1, 1})));
                      },
                      bp),
                  NumericalError);
}

// ---- Adam ----------------------------------------------------------------

TEST_CASE("adam with zero gradient leaves parameters unchanged") {
  Parameter<float> p("p", random_tensor<float>({1, 2, 3}, 34));
  const auto before = p.value.storage();
  Adam<float> opt;
  std::vector<Parameter<float>*> ps{&p};
  for (int i = 0; i < 5; ++i) opt.step(ps);
  CHECK(p.value.storage() == before);
  CHECK(opt.step_count() == 5);
}

TEST_CASE("adam first step moves by lr times the gradient sign") {
  Parameter<double> p("p", Tensor<double>({1, 1, 3}, std::vector<double>{0.0, 1.0, -2.0}));
  p.grad = Tensor<double>({1, 1, 3}, std::vector<double>{0.3, -7.0, 1e-3});
  Adam<double> opt(AdamConfig{0.01});
  std::vector<Parameter<double>*> ps{&p};
  opt.step(ps);
  CHECK(p.value[0] == Approx(-0.01).epsilon(1e-6));
  CHECK(p.value[1] == Approx(1.01).epsilon(1e-6));
  CHECK(p.value[2] == Approx(-2.01).epsilon(1e-4));
  for (const auto& v : opt.second_moments()[0]) CHECK(v >= 0.0);
}

TEST_CASE("adam on (w-3)^2 follows the scalar recurrence") {
  Parameter<double> p("w", Tensor<double>({1, 1, 1}, 0.0));
  Adam<double> opt(AdamConfig{0.05});
  std::vector<Parameter<double>*> ps{&p};
  double w = 0.0, m = 0.0, v = 0.0;
  std::vector<double> dist;
  for (int k = 1; k <= 100; ++k) {
    const double g = 2.0 * (w - 3.0);
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    const double mh = m / (1 - std::pow(0.9, k));
    const double vh = v / (1 - std::pow(0.999, k));
    w -= 0.05 * mh / (std::sqrt(vh) + 1e-8);

    p.grad[0] = 2.0 * (p.value[0] - 3.0);
    opt.step(ps);
    CHECK(p.value[0] == Approx(w).epsilon(1e-12));
    dist.push_back(std::abs(p.value[0] - 3.0));
  }
  // burn-in: Adam's momentum carries w toward 3 steadily for the first steps
  for (std::size_t k = 1; k < 40; ++k) CHECK(dist[k] < dist[k - 1]);
  CHECK(dist.back() < 0.5);
}

TEST_CASE("adam restore continues identically") {
  auto run = [](int split) {
    Parameter<double> p("w", Tensor<double>({1, 1, 2}, std::vector<double>{1.0, -1.0}));
    std::vector<Parameter<double>*> ps{&p};
    Adam<double> opt(AdamConfig{0.1});
    for (int k = 0; k < split; ++k) {
      p.grad[0] = p.value[0] * 3;
      p.grad[1] = std::sin(p.value[1]);
      opt.step(ps);
    }
    Adam<double> resumed(AdamConfig{0.1});
    resumed.restore(opt.step_count(), opt.first_moments(), opt.second_moments());
    for (int k = split; k < 20; ++k) {
      p.grad[0] = p.value[0] * 3;
      p.grad[1] = std::sin(p.value[1]);
      resumed.step(ps);
    }
    return p.value.storage();
  };
  CHECK(run(7) == run(20));
}

TEST_CASE("same seed gives identical parameter trajectories") {
  auto run = [] {
    Conv1dLayer<float> conv("c", Conv1dConfig::same(2, 4, 3));
    Rng rng(35);
    conv.init_uniform(rng);
    std::vector<Parameter<float>*> ps;
    conv.collect(ps);
    Adam<float> opt;
    auto xt = random_tensor<float>({4, 2, 12}, 36);
    auto target = random_tensor<float>({4, 4, 12}, 37);
    for (int k = 0; k < 10; ++k) {
      for (auto* p : ps) p->zero_grad();
      Tape<float> t;
      t.backward(mse_loss(t, conv.forward(t, t.constant(xt)), t.constant(target)));
      opt.step(ps);
    }
    return ps[0]->value.storage();
  };
  CHECK(run() == run());
}
