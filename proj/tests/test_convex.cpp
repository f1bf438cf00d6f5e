#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <vector>

#include "ddd/convex.hpp"
#include "ddd/datafit.hpp"
#include "ddd/rng.hpp"
#include "ddd/tensor.hpp"
#include "oracles.hpp"

using ddd::ConditioningModulus;
using ddd::Rng;
using ddd::Tensor;
using ddd::xreal;

namespace {

constexpr double kBruteTol = 1e-7;   // golden-section search resolves to 1e-8
constexpr double kMoreauTol = 1e-10;
constexpr double kGridTol = 1e-4;    // grid-sup conjugation resolution

xreal abs_fn(double t) { return xreal(std::fabs(t)); }
xreal half_square_fn(double t) { return xreal(0.5 * t * t); }

}  // namespace

TEST_CASE("scalar brute-force prox on canonical functions") {
  CHECK(std::fabs(ddd::prox_scalar_bruteforce(abs_fn, 1.0, 0.0)) <= kBruteTol);
  CHECK(ddd::prox_scalar_bruteforce(abs_fn, 1.0, 2.0) ==
        Catch::Approx(1.0).margin(kBruteTol).epsilon(0.0));
  CHECK(ddd::prox_scalar_bruteforce(half_square_fn, 1.0, 3.0) ==
        Catch::Approx(1.5).margin(kBruteTol).epsilon(0.0));
}

TEST_CASE("conjugate values via gradient map") {
  SECTION("half squared norm is self-conjugate") {
    auto value = [](const Tensor& x) { return xreal(0.5 * x.dot(x)); };
    auto grad_conj = [](const Tensor& v) { return v; };
    Tensor v{3.0, 4.0};
    xreal c = ddd::conj_value_via_grad(value, grad_conj, v);
    CHECK(c.value() == Catch::Approx(12.5).margin(1e-12).epsilon(0.0));
  }

  SECTION("shifted quadratic, cross-checked against grid supremum") {
    Tensor shift{1.0, 0.0};
    auto value = [&](const Tensor& x) {
      return xreal(0.5 * x.dot(x) + x.dot(shift));
    };
    auto grad_conj = [&](const Tensor& v) { return v - shift; };
    Tensor v{1.0, 0.0};
    xreal exact = ddd::conj_value_via_grad(value, grad_conj, v);
    CHECK(std::fabs(exact.value()) <= 1e-12);
    double sup = oracle::grid_sup_conj_2d(
        [&](const Tensor& x) { return value(x); }, v, -3.0, 3.0, 601);
    CHECK(std::fabs(exact.value() - sup) <= kGridTol);
  }

  SECTION("l1 plus quadratic in one dimension") {
    auto value = [](const Tensor& x) {
      return xreal(std::fabs(x[0]) + 0.5 * x[0] * x[0]);
    };
    auto grad_conj = [](const Tensor& v) {
      Tensor g(1);
      g[0] = ddd::soft_threshold(v[0], 1.0);
      return g;
    };
    Tensor v{0.5};
    xreal exact = ddd::conj_value_via_grad(value, grad_conj, v);
    CHECK(std::fabs(exact.value()) <= 1e-12);
    double sup = oracle::grid_sup_conj_1d(
        [](double t) { return xreal(std::fabs(t) + 0.5 * t * t); }, 0.5, -5.0,
        5.0, 100001);
    CHECK(std::fabs(sup) <= 1e-9);
  }
}

namespace {

// Prox pairs with independently known conjugate proxes, used for the Moreau
// identity battery.
struct ProxPair {
  const char* name;
  std::function<Tensor(const Tensor&)> prox_f;
  std::function<Tensor(const Tensor&)> prox_f_conj;
};

Tensor clamp_box(const Tensor& x, double r) {
  Tensor out = x;
  for (long i = 0; i < out.size(); ++i) {
    if (out[i] > r) out[i] = r;
    if (out[i] < -r) out[i] = -r;
  }
  return out;
}

std::vector<ProxPair> registered_pairs() {
  std::vector<ProxPair> pairs;
  pairs.push_back({"l1",
                   [](const Tensor& x) { return ddd::soft_threshold(x, 1.0); },
                   [](const Tensor& x) { return clamp_box(x, 1.0); }});
  pairs.push_back({"scaled l1",
                   [](const Tensor& x) { return ddd::soft_threshold(x, 0.7); },
                   [](const Tensor& x) { return clamp_box(x, 0.7); }});
  pairs.push_back({"half squared norm",
                   [](const Tensor& x) { return 0.5 * x; },
                   [](const Tensor& x) { return 0.5 * x; }});
  return pairs;
}

}  // namespace

TEST_CASE("Moreau identity") {
  auto pairs = registered_pairs();

  SECTION("worked examples") {
    Tensor zero(2);
    CHECK(ddd::moreau_check(pairs[0].prox_f, pairs[0].prox_f_conj, zero) <= 1e-15);
    Tensor x{5.0, -0.3};
    CHECK(ddd::moreau_check(pairs[0].prox_f, pairs[0].prox_f_conj, x) <= kMoreauTol);
    Tensor q{2.0, 2.0};
    CHECK(ddd::moreau_check(pairs[2].prox_f, pairs[2].prox_f_conj, q) <= kMoreauTol);
  }

  SECTION("holds at 100 seeded points for every registered pair") {
    Rng rng(0xC0DEC0DE);
    for (const auto& pair : pairs) {
      INFO(pair.name);
      double worst = 0.0;
      for (int k = 0; k < 100; ++k) {
        Tensor x(3);
        for (long i = 0; i < x.size(); ++i) x[i] = rng.uniform(-8.0, 8.0);
        worst = std::max(worst, ddd::moreau_check(pair.prox_f, pair.prox_f_conj, x));
      }
      CHECK(worst <= kMoreauTol);
    }
  }
}

TEST_CASE("brute-force prox is nonexpansive on sampled pairs") {
  auto huber_fn = [](double t) { return xreal(ddd::huber_scalar(t, 1.0)); };
  std::vector<std::pair<const char*, std::function<xreal(double)>>> fns = {
      {"abs", abs_fn}, {"half square", half_square_fn}, {"huber", huber_fn}};
  Rng rng(0x5EED);
  for (const auto& [name, fn] : fns) {
    INFO(name);
    for (int k = 0; k < 50; ++k) {
      double alpha = rng.uniform(0.1, 3.0);
      double u = rng.uniform(-5.0, 5.0);
      double v = rng.uniform(-5.0, 5.0);
      double pu = ddd::prox_scalar_bruteforce(fn, alpha, u);
      double pv = ddd::prox_scalar_bruteforce(fn, alpha, v);
      CHECK(std::fabs(pu - pv) <= std::fabs(u - v) + 1e-6);
    }
  }
}

namespace {

struct ModulusCase {
  const char* name;
  ConditioningModulus m;
};

std::vector<ModulusCase> shipped_moduli() {
  std::vector<ModulusCase> cases;
  Tensor y2{1.0, 2.0};
  cases.push_back({"square", ddd::square_loss(y2).modulus});
  cases.push_back({"l1", ddd::l1_loss(y2).modulus});
  cases.push_back({"kl", ddd::kl_loss(Tensor{4.0, 0.5}).modulus});
  cases.push_back({"huber", ddd::huber_loss(y2, 0.3).modulus});
  cases.push_back({"l1l2", ddd::l1l2_loss(y2, 1.5, 0.5).modulus});
  return cases;
}

}  // namespace

TEST_CASE("conditioning modulus type invariants on 1000-point samples") {
  for (const auto& c : shipped_moduli()) {
    INFO(c.name);
    const ConditioningModulus& m = c.m;
    CHECK(m.eval(0.0) == 0.0);
    CHECK(m.gamma > 0.0);
    CHECK(m.eps > 0.0);

    Rng rng(0xABCD);
    double sample_cap = std::isinf(m.eps) ? 10.0 : 2.0 * m.eps;
    for (int k = 0; k < 1000; ++k) {
      double t = rng.uniform(-sample_cap, sample_cap);
      if (t == 0.0) continue;
      double mt = m.eval(t);
      CHECK(mt > 0.0);
      CHECK(std::fabs(mt - m.eval(-t)) <= 1e-12 * (1.0 + mt));
      if (std::fabs(t) < m.eps) {
        double lower = (m.gamma / m.p) * std::pow(std::fabs(t), m.p);
        CHECK(mt >= lower - 1e-12);
      }
    }
  }
}

TEST_CASE("modulus conjugates satisfy the Fenchel-Young inequality") {
  for (const auto& c : shipped_moduli()) {
    INFO(c.name);
    Rng rng(0xFE6C);
    for (int k = 0; k < 200; ++k) {
      double s = rng.uniform(-4.0, 4.0);
      double t = rng.uniform(-4.0, 4.0);
      xreal conj = c.m.eval_conj(t);
      if (conj.is_inf()) continue;
      CHECK(conj.value() >= s * t - c.m.eval(s) - 1e-10);
    }
  }
}

TEST_CASE("modulus conjugates match grid-sup conjugation in 1-D") {
  for (const auto& c : shipped_moduli()) {
    INFO(c.name);
    // Probe points chosen inside each conjugate's effective domain.
    std::vector<double> probes = {0.0, 0.1, 0.35, -0.6, 0.9};
    for (double t : probes) {
      xreal conj = c.m.eval_conj(t);
      if (conj.is_inf()) continue;
      double sup = oracle::grid_sup_conj_1d(
          [&](double s) { return xreal(c.m.eval(s)); }, t, -400.0, 400.0,
          400001);
      CHECK(std::fabs(conj.value() - sup) <= kGridTol * (1.0 + std::fabs(sup)));
    }
  }
}

TEST_CASE("soft threshold scalar and tensor forms agree") {
  CHECK(ddd::soft_threshold(2.0, 1.0) == 1.0);
  CHECK(ddd::soft_threshold(-2.0, 1.0) == -1.0);
  CHECK(ddd::soft_threshold(0.4, 1.0) == 0.0);
  Tensor x{2.0, -2.0, 0.4};
  Tensor s = ddd::soft_threshold(x, 1.0);
  CHECK(s[0] == 1.0);
  CHECK(s[1] == -1.0);
  CHECK(s[2] == 0.0);
}
