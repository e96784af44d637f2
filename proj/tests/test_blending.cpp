#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rtw/blending.hpp"
#include "rtw/error.hpp"
#include "rtw/rng.hpp"
#include "oracles.hpp"

using namespace rtw;
using namespace rtw::blend;

namespace {

Raster random_image(std::uint32_t w, std::uint32_t h, Rng& rng, std::uint32_t ch = 3) {
  Raster r(w, h, ch);
  for (auto& v : r.data()) v = float(rng.uniform());
  return r;
}

std::vector<std::uint8_t> random_mask(std::uint32_t w, std::uint32_t h, Rng& rng, double p) {
  std::vector<std::uint8_t> m(std::size_t{w} * h);
  for (auto& v : m) v = rng.bernoulli(p);
  return m;
}

SolverConfig exact() {
  SolverConfig c;
  c.tolerance = 1e-14;
  c.clamp = false;
  c.max_iters = 10000;
  return c;
}

}  // namespace

TEST_CASE("CG agrees with dense Gaussian elimination") {
  Rng rng(10);
  int solved = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto w = std::uint32_t(rng.uniform_int(3, 10)), h = std::uint32_t(rng.uniform_int(3, 10));
    const auto base = random_image(w, h, rng);
    std::vector<double> gx(std::size_t{w} * h * 3), gy(gx.size());
    for (auto& v : gx) v = rng.uniform(-0.5, 0.5);
    for (auto& v : gy) v = rng.uniform(-0.5, 0.5);
    const auto mask = random_mask(w, h, rng, 0.7);
    Problem p;
    try {
      p = make_problem(base, mask, gx, gy, exact());
    } catch (const Error& e) {
      REQUIRE(e.code() == Errc::EmptyDomain);
      continue;
    }
    REQUIRE(p.pixels.size() <= 64);
    const auto s = solve(p);
    CHECK(s.converged);
    double worst_res = 0;
    for (std::uint32_t k = 0; k < 3; ++k) {
      const auto d = oracle::poisson_system(p, k);
      const auto x = oracle::gauss_solve(d);
      for (std::size_t i = 0; i < x.size(); ++i) {
        REQUIRE(std::abs(s.raw[i * 3 + k] - x[i]) < 1e-8);
      }
      const auto b = rhs(p, k);
      REQUIRE(b.size() == d.b.size());
      for (std::size_t i = 0; i < b.size(); ++i) REQUIRE(std::abs(b[i] - d.b[i]) < 1e-12);
      // Independent residual.
      double rn = 0, bn = 0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        double ax = 0;
        for (std::size_t j = 0; j < x.size(); ++j) ax += d.a[i][j] * s.raw[j * 3 + k];
        rn += (d.b[i] - ax) * (d.b[i] - ax);
        bn += d.b[i] * d.b[i];
      }
      worst_res = std::max(worst_res, std::sqrt(rn) / (bn > 0 ? std::sqrt(bn) : 1.0));
    }
    CHECK(std::abs(s.residual - worst_res) < 1e-12);
    CHECK(relative_residual(p, s.raw) == s.residual);
    ++solved;
  }
  CHECK(solved > 100);
}

TEST_CASE("zero guidance with a constant boundary") {
  Rng rng(11);
  const Raster base(12, 10, 3, 0.3f);
  auto init = base;
  for (auto& v : init.data()) v = float(rng.uniform());
  std::vector<std::uint8_t> mask(120, 1);
  auto p = make_problem(base, mask, std::vector<double>(360), std::vector<double>(360));
  p.initial = init;
  const auto s = solve(p);
  for (double v : s.values) CHECK(v == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("maximum principle") {
  Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const auto base = random_image(9, 8, rng, 1);
    const auto mask = random_mask(9, 8, rng, 0.8);
    Problem p;
    try {
      p = make_problem(base, mask, std::vector<double>(72), std::vector<double>(72), exact());
    } catch (const Error&) {
      continue;
    }
    double lo = 1, hi = 0;
    for (std::uint32_t y = 0; y < 8; ++y)
      for (std::uint32_t x = 0; x < 9; ++x)
        if (!p.in_domain(x, y)) {
          lo = std::min(lo, double(base.at(x, y)));
          hi = std::max(hi, double(base.at(x, y)));
        }
    for (double v : solve(p).raw) {
      CHECK(v >= lo - 1e-9);
      CHECK(v <= hi + 1e-9);
    }
  }
}

TEST_CASE("guidance from the base reproduces it") {
  Rng rng(13);
  const auto base = random_image(20, 16, rng);
  std::vector<double> gx, gy;
  gradients(base, gx, gy);
  const auto p = make_problem(base, random_mask(20, 16, rng, 0.6), gx, gy);
  const auto out = compose(base, solve(p), p);
  for (std::size_t i = 0; i < base.data().size(); ++i)
    CHECK(out.data()[i] == doctest::Approx(base.data()[i]).epsilon(1e-5));

  std::vector<std::uint8_t> full(20 * 16, 1);
  const auto pf = make_problem(base, full, gx, gy);
  CHECK(pf.pixels.size() == 18 * 14);  // border removed
  const auto outf = compose(base, solve(pf), pf);
  for (std::size_t i = 0; i < base.data().size(); ++i)
    CHECK(std::abs(outf.data()[i] - base.data()[i]) < 1e-5);
}

TEST_CASE("compose leaves pixels outside the domain bit-identical") {
  Raster board(32, 32, 3);
  for (std::uint32_t y = 0; y < 32; ++y)
    for (std::uint32_t x = 0; x < 32; ++x)
      for (std::uint32_t c = 0; c < 3; ++c) board.at(x, y, c) = ((x / 4 + y / 4) % 2) ? 0.8f : 0.2f;
  Raster alpha(32, 32, 1);
  Raster color(32, 32, 3, 0.1f);
  for (std::uint32_t y = 0; y < 32; ++y)
    for (std::uint32_t x = 0; x < 32; ++x)
      if (std::hypot(x + 0.5 - 16, y + 0.5 - 16) < 8) alpha.at(x, y) = 1.0f;
  for (Mode m : {Mode::Mix, Mode::Replace}) {
    const auto p = build_problem(board, color, alpha, m);
    const auto out = compose(board, solve(p), p);
    const auto dom = blend_domain(alpha);
    std::size_t changed = 0;
    for (std::uint32_t y = 0; y < 32; ++y)
      for (std::uint32_t x = 0; x < 32; ++x) {
        REQUIRE(bool(dom[y * 32 + x]) == p.in_domain(x, y));
        for (std::uint32_t c = 0; c < 3; ++c) {
          if (!p.in_domain(x, y)) REQUIRE(out.at(x, y, c) == board.at(x, y, c));
          changed += out.at(x, y, c) != board.at(x, y, c);
          REQUIRE(out.at(x, y, c) >= 0.0f);
          REQUIRE(out.at(x, y, c) <= 1.0f);
        }
      }
    CHECK(changed > 0);
  }
}

TEST_CASE("blend domain") {
  Raster alpha(10, 10, 1);
  const auto none = blend_domain(alpha);
  CHECK(std::count(none.begin(), none.end(), 1) == 0);
  CHECK_THROWS_AS(build_problem(Raster(10, 10, 3), Raster(10, 10, 3), alpha, Mode::Mix), Error);
  alpha.at(5, 5) = 0.05f;  // not above the threshold
  CHECK_THROWS_AS(build_problem(Raster(10, 10, 3), Raster(10, 10, 3), alpha, Mode::Mix), Error);
  alpha.at(5, 5) = 0.06f;
  const auto d = blend_domain(alpha);
  for (std::uint32_t y = 0; y < 10; ++y)
    for (std::uint32_t x = 0; x < 10; ++x)
      CHECK(bool(d[y * 10 + x]) == (x >= 4 && x <= 6 && y >= 4 && y <= 6));
  Raster corner(10, 10, 1);
  corner.at(0, 0) = 1.0f;
  const auto dc = blend_domain(corner);
  CHECK(std::count(dc.begin(), dc.end(), 1) == 0);  // (1,1) alone has no neighbour
}

TEST_CASE("guidance modes") {
  Rng rng(14);
  SUBCASE("replace with an identical patch gives the base gradient") {
    const auto base = random_image(8, 8, rng);
    Raster alpha(8, 8, 1);
    for (std::uint32_t y = 2; y < 6; ++y)
      for (std::uint32_t x = 2; x < 6; ++x) alpha.at(x, y) = 0.7f;
    const auto p = build_problem(base, base, alpha, Mode::Replace);
    std::vector<double> gx, gy;
    gradients(base, gx, gy);
    for (auto i : p.pixels)
      for (std::uint32_t c = 0; c < 3; ++c) {
        CHECK(p.gx[i * 3 + c] == doctest::Approx(gx[i * 3 + c]));
        CHECK(p.gy[i * 3 + c] == doctest::Approx(gy[i * 3 + c]));
      }
  }
  SUBCASE("mix over a constant base keeps the composite gradient") {
    const Raster base(8, 8, 3, 0.5f);
    const auto color = random_image(8, 8, rng);
    Raster alpha(8, 8, 1);
    for (std::uint32_t y = 1; y < 7; ++y)
      for (std::uint32_t x = 1; x < 7; ++x) alpha.at(x, y) = float(rng.uniform(0.2, 1.0));
    const auto comp = alpha_blend(base, color, alpha);
    const auto p = build_problem(base, color, alpha, Mode::Mix);
    // Oracle: per-pixel vectors of both images, keep the longer one.
    for (auto i : p.pixels) {
      const std::uint32_t x = i % 8, y = i / 8;
      for (std::uint32_t c = 0; c < 3; ++c) {
        const double cx = x + 1 < 8 ? comp.at(x + 1, y, c) - comp.at(x, y, c) : 0.0;
        const double cy = y + 1 < 8 ? comp.at(x, y + 1, c) - comp.at(x, y, c) : 0.0;
        CHECK(p.gx[i * 3 + c] == doctest::Approx(cx));
        CHECK(p.gy[i * 3 + c] == doctest::Approx(cy));
      }
    }
  }
  SUBCASE("mix keeps the stronger base texture") {
    Raster base(8, 8, 3);
    for (std::uint32_t y = 0; y < 8; ++y)
      for (std::uint32_t x = 0; x < 8; ++x)
        for (std::uint32_t c = 0; c < 3; ++c) base.at(x, y, c) = (x % 2) ? 1.0f : 0.0f;
    Raster alpha(8, 8, 1, 0.0f);
    for (std::uint32_t y = 2; y < 6; ++y)
      for (std::uint32_t x = 2; x < 6; ++x) alpha.at(x, y) = 0.1f;
    const auto p = build_problem(base, Raster(8, 8, 3, 0.5f), alpha, Mode::Mix);
    std::vector<double> gx, gy;
    gradients(base, gx, gy);
    const std::size_t i = (3 * 8 + 3) * 3;
    CHECK(p.gx[i] == doctest::Approx(gx[i]));
  }
}

TEST_CASE("alpha_blend") {
  const Raster base(4, 4, 3, 0.2f), patch(4, 4, 3, 0.6f);
  CHECK(alpha_blend(base, patch, Raster(4, 4, 1, 0.0f)) == base);
  CHECK(alpha_blend(base, patch, Raster(4, 4, 1, 1.0f)) == patch);
  const auto half = alpha_blend(base, patch, Raster(4, 4, 1, 0.5f));
  for (float v : half.data()) CHECK(v == doctest::Approx(0.4f));
}

TEST_CASE("solver limits") {
  SolverConfig c;
  CHECK(c.iteration_limit(100) == 500);
  CHECK(c.iteration_limit(10000) == 1000);
  c.max_iters = 3;
  CHECK(c.iteration_limit(10000) == 3);

  Rng rng(15);
  const auto base = random_image(40, 40, rng);
  std::vector<double> gx(40 * 40 * 3), gy(gx.size());
  for (auto& v : gx) v = rng.uniform(-1, 1);
  std::vector<std::uint8_t> full(1600, 1);
  SolverConfig tight;
  tight.max_iters = 2;
  tight.tolerance = 1e-12;
  const auto s = solve(make_problem(base, full, gx, gy, tight));
  CHECK_FALSE(s.converged);
  CHECK(s.iterations <= 6);
  for (double v : s.values) REQUIRE((v >= 0.0 && v <= 1.0));
}
