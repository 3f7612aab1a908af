// Copyright 2026 The Lumen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "lumen/pipeline.hpp"
#include "lumen/solver.hpp"
#include "lumen/synth.hpp"
#include "support/oracles.hpp"

namespace {

using lumen::Image;
using lumen::LaggedSystem;
using lumen::Penalizer;

const lumen::View kFlat(16, 16, 0.5);

TEST(SolverConfig, Defaults) {
  const lumen::SolverConfig cfg;
  EXPECT_EQ(cfg.inner_iterations * cfg.lag_steps, 100);
  EXPECT_EQ(cfg.sor_omega, 1.88);
  EXPECT_EQ(cfg.epsilon_s, 0.001 * 0.001);
  EXPECT_EQ(cfg.residual_tol, 1e-6);
  EXPECT_EQ(cfg.penalizer, Penalizer::TV_L1);
}

TEST(SolverConfig, RejectsBadValues) {
  for (auto mutate : {+[](lumen::SolverConfig& c) { c.alpha = 0; }, +[](lumen::SolverConfig& c) { c.sor_omega = 2.0; },
                      +[](lumen::SolverConfig& c) { c.inner_iterations = 0; },
                      +[](lumen::SolverConfig& c) { c.epsilon_s = 0; }}) {
    lumen::SolverConfig c;
    mutate(c);
    EXPECT_THROW(c.validate(), lumen::ContractError);
  }
}

TEST(SmoothnessWeight, Examples) {
  const Image flat(6, 6, 0.7);
  const lumen::View guide(6, 6, 0.2);
  for (double v : lumen::smoothness_weight(flat, guide, Penalizer::TV_L1, 1e-6).values())
    EXPECT_NEAR(v, 1.0 / (2.0 * std::sqrt(1e-6)), 1e-9);
  oracle::Rng rng(1);
  for (double v : lumen::smoothness_weight(oracle::random_image(6, 6, rng), guide, Penalizer::TV_L2, 1e-6).values())
    EXPECT_EQ(v, 1.0);
  Image ramp(6, 6);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 6; ++x) ramp(x, y) = 2.0 * x;
  const Image w = lumen::smoothness_weight(ramp, guide, Penalizer::TV_L1, 1e-6);
  for (int y = 0; y < 6; ++y)
    for (int x = 1; x < 5; ++x) EXPECT_NEAR(w(x, y), 1.0 / (2.0 * std::sqrt(4.0 + 1e-6)), 1e-15);
}

TEST(SmoothnessWeight, ImageDrivenFollowsGuideEdges) {
  lumen::View guide(9, 9, 0.0);
  for (int y = 0; y < 9; ++y)
    for (int x = 0; x < 9; ++x) guide[1](x, y) = 0.1 * x;
  const Image w = lumen::smoothness_weight(Image(9, 9, 3.0), guide, Penalizer::IMAGE_DRIVEN, 1e-6);
  for (int y = 0; y < 9; ++y)
    for (int x = 2; x < 7; ++x) EXPECT_NEAR(w(x, y), 1.0 / std::sqrt(0.01 + 1e-6), 1e-9);
  EXPECT_THROW(lumen::smoothness_weight(Image(8, 9, 0.0), guide, Penalizer::IMAGE_DRIVEN, 1e-6),
               lumen::ContractError);
}

TEST(GaussSeidel, ZeroRightHandSideKeepsZero) {
  oracle::Rng rng(2);
  Image omega(5, 4, 0.0);
  const Image j11 = oracle::random_image(5, 4, rng);
  const Image diff = oracle::random_image(5, 4, rng, 0.5, 2.0);
  for (int i = 0; i < 20; ++i) lumen::gauss_seidel_sweep(omega, j11, Image(5, 4, 0.0), diff, 1.0, 1.88);
  for (double v : omega.values()) EXPECT_EQ(v, 0.0);
}

TEST(GaussSeidel, SinglePixelUpdateMatchesOneUnknownSolve) {
  for (double j12 : {-1.0, -2.0}) {
    // All pixels start at 0.5; the ones swept before the center have no data
    // term and therefore stay at 0.5, so the center sees four neighbors at 0.5.
    Image omega(3, 3, 0.5);
    Image j11(3, 3, 0.0), jb12(3, 3, 0.0);
    j11(1, 1) = 2.0;
    jb12(1, 1) = j12;
    lumen::gauss_seidel_sweep(omega, j11, jb12, Image(3, 3, 1.0), 1.0, 1.0);
    Eigen::Matrix<double, 1, 1> a, b;
    a << 2.0 + 4.0;
    b << -j12 + 4.0 * 0.5;
    EXPECT_NEAR(omega(1, 1), a.lu().solve(b)(0), 1e-15);
  }
}

LaggedSystem random_system(oracle::Rng& rng, int w, int h, double alpha) {
  LaggedSystem s;
  s.alpha = alpha;
  s.diag = oracle::random_image(w, h, rng, 0.0, 1.0);
  s.rhs = oracle::random_image(w, h, rng, -1.0, 1.0);
  s.diffusivity = oracle::random_image(w, h, rng, 0.2, 3.0);
  return s;
}

TEST(GaussSeidel, ConvergesToDenseSolution) {
  oracle::Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const LaggedSystem s = random_system(rng, 4, 4, 0.7);
    Image omega(4, 4, 0.0);
    for (int i = 0; i < 500; ++i) lumen::gauss_seidel_sweep(omega, s, 1.0);
    EXPECT_LT(oracle::max_diff(omega, oracle::dense_solve(s)), 1e-8);
  }
}

TEST(GaussSeidel, SweepsNeverIncreaseLaggedEnergy) {
  oracle::Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const LaggedSystem s = random_system(rng, 6, 5, 1.3);
    Image omega = oracle::random_image(6, 5, rng, -2.0, 2.0);
    double e = lumen::lagged_energy(omega, s);
    for (int i = 0; i < 30; ++i) {
      lumen::gauss_seidel_sweep(omega, s, 1.0);
      const double next = lumen::lagged_energy(omega, s);
      ASSERT_LE(next, e + 1e-12);
      e = next;
    }
  }
}

TEST(GaussSeidel, EnergyGradientIsResidual) {
  oracle::Rng rng(5);
  const LaggedSystem s = random_system(rng, 4, 3, 0.9);
  const Image omega = oracle::random_image(4, 3, rng);
  const Image r = lumen::lagged_residual(omega, s);
  for (std::size_t i = 0; i < omega.size(); ++i) {
    Image p = omega, m = omega;
    p.values()[i] += 1e-6;
    m.values()[i] -= 1e-6;
    EXPECT_NEAR((lumen::lagged_energy(p, s) - lumen::lagged_energy(m, s)) / 2e-6, r.values()[i], 1e-7);
  }
}

TEST(LaggedSystem, SymmetricPositiveDefinite) {
  oracle::Rng rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    LaggedSystem s = random_system(rng, 5, 4, 1.0);
    // Data term present at a single pixel only.
    s.diag.fill(0.0);
    s.diag(2, 1) = 0.3;
    const auto d = oracle::assemble(s);
    EXPECT_LT((d.a - d.a.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(d.a);
    EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
  }
}

TEST(LaggedSystem, PureDiffusionIsConservative) {
  // With no data term the flux sum vanishes, so an explicit diffusion step
  // leaves the spatial mean unchanged.
  oracle::Rng rng(7);
  LaggedSystem s = random_system(rng, 7, 6, 1.0);
  s.diag.fill(0.0);
  s.rhs.fill(0.0);
  Image omega = oracle::random_image(7, 6, rng, -1.0, 1.0);
  const auto mean = [](const Image& g) {
    double m = 0.0;
    for (double v : g.values()) m += v;
    return m / static_cast<double>(g.size());
  };
  const double m0 = mean(omega);
  for (int step = 0; step < 50; ++step) {
    const Image r = lumen::lagged_residual(omega, s);
    double total = 0.0;
    for (double v : r.values()) total += v;
    ASSERT_NEAR(total, 0.0, 1e-12);
    for (std::size_t i = 0; i < omega.size(); ++i) omega.values()[i] -= 0.05 * r.values()[i];
    ASSERT_NEAR(mean(omega), m0, 1e-10);
  }
}

TEST(GaussSeidel, DegenerateDiagonalIsSkipped) {
  Image omega(2, 1, 0.25);
  LaggedSystem s{Image(2, 1, 0.0), Image(2, 1, 1.0), Image(2, 1, 0.0), 1.0};
  lumen::gauss_seidel_sweep(omega, s, 1.88);
  EXPECT_EQ(omega(0, 0), 0.25);
  EXPECT_EQ(omega(1, 0), 0.25);
}

lumen::TensorField zero_tensors(int w, int h) {
  lumen::TensorField tf;
  tf.view_count = lumen::Grid<int>(w, h, 8);
  for (int c = 0; c < 3; ++c) {
    tf.intensity[c] = lumen::TensorGrid(w, h);
    tf.gradient[c] = lumen::TensorGrid(w, h);
  }
  return tf;
}

TEST(SolveIncrement, ConstantsAreInTheSmoothnessNullSpace) {
  for (auto pen : {Penalizer::TV_L1, Penalizer::TV_L2, Penalizer::IMAGE_DRIVEN}) {
    lumen::SolverConfig cfg;
    cfg.penalizer = pen;
    const auto r = lumen::solve_increment(zero_tensors(16, 16), lumen::DisparityField(16, 16, 0.35), kFlat, cfg, {});
    for (double v : r.omega.values()) EXPECT_NEAR(v, 0.35, 1e-14);
    EXPECT_TRUE(r.converged);
  }
}

TEST(SolveIncrement, RecoversSinglePlaneWithoutWarping) {
  lumen::SceneSpec spec;
  spec.kind = lumen::PlaneScene{0.3};
  const auto syn = lumen::generate(spec);
  lumen::PipelineConfig pc;
  pc.levels = 0;
  const auto pyr = lumen::build_pyramid(syn.lf, pc);
  const auto& lf = pyr.levels[0].lf;
  const lumen::DisparityField zero(64, 64, 0.0);
  const auto warped = lumen::warp_lightfield(lf, zero);
  const auto tf = lumen::accumulate_tensors(warped.lf, warped.validity);
  const auto r = lumen::solve_increment(tf, zero, lf.center_view(), pc.solver,
                                        {pc.gamma, pc.solver.epsilon_g, pc.solver.epsilon_G, pc.color_space});
  int good = 0, total = 0;
  for (int y = 6; y < 58; ++y)
    for (int x = 6; x < 58; ++x) good += std::abs(r.omega(x, y) - 0.3) <= 0.05, ++total;
  EXPECT_GE(good, 0.95 * total);
  EXPECT_EQ(r.sweeps, 100);
}

TEST(SolveIncrement, ReachesResidualToleranceWithinBudget) {
  oracle::Rng rng(8);
  lumen::SolverConfig cfg;
  cfg.penalizer = Penalizer::TV_L2;
  const auto tf = oracle::random_psd_tensors(rng, 16, 16);
  const auto r = lumen::solve_increment(tf, lumen::DisparityField(16, 16, 0.0), kFlat, cfg,
                                        {0.5, 1e-6, 1e-6, lumen::ColorSpace::HSV});
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.sweeps, 100);
  EXPECT_LT(lumen::max_abs(lumen::lagged_residual(r.omega, r.final_system)), 1e-6);
}

TEST(SolveIncrement, ConvergedSolveMatchesDenseSolve) {
  oracle::Rng rng(9);
  lumen::SolverConfig cfg;
  cfg.residual_tol = 1e-13;
  cfg.lag_steps = 200;
  for (auto pen : {Penalizer::TV_L2, Penalizer::IMAGE_DRIVEN}) {
    cfg.penalizer = pen;
    lumen::View guide(std::array<Image, 3>{oracle::random_image(12, 10, rng), Image(12, 10, 0.5), Image(12, 10, 0.5)});
    const auto tf = oracle::random_psd_tensors(rng, 12, 10);
    const auto r = lumen::solve_increment(tf, lumen::DisparityField(oracle::random_image(12, 10, rng, -0.2, 0.2)),
                                          guide, cfg, {0.5, 1e-6, 1e-6, lumen::ColorSpace::RGB});
    ASSERT_TRUE(r.converged);
    EXPECT_LT(oracle::max_diff(r.omega, oracle::dense_solve(r.final_system)), 1e-8);
  }
}

TEST(SolveIncrement, NonFiniteDataIsNumericalError) {
  auto tf = zero_tensors(6, 6);
  tf.intensity[0](2, 3) = {std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0};
  lumen::SolverConfig cfg;
  cfg.lag_steps = 1;
  cfg.inner_iterations = 1;
  try {
    lumen::solve_increment(tf, lumen::DisparityField(6, 6, 0.0), lumen::View(6, 6, 0.5), cfg, {});
    FAIL() << "expected NumericalError";
  } catch (const lumen::NumericalError& e) {
    EXPECT_EQ(e.x(), 2);
    EXPECT_EQ(e.y(), 3);
  }
}

}  // namespace
