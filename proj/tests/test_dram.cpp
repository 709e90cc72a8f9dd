#include <doctest.h>

#include <cmath>
#include <random>

#include "hxdram/decision/decision.hpp"
#include "hxdram/dram/sampler.hpp"
#include "support/oracles.hpp"

using namespace hxdram::dram;

namespace {

FunctionTarget gaussian(const Matrix& cov) {
  const Matrix prec = cov.inverse();
  return FunctionTarget(static_cast<std::size_t>(cov.rows()),
                        [prec](const Vector& x) { return -0.5 * x.dot(prec * x); });
}

DramConfig basic_config(Eigen::Index d, std::size_t n) {
  DramConfig c;
  c.initial_covariance = Matrix::Identity(d, d);
  c.n_samples = n;
  c.seed = 11;
  return c;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("rng state round-trips, including a cached normal") {
  Rng a(42);
  a.normal();  // leaves the second Box-Muller value cached
  const std::string saved = a.save();
  Rng b;
  b.restore(saved);
  CHECK(a == b);
  for (int i = 0; i < 10; ++i) {
    CHECK(a.normal() == b.normal());
    CHECK(a.uniform() == b.uniform());
  }
  CHECK_THROWS(b.restore("garbage"));
}

TEST_CASE("running moments match the batch formula") {
  SUBCASE("three points") {
    const std::vector<Vector> pts = {vec({0, 0}), vec({1, 1}), vec({2, 0})};
    RunningMoments m(2);
    for (const auto& p : pts) m.push(p);
    const Matrix batch = oracle::batch_covariance(pts);
    CHECK((m.covariance() - batch).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(batch(0, 0) == doctest::Approx(1.0));
    CHECK(batch(0, 1) == doctest::Approx(0.0).scale(1.0));
    CHECK(batch(1, 1) == doctest::Approx(1.0 / 3.0));
  }
  SUBCASE("200 random points, every prefix") {
    std::mt19937_64 gen(5);
    std::normal_distribution<double> nd(3.0, 2.0);
    std::vector<Vector> pts;
    RunningMoments m(4);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      Vector p(4);
      for (int j = 0; j < 4; ++j) p[j] = nd(gen) * (j + 1);
      pts.push_back(p);
      m.push(p);
      if (pts.size() >= 2) worst = std::max(worst, (m.covariance() - oracle::batch_covariance(pts)).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("covariance update") {
  DramConfig cfg = basic_config(2, 0);
  cfg.adaptation_start = 5;
  ChainState s;
  s.moments = RunningMoments(2);
  for (int i = 0; i < 10; ++i) s.moments.push(vec({1.5, -2.0}));

  s.step = 3;  // n + 1 <= n_0
  CHECK(covariance_update(s, cfg) == cfg.initial_covariance);

  s.step = 9;
  bool repaired = true;
  const Matrix c = covariance_update(s, cfg, &repaired);
  const double sd = 2.4 * 2.4 / 2.0;
  CHECK_FALSE(repaired);
  CHECK((c - sd * 1e-10 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-24);

  cfg.adaptation_start.reset();
  CHECK(covariance_update(s, cfg) == cfg.initial_covariance);
}

TEST_CASE("first-stage acceptance") {
  const GaussianStageProposal q(Matrix::Identity(1, 1), 0.25);
  const PathPoint x{vec({0.0}), -1.0};
  CHECK(accept_stage1(x, {vec({0.7}), -1.0}, q) == doctest::Approx(1.0));
  CHECK(accept_stage1(x, {vec({0.7}), kNegInf}, q) == 0.0);
  CHECK(accept_stage1(x, {vec({0.7}), -1.0 + std::log(0.5)}, q) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(accept_stage1(x, {vec({0.7}), 3.0}, q) == 1.0);
}

TEST_CASE("second stage on a flat target with symmetric proposals accepts") {
  const GaussianStageProposal q(Matrix::Identity(2, 2), 0.25);
  const PathPoint path[] = {{vec({0, 0}), 0.0}, {vec({0.8, -0.3}), 0.0}, {vec({0.2, 0.1}), 0.0}};
  CHECK(accept_stage(path, q) == 0.0);  // stage 1 always accepts here

  const PathPoint lower[] = {{vec({0, 0}), 0.0}, {vec({0.8, -0.3}), -2.0}, {vec({0.2, 0.1}), 0.0}};
  const double a2 = accept_stage(lower, q);
  CHECK(a2 <= 1.0);
  CHECK(a2 >= 0.0);
  const PathPoint flat[] = {{vec({0, 0}), 0.0}, {vec({0.4, 0.4}), -1.0}, {vec({0.8, 0.8}), 0.0}};
  CHECK(accept_stage(flat, q) == doctest::Approx(1.0));
}

TEST_CASE("delayed-rejection kernel on a discrete target") {
  const std::array<double, 5> pi = {0.1, 0.3, 0.15, 0.25, 0.2};
  const oracle::DiscreteProposal q;
  const auto k = oracle::dr_kernel(pi, q);
  double worst_balance = 0.0, worst_row = 0.0;
  for (int a = 0; a < 5; ++a) {
    double row = 0.0;
    for (int b = 0; b < 5; ++b) {
      row += k[a][b];
      CHECK(k[a][b] >= 0.0);
      worst_balance = std::max(worst_balance, std::abs(pi[a] * k[a][b] - pi[b] * k[b][a]));
    }
    worst_row = std::max(worst_row, std::abs(row - 1.0));
  }
  CHECK(worst_balance < 1e-12);
  CHECK(worst_row < 1e-12);

  // pi K = pi
  for (int b = 0; b < 5; ++b) {
    double s = 0.0;
    for (int a = 0; a < 5; ++a) s += pi[a] * k[a][b];
    CHECK(s == doctest::Approx(pi[b]).epsilon(1e-12));
  }
}

TEST_CASE("acceptance probabilities stay in [0, 1] and never NaN") {
  std::mt19937_64 gen(9);
  std::normal_distribution<double> nd;
  const GaussianStageProposal q(Matrix::Identity(3, 3) * 0.5, 0.25);
  for (int i = 0; i < 2000; ++i) {
    std::vector<PathPoint> path;
    for (int j = 0; j < 3; ++j) {
      Vector v(3);
      for (int k = 0; k < 3; ++k) v[k] = 2.0 * nd(gen);
      path.push_back({v, 50.0 * nd(gen)});
    }
    for (std::size_t len = 2; len <= 3; ++len) {
      const double la = log_acceptance(std::span<const PathPoint>(path.data(), len), q);
      CHECK_FALSE(std::isnan(la));
      CHECK(la <= 0.0);
    }
  }
}

TEST_CASE("fixed seed gives the same trajectory") {
  Matrix cov(2, 2);
  cov << 1.0, 0.5, 0.5, 2.0;
  const auto t = gaussian(cov);
  auto cfg = basic_config(2, 3000);
  cfg.adaptation_start = 200;
  const auto a = run_chain(t, cfg, vec({0, 0}));
  const auto b = run_chain(t, cfg, vec({0, 0}));
  REQUIRE(a.samples.size() == 3000);
  bool same = true;
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    same = same && a.samples[i].x == b.samples[i].x && a.samples[i].stage == b.samples[i].stage;
  CHECK(same);
  cfg.seed = 12;
  const auto c = run_chain(t, cfg, vec({0, 0}));
  CHECK_FALSE(c.samples.back().x == a.samples.back().x);
}

TEST_CASE("standard normal target") {
  const auto t = gaussian(Matrix::Identity(2, 2));
  auto cfg = basic_config(2, 50000);
  cfg.initial_covariance *= 4.0;
  const auto r = run_chain(t, cfg, vec({0.5, -0.5}));
  for (int j = 0; j < 2; ++j) {
    std::vector<double> col;
    for (const auto& s : r.samples) col.push_back(s.x[j]);
    double mean = 0.0;
    for (double v : col) mean += v;
    mean /= static_cast<double>(col.size());
    CHECK(std::abs(mean) < 3.0 * oracle::batch_means_se(col));
  }
  RunningMoments m(2);
  for (const auto& s : r.samples) m.push(s.x);
  const Matrix c = m.covariance();
  CHECK(c(0, 0) == doctest::Approx(1.0).epsilon(0.1));
  CHECK(c(1, 1) == doctest::Approx(1.0).epsilon(0.1));
  CHECK(std::abs(c(0, 1)) < 0.1);
  const auto& fs = r.final_state;
  CHECK(fs.attempted[0] == 49999);
  CHECK(fs.attempted[1] == fs.attempted[0] - fs.accepted[0]);
}

TEST_CASE("state serialization gives an identical continuation") {
  Matrix cov(2, 2);
  cov << 1.0, 0.9, 0.9, 1.0;
  const auto t = gaussian(cov);
  auto cfg = basic_config(2, 1000);
  cfg.adaptation_start = 100;
  auto full_cfg = cfg;
  full_cfg.n_samples = 1500;
  const auto full = run_chain(t, full_cfg, vec({0, 0}));

  auto half = run_chain(t, cfg, vec({0, 0}));
  const std::string state_text = serialize(half.final_state);
  const std::string rng_text = half.rng.save();

  ChainResult resumed{{}, {}, deserialize_state(state_text), Rng{}};
  resumed.rng.restore(rng_text);
  extend_chain(resumed, t, cfg, 500);
  REQUIRE(resumed.samples.size() == 500);
  bool same = true;
  for (std::size_t i = 0; i < 500; ++i) {
    const auto& a = full.samples[1000 + i];
    const auto& b = resumed.samples[i];
    same = same && a.step == b.step && a.x == b.x && a.log_pi == b.log_pi && a.stage == b.stage;
  }
  CHECK(same);
  CHECK(resumed.final_state.covariance == full.final_state.covariance);
}

TEST_CASE("one stage without adaptation is random-walk Metropolis") {
  Matrix cov(2, 2);
  cov << 2.0, 0.3, 0.3, 0.5;
  const auto t = gaussian(cov);
  auto cfg = basic_config(2, 4000);
  cfg.n_stages = 1;
  cfg.adaptation_start.reset();
  cfg.initial_covariance << 0.8, 0.1, 0.1, 0.4;
  const auto chain = run_chain(t, cfg, vec({1.0, 1.0}));

  // Reference Metropolis on the same random stream.
  Rng rng(cfg.seed);
  const Matrix l = cfg.initial_covariance.llt().matrixL();
  Vector x = vec({1.0, 1.0});
  double lp = t.evaluate(x).log_density;
  bool same = chain.samples[0].x == x;
  for (std::size_t i = 1; i < 4000; ++i) {
    const Vector z = rng.normal_vector(2);
    const Vector step = l * z;
    const Vector y = x + step;
    const double ly = t.evaluate(y).log_density;
    if (std::log(rng.uniform()) < std::min(0.0, ly - lp)) {
      x = y;
      lp = ly;
    }
    same = same && (chain.samples[i].x - x).cwiseAbs().maxCoeff() == 0.0;
  }
  CHECK(same);
}

TEST_CASE("zero samples gives an empty chain") {
  const auto t = gaussian(Matrix::Identity(1, 1));
  const auto r = run_chain(t, basic_config(1, 0), vec({0.0}));
  CHECK(r.samples.empty());
}

TEST_CASE("two seeded chains agree on a Gaussian target") {
  const auto t = gaussian(Matrix::Identity(2, 2));
  auto cfg = basic_config(2, 20000);
  const std::uint64_t seeds[] = {1, 2};
  const auto chains = run_chains(t, cfg, vec({0, 0}), seeds);
  std::vector<Matrix> tails;
  for (const auto& c : chains) {
    Matrix m(10000, 2);
    for (int i = 0; i < 10000; ++i) m.row(i) = c.samples[10000 + static_cast<std::size_t>(i)].x.transpose();
    tails.push_back(m);
  }
  for (double r : hxdram::decision::gelman_rubin(tails)) CHECK(r < 1.05);
}

TEST_CASE("out-of-support proposals fall through to the next stage") {
  // Support is x > 0; the chain must never leave it.
  const FunctionTarget half(1, [](const Vector& x) { return x[0] > 0.0 ? -x[0] : kNegInf; });
  auto cfg = basic_config(1, 5000);
  const auto r = run_chain(half, cfg, vec({0.5}));
  bool inside = true;
  for (const auto& s : r.samples) inside = inside && s.x[0] > 0.0;
  CHECK(inside);
  CHECK(r.final_state.accepted[1] > 0);
}

TEST_CASE("errors") {
  const auto t = gaussian(Matrix::Identity(2, 2));
  auto cfg = basic_config(2, 10);

  SUBCASE("start outside the support") {
    const FunctionTarget none(2, [](const Vector&) { return kNegInf; });
    try {
      run_chain(none, cfg, vec({0, 0}));
      FAIL("expected invalid start");
    } catch (const DramError& e) {
      CHECK(e.code() == DramErrc::invalid_start);
    }
  }
  SUBCASE("target failure carries the point") {
    int calls = 0;
    const FunctionTarget flaky(2, [&calls](const Vector& x) -> double {
      if (++calls > 1) throw std::runtime_error("boom");
      return -x.squaredNorm();
    });
    try {
      run_chain(flaky, cfg, vec({0, 0}));
      FAIL("expected target failure");
    } catch (const DramError& e) {
      CHECK(e.code() == DramErrc::target_failure);
      CHECK(e.point().size() == 2);
    }
  }
  SUBCASE("bad configuration") {
    auto bad = cfg;
    bad.initial_covariance(0, 0) = -1.0;
    CHECK_THROWS_AS(run_chain(t, bad, vec({0, 0})), DramError);
    bad = cfg;
    bad.initial_covariance(0, 1) = 0.3;
    CHECK_THROWS_AS(bad.validate(), DramError);
    bad = cfg;
    bad.n_stages = 0;
    CHECK_THROWS_AS(bad.validate(), DramError);
  }
}

TEST_CASE("covariance checkpoints") {
  const auto t = gaussian(Matrix::Identity(2, 2));
  auto cfg = basic_config(2, 2501);
  cfg.checkpoint_every = 500;
  cfg.adaptation_start = 100;
  const auto r = run_chain(t, cfg, vec({0, 0}));
  REQUIRE(r.checkpoints.size() == 5);
  CHECK(r.checkpoints[0].step == 500);
  CHECK(r.checkpoints[4].step == 2500);
  CHECK(r.checkpoints[4].covariance == r.final_state.covariance);
}
