#include "hxdram/dram/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>

#include <json.hpp>

namespace hxdram::dram {

namespace {

using nlohmann::json;

// log(1 - e^a) for a <= 0.
double log1m_exp(double a) {
  if (a == kNegInf) return 0.0;
  if (a >= 0.0) return kNegInf;
  return a > -std::numbers::ln2 ? std::log(-std::expm1(a)) : std::log1p(-std::exp(a));
}

bool is_positive_definite(const Matrix& m) {
  if (!m.allFinite()) return false;
  Eigen::LLT<Matrix> llt(m);
  return llt.info() == Eigen::Success;
}

double log_alpha(std::span<const PathPoint> path, const Proposal& q);

// log pi(p0) + sum_j log q_j(p0..p_{j-1} -> p_j) + sum_{j<k} log(1 - alpha_j(p0..p_j))
double log_path_density(std::span<const PathPoint> path, const Proposal& q) {
  double acc = path.front().log_pi;
  if (!(acc > kNegInf)) return kNegInf;
  const std::size_t k = path.size() - 1;
  for (std::size_t j = 1; j <= k; ++j) {
    acc += q.log_density(static_cast<int>(j), path.first(j), path[j].x);
    if (!(acc > kNegInf)) return kNegInf;
    if (j < k) {
      acc += log1m_exp(log_alpha(path.first(j + 1), q));
      if (!(acc > kNegInf)) return kNegInf;
    }
  }
  return acc;
}

double log_alpha(std::span<const PathPoint> path, const Proposal& q) {
  if (!(path.back().log_pi > kNegInf)) return kNegInf;
  const double ld = log_path_density(path, q);
  if (!(ld > kNegInf)) return kNegInf;
  const std::vector<PathPoint> reversed(path.rbegin(), path.rend());
  const double ln = log_path_density(reversed, q);
  if (!(ln > kNegInf)) return kNegInf;
  return std::min(0.0, ln - ld);
}

Evaluation evaluate_checked(const TargetDensity& target, const Vector& x) {
  Evaluation ev;
  try {
    ev = target.evaluate(x);
  } catch (const DramError&) {
    throw;
  } catch (const std::exception& e) {
    throw DramError(DramErrc::target_failure, std::string("target evaluation failed: ") + e.what(), x);
  }
  if (std::isnan(ev.log_density) || ev.log_density == std::numeric_limits<double>::infinity())
    throw DramError(DramErrc::target_failure, "target returned a non-finite log density", x);
  return ev;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  const auto n = static_cast<Eigen::Index>(j.size());
  const auto c = n == 0 ? 0 : static_cast<Eigen::Index>(j.at(0).size());
  Matrix m(n, c);
  for (Eigen::Index r = 0; r < n; ++r) {
    if (static_cast<Eigen::Index>(j.at(r).size()) != c) throw std::runtime_error("ragged matrix");
    for (Eigen::Index k = 0; k < c; ++k) m(r, k) = j.at(r).at(k).get<double>();
  }
  return m;
}

json vector_to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vector_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

double DramConfig::scale_value() const {
  return scale ? *scale : 2.4 * 2.4 / static_cast<double>(dimension());
}

double DramConfig::epsilon_value() const {
  if (epsilon) return *epsilon;
  return 1e-10 * initial_covariance.diagonal().mean();
}

void DramConfig::validate() const {
  auto fail = [](const std::string& msg) { throw DramError(DramErrc::invalid_config, "dram: " + msg); };
  if (initial_covariance.rows() == 0 || initial_covariance.rows() != initial_covariance.cols())
    fail("initial covariance must be a non-empty square matrix");
  const double tol = 1e-12 * initial_covariance.cwiseAbs().maxCoeff();
  if ((initial_covariance - initial_covariance.transpose()).cwiseAbs().maxCoeff() > tol)
    fail("initial covariance must be symmetric");
  if (!is_positive_definite(initial_covariance)) fail("initial covariance must be positive definite");
  if (n_stages < 1) fail("n_stages must be at least 1");
  if (!(stage_scale > 0.0) || !std::isfinite(stage_scale)) fail("stage_scale must be positive");
  if (scale && !(*scale > 0.0)) fail("scale must be positive");
  if (epsilon && !(*epsilon >= 0.0)) fail("epsilon must be non-negative");
}

void RunningMoments::push(const Vector& x) {
  if (count_ == 0 && mean_.size() != x.size()) {
    mean_ = Vector::Zero(x.size());
    scatter_ = Matrix::Zero(x.size(), x.size());
  }
  ++count_;
  const Vector delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  scatter_.noalias() += delta * (x - mean_).transpose();
}

RunningMoments RunningMoments::restore(std::size_t count, Vector mean, Matrix scatter) {
  if (scatter.rows() != mean.size() || scatter.cols() != mean.size())
    throw DramError(DramErrc::invalid_state, "dram: moment dimensions differ");
  RunningMoments m;
  m.count_ = count;
  m.mean_ = std::move(mean);
  m.scatter_ = std::move(scatter);
  return m;
}

Matrix RunningMoments::covariance() const {
  if (count_ < 2) return Matrix::Zero(mean_.size(), mean_.size());
  Matrix c = scatter_ / static_cast<double>(count_ - 1);
  return 0.5 * (c + c.transpose());
}

Matrix covariance_update(const ChainState& state, const DramConfig& cfg, bool* repaired) {
  if (repaired) *repaired = false;
  if (!cfg.adaptation_start || state.step + 1 <= *cfg.adaptation_start) return cfg.initial_covariance;
  const double sd = cfg.scale_value();
  const auto d = static_cast<Eigen::Index>(cfg.dimension());
  const Matrix jitter = sd * cfg.epsilon_value() * Matrix::Identity(d, d);
  Matrix c = sd * state.moments.covariance() + jitter;
  if (is_positive_definite(c)) return c;
  if (repaired) *repaired = true;
  // Fall back to a growing diagonal load until the factorisation succeeds.
  double load = std::max(cfg.epsilon_value(), 1e-12 * cfg.initial_covariance.diagonal().mean());
  for (int i = 0; i < 80; ++i) {
    c += sd * load * Matrix::Identity(d, d);
    if (is_positive_definite(c)) return c;
    load *= 2.0;
  }
  throw DramError(DramErrc::invalid_state, "dram: adapted covariance is not positive definite");
}

GaussianStageProposal::GaussianStageProposal(const Matrix& covariance, double stage_scale)
    : chol_(covariance), stage_scale_(stage_scale) {
  if (chol_.info() != Eigen::Success)
    throw DramError(DramErrc::invalid_state, "dram: proposal covariance is not positive definite");
  log_det_half_ = Matrix(chol_.matrixL()).diagonal().array().log().sum();
}

double GaussianStageProposal::log_density(int stage, std::span<const PathPoint> history,
                                          const Vector& candidate) const {
  const double factor = std::pow(stage_scale_, stage - 1);  // covariance multiplier
  const Vector diff = candidate - history.front().x;
  const Vector z = chol_.matrixL().solve(diff);
  const auto d = static_cast<double>(diff.size());
  return -0.5 * z.squaredNorm() / factor - log_det_half_ - 0.5 * d * std::log(factor) -
         0.5 * d * std::log(2.0 * std::numbers::pi);
}

Vector GaussianStageProposal::draw(int stage, std::span<const PathPoint> history, Rng& rng) const {
  const Vector& x = history.front().x;
  const Vector z = rng.normal_vector(x.size());
  const Vector step = chol_.matrixL() * z;
  return x + std::sqrt(std::pow(stage_scale_, stage - 1)) * step;
}

double log_acceptance(std::span<const PathPoint> path, const Proposal& q) {
  if (path.size() < 2) throw std::invalid_argument("log_acceptance: path needs a current point and a candidate");
  if (!(path.front().log_pi > kNegInf))
    throw DramError(DramErrc::invalid_state, "dram: current point has zero density", path.front().x);
  return log_alpha(path, q);
}

double accept_stage1(const PathPoint& x, const PathPoint& y1, const Proposal& q) {
  const PathPoint path[] = {x, y1};
  return std::exp(log_acceptance(path, q));
}

double accept_stage(std::span<const PathPoint> path, const Proposal& q) {
  return std::exp(log_acceptance(path, q));
}

ChainState initial_chain_state(const TargetDensity& target, const DramConfig& cfg, const Vector& start) {
  cfg.validate();
  if (target.dimension() != cfg.dimension())
    throw DramError(DramErrc::invalid_config, "dram: target and covariance dimensions differ");
  if (static_cast<std::size_t>(start.size()) != cfg.dimension())
    throw DramError(DramErrc::invalid_start, "dram: start point has the wrong dimension", start);
  const Evaluation ev = evaluate_checked(target, start);
  if (!(ev.log_density > kNegInf))
    throw DramError(DramErrc::invalid_start, "dram: start point has zero posterior density", start);
  ChainState s;
  s.x = start;
  s.log_pi = ev.log_density;
  s.derived = ev.derived;
  s.moments = RunningMoments(start.size());
  s.moments.push(start);
  s.covariance = cfg.initial_covariance;
  s.attempted.assign(static_cast<std::size_t>(cfg.n_stages), 0);
  s.accepted.assign(static_cast<std::size_t>(cfg.n_stages), 0);
  return s;
}

int step(ChainState& state, const TargetDensity& target, const DramConfig& cfg, Rng& rng) {
  if (state.attempted.size() != static_cast<std::size_t>(cfg.n_stages)) {
    state.attempted.resize(static_cast<std::size_t>(cfg.n_stages), 0);
    state.accepted.resize(static_cast<std::size_t>(cfg.n_stages), 0);
  }
  const GaussianStageProposal q(state.covariance, cfg.stage_scale);
  std::vector<PathPoint> path;
  path.reserve(static_cast<std::size_t>(cfg.n_stages) + 1);
  path.push_back({state.x, state.log_pi});

  int accepted_stage = 0;
  for (int s = 1; s <= cfg.n_stages; ++s) {
    Vector y = q.draw(s, path, rng);
    Evaluation ev = evaluate_checked(target, y);
    path.push_back({y, ev.log_density});
    const double la = log_acceptance(path, q);
    const double u = rng.uniform();
    ++state.attempted[static_cast<std::size_t>(s - 1)];
    if (std::log(u) < la) {
      ++state.accepted[static_cast<std::size_t>(s - 1)];
      state.x = std::move(y);
      state.log_pi = ev.log_density;
      state.derived = std::move(ev.derived);
      accepted_stage = s;
      break;
    }
  }

  bool repaired = false;
  state.covariance = covariance_update(state, cfg, &repaired);
  if (repaired) ++state.covariance_repairs;
  state.moments.push(state.x);
  ++state.step;
  return accepted_stage;
}

namespace {

SampleRecord record_of(const ChainState& s, int stage) {
  return SampleRecord{s.step, s.x, s.log_pi, stage, s.derived};
}

}  // namespace

void extend_chain(ChainResult& chain, const TargetDensity& target, const DramConfig& cfg,
                  std::size_t count, const SampleObserver& observer) {
  chain.samples.reserve(chain.samples.size() + count);
  for (std::size_t i = 0; i < count; ++i) {
    const int stage = step(chain.final_state, target, cfg, chain.rng);
    chain.samples.push_back(record_of(chain.final_state, stage));
    if (observer) observer(chain.samples.back());
    if (cfg.checkpoint_every != 0 && chain.final_state.step % cfg.checkpoint_every == 0)
      chain.checkpoints.push_back({chain.final_state.step, chain.final_state.covariance});
  }
}

ChainResult run_chain(const TargetDensity& target, const DramConfig& cfg, const Vector& start,
                      const SampleObserver& observer) {
  ChainResult out{{}, {}, initial_chain_state(target, cfg, start), Rng(cfg.seed)};
  if (cfg.n_samples == 0) return out;
  out.samples.push_back(record_of(out.final_state, 0));
  if (observer) observer(out.samples.back());
  extend_chain(out, target, cfg, cfg.n_samples - 1, observer);
  return out;
}

std::vector<ChainResult> run_chains(const TargetDensity& target, const DramConfig& cfg,
                                    const Vector& start, std::span<const std::uint64_t> seeds) {
  std::vector<std::future<ChainResult>> jobs;
  jobs.reserve(seeds.size());
  for (const auto seed : seeds) {
    DramConfig c = cfg;
    c.seed = seed;
    jobs.push_back(std::async(std::launch::async, [&target, c, &start] { return run_chain(target, c, start); }));
  }
  std::vector<ChainResult> out;
  out.reserve(jobs.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

std::string serialize(const ChainState& s) {
  json j;
  j["step"] = s.step;
  j["x"] = vector_to_json(s.x);
  j["log_pi"] = s.log_pi;
  j["derived"] = s.derived;
  j["count"] = s.moments.count();
  j["mean"] = vector_to_json(s.moments.mean());
  j["scatter"] = matrix_to_json(s.moments.scatter());
  j["covariance"] = matrix_to_json(s.covariance);
  j["attempted"] = s.attempted;
  j["accepted"] = s.accepted;
  j["covariance_repairs"] = s.covariance_repairs;
  return j.dump();
}

ChainState deserialize_state(const std::string& text) {
  try {
    const json j = json::parse(text);
    ChainState s;
    s.step = j.at("step").get<std::size_t>();
    s.x = vector_from_json(j.at("x"));
    s.log_pi = j.at("log_pi").get<double>();
    s.derived = j.at("derived").get<std::vector<double>>();
    s.moments = RunningMoments::restore(j.at("count").get<std::size_t>(), vector_from_json(j.at("mean")),
                                        matrix_from_json(j.at("scatter")));
    s.covariance = matrix_from_json(j.at("covariance"));
    s.attempted = j.at("attempted").get<std::vector<std::size_t>>();
    s.accepted = j.at("accepted").get<std::vector<std::size_t>>();
    s.covariance_repairs = j.at("covariance_repairs").get<std::size_t>();
    return s;
  } catch (const json::exception& e) {
    throw DramError(DramErrc::invalid_state, std::string("dram: malformed chain state: ") + e.what());
  }
}

}  // namespace hxdram::dram
