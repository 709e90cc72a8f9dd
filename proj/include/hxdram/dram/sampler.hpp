#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hxdram/dram/rng.hpp"

// Delayed-rejection adaptive Metropolis over R^d.
namespace hxdram::dram {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

enum class DramErrc { invalid_config, invalid_state, invalid_start, target_failure };

class DramError : public std::runtime_error {
 public:
  DramError(DramErrc code, const std::string& what, Vector point = {})
      : std::runtime_error(what), code_(code), point_(std::move(point)) {}
  DramErrc code() const noexcept { return code_; }
  // Point being evaluated when the error occurred, if any.
  const Vector& point() const noexcept { return point_; }

 private:
  DramErrc code_;
  Vector point_;
};

// Log density plus any per-point quantities the caller wants recorded with
// the sample. -inf marks points outside the support.
struct Evaluation {
  double log_density = kNegInf;
  std::vector<double> derived;
};

// Must be deterministic and safe to call concurrently.
class TargetDensity {
 public:
  virtual ~TargetDensity() = default;
  virtual std::size_t dimension() const = 0;
  virtual Evaluation evaluate(const Vector& x) const = 0;
};

class FunctionTarget final : public TargetDensity {
 public:
  using LogDensity = std::function<double(const Vector&)>;
  FunctionTarget(std::size_t dim, LogDensity f) : dim_(dim), f_(std::move(f)) {}
  std::size_t dimension() const override { return dim_; }
  Evaluation evaluate(const Vector& x) const override { return {f_(x), {}}; }

 private:
  std::size_t dim_;
  LogDensity f_;
};

struct DramConfig {
  Matrix initial_covariance;  // C_0, symmetric positive definite
  // Steps before adaptation starts; nullopt disables adaptation entirely.
  std::optional<std::size_t> adaptation_start = 1000;
  std::optional<double> scale;    // s_d, default 2.4^2 / d
  std::optional<double> epsilon;  // default 1e-10 * mean diagonal of C_0
  int n_stages = 2;
  double stage_scale = 0.25;  // covariance shrink per delayed-rejection stage
  std::uint64_t seed = 1;
  std::size_t n_samples = 0;
  std::size_t checkpoint_every = 1000;  // 0 disables covariance checkpoints

  std::size_t dimension() const { return static_cast<std::size_t>(initial_covariance.rows()); }
  double scale_value() const;
  double epsilon_value() const;
  // Throws DramError(invalid_config).
  void validate() const;
};

// Running mean and unbiased covariance, updated one point at a time.
class RunningMoments {
 public:
  explicit RunningMoments(Eigen::Index d = 0) : mean_(Vector::Zero(d)), scatter_(Matrix::Zero(d, d)) {}

  void push(const Vector& x);
  std::size_t count() const { return count_; }
  const Vector& mean() const { return mean_; }
  // Sum of outer products of deviations from the mean.
  const Matrix& scatter() const { return scatter_; }
  // Divisor count - 1; zero matrix for fewer than two points.
  Matrix covariance() const;

  static RunningMoments restore(std::size_t count, Vector mean, Matrix scatter);

 private:
  std::size_t count_ = 0;
  Vector mean_;
  Matrix scatter_;
};

struct ChainState {
  std::size_t step = 0;  // n
  Vector x;              // X_n
  double log_pi = kNegInf;
  std::vector<double> derived;
  RunningMoments moments;  // over X_0 .. X_n
  Matrix covariance;       // C_n, used to propose from X_n
  std::vector<std::size_t> attempted;  // per delayed-rejection stage
  std::vector<std::size_t> accepted;
  std::size_t covariance_repairs = 0;
};

std::string serialize(const ChainState& s);
ChainState deserialize_state(const std::string& text);

// Proposal covariance for step n + 1, given a state whose moments cover
// X_0 .. X_n. Returns C_0 while n + 1 <= n_0, else s_d Cov(X_0..X_n) + s_d eps I.
// `repaired` is set when extra eps I had to be added to restore definiteness.
Matrix covariance_update(const ChainState& state, const DramConfig& cfg, bool* repaired = nullptr);

struct PathPoint {
  Vector x;
  double log_pi = kNegInf;
};

// Stage-wise proposal family. Stage i (1-based) proposes the last point of a
// path given the points before it.
class Proposal {
 public:
  virtual ~Proposal() = default;
  virtual double log_density(int stage, std::span<const PathPoint> history, const Vector& candidate) const = 0;
  virtual Vector draw(int stage, std::span<const PathPoint> history, Rng& rng) const = 0;
};

// Stage i draws from N(x, C * stage_scale^(i-1)) around the current point x.
class GaussianStageProposal final : public Proposal {
 public:
  GaussianStageProposal(const Matrix& covariance, double stage_scale);

  double log_density(int stage, std::span<const PathPoint> history, const Vector& candidate) const override;
  Vector draw(int stage, std::span<const PathPoint> history, Rng& rng) const override;

 private:
  Eigen::LLT<Matrix> chol_;
  double stage_scale_;
  double log_det_half_ = 0.0;  // sum log diag(L)
};

// log of the delayed-rejection acceptance probability for the last point of
// `path` = (x, y_1, ..., y_k). Stage 1 is the Metropolis-Hastings ratio;
// later stages use the reversed-path ratio N_k / D_k. Returns a value in
// [-inf, 0]; -inf when the stage cannot be reached or the candidate has zero
// density.
double log_acceptance(std::span<const PathPoint> path, const Proposal& q);

// Convenience wrappers returning alpha itself.
double accept_stage1(const PathPoint& x, const PathPoint& y1, const Proposal& q);
double accept_stage(std::span<const PathPoint> path, const Proposal& q);

struct SampleRecord {
  std::size_t step = 0;
  Vector x;
  double log_pi = kNegInf;
  int stage = 0;  // accepting stage, 0 when the chain stayed put
  std::vector<double> derived;
};

struct CovarianceCheckpoint {
  std::size_t step = 0;
  Matrix covariance;
};

ChainState initial_chain_state(const TargetDensity& target, const DramConfig& cfg, const Vector& start);

// One DRAM transition. Consumes, per stage attempted, d standard normals
// then one uniform. Returns the accepting stage (0 if none).
int step(ChainState& state, const TargetDensity& target, const DramConfig& cfg, Rng& rng);

struct ChainResult {
  std::vector<SampleRecord> samples;
  std::vector<CovarianceCheckpoint> checkpoints;
  ChainState final_state;
  Rng rng;
};

using SampleObserver = std::function<void(const SampleRecord&)>;

// n_samples records X_0 .. X_{n_samples-1}; X_0 is `start`.
ChainResult run_chain(const TargetDensity& target, const DramConfig& cfg, const Vector& start,
                      const SampleObserver& observer = {});

// Appends `count` further steps to `chain`.
void extend_chain(ChainResult& chain, const TargetDensity& target, const DramConfig& cfg,
                  std::size_t count, const SampleObserver& observer = {});

// Independent chains on worker threads, one per seed.
std::vector<ChainResult> run_chains(const TargetDensity& target, const DramConfig& cfg,
                                    const Vector& start, std::span<const std::uint64_t> seeds);

}  // namespace hxdram::dram
