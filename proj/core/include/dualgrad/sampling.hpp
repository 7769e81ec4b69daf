#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "dualgrad/grid.hpp"

namespace dualgrad {

/// Additive Gaussian noise, either with an absolute per-node standard
/// deviation or relative to max|y_exact|. Levels below 1e-200 are treated as
/// exact data (no perturbation, zero sample deviation).
struct NoiseModel {
  double sigma = 0.0;      // absolute per-node standard deviation
  double sigma_rel = 0.0;  // fraction of max|y_exact|; takes precedence when > 0

  double resolve(const Eigen::VectorXd& y_exact) const;
};

/// splitmix64 step; the basis of all seed derivation.
std::uint64_t splitmix64(std::uint64_t& state);

/// Stable derived seed for a substream (n index, simulation index, ...).
/// Changing this function changes every seeded result in the project.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t k0, std::uint64_t k1 = 0);

/// Standard normal variates via the Marsaglia polar method on top of
/// mt19937_64, so sequences are identical across platforms for a given seed.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}

  double operator()();

 private:
  double uniform() {  // [0, 1) with 53 random bits
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// n repeated measurements of one exact datum: their average, their sample
/// deviation, and (optionally) the samples themselves. The average and the
/// sample deviation are accumulated in a streaming fashion, so large n does
/// not require storing samples.
class MeasurementEnsemble {
 public:
  MeasurementEnsemble(Space space, Eigen::VectorXd mean, double sample_std, long n,
                      double sigma, std::vector<Eigen::VectorXd> samples = {});

  /// Recomputes the average and deviation from explicit samples (two-pass).
  static MeasurementEnsemble from_samples(Space space, std::vector<Eigen::VectorXd> samples,
                                          double sigma = 0.0);

  const Space& space() const { return space_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  long count() const { return n_; }
  double sigma() const { return sigma_; }
  double sample_std() const;  // throws std::domain_error when n < 2
  const std::vector<Eigen::VectorXd>& samples() const { return samples_; }

 private:
  Space space_;
  Eigen::VectorXd mean_;
  double sample_std_ = 0.0;
  long n_ = 0;
  double sigma_ = 0.0;
  std::vector<Eigen::VectorXd> samples_;
};

/// y_i = y_exact + eps_i with i.i.d. per-node Gaussian noise, deterministic
/// for a given seed (equal seeds give bitwise-equal ensembles).
MeasurementEnsemble generate_ensemble(const Space& space, const Eigen::VectorXd& y_exact,
                                      const NoiseModel& noise, long n, std::uint64_t seed,
                                      bool store_samples = false);

inline Eigen::VectorXd average(const MeasurementEnsemble& e) { return e.mean(); }
inline double sample_std(const MeasurementEnsemble& e) { return e.sample_std(); }

}  // namespace dualgrad
