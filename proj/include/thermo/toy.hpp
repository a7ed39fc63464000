#pragma once

#include "thermo/core.hpp"
#include "thermo/thermomaj.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <vector>

namespace thermo::toy {

// Flow dx/dt = -B x on the simplex.
class ToyGenerator {
 public:
  enum class Source { Ladder, Custom };

  explicit ToyGenerator(const RealMatrix& b, double tol = 1e-9);

  const RealMatrix& b() const { return b_; }
  const ProbVector& fixed_point() const { return d_; }
  Source source() const { return source_; }
  // Ladder parameter a = exp(-dE/T); NaN for custom generators.
  double a() const { return a_; }
  int dim() const { return static_cast<int>(b_.rows()); }

  // pi B pi^{-1}
  ToyGenerator permuted(const Permutation& p) const;
  // Average of pi B pi^{-1} over all permutations.
  ToyGenerator symmetrized() const;

 private:
  friend ToyGenerator toy_generator_ladder(double a, int n);
  RealMatrix b_;
  ProbVector d_;
  Source source_ = Source::Custom;
  double a_;
};

ToyGenerator toy_generator_ladder(double a, int n);

// exp(-t B), through a symmetrised eigendecomposition when B satisfies
// detailed balance and cached scaling-and-squaring otherwise.
class FlowPropagator {
 public:
  explicit FlowPropagator(const ToyGenerator& g);
  RealMatrix matrix(double t) const;
  RealVector apply(double t, const RealVector& x) const;
  bool spectral() const { return spectral_; }

 private:
  RealMatrix b_;
  bool spectral_ = false;
  RealVector sqrt_d_, lambda_;
  RealMatrix q_;
  mutable std::map<double, RealMatrix> cache_;
};

struct Segment {
  Permutation perm;
  double dt;
};

using Schedule = std::vector<Segment>;

void validate_schedule(const Schedule& s, int n);

struct TrajectoryPoint {
  double t;
  ProbVector x;
};

using Trajectory = std::vector<TrajectoryPoint>;

struct SimulateOptions {
  double step = 0.01;
  // Free flow appended after the schedule.
  double tail = 0;
};

Trajectory simulate(const ProbVector& x0, const ToyGenerator& g, const Schedule& s, const SimulateOptions& opt = {});

// Schedules with Exp(mean) durations, uniform permutations and a
// geometric(stop) number of segments (at least one).
struct ScheduleSampler {
  double mean_duration = 1.0;
  double stop_probability = 0.2;
  Schedule draw(int n, std::mt19937_64& rng) const;
};

// Independent stream for trajectory `index` of a run seeded with `seed`.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

// Minimiser of ||z - d||_1 over {z : x0 < z, z and z/d ordered like d}; ties
// broken toward the max corner of M_d(x0).
ProbVector ordered_past_cone_z(const ProbVector& x0, const GibbsVector& d);

// conv{pi(z)}, the classical majorisation polytope of z.
class ReachBound {
 public:
  explicit ReachBound(const ProbVector& z);
  const ProbVector& z() const { return z_; }
  const std::vector<RealVector>& vertices() const { return vertices_; }
  const thermomaj::MajPolytope& halfspaces() const { return poly_; }
  bool contains(const RealVector& x, double tol = 1e-9) const;
  double slack(const RealVector& x) const;

 private:
  ProbVector z_;
  std::vector<RealVector> vertices_;
  thermomaj::MajPolytope poly_;
};

ReachBound reach_bound(const ProbVector& x0, const ToyGenerator& g);

struct InwardReport {
  bool ok = false;
  double worst = 0;  // largest m^T v over active normals m and velocities v
};

InwardReport vectorfield_inward_check(const ProbVector& z, const ToyGenerator& g, double tol = 1e-9);

struct CloudOptions {
  std::size_t trajectories = 1000;
  std::uint64_t seed = 1;
  double step = 0.01;
  ScheduleSampler sampler;
};

struct ContainmentStats {
  std::size_t trajectories = 0;
  std::size_t samples = 0;
  double min_slack = kInf;
};

// Runs random schedules in SIMD batches and records the smallest slack of
// every dense sample against the bound.
ContainmentStats containment_sweep(const ProbVector& x0, const ToyGenerator& g, const ReachBound& bound,
                                   const CloudOptions& opt);

// End points (and optionally dense samples) of random-schedule trajectories.
std::vector<RealVector> reach_cloud(const ProbVector& x0, const ToyGenerator& g, const CloudOptions& opt,
                                    bool dense = false);

// One-step-lookahead greedy control toward a target; returns the schedule and
// the final distance in 1-norm.
struct GreedyResult {
  Schedule schedule;
  RealVector final_state;
  double distance = 0;
};

GreedyResult greedy_schedule(const ProbVector& x0, const RealVector& target, const ToyGenerator& g,
                             int max_segments = 200);

}  // namespace thermo::toy
