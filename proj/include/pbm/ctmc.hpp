#pragma once

// The continuous-time rho_nu-Markov process on P_[n]^(k).
//
// Two drivers produce the same law: simulate_embedded runs the jump chain
// with exponential holds, simulate_poissonian applies the matrix construction
// at the atoms of a rate-lambda Poisson process and records only the events
// that change the state.

#include <Eigen/Dense>

#include <algorithm>
#include <iterator>
#include <cmath>
#include <utility>
#include <vector>

#include "pbm/equilibrium.hpp"
#include "pbm/errors.hpp"
#include "pbm/kernel.hpp"
#include "pbm/paintbox.hpp"
#include "pbm/partition.hpp"
#include "pbm/rng.hpp"
#include "pbm/state_space.hpp"

namespace pbm {

// Q_n = lambda (P_n - I).
struct RateMatrix {
  StateSpace space;
  Eigen::MatrixXd rates;
  double lambda = 1.0;

  int n() const { return space.n(); }
  int k() const { return space.k(); }
  std::size_t size() const { return space.size(); }
  std::size_t index_of(const SetPartition& b) const { return space.index_of(b); }
};

inline RateMatrix build_rate_matrix(const TransitionKernel& kernel, double lambda) {
  if (!(lambda > 0.0)) throw domain_error("build_rate_matrix: lambda must be positive");
  const auto size = static_cast<Eigen::Index>(kernel.size());
  return {kernel.space, lambda * (kernel.probs - Eigen::MatrixXd::Identity(size, size)), lambda};
}

// A cadlag path on [0, horizon]: the initial state and its effective jumps.
struct Trajectory {
  using Point = std::pair<double, SetPartition>;

  SetPartition initial;
  std::vector<Point> jumps;
  // Every Poisson event including self-transitions; filled only on request.
  std::vector<Point> events;

  const SetPartition& state_at(double t) const {
    auto it = std::upper_bound(jumps.begin(), jumps.end(), t,
                               [](double x, const Point& p) { return x < p.first; });
    return it == jumps.begin() ? initial : std::prev(it)->second;
  }
};

// Hold at B ~ Exponential(lambda (1 - p(B,B))), then jump to B' != B with
// probability p(B,B') / (1 - p(B,B)). States with zero exit rate hold forever.
inline Trajectory simulate_embedded(const SetPartition& start, const RateMatrix& q, double horizon, RngStream& rng) {
  Trajectory path{start, {}, {}};
  auto current = static_cast<Eigen::Index>(q.index_of(start));
  const auto size = static_cast<Eigen::Index>(q.size());
  std::vector<double> weights(static_cast<std::size_t>(size));
  double t = 0.0;
  while (true) {
    const double exit_rate = -q.rates(current, current);
    if (!(exit_rate > 0.0)) break;
    t += rng.exponential(exit_rate);
    if (t > horizon) break;
    for (Eigen::Index j = 0; j < size; ++j) weights[j] = (j == current) ? 0.0 : std::max(q.rates(current, j), 0.0);
    current = static_cast<Eigen::Index>(rng.categorical(weights));
    path.jumps.emplace_back(t, q.space[static_cast<std::size_t>(current)]);
  }
  return path;
}

// One atom (t, C_1, ..., C_k) of the driving Poisson process together with
// the permutations sigma_1, ..., sigma_k. rows[i] holds the restricted growth
// labels of C_i over the window [n].
struct PoissonEvent {
  double time;
  std::vector<std::vector<int>> rows;
  BlockPermutationDraw draw;
};

struct EventStream {
  int n = 0;
  int k = 0;
  double horizon = 0.0;
  std::vector<PoissonEvent> events;
};

// Rate-lambda event times on (0, horizon], each carrying k independent rho_nu
// paintboxes of [n] and k uniform permutations. lambda = 0 gives no events.
inline EventStream generate_event_stream(const NuMeasure& nu, int n, int k, double lambda, double horizon,
                                         RngStream& rng) {
  if (lambda < 0.0) throw domain_error("event stream: lambda must be nonnegative");
  if (nu.dimension() > k) throw dimension_error("event stream: nu is not supported on the ranked k-simplex");
  EventStream stream{n, k, horizon, {}};
  if (lambda == 0.0) return stream;
  double t = rng.exponential(lambda);
  while (t <= horizon) {
    PoissonEvent ev{t, {}, {}};
    ev.rows.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) ev.rows.push_back(paintbox_sample_nu(nu, n, rng).labels());
    ev.draw = BlockPermutationDraw::sample(k, k, rng);
    stream.events.push_back(std::move(ev));
    t += rng.exponential(lambda);
  }
  return stream;
}

// Runs the matrix construction at every event of the stream.
inline Trajectory drive(const SetPartition& start, const EventStream& stream, bool log_events = false) {
  if (start.size() != stream.n) throw dimension_error("drive: start state is not over the event window");
  Trajectory path{start, {}, {}};
  SetPartition state = start;
  for (const auto& ev : stream.events) {
    auto next = matrix_construction(state, ev.rows, ev.draw, stream.k).next;
    if (log_events) path.events.emplace_back(ev.time, next);
    if (next != state) {
      path.jumps.emplace_back(ev.time, next);
      state = std::move(next);
    }
  }
  return path;
}

inline Trajectory simulate_poissonian(const SetPartition& start, const NuMeasure& nu, int k, double lambda,
                                      double horizon, RngStream& rng, bool log_events = false) {
  if (start.block_count() > k) throw state_error("simulate_poissonian: start has more than k blocks");
  const auto stream = generate_event_stream(nu, start.size(), k, lambda, horizon, rng);
  return drive(start, stream, log_events);
}

// Two paths driven by one shared event stream; both carry full event logs.
inline std::pair<Trajectory, Trajectory> coupled_pair(const SetPartition& a, const SetPartition& b,
                                                      const NuMeasure& nu, int k, double lambda, double horizon,
                                                      RngStream& rng) {
  if (a.size() != b.size()) throw dimension_error("coupled_pair: starts over different ground sets");
  if (a.block_count() > k || b.block_count() > k) throw state_error("coupled_pair: start has more than k blocks");
  const auto stream = generate_event_stream(nu, a.size(), k, lambda, horizon, rng);
  return {drive(a, stream, true), drive(b, stream, true)};
}

// Consistency of Q_n with Q_{n+1}, diagonal entries included.
inline double check_rate_consistency(int n, const ChainModel& model, double lambda) {
  const auto lower = build_rate_matrix(build_kernel(n, model), lambda);
  const auto upper = build_rate_matrix(build_kernel(n + 1, model), lambda);
  return consistency_defect(lower.space, lower.rates, upper.space, upper.rates);
}

inline double check_rate_consistency(int n, int k, const NuMeasure& nu, double lambda) {
  return check_rate_consistency(n, ChainModel::paintbox(nu, k), lambda);
}

// || theta^T Q ||_inf.
inline double generator_residual(const StationaryDistribution& theta, const RateMatrix& q) {
  const Eigen::Map<const Eigen::RowVectorXd> t(theta.weights.data(), static_cast<Eigen::Index>(theta.size()));
  return (t * q.rates).cwiseAbs().maxCoeff();
}

// Row `start` of exp(tQ) by uniformization: exp(tQ) = sum_m Pois(m; lambda t) P^m,
// applied in slices of lambda dt <= 16 to keep the Poisson weights representable.
inline std::vector<double> transient_distribution(const RateMatrix& q, std::size_t start, double t) {
  const auto size = static_cast<Eigen::Index>(q.size());
  const Eigen::MatrixXd p = Eigen::MatrixXd::Identity(size, size) + q.rates / q.lambda;
  Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(size);
  mu(static_cast<Eigen::Index>(start)) = 1.0;
  const int slices = std::max(1, static_cast<int>(std::ceil(q.lambda * t / 16.0)));
  const double rate = q.lambda * t / slices;
  for (int s = 0; s < slices; ++s) {
    Eigen::RowVectorXd term = mu;
    double weight = std::exp(-rate);
    Eigen::RowVectorXd acc = weight * term;
    for (int m = 1; m <= rate || weight > 1e-20; ++m) {
      term = term * p;
      weight *= rate / m;
      acc += weight * term;
    }
    mu = acc;
  }
  return {mu.data(), mu.data() + size};
}

}  // namespace pbm
