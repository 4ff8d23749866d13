#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cpgc/decoder.hpp"
#include "cpgc/schedule.hpp"
#include "cpgc/simulate.hpp"
#include "cpgc/straggler.hpp"

namespace cpgc {

// Least-squares instance with its Gram matrix split into M row blocks.
// The per-iteration distributed task is computing the block products
// W_i * theta; everything else stays on the master.
struct RegressionProblem {
  Eigen::MatrixXd X;  // samples x dim
  Eigen::VectorXd y;
  Eigen::MatrixXd W;  // X^T X
  Eigen::VectorXd b;  // X^T y
  int num_blocks = 1;

  int dim() const { return static_cast<int>(W.rows()); }
  int samples() const { return static_cast<int>(X.rows()); }
  int block_rows() const { return dim() / num_blocks; }

  Eigen::Block<const Eigen::MatrixXd> block(int i) const {
    return W.middleRows(i * block_rows(), block_rows());
  }
  Eigen::VectorBlock<const Eigen::VectorXd> b_block(int i) const {
    return b.segment(i * block_rows(), block_rows());
  }
};

inline RegressionProblem make_synthetic_problem(int samples, int dim, int num_blocks,
                                                double noise, std::uint64_t seed) {
  if (samples < 1 || dim < 1 || num_blocks < 1 || dim % num_blocks != 0)
    throw std::invalid_argument("synthetic problem needs num_blocks dividing dim");
  std::mt19937_64 rng(mix64(seed));
  std::normal_distribution<double> gauss(0.0, 1.0);
  RegressionProblem p;
  p.num_blocks = num_blocks;
  p.X.resize(samples, dim);
  for (int i = 0; i < samples; ++i)
    for (int j = 0; j < dim; ++j) p.X(i, j) = gauss(rng);
  Eigen::VectorXd theta_star(dim);
  for (int j = 0; j < dim; ++j) theta_star[j] = gauss(rng);
  p.y = p.X * theta_star;
  for (int i = 0; i < samples; ++i) p.y[i] += noise * gauss(rng);
  p.W = p.X.transpose() * p.X;
  p.b = p.X.transpose() * p.y;
  return p;
}

inline double loss(const RegressionProblem& p, const Eigen::VectorXd& theta) {
  return (p.y - p.X * theta).squaredNorm() / (2.0 * p.samples());
}

inline Eigen::VectorXd full_gradient(const RegressionProblem& p, const Eigen::VectorXd& theta) {
  return (p.W * theta - p.b) / static_cast<double>(p.samples());
}

// Ground-truth per-block products W_i * theta; the oracle that decoded
// values are checked against.
inline std::vector<Eigen::VectorXd> block_products(const RegressionProblem& p,
                                                   const Eigen::VectorXd& theta) {
  if (theta.size() != p.dim()) throw std::invalid_argument("theta dimension mismatch");
  std::vector<Eigen::VectorXd> out(p.num_blocks);
  for (int i = 0; i < p.num_blocks; ++i) out[i] = p.block(i) * theta;
  return out;
}

struct GDState {
  Eigen::VectorXd theta;
  int iteration = 0;
  double learning_rate = 0.0;
  std::vector<double> loss_history;
};

inline GDState make_gd_state(const RegressionProblem& p, double learning_rate) {
  GDState s;
  s.theta = Eigen::VectorXd::Zero(p.dim());
  s.learning_rate = learning_rate;
  return s;
}

// Power-iteration estimate of the largest eigenvalue of W / samples; the
// default step size is its reciprocal.
inline double estimate_lipschitz(const RegressionProblem& p, int iters = 200,
                                 std::uint64_t seed = 7) {
  std::mt19937_64 rng(mix64(seed));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(p.dim());
  for (int j = 0; j < p.dim(); ++j) v[j] = gauss(rng);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    Eigen::VectorXd w = p.W * v / static_cast<double>(p.samples());
    lambda = v.dot(w);
    const double n = w.norm();
    if (n == 0.0) return 0.0;
    v = w / n;
  }
  return lambda;
}

inline double default_step_size(const RegressionProblem& p) {
  const double lambda = estimate_lipschitz(p);
  if (lambda <= 0.0) throw std::runtime_error("could not estimate a step size");
  return 1.0 / lambda;
}

// One partial-gradient update. Blocks absent from `recovered` contribute
// zero to the step; values[i] must hold W_i * theta for each recovered i.
inline GDState gd_step(GDState state, const std::vector<int>& recovered,
                       const std::vector<Eigen::VectorXd>& values,
                       const RegressionProblem& p) {
  const int h = p.block_rows();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(p.dim());
  for (std::size_t k = 0; k < recovered.size(); ++k) {
    const int i = recovered[k];
    if (i < 0 || i >= p.num_blocks) throw std::invalid_argument("recovered block out of range");
    g.segment(i * h, h) = (values[k] - p.b_block(i)) / static_cast<double>(p.samples());
  }
  state.theta -= state.learning_rate * g;
  ++state.iteration;
  state.loss_history.push_back(loss(p, state.theta));
  return state;
}

// Same update fed by exact block products rather than decoded results.
inline GDState gd_step(GDState state, const std::vector<int>& recovered,
                       const RegressionProblem& p) {
  const auto products = block_products(p, state.theta);
  std::vector<Eigen::VectorXd> values;
  values.reserve(recovered.size());
  for (int i : recovered) {
    if (i < 0 || i >= p.num_blocks) throw std::invalid_argument("recovered block out of range");
    values.push_back(products[i]);
  }
  return gd_step(std::move(state), recovered, values, p);
}

struct GDIterationRecord {
  double completion_time = 0.0;
  long long messages = 0;
  int recovered = 0;
  double loss = 0.0;
  double max_decode_rel_err = 0.0;  // decoded vs. directly computed block products
};

struct GDRunResult {
  GDState state;
  std::vector<GDIterationRecord> iterations;
};

struct GDRunConfig {
  Scheme scheme = Scheme::cpgc;
  Delivery mode = Delivery::multi_message;
  StragglerParams params;
  double tolerance_rate = 0.0;
  std::uint64_t master_seed = 1;
  MdsPoints points = MdsPoints::linear;
};

// Distributed GD loop: per iteration, sample straggler times, replay result
// arrivals until the block threshold is met, decode the recovered block
// products exactly, and update theta with the partial gradient. Stragglers
// are redrawn each iteration.
inline GDRunResult run_gd(const RegressionProblem& p, const GDRunConfig& cfg, int num_workers,
                          int load, int iterations, double eta = 0.0) {
  SimConfig sim;
  sim.scheme = cfg.scheme;
  sim.num_blocks = p.num_blocks;
  sim.num_workers = num_workers;
  sim.load = load;
  sim.params = cfg.params;
  sim.tolerance_rate = cfg.tolerance_rate;
  sim.mode = cfg.mode;
  sim.points = cfg.points;
  const ScheduleMatrix S = sim.build();
  const int required = sim.required_blocks();
  const int K = S.cols();
  const int r = S.rows();

  GDRunResult result;
  result.state = make_gd_state(p, eta > 0.0 ? eta : default_step_size(p));

  for (int iter = 0; iter < iterations; ++iter) {
    auto rng = make_trial_rng(cfg.master_seed, static_cast<std::uint64_t>(iter));
    std::vector<std::vector<double>> times(K);
    for (int j = 0; j < K; ++j) times[j] = sample_completion_times(r, cfg.params, rng);

    const auto products = block_products(p, result.state.theta);
    auto task_result = [&](const Codeword& cw) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(p.block_rows());
      for (const Term& t : cw.terms)
        if (t.block < p.num_blocks)  // virtual padded blocks are zero
          v += static_cast<double>(t.coeff) * products[t.block];
      return v;
    };

    std::vector<detail::Arrival> arrivals;
    if (cfg.mode == Delivery::multi_message) {
      for (int j = 0; j < K; ++j)
        for (int i = 0; i < r; ++i) arrivals.push_back({times[j][i], j, i});
    } else {
      for (int j = 0; j < K; ++j) arrivals.push_back({times[j][r - 1], j, 0});
    }
    std::sort(arrivals.begin(), arrivals.end());

    IncrementalDecoder dec(p.num_blocks, S.num_virtual(), /*track_combinations=*/true);
    std::vector<Eigen::VectorXd> received;
    GDIterationRecord rec;
    const int tasks_per_message = cfg.mode == Delivery::multi_message ? 1 : r;
    bool done = required == 0;
    for (const detail::Arrival& a : arrivals) {
      if (done) break;
      for (int i = 0; i < tasks_per_message; ++i) {
        const Codeword& cw =
            S.cell(cfg.mode == Delivery::multi_message ? a.task : i, a.worker);
        dec.add(cw);
        received.push_back(task_result(cw));
      }
      ++rec.messages;
      if (dec.recovered_count() >= required) {
        rec.completion_time = a.time;
        done = true;
      }
    }
    if (!done) throw std::runtime_error("recovery threshold unreachable in gd iteration");

    const auto blocks = dec.recovered_blocks();
    std::vector<Eigen::VectorXd> values;
    values.reserve(blocks.size());
    for (int bi : blocks) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(p.block_rows());
      for (const auto& [input, coeff] : dec.solution(bi))
        v += coeff.convert_to<double>() * received[input];
      const double scale = std::max(products[bi].norm(), 1e-300);
      rec.max_decode_rel_err =
          std::max(rec.max_decode_rel_err, (v - products[bi]).norm() / scale);
      values.push_back(std::move(v));
    }
    rec.recovered = static_cast<int>(blocks.size());

    result.state = gd_step(std::move(result.state), blocks, values, p);
    rec.loss = result.state.loss_history.back();
    result.iterations.push_back(rec);
  }
  return result;
}

// Reference trajectory: plain full-gradient descent on the master.
inline GDState centralized_gd(const RegressionProblem& p, int iterations, double eta = 0.0) {
  GDState s = make_gd_state(p, eta > 0.0 ? eta : default_step_size(p));
  for (int it = 0; it < iterations; ++it) {
    s.theta -= s.learning_rate * full_gradient(p, s.theta);
    ++s.iteration;
    s.loss_history.push_back(loss(p, s.theta));
  }
  return s;
}

}  // namespace cpgc
