#pragma once

// Verification suites over a (n, k, nu) grid point. Each suite reports its
// largest defect against a tolerance from one of three error classes:
// algebraic identities, linear solves, Monte Carlo standard errors.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>
#include <iomanip>
#include <sstream>

#include "pbm/ctmc.hpp"
#include "pbm/equilibrium.hpp"
#include "pbm/kernel.hpp"
#include "pbm/partition.hpp"
#include "pbm/rng.hpp"
#include "pbm/stats.hpp"

namespace pbm {

struct Tolerances {
  double algebraic = 1e-10;
  double solve = 1e-8;
  double standard_errors = 4.0;
};

enum class SuiteStatus { pass, fail, skipped };

struct SuiteResult {
  std::string name;
  double defect = 0.0;
  double tolerance = 0.0;
  SuiteStatus status = SuiteStatus::pass;
  std::string note;
};

struct VerifyConfig {
  int n = 4;
  ChainModel model = ChainModel::alpha_k(1.0, 2);
  double lambda = 1.0;
  std::uint64_t seed = kDefaultSeed;
  std::size_t replicates = 20000;
  std::size_t coupling_runs = 1000;
  double time = 1.0;
  Tolerances tol;
};

namespace detail {

inline SuiteResult judge(std::string name, double defect, double tolerance, std::string note = {}) {
  return {std::move(name), defect, tolerance, defect <= tolerance ? SuiteStatus::pass : SuiteStatus::fail,
          std::move(note)};
}

inline SuiteResult skipped(std::string name, std::string note) {
  return {std::move(name), 0.0, 0.0, SuiteStatus::skipped, std::move(note)};
}

inline bool has_pd_nu(const ChainModel& model) { return !model.nu().is_discrete(); }

// Relative agreement of the alpha-permanent closed form with the general formula.
inline double closed_form_defect(int n, double alpha, int k) {
  const auto states = enumerate(n, k);
  const auto nu = NuMeasure::pitman_dirichlet(alpha, k);
  RhoCache rho(nu);
  double worst = 0.0;
  for (const auto& a : states)
    for (const auto& b : states) {
      const double general = transition_exact(a, b, rho, k);
      const double closed = transition_alpha_k(a, b, alpha, k);
      worst = std::max(worst, std::abs(general - closed) / std::max(std::abs(general), 1e-300));
    }
  return worst;
}

}  // namespace detail

inline std::vector<SuiteResult> kernel_suites(const VerifyConfig& cfg) {
  std::vector<SuiteResult> out;
  double row_sum = 0.0;
  double consistency = 0.0;
  for (int m = 1; m <= cfg.n; ++m) {
    row_sum = std::max(row_sum, max_row_sum_defect(build_kernel(m, cfg.model)));
    consistency = std::max(consistency, check_consistency(m, cfg.model));
  }
  out.push_back(detail::judge("kernel row sums", row_sum, cfg.tol.algebraic));
  out.push_back(detail::judge("kernel consistency", consistency, cfg.tol.algebraic));
  const auto kernel = build_kernel(cfg.n, cfg.model);
  out.push_back(detail::judge("kernel exchangeability", check_kernel_exchangeability(kernel, cfg.n <= 6),
                              cfg.tol.algebraic));
  if (detail::has_pd_nu(cfg.model) && cfg.model.nu().as_pitman_dirichlet().k == cfg.model.k()) {
    double worst = 0.0;
    for (int m = 1; m <= cfg.n; ++m)
      worst = std::max(worst, detail::closed_form_defect(m, cfg.model.nu().as_pitman_dirichlet().alpha, cfg.model.k()));
    out.push_back(detail::judge("closed-form equivalence", worst, cfg.tol.algebraic, "relative"));
  } else {
    out.push_back(detail::skipped("closed-form equivalence", "nu is not PD(-alpha/k, alpha) on k columns"));
  }
  return out;
}

inline std::vector<SuiteResult> stationary_suites(const VerifyConfig& cfg) {
  std::vector<SuiteResult> out;
  const std::vector<std::string> names = {"stationary residual", "stationary power-iteration agreement",
                                          "stationary Dirichlet-multinomial match", "detailed balance",
                                          "stationary projection consistency", "stationary exchangeability"};
  if (cfg.model.nu().degenerate()) {
    for (const auto& name : names) out.push_back(detail::skipped(name, "hypothesis unmet: nu degenerate at (1,0,...,0)"));
    return out;
  }
  std::vector<StationaryDistribution> thetas;
  double residual = 0.0;
  double agreement = 0.0;
  for (int m = 1; m <= cfg.n; ++m) {
    const auto kernel = build_kernel(m, cfg.model);
    thetas.push_back(solve_stationary(kernel));
    residual = std::max(residual, stationary_residual(thetas.back(), kernel));
    const auto power = stationary_power_iteration(kernel);
    for (std::size_t i = 0; i < power.size(); ++i)
      agreement = std::max(agreement, std::abs(power.weights[i] - thetas.back().weights[i]));
  }
  out.push_back(detail::judge(names[0], residual, cfg.tol.algebraic));
  out.push_back(detail::judge(names[1], agreement, cfg.tol.solve));
  const bool alpha_k_chain =
      detail::has_pd_nu(cfg.model) && cfg.model.nu().as_pitman_dirichlet().k == cfg.model.k();
  if (alpha_k_chain) {
    const double alpha = cfg.model.nu().as_pitman_dirichlet().alpha;
    double match = 0.0;
    double balance = 0.0;
    for (const auto& theta : thetas) match = std::max(match, check_eppf_match(theta, alpha));
    for (int m = 1; m <= cfg.n; ++m) balance = std::max(balance, check_detailed_balance(m, cfg.model.k(), alpha));
    out.push_back(detail::judge(names[2], match, cfg.tol.solve));
    out.push_back(detail::judge(names[3], balance, cfg.tol.algebraic, "relative"));
  } else {
    out.push_back(detail::skipped(names[2], "no closed form for this nu"));
    out.push_back(detail::skipped(names[3], "no closed form for this nu"));
  }
  double projection = 0.0;
  double exchange = 0.0;
  for (std::size_t m = 0; m < thetas.size(); ++m) {
    if (m + 1 < thetas.size()) projection = std::max(projection, check_projection_consistency(thetas[m + 1], thetas[m]));
    exchange = std::max(exchange, check_exchangeability(thetas[m]));
  }
  out.push_back(detail::judge(names[4], projection, cfg.tol.solve));
  out.push_back(detail::judge(names[5], exchange, cfg.tol.solve));
  return out;
}

inline std::vector<SuiteResult> ctmc_suites(const VerifyConfig& cfg) {
  std::vector<SuiteResult> out;
  double rate = 0.0;
  for (int m = 1; m <= cfg.n; ++m) rate = std::max(rate, check_rate_consistency(m, cfg.model, cfg.lambda));
  out.push_back(detail::judge("rate consistency", rate, cfg.tol.algebraic * std::max(1.0, cfg.lambda)));

  const auto kernel = build_kernel(cfg.n, cfg.model);
  const auto q = build_rate_matrix(kernel, cfg.lambda);
  if (cfg.model.nu().degenerate()) {
    out.push_back(detail::skipped("generator stationarity", "hypothesis unmet: nu degenerate at (1,0,...,0)"));
  } else {
    out.push_back(detail::judge("generator stationarity", generator_residual(solve_stationary(kernel), q),
                                cfg.tol.algebraic * std::max(1.0, cfg.lambda)));
  }

  // Both drivers from 1_n against the uniformized transient law at cfg.time.
  const auto start = SetPartition::one_block(cfg.n);
  const auto exact = transient_distribution(q, q.index_of(start), cfg.time);
  std::vector<double> embedded(q.size(), 0.0);
  std::vector<double> poisson(q.size(), 0.0);
  for (std::size_t r = 0; r < cfg.replicates; ++r) {
    RngStream rng_a(cfg.seed, 2 * r);
    RngStream rng_b(cfg.seed, 2 * r + 1);
    embedded[q.index_of(simulate_embedded(start, q, cfg.time, rng_a).state_at(cfg.time))] += 1.0;
    poisson[q.index_of(
        simulate_poissonian(start, cfg.model.nu(), cfg.model.k(), cfg.lambda, cfg.time, rng_b).state_at(cfg.time))] +=
        1.0;
  }
  double worst = 0.0;
  const auto reps = static_cast<double>(cfg.replicates);
  for (std::size_t i = 0; i < q.size(); ++i) {
    worst = std::max(worst, stats::standard_errors(embedded[i] / reps, exact[i], cfg.replicates));
    worst = std::max(worst, stats::standard_errors(poisson[i] / reps, exact[i], cfg.replicates));
  }
  out.push_back(detail::judge("driver equivalence", worst, cfg.tol.standard_errors, "standard errors"));

  if (cfg.n < 2) {
    out.push_back(detail::skipped("coupling", "needs n >= 2"));
    return out;
  }
  // Starts agreeing on [n-1]; restrictions to [n-1] must agree at every event.
  const int j = cfg.n - 1;
  double violations = 0.0;
  for (std::size_t r = 0; r < cfg.coupling_runs; ++r) {
    RngStream rng(cfg.seed ^ 0xc0ffee, r);
    const auto a = paintbox_sample_nu(cfg.model.nu(), cfg.n, rng);
    const auto candidates = extensions(restrict(a, j), cfg.model.k());
    const auto& b = candidates[static_cast<std::size_t>(rng.below(static_cast<int>(candidates.size())))];
    const auto [pa, pb] = coupled_pair(a, b, cfg.model.nu(), cfg.model.k(), cfg.lambda, 5.0 / cfg.lambda, rng);
    for (std::size_t e = 0; e < pa.events.size(); ++e)
      if (restrict(pa.events[e].second, j) != restrict(pb.events[e].second, j)) violations += 1.0;
  }
  out.push_back(detail::judge("coupling", violations, 0.0, "violations"));
  return out;
}

inline std::vector<SuiteResult> verify_all(const VerifyConfig& cfg) {
  auto out = kernel_suites(cfg);
  for (auto& r : stationary_suites(cfg)) out.push_back(std::move(r));
  for (auto& r : ctmc_suites(cfg)) out.push_back(std::move(r));
  return out;
}

inline bool all_passed(const std::vector<SuiteResult>& results) {
  for (const auto& r : results)
    if (r.status == SuiteStatus::fail) return false;
  return true;
}

inline void print_report(std::ostream& out, const std::vector<SuiteResult>& results) {
  out << std::left << std::setw(40) << "suite" << std::setw(14) << "max defect" << std::setw(12) << "tolerance"
      << "status\n";
  for (const auto& r : results) {
    std::ostringstream defect, tol;
    defect << std::setprecision(3) << r.defect;
    tol << std::setprecision(3) << r.tolerance;
    out << std::left << std::setw(40) << r.name;
    if (r.status == SuiteStatus::skipped) {
      out << std::setw(14) << "-" << std::setw(12) << "-" << "skipped: " << r.note << '\n';
      continue;
    }
    out << std::setw(14) << defect.str() << std::setw(12) << tol.str()
        << (r.status == SuiteStatus::pass ? "pass" : "FAIL");
    if (!r.note.empty()) out << " (" << r.note << ")";
    out << '\n';
  }
}

}  // namespace pbm
