// pbm: command-line front end for the partition-valued Markov process library.
//
// Exit codes: 0 success, 1 a verification suite failed, 2 usage or config error.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "pbm/ctmc.hpp"
#include "pbm/equilibrium.hpp"
#include "pbm/frequency.hpp"
#include "pbm/io.hpp"
#include "pbm/kernel.hpp"
#include "pbm/paintbox.hpp"
#include "pbm/rng.hpp"
#include "pbm/verify.hpp"

namespace {

constexpr int kExitVerify = 1;
constexpr int kExitUsage = 2;

struct usage_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Flags shared by every subcommand that needs a chain.
struct ModelFlags {
  std::optional<int> n;
  std::optional<int> k;
  std::optional<double> alpha;
  std::string nu_path;
};

struct Common {
  std::uint64_t seed = pbm::kDefaultSeed;
  std::optional<double> tol;
  std::optional<double> tol_se;
  std::string output;
};

void add_model(CLI::App* cmd, ModelFlags& m, bool need_n) {
  auto* n = cmd->add_option("-n", m.n, "ground set size")->check(CLI::PositiveNumber);
  if (need_n) n->required();
  cmd->add_option("-k", m.k, "number of columns (max blocks)")->check(CLI::PositiveNumber);
  auto* alpha = cmd->add_option("--alpha", m.alpha, "use nu = PD(-alpha/k, alpha)");
  auto* nu = cmd->add_option("--nu", m.nu_path, "nu config: JSON file or inline JSON");
  alpha->excludes(nu);
}

void add_common(CLI::App* cmd, Common& c, bool output = true) {
  cmd->add_option("--seed", c.seed, "RNG seed");
  cmd->add_option("--tol", c.tol, "tolerance for algebraic identities and linear solves");
  cmd->add_option("--tol-se", c.tol_se, "Monte Carlo tolerance in standard errors");
  if (output) cmd->add_option("-o,--output", c.output, "output file (default stdout)");
}

pbm::NuMeasure load_nu(const std::string& path) {
  try {
    return pbm::io::nu_from_json(pbm::io::load_json(path));
  } catch (const std::exception& e) {
    throw usage_error(std::string("--nu: ") + e.what());
  }
}

pbm::ChainModel make_model(const ModelFlags& m) {
  if (m.alpha) {
    if (!m.k) throw usage_error("--alpha needs -k");
    if (!(*m.alpha > 0.0)) throw usage_error("--alpha must be positive");
    return pbm::ChainModel::alpha_k(*m.alpha, *m.k);
  }
  if (m.nu_path.empty()) throw usage_error("one of --alpha or --nu is required");
  auto nu = load_nu(m.nu_path);
  const int k = m.k ? *m.k : nu.dimension();
  try {
    return pbm::ChainModel::paintbox(nu, k);
  } catch (const std::exception& e) {
    throw usage_error(e.what());
  }
}

pbm::NuMeasure make_nu(const ModelFlags& m) {
  if (m.alpha) {
    if (!m.k) throw usage_error("--alpha needs -k");
    if (!(*m.alpha > 0.0)) throw usage_error("--alpha must be positive");
    return pbm::NuMeasure::pitman_dirichlet(*m.alpha, *m.k);
  }
  if (m.nu_path.empty()) throw usage_error("one of --alpha or --nu is required");
  return load_nu(m.nu_path);
}

pbm::Tolerances tolerances(const Common& c) {
  pbm::Tolerances tol;
  if (c.tol) tol.algebraic = tol.solve = *c.tol;
  if (c.tol_se) tol.standard_errors = *c.tol_se;
  return tol;
}

// Writes to -o if given, stdout otherwise.
template <typename F>
void emit(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw usage_error("cannot write " + path);
  write(out);
}

int report(const std::vector<pbm::SuiteResult>& results) {
  pbm::print_report(std::cout, results);
  return pbm::all_passed(results) ? 0 : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulate and verify rho_nu-Markov partition processes"};
  app.require_subcommand(1);
  app.fallthrough();

  ModelFlags model;
  Common common;
  std::string text_arg;
  int count = 1;
  double lambda = 1.0;
  double horizon = 1.0;
  double time = 1.0;
  std::size_t replicates = 20000;
  std::size_t coupling_runs = 1000;
  std::string driver = "poisson";
  std::string initial;
  bool all = false;
  std::function<int()> action;

  // paintbox
  auto* paintbox = app.add_subcommand("paintbox", "rho_nu paintbox partitions")->require_subcommand(1);
  auto* pb_eval = paintbox->add_subcommand("eval", "probability rho_nu(B)");
  pb_eval->add_option("--nu", model.nu_path, "nu config")->required();
  pb_eval->add_option("--partition", text_arg, "partition JSON (file or inline)")->required();
  pb_eval->callback([&] {
    action = [&] {
      const auto nu = load_nu(model.nu_path);
      pbm::SetPartition b;
      try {
        b = pbm::io::partition_from_json(pbm::io::load_json(text_arg));
      } catch (const std::exception& e) {
        throw usage_error(std::string("--partition: ") + e.what());
      }
      std::cout << std::setprecision(17) << pbm::rho_nu(b, nu) << '\n';
      return 0;
    };
  });
  auto* pb_sample = paintbox->add_subcommand("sample", "draw partitions of [n], one JSON per line");
  pb_sample->add_option("--nu", model.nu_path, "nu config")->required();
  pb_sample->add_option("-n", model.n, "ground set size")->required()->check(CLI::PositiveNumber);
  pb_sample->add_option("--count", count, "number of samples")->check(CLI::NonNegativeNumber);
  add_common(pb_sample, common);
  pb_sample->callback([&] {
    action = [&] {
      const auto nu = load_nu(model.nu_path);
      pbm::RngStream rng(common.seed);
      emit(common.output, [&](std::ostream& out) {
        for (int i = 0; i < count; ++i) out << pbm::io::to_json(pbm::paintbox_sample_nu(nu, *model.n, rng)).dump() << '\n';
      });
      return 0;
    };
  });

  // kernel
  auto* kernel = app.add_subcommand("kernel", "transition matrices P_n")->require_subcommand(1);
  auto* k_build = kernel->add_subcommand("build", "build P_n as JSON");
  add_model(k_build, model, true);
  add_common(k_build, common);
  k_build->callback([&] {
    action = [&] {
      const auto kern = pbm::build_kernel(*model.n, make_model(model));
      emit(common.output, [&](std::ostream& out) { out << pbm::io::to_json(kern).dump() << '\n'; });
      return 0;
    };
  });
  auto* k_verify = kernel->add_subcommand("verify", "row sums, consistency, exchangeability");
  add_model(k_verify, model, true);
  add_common(k_verify, common, false);
  k_verify->callback([&] {
    action = [&] {
      const pbm::VerifyConfig cfg{*model.n, make_model(model), 1.0, common.seed, replicates, coupling_runs, time, tolerances(common)};
      return report(pbm::kernel_suites(cfg));
    };
  });

  // stationary
  auto* stationary = app.add_subcommand("stationary", "stationary laws theta_n")->require_subcommand(1);
  auto* s_solve = stationary->add_subcommand("solve", "solve theta P = theta for a kernel file");
  s_solve->add_option("--kernel", text_arg, "kernel JSON from `kernel build`")->required();
  add_common(s_solve, common);
  s_solve->callback([&] {
    action = [&] {
      pbm::TransitionKernel kern;
      try {
        kern = pbm::io::kernel_from_json(pbm::io::load_json(text_arg));
      } catch (const std::exception& e) {
        throw usage_error(std::string("--kernel: ") + e.what());
      }
      const auto theta = pbm::solve_stationary(kern);
      emit(common.output, [&](std::ostream& out) { out << pbm::io::to_json(theta).dump() << '\n'; });
      return 0;
    };
  });
  auto* s_verify = stationary->add_subcommand("verify", "residual, closed form, balance, consistency");
  add_model(s_verify, model, true);
  add_common(s_verify, common, false);
  s_verify->callback([&] {
    action = [&] {
      const pbm::VerifyConfig cfg{*model.n, make_model(model), 1.0, common.seed, replicates, coupling_runs, time, tolerances(common)};
      return report(pbm::stationary_suites(cfg));
    };
  });

  // ctmc
  auto* ctmc = app.add_subcommand("ctmc", "continuous-time process")->require_subcommand(1);
  auto* c_sim = ctmc->add_subcommand("simulate", "one trajectory as JSON");
  add_model(c_sim, model, true);
  add_common(c_sim, common);
  c_sim->add_option("--lambda", lambda, "event rate")->check(CLI::PositiveNumber);
  c_sim->add_option("--horizon", horizon, "time horizon")->check(CLI::NonNegativeNumber);
  c_sim->add_option("--driver", driver, "embedded or poisson")->check(CLI::IsMember({"embedded", "poisson"}));
  c_sim->add_option("--initial", initial, "initial partition JSON (default one block)");
  c_sim->callback([&] {
    action = [&] {
      const auto m = make_model(model);
      pbm::SetPartition start = pbm::SetPartition::one_block(*model.n);
      if (!initial.empty()) {
        try {
          start = pbm::io::partition_from_json(pbm::io::load_json(initial));
        } catch (const std::exception& e) {
          throw usage_error(std::string("--initial: ") + e.what());
        }
        if (start.size() != *model.n) throw usage_error("--initial: not a partition of [n]");
        if (start.block_count() > m.k()) throw usage_error("--initial: more than k blocks");
      }
      pbm::RngStream rng(common.seed);
      pbm::Trajectory path;
      if (driver == "embedded") {
        const auto q = pbm::build_rate_matrix(pbm::build_kernel(*model.n, m), lambda);
        path = pbm::simulate_embedded(start, q, horizon, rng);
      } else {
        path = pbm::simulate_poissonian(start, m.nu(), m.k(), lambda, horizon, rng);
      }
      emit(common.output, [&](std::ostream& out) { out << pbm::io::to_json(path).dump() << '\n'; });
      return 0;
    };
  });
  auto* c_verify = ctmc->add_subcommand("verify", "rate consistency, driver equivalence, coupling");
  add_model(c_verify, model, true);
  add_common(c_verify, common, false);
  c_verify->add_option("--lambda", lambda, "event rate")->check(CLI::PositiveNumber);
  c_verify->add_option("--time", time, "time for the driver comparison")->check(CLI::NonNegativeNumber);
  c_verify->add_option("--replicates", replicates, "Monte Carlo replicates")->check(CLI::PositiveNumber);
  c_verify->add_option("--coupling-runs", coupling_runs, "coupled pairs")->check(CLI::NonNegativeNumber);
  c_verify->callback([&] {
    action = [&] {
      const pbm::VerifyConfig cfg{*model.n, make_model(model), lambda, common.seed, replicates, coupling_runs, time, tolerances(common)};
      return report(pbm::ctmc_suites(cfg));
    };
  });

  // massproc
  auto* mass = app.add_subcommand("massproc", "mass partition process on the ranked simplex")->require_subcommand(1);
  auto* m_sim = mass->add_subcommand("simulate", "X(t) as CSV");
  add_model(m_sim, model, false);
  add_common(m_sim, common);
  m_sim->add_option("--lambda", lambda, "event rate")->check(CLI::NonNegativeNumber);
  m_sim->add_option("--horizon", horizon, "time horizon")->check(CLI::NonNegativeNumber);
  m_sim->add_option("--initial", initial, "initial masses JSON (default uniform)");
  auto* m_couple = mass->add_subcommand("couple", "set and mass processes on one event stream, CSV");
  add_model(m_couple, model, true);
  add_common(m_couple, common);
  m_couple->add_option("--lambda", lambda, "event rate")->check(CLI::NonNegativeNumber);
  m_couple->add_option("--horizon", horizon, "time horizon")->check(CLI::NonNegativeNumber);
  m_couple->add_option("--initial", initial, "initial masses JSON (default uniform)");
  struct MassSetup {
    int k;
    pbm::NuMeasure nu;
    pbm::MassPartition x0;
  };
  auto mass_setup = [&]() {
    auto nu = make_nu(model);
    const int k = model.k ? *model.k : nu.dimension();
    pbm::MassPartition x0;
    if (nu.dimension() > k) throw usage_error("nu is not supported on the ranked k-simplex");
    if (initial.empty()) {
      x0 = pbm::MassPartition::ranked(std::vector<double>(static_cast<std::size_t>(k), 1.0 / k));
    } else {
      try {
        x0 = pbm::io::mass_from_json(pbm::io::load_json(initial)).padded(k);
      } catch (const std::exception& e) {
        throw usage_error(std::string("--initial: ") + e.what());
      }
    }
    return MassSetup{k, std::move(nu), std::move(x0)};
  };
  m_sim->callback([&] {
    action = [&] {
      const auto [k, nu, x0] = mass_setup();
      pbm::RngStream rng(common.seed);
      const auto path = pbm::simulate_mass_process(x0, nu, k, lambda, horizon, rng);
      emit(common.output, [&](std::ostream& out) { pbm::io::write_csv(out, path); });
      return 0;
    };
  });
  m_couple->callback([&] {
    action = [&] {
      const auto [k, nu, x0] = mass_setup();
      pbm::RngStream rng(common.seed);
      const auto run = pbm::coupled_set_mass(*model.n, x0, nu, k, lambda, horizon, rng);
      emit(common.output, [&](std::ostream& out) { pbm::io::write_csv(out, run, k); });
      return 0;
    };
  });

  // verify
  auto* verify = app.add_subcommand("verify", "every verification suite on one grid point");
  verify->add_flag("--all", all, "run all suites")->required();
  add_model(verify, model, false);
  add_common(verify, common, false);
  verify->add_option("--lambda", lambda, "event rate")->check(CLI::PositiveNumber);
  verify->add_option("--time", time, "time for the driver comparison")->check(CLI::NonNegativeNumber);
  verify->add_option("--replicates", replicates, "Monte Carlo replicates")->check(CLI::PositiveNumber);
  verify->add_option("--coupling-runs", coupling_runs, "coupled pairs")->check(CLI::NonNegativeNumber);
  verify->callback([&] {
    action = [&] {
      // default grid: n = 4, k = 2, alpha = 1
      if (!model.alpha && model.nu_path.empty()) {
        model.alpha = 1.0;
        if (!model.k) model.k = 2;
      }
      const pbm::VerifyConfig cfg{model.n.value_or(4), make_model(model), lambda, common.seed, replicates, coupling_runs, time, tolerances(common)};
      return report(pbm::verify_all(cfg));
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  try {
    return action ? action() : kExitUsage;
  } catch (const std::exception& e) {
    // bad config or an invariant violated by the inputs
    std::cerr << "pbm: " << e.what() << '\n';
    return kExitUsage;
  }
}
