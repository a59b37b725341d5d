#pragma once

// JSON and CSV encodings shared by the command-line tool.
//
//   SetPartition        {"n": n, "blocks": [[...], ...]}        canonical block order
//   MassPartition       {"masses": [...]}
//   NuMeasure           {"type": "discrete", "atoms": [{"weight": w, "masses": [...]}, ...]}
//                       {"type": "pd", "alpha": a, "k": k}
//   TransitionKernel    {"n", "k", "states": [...], "probs": [[...]], "nondegenerate"?}
//   Stationary          {"n", "k", "states": [...], "weights": [...]}
//   Trajectory          {"initial": partition, "jumps": [[t, partition], ...]}
//   MassTrajectory CSV  time,s_1,...,s_k

#include <nlohmann/json.hpp>

#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "pbm/ctmc.hpp"
#include "pbm/equilibrium.hpp"
#include "pbm/errors.hpp"
#include "pbm/frequency.hpp"
#include "pbm/kernel.hpp"
#include "pbm/mass_partition.hpp"
#include "pbm/partition.hpp"

namespace pbm::io {

using json = nlohmann::json;

struct format_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw format_error(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

template <typename T>
T get(const json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const json::exception& e) {
    throw format_error(std::string("field \"") + key + "\": " + e.what());
  }
}

}  // namespace detail

inline json to_json(const SetPartition& b) { return {{"n", b.size()}, {"blocks", b.blocks()}}; }

inline SetPartition partition_from_json(const json& j) {
  const int n = detail::get<int>(j, "n");
  auto blocks = detail::get<std::vector<Block>>(j, "blocks");
  auto b = SetPartition::from_blocks(std::move(blocks));
  if (b.size() != n) throw format_error("partition: blocks do not cover [n]");
  return b;
}

inline json to_json(const MassPartition& s) { return {{"masses", s.masses()}}; }

inline MassPartition mass_from_json(const json& j) {
  return MassPartition::ranked(detail::get<std::vector<double>>(j, "masses"));
}

inline json to_json(const NuMeasure& nu) {
  if (!nu.is_discrete()) {
    const auto& pd = nu.as_pitman_dirichlet();
    return {{"type", "pd"}, {"alpha", pd.alpha}, {"k", pd.k}};
  }
  json atoms = json::array();
  for (const auto& a : nu.as_discrete().atoms) atoms.push_back({{"weight", a.weight}, {"masses", a.point.masses()}});
  return {{"type", "discrete"}, {"atoms", atoms}};
}

inline NuMeasure nu_from_json(const json& j) {
  const auto type = detail::get<std::string>(j, "type");
  if (type == "pd") return NuMeasure::pitman_dirichlet(detail::get<double>(j, "alpha"), detail::get<int>(j, "k"));
  if (type != "discrete") throw format_error("nu: unknown type \"" + type + "\"");
  std::vector<MixtureAtom> atoms;
  const auto& list = detail::field(j, "atoms");
  if (!list.is_array()) throw format_error("nu: atoms must be an array");
  for (const auto& a : list) atoms.push_back({detail::get<double>(a, "weight"), mass_from_json(a)});
  return NuMeasure::discrete(std::move(atoms));
}

inline json states_to_json(const std::vector<SetPartition>& states) {
  json out = json::array();
  for (const auto& s : states) out.push_back(to_json(s));
  return out;
}

inline std::vector<SetPartition> states_from_json(const json& j) {
  if (!j.is_array()) throw format_error("states must be an array");
  std::vector<SetPartition> out;
  for (const auto& s : j) out.push_back(partition_from_json(s));
  return out;
}

inline json to_json(const TransitionKernel& kernel) {
  json probs = json::array();
  for (Eigen::Index i = 0; i < kernel.probs.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < kernel.probs.cols(); ++j) row.push_back(kernel.probs(i, j));
    probs.push_back(std::move(row));
  }
  json out = {{"n", kernel.n()}, {"k", kernel.k()}, {"states", states_to_json(kernel.states())}, {"probs", probs}};
  if (kernel.nondegenerate) out["nondegenerate"] = *kernel.nondegenerate;
  return out;
}

inline TransitionKernel kernel_from_json(const json& j) {
  auto states = states_from_json(detail::field(j, "states"));
  if (states.empty()) throw format_error("kernel: no states");
  const int n = j.contains("n") ? detail::get<int>(j, "n") : states.front().size();
  int k = 0;
  for (const auto& s : states) k = std::max(k, s.block_count());
  if (j.contains("k")) k = detail::get<int>(j, "k");
  TransitionKernel kernel{StateSpace(n, k, std::move(states)), {}, std::nullopt};
  const auto rows = detail::get<std::vector<std::vector<double>>>(j, "probs");
  const auto size = kernel.size();
  if (rows.size() != size) throw format_error("kernel: probs has the wrong number of rows");
  kernel.probs.resize(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
  for (std::size_t r = 0; r < size; ++r) {
    if (rows[r].size() != size) throw format_error("kernel: probs is not square");
    for (std::size_t c = 0; c < size; ++c) kernel.probs(r, c) = rows[r][c];
  }
  if (j.contains("nondegenerate")) kernel.nondegenerate = detail::get<bool>(j, "nondegenerate");
  return kernel;
}

inline json to_json(const StationaryDistribution& theta) {
  return {{"n", theta.n()}, {"k", theta.k()}, {"states", states_to_json(theta.states())}, {"weights", theta.weights}};
}

inline StationaryDistribution stationary_from_json(const json& j) {
  auto states = states_from_json(detail::field(j, "states"));
  auto weights = detail::get<std::vector<double>>(j, "weights");
  if (weights.size() != states.size()) throw format_error("stationary: weights and states differ in length");
  return {StateSpace(detail::get<int>(j, "n"), detail::get<int>(j, "k"), std::move(states)), std::move(weights)};
}

inline json to_json(const Trajectory& path) {
  json jumps = json::array();
  for (const auto& [t, b] : path.jumps) jumps.push_back({t, to_json(b)});
  return {{"initial", to_json(path.initial)}, {"jumps", jumps}};
}

inline Trajectory trajectory_from_json(const json& j) {
  Trajectory path{partition_from_json(detail::field(j, "initial")), {}, {}};
  for (const auto& jump : detail::field(j, "jumps")) {
    if (!jump.is_array() || jump.size() != 2) throw format_error("trajectory: jump must be [t, partition]");
    path.jumps.emplace_back(jump[0].get<double>(), partition_from_json(jump[1]));
  }
  return path;
}

namespace detail {

inline void write_row(std::ostream& out, double t, const std::vector<double>& values) {
  out << t;
  for (double v : values) out << ',' << v;
  out << '\n';
}

}  // namespace detail

inline void write_csv(std::ostream& out, const MassTrajectory& path) {
  const int k = path.initial.size();
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "time";
  for (int i = 1; i <= k; ++i) out << ",s_" << i;
  out << '\n';
  detail::write_row(out, 0.0, path.initial.masses());
  for (const auto& [t, x] : path.jumps) detail::write_row(out, t, x.masses());
}

inline MassTrajectory mass_trajectory_from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("time", 0) != 0) throw format_error("csv: missing header");
  MassTrajectory path;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::vector<double> values;
    while (std::getline(row, cell, ',')) values.push_back(std::stod(cell));
    if (values.size() < 2) throw format_error("csv: short row");
    const double t = values.front();
    auto x = MassPartition::ranked({values.begin() + 1, values.end()}, kArithmeticTolerance);
    if (first) {
      path.initial = std::move(x);
      first = false;
    } else {
      path.jumps.emplace_back(t, std::move(x));
    }
  }
  if (first) throw format_error("csv: no rows");
  return path;
}

// Coupled set/mass output: time, x_1..x_k, f_1..f_k, sup_error.
inline void write_csv(std::ostream& out, const CoupledSetMass& run, int k) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "time";
  for (int i = 1; i <= k; ++i) out << ",x_" << i;
  for (int i = 1; i <= k; ++i) out << ",f_" << i;
  out << ",sup_error\n";
  for (std::size_t r = 0; r < run.times.size(); ++r) {
    const double t = run.times[r];
    out << t;
    for (double v : run.mass.state_at(t).masses()) out << ',' << v;
    for (double v : empirical_frequencies(run.set.state_at(t), k)) out << ',' << v;
    out << ',' << run.sup_errors[r] << '\n';
  }
}

// Reads a JSON document from a file path, or parses the argument itself when
// it starts with '{'.
inline json load_json(const std::string& path_or_inline) {
  try {
    if (!path_or_inline.empty() && path_or_inline.front() == '{') return json::parse(path_or_inline);
    std::ifstream in(path_or_inline);
    if (!in) throw format_error("cannot open " + path_or_inline);
    return json::parse(in);
  } catch (const json::exception& e) {
    throw format_error("invalid JSON in " + path_or_inline + ": " + e.what());
  }
}

}  // namespace pbm::io
