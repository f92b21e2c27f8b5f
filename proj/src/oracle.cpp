#include "nabc/oracle.hpp"

#include <cmath>
#include <sstream>

#include "nabc/dynamics.hpp"
#include "nabc/errors.hpp"
#include "nabc/io.hpp"

namespace nabc {

namespace {

std::vector<double> parse_doubles(std::string_view text, std::string_view key) {
  std::vector<double> out;
  std::stringstream in{std::string(text)};
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError("oracle: " + std::string(key) + " has invalid value '" + item + "'");
    }
  }
  return out;
}

struct Best {
  double control;
  double value;
};

// Ties keep the smallest control.
template <typename F>
Best grid_max(int steps, double resolution, F&& value_at) {
  Best best{0.0, value_at(0.0)};
  for (int k = 1; k <= steps; ++k) {
    const double u = std::min(1.0, k * resolution);
    const double v = value_at(u);
    if (v > best.value) best = {u, v};
  }
  return best;
}

}  // namespace

OracleInstance parse_oracle_instance(std::string_view text) {
  OracleInstance inst;
  bool have_atoms = false;
  std::stringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    line = line.substr(0, line.find('#'));
    const auto eq = line.find('=');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (eq == std::string::npos) throw InputError("oracle: line '" + line + "' is not key=value");
    auto strip = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    const auto values = parse_doubles(value, key);
    auto scalar = [&]() {
      if (values.size() != 1) throw InputError("oracle: " + key + " expects one number");
      return values[0];
    };
    if (key == "T") inst.horizon = static_cast<int>(scalar());
    else if (key == "r") inst.rate = scalar();
    else if (key == "eta") inst.eta = scalar();
    else if (key == "y0") inst.initial_wealth = scalar();
    else if (key == "resolution") inst.resolution = scalar();
    else if (key == "atoms") { inst.atoms = values; have_atoms = true; }
    else if (key == "counts") inst.counts = values;
    else throw InputError("oracle: unknown key " + key);
  }
  if (!have_atoms) throw InputError("oracle: missing key atoms");
  if (inst.counts.empty()) inst.counts.assign(inst.atoms.size(), 1.0);
  return inst;
}

OracleResult solve_oracle(const OracleInstance& inst) {
  if (inst.horizon < 1 || inst.horizon > 2) throw InputError("oracle: T must be 1 or 2");
  if (inst.atoms.empty() || inst.atoms.size() > 8) throw InputError("oracle: need between 1 and 8 atoms");
  if (inst.counts.size() != inst.atoms.size()) throw InputError("oracle: counts and atoms differ in length");
  for (double c : inst.counts)
    if (!(c > 0.0)) throw InputError("oracle: counts must be positive");
  if (!(inst.resolution >= 1e-4 && inst.resolution <= 1.0)) throw InputError("oracle: resolution must lie in [1e-4, 1]");
  if (!(inst.initial_wealth > 0.0)) throw InputError("oracle: y0 must be positive");
  if (!(inst.eta > 1.0)) throw InputError("oracle: eta must exceed 1");

  const int steps = static_cast<int>(std::ceil(1.0 / inst.resolution - 1e-9));
  const std::size_t k = inst.atoms.size();

  auto expected_terminal = [&](double wealth, double u, const std::vector<double>& counts) {
    double total = 0.0;
    double acc = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      total += counts[j];
      acc += counts[j] * utility(wealth_step(wealth, u, inst.rate, inst.atoms[j]), inst.eta);
    }
    return acc / total;
  };

  OracleResult result;
  result.resolution = inst.resolution;
  if (inst.horizon == 1) {
    const Best b = grid_max(steps, inst.resolution,
                            [&](double u) { return expected_terminal(inst.initial_wealth, u, inst.counts); });
    result.control = b.control;
    result.value = b.value;
    return result;
  }

  auto second_stage = [&](double wealth, std::size_t observed) {
    std::vector<double> counts = inst.counts;
    counts[observed] += 1.0;
    return grid_max(steps, inst.resolution, [&](double u) { return expected_terminal(wealth, u, counts); });
  };
  double total = 0.0;
  for (double c : inst.counts) total += c;
  const Best b = grid_max(steps, inst.resolution, [&](double u) {
    double acc = 0.0;
    for (std::size_t j = 0; j < k; ++j)
      acc += inst.counts[j] * second_stage(wealth_step(inst.initial_wealth, u, inst.rate, inst.atoms[j]), j).value;
    return acc / total;
  });
  result.control = b.control;
  result.value = b.value;
  for (std::size_t j = 0; j < k; ++j)
    result.stage1_controls.push_back(
        second_stage(wealth_step(inst.initial_wealth, b.control, inst.rate, inst.atoms[j]), j).control);
  return result;
}

std::string format_oracle(const OracleResult& r) {
  std::string out = "u_star=" + format_number(r.control) + "\nvalue=" + format_number(r.value) +
                    "\nresolution=" + format_number(r.resolution) + "\n";
  if (!r.stage1_controls.empty()) {
    out += "stage1_controls=";
    for (std::size_t j = 0; j < r.stage1_controls.size(); ++j)
      out += (j ? "," : "") + format_number(r.stage1_controls[j]);
    out += "\n";
  }
  return out;
}

}  // namespace nabc
