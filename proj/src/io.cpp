#include "nabc/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "nabc/errors.hpp"

namespace nabc {

using nlohmann::json;

std::string format_number(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (result.ec != std::errc()) throw InputError("format_number: conversion failed");
  return std::string(buffer, result.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <typename T>
T parse_scalar(std::string_view text, std::string_view key) {
  T value{};
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size())
    throw InputError("config: " + std::string(key) + " has invalid value '" + std::string(text) + "'");
  return value;
}

template <typename T>
std::vector<T> parse_list(std::string_view text, std::string_view key) {
  std::vector<T> values;
  for (auto part : split(text, ',')) values.push_back(parse_scalar<T>(part, key));
  return values;
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>) out += format_number(values[i]);
    else out += std::to_string(values[i]);
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  std::map<std::string, std::string, std::less<>> entries;
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    const auto line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw InputError("config: line " + std::to_string(line_no) + " is not key=value");
    const std::string key(trim(line.substr(0, eq)));
    if (!entries.emplace(key, std::string(trim(line.substr(eq + 1)))).second)
      throw InputError("config: " + key + " given twice");
  }

  auto take = [&](std::string_view key, bool required) -> std::optional<std::string> {
    const auto it = entries.find(key);
    if (it == entries.end()) {
      if (required) throw InputError("config: missing key " + std::string(key));
      return std::nullopt;
    }
    std::string value = it->second;
    entries.erase(it);
    return value;
  };

  ExperimentConfig c;
  c.horizon = parse_scalar<int>(*take("T", true), "T");
  c.rate = parse_scalar<double>(*take("r", true), "r");
  c.eta = parse_scalar<double>(*take("eta", true), "eta");
  c.initial_wealth = parse_scalar<double>(*take("y0", true), "y0");
  c.design_paths = parse_scalar<int>(*take("N", true), "N");
  c.eval_paths = parse_scalar<int>(*take("N_prime", true), "N_prime");
  c.inner_samples = parse_scalar<int>(*take("L", true), "L");
  c.moments = parse_scalar<int>(*take("M", true), "M");
  c.history_size = parse_scalar<int>(*take("t0", true), "t0");
  c.prior_masses = parse_list<double>(*take("c0_list", true), "c0_list");
  c.confidence_level = parse_scalar<double>(*take("confidence_level", true), "confidence_level");

  const auto mixture = parse_list<double>(*take("sampling_measure", true), "sampling_measure");
  if (mixture.empty() || mixture.size() % 3 != 0)
    throw InputError("config: sampling_measure needs weight,mean,variance triples");
  std::vector<MixtureComponent> components;
  for (std::size_t k = 0; k < mixture.size(); k += 3) components.push_back({mixture[k], mixture[k + 1], mixture[k + 2]});
  try {
    c.sampling_measure = MixtureMeasure(std::move(components));
  } catch (const std::exception& e) {
    throw InputError("config: sampling_measure invalid: " + std::string(e.what()));
  }

  if (auto v = take("mu0_hat", false)) c.mu0_hat = parse_scalar<double>(*v, "mu0_hat");
  if (auto v = take("sigma0_sq_hat", false)) c.sigma0_sq_hat = parse_scalar<double>(*v, "sigma0_sq_hat");
  if (auto v = take("seeds", false)) {
    const auto seeds = parse_list<std::uint64_t>(*v, "seeds");
    if (seeds.size() != 4) throw InputError("config: seeds needs four integers");
    c.seeds = {seeds[0], seeds[1], seeds[2], seeds[3]};
  }
  if (auto v = take("gh_nodes", false)) c.quadrature_nodes = parse_scalar<int>(*v, "gh_nodes");
  if (auto v = take("region_boundary_points", false))
    c.region_boundary_points = parse_scalar<int>(*v, "region_boundary_points");
  if (auto v = take("region_rings", false)) c.region_rings = parse_scalar<int>(*v, "region_rings");
  if (auto v = take("gp_nugget", false)) c.gp.nugget = parse_scalar<double>(*v, "gp_nugget");
  if (auto v = take("gp_starts", false)) c.gp.starts = parse_scalar<int>(*v, "gp_starts");
  if (auto v = take("gp_max_evaluations", false))
    c.gp.max_evaluations = parse_scalar<int>(*v, "gp_max_evaluations");
  if (!entries.empty()) throw InputError("config: unknown key " + entries.begin()->first);

  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path));
}

std::string emit_config(const ExperimentConfig& c) {
  std::vector<double> mixture;
  for (const auto& m : c.sampling_measure.components()) {
    mixture.push_back(m.weight);
    mixture.push_back(m.mean);
    mixture.push_back(m.var);
  }
  std::ostringstream out;
  out << "T=" << c.horizon << '\n'
      << "r=" << format_number(c.rate) << '\n'
      << "eta=" << format_number(c.eta) << '\n'
      << "y0=" << format_number(c.initial_wealth) << '\n'
      << "N=" << c.design_paths << '\n'
      << "N_prime=" << c.eval_paths << '\n'
      << "L=" << c.inner_samples << '\n'
      << "M=" << c.moments << '\n'
      << "t0=" << c.history_size << '\n'
      << "c0_list=" << join(c.prior_masses) << '\n'
      << "confidence_level=" << format_number(c.confidence_level) << '\n'
      << "sampling_measure=" << join(mixture) << '\n';
  if (c.mu0_hat) out << "mu0_hat=" << format_number(*c.mu0_hat) << '\n';
  if (c.sigma0_sq_hat) out << "sigma0_sq_hat=" << format_number(*c.sigma0_sq_hat) << '\n';
  out << "seeds=" << join(std::vector<std::uint64_t>{c.seeds.design, c.seeds.inner, c.seeds.evaluation, c.seeds.history})
      << '\n'
      << "gh_nodes=" << c.quadrature_nodes << '\n'
      << "region_boundary_points=" << c.region_boundary_points << '\n'
      << "region_rings=" << c.region_rings << '\n'
      << "gp_nugget=" << format_number(c.gp.nugget) << '\n'
      << "gp_starts=" << c.gp.starts << '\n'
      << "gp_max_evaluations=" << c.gp.max_evaluations << '\n';
  return out.str();
}

namespace {

json to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(to_json(Eigen::VectorXd(m.row(i).transpose())));
  return rows;
}

Eigen::VectorXd vector_from(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Eigen::MatrixXd matrix_from(const json& j, Eigen::Index cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Eigen::VectorXd row = vector_from(j[i]);
    if (row.size() != cols) throw InputError("policy: ragged input matrix");
    m.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return m;
}

json surrogate_to_json(const gp::Surrogate& s) {
  json j;
  j["dim"] = s.input_dim();
  j["inputs"] = to_json(s.raw_inputs());
  j["targets"] = to_json(s.raw_targets());
  j["constant"] = s.is_constant();
  j["target_mean"] = s.target_mean();
  if (s.is_constant()) return j;
  j["target_sd"] = s.target_sd();
  j["lower"] = to_json(s.scaling().lower);
  j["range"] = to_json(s.scaling().range);
  j["active"] = s.scaling().active;
  j["signal_var"] = s.hyper().signal_var;
  j["lengthscales"] = to_json(s.hyper().lengthscales);
  j["nugget_var"] = s.hyper().nugget_var;
  return j;
}

gp::Surrogate surrogate_from_json(const json& j) {
  const Eigen::MatrixXd inputs = matrix_from(j.at("inputs"), j.at("dim").get<Eigen::Index>());
  const Eigen::VectorXd targets = vector_from(j.at("targets"));
  if (j.at("constant").get<bool>()) return gp::constant_surrogate(inputs, targets, j.at("target_mean").get<double>());
  gp::InputScaling scaling{vector_from(j.at("lower")), vector_from(j.at("range")),
                           j.at("active").get<std::vector<int>>()};
  gp::KernelHyper hyper{j.at("signal_var").get<double>(), vector_from(j.at("lengthscales")),
                        j.at("nugget_var").get<double>()};
  return gp::assemble(inputs, targets, scaling, j.at("target_mean").get<double>(), j.at("target_sd").get<double>(),
                      hyper);
}

}  // namespace

std::string policy_to_json(const Policy& policy) {
  const PolicyContext& c = policy.context;
  json j;
  j["method"] = std::string(to_string(policy.method));
  j["context"] = {{"T", c.horizon},          {"r", c.rate},         {"eta", c.eta},
                  {"y0", c.initial_wealth},  {"M", c.moments},      {"c0", c.prior_mass},
                  {"mu0", c.mu0},            {"sigma0_sq", c.sigma0_sq}, {"t0", c.history_size}};
  j["root"] = {{"control", policy.root.control}, {"value", policy.root.value}};
  json stages = json::array();
  for (std::size_t k = 0; k < policy.stages.size(); ++k)
    stages.push_back({{"stage", k + 1},
                      {"value", surrogate_to_json(policy.stages[k].value)},
                      {"control", surrogate_to_json(policy.stages[k].control)}});
  j["stages"] = std::move(stages);
  return j.dump(1) + "\n";
}

Policy policy_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    Policy p;
    p.method = parse_method(j.at("method").get<std::string>());
    const json& c = j.at("context");
    p.context = {c.at("T").get<int>(),      c.at("r").get<double>(),   c.at("eta").get<double>(),
                 c.at("y0").get<double>(),  c.at("M").get<int>(),      c.at("c0").get<double>(),
                 c.at("mu0").get<double>(), c.at("sigma0_sq").get<double>(), c.at("t0").get<int>()};
    p.root = {j.at("root").at("control").get<double>(), j.at("root").at("value").get<double>()};
    for (const json& s : j.at("stages"))
      p.stages.push_back({surrogate_from_json(s.at("value")), surrogate_from_json(s.at("control"))});
    if (static_cast<int>(p.stages.size()) != std::max(0, p.context.horizon - 1))
      throw InputError("policy: stage count does not match T");
    return p;
  } catch (const json::exception& e) {
    throw InputError(std::string("policy: malformed file: ") + e.what());
  }
}

Policy load_policy(const std::filesystem::path& path) { return policy_from_json(read_file(path)); }

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InputError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::uint64_t content_hash(std::string_view content) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : content) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

CsvWriter::CsvWriter(const std::vector<std::string>& header) {
  for (const auto& h : header) cell(h);
  end_row();
}

CsvWriter& CsvWriter::cell(std::string_view text) {
  if (row_started_) text_ += ',';
  text_ += text;
  row_started_ = true;
  return *this;
}

CsvWriter& CsvWriter::cell(double value) { return cell(std::string_view(format_number(value))); }

CsvWriter& CsvWriter::cell(long long value) { return cell(std::string_view(std::to_string(value))); }

CsvWriter& CsvWriter::end_row() {
  text_ += '\n';
  row_started_ = false;
  return *this;
}

}  // namespace nabc
