#include "config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace exactdpp::cli {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_real(std::string_view s) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty()) {
    throw UsageError("not a number: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::string_view to_string(Command command) {
  switch (command) {
    case Command::Sample:
      return "sample";
    case Command::Validate:
      return "validate";
    case Command::Compare:
      return "compare";
  }
  return "sample";
}

Command parse_command(std::string_view name) {
  if (name == "sample") return Command::Sample;
  if (name == "validate") return Command::Validate;
  if (name == "compare") return Command::Compare;
  throw UsageError("unknown command '" + std::string(name) + "'");
}

std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  for (std::string_view part : split(text, ',')) out.push_back(parse_real(part));
  return out;
}

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> out;
  if (trim(text).empty()) return out;
  for (std::string_view part : split(text, ',')) {
    int v = 0;
    const auto [end, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || end != part.data() + part.size() || part.empty()) {
      throw UsageError("not an integer: '" + std::string(part) + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<Interval> parse_domain(std::string_view text, int dim) {
  std::vector<Interval> box;
  for (std::string_view part : split(text, 'x')) {
    const auto ends = split(part, ',');
    if (ends.size() != 2) throw UsageError("domain intervals are written lo,hi: '" + std::string(part) + "'");
    Interval iv{parse_real(ends[0]), parse_real(ends[1])};
    if (!(iv.lo < iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
      throw UsageError("domain interval needs finite lo < hi: '" + std::string(part) + "'");
    }
    box.push_back(iv);
  }
  if (box.size() == 1 && dim > 1) box.assign(static_cast<std::size_t>(dim), box.front());
  if (static_cast<int>(box.size()) != dim) {
    throw UsageError("domain has " + std::to_string(box.size()) + " intervals for dimension " + std::to_string(dim));
  }
  return box;
}

std::string format_domain(const std::vector<Interval>& domain) {
  std::string out;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    if (i) out += "x";
    out += format_real(domain[i].lo) + "," + format_real(domain[i].hi);
  }
  return out;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void resolve(RunConfig& c) {
  if (c.dim < 1) throw UsageError("--dim must be at least 1");
  if (c.num < 1) throw UsageError("--num must be at least 1");
  if (c.lengthscales.size() == 1 && c.dim > 1) c.lengthscales.assign(static_cast<std::size_t>(c.dim), c.lengthscales.front());
  if (static_cast<int>(c.lengthscales.size()) != c.dim) {
    throw UsageError("--lengthscale needs 1 or " + std::to_string(c.dim) + " values");
  }
  for (double l : c.lengthscales) {
    if (!(l > 0.0) || !std::isfinite(l)) throw UsageError("lengthscales must be positive");
  }
  if (!c.domain.empty() && static_cast<int>(c.domain.size()) != c.dim) {
    throw UsageError("domain dimension does not match --dim");
  }
  for (int r : c.ranks) {
    if (r < 1) throw UsageError("ranks must be at least 1");
  }
  if (!(c.epsilon > 0.0)) throw UsageError("--epsilon must be positive");
  if (!(c.jitter >= 0.0)) throw UsageError("--jitter must be nonnegative");
  if (!(c.noise > 0.0)) throw UsageError("--noise must be positive");
  if (c.format != "csv" && c.format != "json") throw UsageError("--format must be csv or json");
  if (c.method == SampleMethod::Rejection) throw UsageError("--method must be exact, nystrom, spectral or uniform");
}

KernelSpec make_spec(const RunConfig& c) {
  if (c.domain.empty()) return KernelSpec(c.kernel, c.lengthscales);
  return KernelSpec(c.kernel, c.lengthscales, c.domain);
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json domain = nlohmann::json::array();
  for (const Interval& iv : c.domain) domain.push_back({iv.lo, iv.hi});
  return {
      {"command", to_string(c.command)},
      {"kernel", to_string(c.kernel)},
      {"lengthscales", c.lengthscales},
      {"dim", c.dim},
      {"num", c.num},
      {"seed", c.seed},
      {"domain", domain},
      {"method", to_string(c.method)},
      {"ranks", c.ranks},
      {"noise", c.noise},
      {"out", c.out},
      {"format", c.format},
      {"epsilon", c.epsilon},
      {"jitter", c.jitter},
      {"shared", c.shared},
      {"replicates", c.replicates},
      {"grid", c.grid},
      {"scale", c.scale},
  };
}

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  c.command = parse_command(j.at("command").get<std::string>());
  c.kernel = parse_kernel_family(j.at("kernel").get<std::string>());
  c.lengthscales = j.at("lengthscales").get<std::vector<double>>();
  c.dim = j.at("dim").get<int>();
  c.num = j.at("num").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& iv : j.at("domain")) c.domain.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
  c.method = parse_sample_method(j.at("method").get<std::string>());
  c.ranks = j.at("ranks").get<std::vector<int>>();
  c.noise = j.at("noise").get<double>();
  c.out = j.at("out").get<std::string>();
  c.format = j.at("format").get<std::string>();
  c.epsilon = j.at("epsilon").get<double>();
  c.jitter = j.at("jitter").get<double>();
  c.shared = j.at("shared").get<int>();
  c.replicates = j.at("replicates").get<int>();
  c.grid = j.at("grid").get<int>();
  c.scale = j.at("scale").get<double>();
  return c;
}

}  // namespace exactdpp::cli
