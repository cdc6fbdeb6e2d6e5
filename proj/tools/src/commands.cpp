#include "commands.hpp"

#include "exactdpp/errors.hpp"
#include "exactdpp/lowrank.hpp"
#include "exactdpp/oracle.hpp"
#include "exactdpp/sampler.hpp"
#include "exactdpp/validation.hpp"
#include "exactdpp/version.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace exactdpp::cli {
namespace fs = std::filesystem;

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void ensure_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

std::ofstream open_output(const std::string& path) {
  ensure_parent(path);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  return os;
}

nlohmann::json coverage_json(const oracle::CoverageReport& r) {
  return {{"size", r.size},
          {"mean_nn", r.mean_nn},
          {"min_nn", r.min_nn},
          {"max_projection_gap", r.max_projection_gap},
          {"method", r.method},
          {"seeds", r.seeds}};
}

nlohmann::json check_json(const validation::Check& c) {
  return {{"name", c.name},
          {"description", c.description},
          {"relation", validation::to_string(c.relation)},
          {"tolerance", c.tolerance},
          {"observed", std::isfinite(c.observed) ? nlohmann::json(c.observed) : nlohmann::json(nullptr)},
          {"passed", c.passed},
          {"informational", c.informational},
          {"seconds", c.seconds},
          {"detail", c.detail}};
}

// Everything the sample-producing commands share.
struct KernelFlags {
  std::string kernel = "se";
  std::string lengthscale;
  std::string domain;
  std::string method;
  std::string format;
};

void add_kernel_flags(CLI::App* sub, RunConfig& c, KernelFlags& f) {
  sub->add_option("--kernel", f.kernel, "Kernel family: se (square-exponential) or exp (exponential)")
      ->capture_default_str();
  sub->add_option("--lengthscale", f.lengthscale,
                  "Lengthscale on the unit cube; one value for all dimensions or a comma-separated list");
  sub->add_option("--domain", f.domain,
                  "Box domain 'lo,hi x lo,hi ...'; a single interval applies to every dimension (default: unit cube)");
  sub->add_option("--seed", c.seed, "Seed of the uniform variate stream")->capture_default_str();
  sub->add_option("--epsilon", c.epsilon, "Bisection tolerance")->capture_default_str();
  sub->add_option("--jitter", c.jitter, "Gram diagonal jitter (relative)")->capture_default_str();
  sub->add_option("--noise", c.noise, "Noise variance of the finite-rank posterior")->capture_default_str();
}

void apply_kernel_flags(RunConfig& c, const KernelFlags& f, double default_lengthscale) {
  try {
    c.kernel = parse_kernel_family(f.kernel);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  c.lengthscales = f.lengthscale.empty() ? std::vector<double>{default_lengthscale} : parse_real_list(f.lengthscale);
  if (!f.domain.empty()) c.domain = parse_domain(f.domain, c.dim);
  if (!f.method.empty()) {
    try {
      c.method = parse_sample_method(f.method);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
}

SamplerOptions sampler_options(const RunConfig& c) {
  SamplerOptions o;
  o.epsilon = c.epsilon;
  o.state.jitter = c.jitter;
  return o;
}

FeatureBasis make_basis(const RunConfig& c, const KernelSpec& spec, int rank) {
  return c.method == SampleMethod::Nystrom ? nystrom_basis(spec, rank, c.noise, std::nullopt, c.jitter)
                                           : spectral_basis(spec, rank, c.noise);
}

// Sup deviation of the normalized approximate CDF from the exact one, on a grid.
std::vector<double> deviation_curve(const ConditionalCdf& exact, const ApproxCdf& approx, int grid) {
  std::vector<double> dev(static_cast<std::size_t>(grid) + 1);
  for (int g = 0; g <= grid; ++g) {
    const double t = static_cast<double>(g) / grid;
    dev[static_cast<std::size_t>(g)] = approx(t) / approx.total_mass() - exact(t) / exact.total_mass();
  }
  return dev;
}

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

}  // namespace

Eigen::MatrixXd to_box(const Eigen::MatrixXd& unit_rows, const std::vector<Interval>& box) {
  if (box.empty()) return unit_rows;
  Eigen::MatrixXd out(unit_rows.rows(), unit_rows.cols());
  for (Eigen::Index j = 0; j < unit_rows.cols(); ++j) {
    const Interval& iv = box[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < unit_rows.rows(); ++i) out(i, j) = iv.lo + (iv.hi - iv.lo) * unit_rows(i, j);
  }
  return out;
}

void write_csv(std::ostream& os, const Eigen::MatrixXd& rows) {
  for (Eigen::Index j = 0; j < rows.cols(); ++j) os << (j ? ",x" : "x") << j + 1;
  os << '\n';
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) os << (j ? "," : "") << format_real(rows(i, j));
    os << '\n';
  }
}

Eigen::MatrixXd read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty CSV");
  const auto cols = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ',') + 1);
  std::vector<double> values;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto row = parse_real_list(line);
    if (static_cast<Eigen::Index>(row.size()) != cols) throw std::runtime_error("ragged CSV row");
    values.insert(values.end(), row.begin(), row.end());
  }
  const auto rows = static_cast<Eigen::Index>(values.size()) / cols;
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = values[static_cast<std::size_t>(i * cols + j)];
  }
  return out;
}

Eigen::MatrixXd read_points_json(std::istream& is) {
  const nlohmann::json j = nlohmann::json::parse(is);
  const auto& pts = j.at("points");
  const auto rows = static_cast<Eigen::Index>(pts.size());
  const auto cols = rows ? static_cast<Eigen::Index>(pts.at(0).size()) : 0;
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = 0; k < cols; ++k) out(i, k) = pts.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k)).get<double>();
  }
  return out;
}

nlohmann::json points_json(const Eigen::MatrixXd& box_rows, const PointSet& set, const RunConfig& config) {
  nlohmann::json pts = nlohmann::json::array();
  for (Eigen::Index i = 0; i < box_rows.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < box_rows.cols(); ++k) row.push_back(box_rows(i, k));
    pts.push_back(std::move(row));
  }
  nlohmann::json meta = {
      {"method", to_string(set.method)},
      {"seed", set.seed},
      {"dim", set.dim()},
      {"size", set.size()},
      {"kernel", to_string(config.kernel)},
      {"lengthscales", config.lengthscales},
      {"domain", config.domain.empty() ? "unit" : format_domain(config.domain)},
      {"epsilon", set.epsilon},
      {"jitter", set.jitter},
      {"version", kVersion},
  };
  if (set.rank) {
    meta["rank"] = *set.rank;
    meta["noise"] = config.noise;
  }
  return {{"schema", "exactdpp.points"}, {"schema_version", kPointsSchemaVersion}, {"metadata", meta}, {"points", pts}};
}

std::string output_path(const std::string& out, const std::string& fallback) {
  if (!out.empty()) return out;
  const char* dir = std::getenv(kOutputDirEnv);
  if (dir && *dir) return (fs::path(dir) / fallback).string();
  return fallback;
}

int cmd_sample(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const KernelSpec spec = make_spec(c);
  const SamplerOptions opts = sampler_options(c);
  PointSet set;
  switch (c.method) {
    case SampleMethod::Exact:
      set = draw(spec, c.num, c.seed, opts);
      break;
    case SampleMethod::Uniform:
      set = draw_uniform(c.dim, c.num, c.seed);
      set.kernel = spec;
      break;
    default:
      set = approx_draw(make_basis(c, spec, c.ranks.front()), c.num, c.seed, opts);
      break;
  }
  const Eigen::MatrixXd rows = to_box(set.points, c.domain);
  const std::string path = output_path(c.out, "samples." + c.format);
  if (path == "-") {
    if (c.format == "json") {
      out << points_json(rows, set, c).dump(2) << '\n';
    } else {
      write_csv(out, rows);
    }
    return kExitOk;
  }
  std::ofstream os = open_output(path);
  if (c.format == "json") {
    os << points_json(rows, set, c).dump(2) << '\n';
  } else {
    write_csv(os, rows);
  }
  err << "wrote " << set.size() << " points to " << path << '\n';
  return kExitOk;
}

int cmd_validate(const RunConfig& c, std::ostream& out, std::ostream&) {
  validation::SuiteOptions opts;
  opts.scale = c.scale;
  opts.seed = c.seed;
  const auto checks = validation::run_suite(opts);
  nlohmann::json list = nlohmann::json::array();
  for (const auto& check : checks) {
    out << (check.informational ? "INFO" : check.passed ? "PASS" : "FAIL") << "  " << check.name << "  observed "
        << check.observed << ' ' << validation::to_string(check.relation) << ' ' << check.tolerance << "  ("
        << check.seconds << " s)  " << check.detail << '\n';
    list.push_back(check_json(check));
  }
  const bool ok = validation::all_passed(checks);
  const nlohmann::json report = {{"schema", "exactdpp.validation"},
                                 {"schema_version", kReportSchemaVersion},
                                 {"version", kVersion},
                                 {"scale", c.scale},
                                 {"seed", c.seed},
                                 {"passed", ok},
                                 {"checks", list}};
  const std::string path = output_path(c.out, "validation_report.json");
  std::ofstream os = open_output(path);
  os << report.dump(2) << '\n';
  out << (ok ? "all checks passed" : "some checks failed") << "; report written to " << path << '\n';
  return ok ? kExitOk : kExitFailure;
}

int cmd_compare(const RunConfig& c, std::ostream& out, std::ostream&) {
  const KernelSpec spec = make_spec(c);
  const SamplerOptions opts = sampler_options(c);
  const int shared = std::min(c.shared, c.num);
  const std::vector<Interval>& box = c.domain;
  auto user_x = [&](double t) { return box.empty() ? t : box[0].lo + (box[0].hi - box[0].lo) * t; };

  std::vector<std::vector<double>> curves;        // replicate 0
  std::vector<std::vector<double>> density;       // replicate 0
  std::vector<double> mean_sup(c.ranks.size(), 0.0);
  std::vector<double> first_sup(c.ranks.size(), 0.0);
  Eigen::MatrixXd exact_rows;
  std::vector<double> exact_density;
  for (int r = 0; r < c.replicates; ++r) {
    const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(r);
    DppState state(spec, opts.state);
    UniformStream stream(seed);
    const Eigen::MatrixXd X = draw_more(state, stream, c.num, opts);
    const ConditionalCdf exact = build_cdf(state, Eigen::VectorXd(0), 0);
    if (r == 0) {
      exact_rows = X;
      for (int g = 0; g <= c.grid; ++g) exact_density.push_back(state.variance_at(Eigen::VectorXd::Constant(1, double(g) / c.grid)));
    }
    for (std::size_t i = 0; i < c.ranks.size(); ++i) {
      ApproxState approx(make_basis(c, spec, c.ranks[i]));
      for (int a = 0; a < c.num; ++a) approx.push(X.row(a).transpose());
      const auto curve = deviation_curve(exact, build_approx_cdf(approx, Eigen::VectorXd(0), 0), c.grid);
      const double sup = sup_abs(curve);
      mean_sup[i] += sup / c.replicates;
      if (r == 0) {
        first_sup[i] = sup;
        curves.push_back(curve);
        std::vector<double> v;
        for (int g = 0; g <= c.grid; ++g) v.push_back(approx.variance_at(Eigen::VectorXd::Constant(1, double(g) / c.grid)));
        density.push_back(std::move(v));
      }
    }
  }

  // Seed-matched chains: every method sees the same variates and the first
  // `shared` exact points.
  std::vector<double> variates;
  {
    UniformStream stream(c.seed);
    for (int i = 0; i < c.num; ++i) variates.push_back(stream.next());
  }
  std::vector<Eigen::MatrixXd> approx_rows;
  for (int rank : c.ranks) {
    ApproxState approx(make_basis(c, spec, rank));
    UniformStream stream(c.seed);
    for (int i = 0; i < shared; ++i) {
      approx.push(exact_rows.row(i).transpose());
      stream.next();
    }
    Eigen::MatrixXd rows(c.num, 1);
    rows.topRows(shared) = exact_rows.topRows(shared);
    rows.bottomRows(c.num - shared) = approx_draw_more(approx, stream, c.num - shared, opts);
    approx_rows.push_back(std::move(rows));
  }

  const fs::path dir = output_path(c.out, "compare");
  fs::create_directories(dir);
  auto header = [&](std::ostream& os, const std::string& first, const std::string& prefix) {
    os << first;
    for (int rank : c.ranks) os << ',' << prefix << rank;
    os << '\n';
  };
  {
    std::ofstream os = open_output((dir / "deviation.csv").string());
    header(os, "x", "F");
    for (int g = 0; g <= c.grid; ++g) {
      os << format_real(user_x(double(g) / c.grid));
      for (const auto& curve : curves) os << ',' << format_real(curve[static_cast<std::size_t>(g)]);
      os << '\n';
    }
  }
  {
    std::ofstream os = open_output((dir / "density.csv").string());
    header(os, "x,exact", "F");
    for (int g = 0; g <= c.grid; ++g) {
      os << format_real(user_x(double(g) / c.grid)) << ',' << format_real(exact_density[static_cast<std::size_t>(g)]);
      for (const auto& v : density) os << ',' << format_real(v[static_cast<std::size_t>(g)]);
      os << '\n';
    }
  }
  {
    std::ofstream os = open_output((dir / "samples.csv").string());
    header(os, "index,u,exact", "F");
    for (int i = 0; i < c.num; ++i) {
      os << i + 1 << ',' << format_real(variates[static_cast<std::size_t>(i)]) << ','
         << format_real(user_x(exact_rows(i, 0)));
      for (const auto& rows : approx_rows) os << ',' << format_real(user_x(rows(i, 0)));
      os << '\n';
    }
  }

  auto tagged = [&](const Eigen::MatrixXd& rows, const std::string& tag) {
    oracle::CoverageReport rep = oracle::coverage_metrics(rows);
    rep.method = tag;
    rep.seeds = {c.seed};
    return coverage_json(rep);
  };
  nlohmann::json coverage = {{"exact", tagged(exact_rows, "exact")},
                             {"uniform", tagged(draw_uniform(1, c.num, c.seed).points, "uniform")}};
  nlohmann::json per_rank = nlohmann::json::array();
  bool non_increasing = true;
  for (std::size_t i = 0; i < c.ranks.size(); ++i) {
    if (i > 0 && mean_sup[i] > mean_sup[i - 1]) non_increasing = false;
    const std::string tag = std::string(to_string(c.method)) + "-F" + std::to_string(c.ranks[i]);
    coverage[tag] = tagged(approx_rows[i], tag);
    per_rank.push_back({{"rank", c.ranks[i]}, {"sup_deviation", first_sup[i]}, {"mean_sup_deviation", mean_sup[i]}});
  }
  const nlohmann::json summary = {{"schema", "exactdpp.compare"},
                                  {"schema_version", kCompareSchemaVersion},
                                  {"version", kVersion},
                                  {"config", to_json(c)},
                                  {"shared", shared},
                                  {"deviation", per_rank},
                                  {"non_increasing", non_increasing},
                                  {"coverage", coverage}};
  std::ofstream os = open_output((dir / "summary.json").string());
  os << summary.dump(2) << '\n';

  out << "method " << to_string(c.method) << ", " << c.replicates << " replicate(s)\n";
  for (std::size_t i = 0; i < c.ranks.size(); ++i) {
    out << "F=" << c.ranks[i] << "  sup deviation " << first_sup[i] << "  mean " << mean_sup[i] << '\n';
  }
  out << "sup deviation " << (non_increasing ? "non-increasing" : "NOT non-increasing") << " in F; files in "
      << dir.string() << '\n';
  return kExitOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact and approximate sampling of determinantal point processes on boxes"};
  app.name("exactdpp");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  RunConfig config;
  KernelFlags sample_flags;
  KernelFlags compare_flags;
  std::string ranks_text;
  std::string compare_ranks_text;
  int rank = 10;

  CLI::App* sample = app.add_subcommand("sample", "Draw a point set and write it as CSV or JSON");
  add_kernel_flags(sample, config, sample_flags);
  sample->add_option("--dim", config.dim, "Dimension")->capture_default_str();
  sample->add_option("--num", config.num, "Number of points (>= 1)")->capture_default_str();
  sample->add_option("--method", sample_flags.method, "exact, nystrom, spectral or uniform (default exact)");
  sample->add_option("--rank", rank, "Feature count F for nystrom / spectral")->capture_default_str();
  sample->add_option("--out", config.out,
                     std::string("Output file, '-' for stdout (default samples.<format> in $") + kOutputDirEnv + ")");
  sample->add_option("--format", sample_flags.format, "csv or json (default: from the --out extension, else csv)");

  CLI::App* validate = app.add_subcommand("validate", "Run the oracle validation suite and write a JSON report");
  validate->add_option("--scale", config.scale, "Multiplier for configuration counts")->capture_default_str();
  validate->add_option("--seed", config.seed, "Base seed")->capture_default_str();
  validate->add_option("--out", config.out,
                       std::string("Report path (default validation_report.json in $") + kOutputDirEnv + ")");

  CLI::App* compare = app.add_subcommand("compare", "Compare exact and finite-rank sampling in 1D");
  add_kernel_flags(compare, config, compare_flags);
  compare->add_option("--method", compare_flags.method, "nystrom or spectral")->required();
  compare->add_option("--ranks", compare_ranks_text, "Comma-separated feature counts, e.g. 5,10,15")->required();
  compare->add_option("--num", config.num, "Exact points conditioned on / drawn per chain");
  compare->add_option("--shared", config.shared, "Leading exact samples shared by every chain")->capture_default_str();
  compare->add_option("--replicates", config.replicates, "Seeds averaged for the mean sup deviation")
      ->capture_default_str();
  compare->add_option("--grid", config.grid, "Grid intervals for the deviation curves")->capture_default_str();
  compare->add_option("--out", config.out,
                      std::string("Output directory (default compare/ in $") + kOutputDirEnv + ")");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* active = app.get_subcommands().front();
  try {
    if (active == sample) {
      config.command = Command::Sample;
      apply_kernel_flags(config, sample_flags, 0.1);
      config.ranks = {rank};
      if (sample_flags.format.empty()) {
        config.format = ends_with(config.out, ".json") ? "json" : "csv";
      } else {
        config.format = sample_flags.format;
      }
      resolve(config);
    } else if (active == compare) {
      config.command = Command::Compare;
      config.dim = 1;
      if (compare->count("--num") == 0) config.num = 100;
      apply_kernel_flags(config, compare_flags, 0.0075);
      config.ranks = parse_int_list(compare_ranks_text);
      if (config.ranks.empty()) throw UsageError("--ranks needs at least one feature count");
      if (config.method != SampleMethod::Nystrom && config.method != SampleMethod::Spectral) {
        throw UsageError("compare --method must be nystrom or spectral");
      }
      if (config.shared < 0) throw UsageError("--shared must be nonnegative");
      if (config.replicates < 1) throw UsageError("--replicates must be at least 1");
      if (config.grid < 1) throw UsageError("--grid must be at least 1");
      resolve(config);
    } else {
      config.command = Command::Validate;
      if (!(config.scale > 0.0)) throw UsageError("--scale must be positive");
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << active->help();
    return kExitUsage;
  }

  try {
    switch (config.command) {
      case Command::Sample:
        return cmd_sample(config, out, err);
      case Command::Validate:
        return cmd_validate(config, out, err);
      case Command::Compare:
        return cmd_compare(config, out, err);
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n\n" << active->help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace exactdpp::cli
