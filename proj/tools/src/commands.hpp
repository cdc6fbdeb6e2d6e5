#pragma once

#include "config.hpp"

#include "exactdpp/point_set.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <string>
#include <vector>

namespace exactdpp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "EXACTDPP_OUTPUT_DIR";

inline constexpr int kReportSchemaVersion = 1;
inline constexpr int kPointsSchemaVersion = 1;
inline constexpr int kCompareSchemaVersion = 1;

/// Full command line entry point; never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int cmd_sample(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_validate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_compare(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Maps unit-cube rows into the box (identity for an empty box).
Eigen::MatrixXd to_box(const Eigen::MatrixXd& unit_rows, const std::vector<Interval>& box);

void write_csv(std::ostream& os, const Eigen::MatrixXd& rows);
nlohmann::json points_json(const Eigen::MatrixXd& box_rows, const PointSet& set, const RunConfig& config);

/// Reads a points CSV written by write_csv (header plus rows).
Eigen::MatrixXd read_csv(std::istream& is);
/// Reads the "points" array of a points JSON document.
Eigen::MatrixXd read_points_json(std::istream& is);

/// Resolves the output path: --out if given, otherwise `fallback` inside the
/// directory named by EXACTDPP_OUTPUT_DIR (or the working directory).
std::string output_path(const std::string& out, const std::string& fallback);

}  // namespace exactdpp::cli
