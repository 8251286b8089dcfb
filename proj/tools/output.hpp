#pragma once

#include "afckf/simulator.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace afckf::cli {

/// summary.csv: variant,case,avg_rmse_pos_m,avg_rmse_vel_mps,failed_epochs
std::string summary_csv(const RunReport& report);

/// Variant rows, one position/velocity column pair per case.
std::string summary_table(const RunReport& report);

/// epoch,time_s,variant,rmse_m (position) or rmse_mps (velocity).
std::string rmse_csv(const CaseReport& report, double ts, bool position);

/// Per-epoch telemetry averaged over runs for one variant.
std::string factors_csv(const VariantReport& report, double ts);

/// Writes the whole bundle under out_dir and returns the paths written:
///   summary.csv, config_resolved.yaml,
///   case_<X>/rmse_position.csv, case_<X>/rmse_velocity.csv,
///   case_<X>/factors_<variant>.csv
std::vector<std::filesystem::path> write_bundle(const RunReport& report, const RunConfig& config,
                                                const std::filesystem::path& out_dir);

}  // namespace afckf::cli
