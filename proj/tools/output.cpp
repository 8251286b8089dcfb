#include "output.hpp"

#include "config.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace afckf::cli {

namespace fs = std::filesystem;

std::string summary_csv(const RunReport& report) {
  std::ostringstream out;
  out << "variant,case,avg_rmse_pos_m,avg_rmse_vel_mps,failed_epochs\n";
  for (const CaseReport& c : report.cases) {
    for (const VariantReport& v : c.variants) {
      out << to_string(v.variant) << ',' << to_string(c.id) << ','
          << format_double(v.position.average) << ',' << format_double(v.velocity.average) << ','
          << v.failed_epochs << '\n';
    }
  }
  return out.str();
}

std::string summary_table(const RunReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(14) << "variant";
  for (const CaseReport& c : report.cases) {
    out << std::right << std::setw(14) << ("Case " + to_string(c.id) + " [m]")
        << std::setw(16) << ("Case " + to_string(c.id) + " [m/s]");
  }
  out << '\n';
  if (report.cases.empty()) {
    return out.str();
  }
  out << std::fixed << std::setprecision(3);
  for (std::size_t i = 0; i < report.cases.front().variants.size(); ++i) {
    out << std::left << std::setw(14) << to_string(report.cases.front().variants[i].variant);
    for (const CaseReport& c : report.cases) {
      const VariantReport& v = c.variants[i];
      out << std::right << std::setw(14) << v.position.average << std::setw(16)
          << v.velocity.average;
    }
    out << '\n';
  }
  return out.str();
}

std::string rmse_csv(const CaseReport& report, double ts, bool position) {
  std::ostringstream out;
  out << "epoch,time_s,variant," << (position ? "rmse_m" : "rmse_mps") << '\n';
  for (const VariantReport& v : report.variants) {
    const ErrorSeries& series = position ? v.position : v.velocity;
    for (std::size_t k = 0; k < series.per_epoch.size(); ++k) {
      const auto epoch = static_cast<int>(k) + 1;
      out << epoch << ',' << format_double(epoch * ts) << ',' << to_string(v.variant) << ','
          << format_double(series.per_epoch[k]) << '\n';
    }
  }
  return out.str();
}

std::string factors_csv(const VariantReport& report, double ts) {
  std::ostringstream out;
  out << "epoch,time_s,variant,a1,a2,tr_c_hat,tr_pzz,tr_r_star,tr_q_star,floored_fraction,"
         "failed_fraction\n";
  std::size_t epochs = 0;
  for (const auto& run : report.telemetry) {
    epochs = std::max(epochs, run.size());
  }
  for (std::size_t k = 0; k < epochs; ++k) {
    double a1 = 0, a2 = 0, tr_c = 0, tr_pzz = 0, tr_r = 0, tr_q = 0, floored = 0, failed = 0;
    int count = 0;
    for (const auto& run : report.telemetry) {
      if (k >= run.size()) continue;
      const EpochTelemetry& t = run[k];
      a1 += t.a1;
      a2 += t.a2;
      tr_c += t.tr_c_hat;
      tr_pzz += t.tr_pzz;
      tr_r += t.tr_r_star;
      tr_q += t.tr_q_star;
      floored += t.floored ? 1.0 : 0.0;
      failed += t.failed ? 1.0 : 0.0;
      ++count;
    }
    const double n = count;
    const auto epoch = static_cast<int>(k) + 1;
    out << epoch << ',' << format_double(epoch * ts) << ',' << to_string(report.variant) << ','
        << format_double(a1 / n) << ',' << format_double(a2 / n) << ','
        << format_double(tr_c / n) << ',' << format_double(tr_pzz / n) << ','
        << format_double(tr_r / n) << ',' << format_double(tr_q / n) << ','
        << format_double(floored / n) << ',' << format_double(failed / n) << '\n';
  }
  return out.str();
}

namespace {

void write_file(const fs::path& path, const std::string& content,
                std::vector<fs::path>& written) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
  written.push_back(path);
  out << content;
  if (!content.empty() && content.back() != '\n') {
    out << '\n';
  }
  if (!out) {
    throw std::runtime_error("failed writing '" + path.string() + "'");
  }
}

}  // namespace

std::vector<fs::path> write_bundle(const RunReport& report, const RunConfig& config,
                                   const fs::path& out_dir) {
  std::vector<fs::path> written;
  try {
    fs::create_directories(out_dir);
    write_file(out_dir / "summary.csv", summary_csv(report), written);
    write_file(out_dir / "config_resolved.yaml", dump_config(config), written);
    for (const CaseReport& c : report.cases) {
      const fs::path dir = out_dir / ("case_" + to_string(c.id));
      fs::create_directories(dir);
      write_file(dir / "rmse_position.csv", rmse_csv(c, config.model.ts, true), written);
      write_file(dir / "rmse_velocity.csv", rmse_csv(c, config.model.ts, false), written);
      for (const VariantReport& v : c.variants) {
        write_file(dir / ("factors_" + to_string(v.variant) + ".csv"),
                   factors_csv(v, config.model.ts), written);
      }
    }
  } catch (...) {
    for (const fs::path& p : written) {
      std::error_code ec;
      fs::remove(p, ec);
    }
    throw;
  }
  return written;
}

}  // namespace afckf::cli
