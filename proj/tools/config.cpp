#include "config.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

namespace afckf::cli {

namespace {

std::string where(const YAML::Node& node) {
  const YAML::Mark mark = node.Mark();
  if (mark.is_null()) {
    return "";
  }
  return "line " + std::to_string(mark.line + 1) + ", column " + std::to_string(mark.column + 1) +
         ": ";
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& what) {
  throw ParseError(where(node) + "field '" + field + "': " + what);
}

void check_keys(const YAML::Node& map, const std::string& section,
                std::initializer_list<std::string_view> allowed) {
  if (!map.IsMap()) {
    fail(map, section.empty() ? "<root>" : section, "expected a mapping");
  }
  for (const auto& entry : map) {
    const auto key = entry.first.as<std::string>();
    bool known = false;
    for (std::string_view a : allowed) {
      known = known || key == a;
    }
    if (!known) {
      const std::string full = section.empty() ? key : section + "." + key;
      throw ParseError(where(entry.first) + "unknown key '" + full + "'");
    }
  }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& field, const char* expected) {
  if (!node.IsScalar()) {
    fail(node, field, std::string("expected ") + expected);
  }
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(node, field, std::string("expected ") + expected + ", got '" + node.Scalar() + "'");
  }
}

double real(const YAML::Node& node, const std::string& field) {
  return scalar<double>(node, field, "a number");
}

Vector vector_of(const YAML::Node& node, const std::string& field) {
  if (!node.IsSequence() || node.size() == 0) {
    fail(node, field, "expected a non-empty list of numbers");
  }
  Vector v(static_cast<Eigen::Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = real(node[i], field + "[" + std::to_string(i) + "]");
  }
  return v;
}

// A flat list is a diagonal; a list of rows is a full matrix.
Matrix matrix_of(const YAML::Node& node, const std::string& field) {
  if (!node.IsSequence() || node.size() == 0) {
    fail(node, field, "expected a list (diagonal) or a list of rows");
  }
  if (!node[0].IsSequence()) {
    return vector_of(node, field).asDiagonal();
  }
  const auto rows = static_cast<Eigen::Index>(node.size());
  Matrix m(rows, rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::string row_field = field + "[" + std::to_string(r) + "]";
    const Vector row = vector_of(node[r], row_field);
    if (row.size() != rows) {
      fail(node[r], row_field, "row length must equal the number of rows");
    }
    m.row(r) = row.transpose();
  }
  return m;
}

std::vector<CaseId> cases_of(const YAML::Node& node) {
  std::vector<CaseId> cases;
  auto one = [&](const YAML::Node& item) {
    const auto text = scalar<std::string>(item, "case", "A or B");
    const auto id = parse_case(text);
    if (!id) {
      fail(item, "case", "expected A or B, got '" + text + "'");
    }
    cases.push_back(*id);
  };
  if (node.IsSequence()) {
    for (const auto& item : node) one(item);
  } else {
    one(node);
  }
  return cases;
}

std::vector<Variant> variants_of(const YAML::Node& node) {
  if (node.IsScalar() && node.Scalar() == "all") {
    return all_variants();
  }
  if (!node.IsSequence()) {
    fail(node, "variants", "expected a list of variant names or 'all'");
  }
  std::vector<Variant> variants;
  for (const auto& item : node) {
    const auto text = scalar<std::string>(item, "variants", "a variant name");
    const auto v = parse_variant(text);
    if (!v) {
      fail(item, "variants", "unknown variant '" + text + "'");
    }
    variants.push_back(*v);
  }
  return variants;
}

void parse_model(const YAML::Node& node, ModelParams& model) {
  check_keys(node, "model", {"measurement", "ts", "q0", "r0", "q_true", "x0", "p0"});
  bool q_true_given = false;
  for (const auto& entry : node) {
    const auto key = entry.first.as<std::string>();
    const YAML::Node& value = entry.second;
    const std::string field = "model." + key;
    if (key == "measurement") {
      const auto text = scalar<std::string>(value, field, "range_bearing or position");
      const auto kind = parse_measurement_kind(text);
      if (!kind) fail(value, field, "expected range_bearing or position, got '" + text + "'");
      model.measurement = *kind;
    } else if (key == "ts") {
      model.ts = real(value, field);
    } else if (key == "q0") {
      model.q0 = matrix_of(value, field);
    } else if (key == "r0") {
      model.r0 = matrix_of(value, field);
    } else if (key == "q_true") {
      model.q_true = matrix_of(value, field);
      q_true_given = true;
    } else if (key == "x0") {
      model.x0 = vector_of(value, field);
    } else if (key == "p0") {
      model.p0 = matrix_of(value, field);
    }
  }
  // Matched process noise unless stated otherwise.
  if (!q_true_given) {
    model.q_true = model.q0;
  }
}

RunConfig from_node(const YAML::Node& root) {
  RunConfig config;
  if (!root.IsDefined() || root.IsNull()) {
    return config;
  }
  check_keys(root, "",
             {"seed", "runs", "steps", "case", "variants", "threads", "model", "case_b",
              "adaptive"});
  for (const auto& entry : root) {
    const auto key = entry.first.as<std::string>();
    const YAML::Node& value = entry.second;
    if (key == "seed") {
      config.seed = scalar<std::uint64_t>(value, key, "a non-negative integer");
    } else if (key == "runs") {
      config.runs = scalar<int>(value, key, "an integer");
    } else if (key == "steps") {
      config.steps = scalar<int>(value, key, "an integer");
    } else if (key == "threads") {
      config.threads = scalar<int>(value, key, "an integer");
    } else if (key == "case") {
      config.cases = cases_of(value);
    } else if (key == "variants") {
      config.variants = variants_of(value);
    } else if (key == "model") {
      parse_model(value, config.model);
    } else if (key == "case_b") {
      check_keys(value, "case_b", {"gamma", "start_epoch", "end_epoch"});
      for (const auto& e : value) {
        const auto k = e.first.as<std::string>();
        const std::string field = "case_b." + k;
        if (k == "gamma") config.inflation_gamma = real(e.second, field);
        if (k == "start_epoch") config.inflation_start = scalar<int>(e.second, field, "an integer");
        if (k == "end_epoch") config.inflation_end = scalar<int>(e.second, field, "an integer");
      }
    } else if (key == "adaptive") {
      check_keys(value, "adaptive", {"window", "a_max", "eps_r", "estimate_q"});
      for (const auto& e : value) {
        const auto k = e.first.as<std::string>();
        const std::string field = "adaptive." + k;
        if (k == "window") config.adaptive.window = scalar<int>(e.second, field, "an integer");
        if (k == "a_max") config.adaptive.a_max = real(e.second, field);
        if (k == "eps_r") config.adaptive.eps_r = real(e.second, field);
        if (k == "estimate_q") {
          config.adaptive.estimate_q = scalar<bool>(e.second, field, "true or false");
        }
      }
    }
  }
  return config;
}

std::string list_of(const Vector& v) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_double(v(i));
  }
  return out + "]";
}

std::string rows_of(const Matrix& m) {
  std::string out = "[";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (r > 0) out += ", ";
    out += list_of(m.row(r).transpose());
  }
  return out + "]";
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError("line " + std::to_string(e.mark.line + 1) + ", column " +
                     std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
  RunConfig config = from_node(root);
  try {
    validate(config);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open config file '" + path.string() + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string dump_config(const RunConfig& config) {
  const InflationSchedule schedule = inflation_schedule(config);
  std::ostringstream out;
  out << "seed: " << config.seed << "\n";
  out << "runs: " << config.runs << "\n";
  out << "steps: " << config.steps << "\n";
  out << "case: [";
  for (std::size_t i = 0; i < config.cases.size(); ++i) {
    out << (i > 0 ? ", " : "") << to_string(config.cases[i]);
  }
  out << "]\n";
  out << "variants: [";
  for (std::size_t i = 0; i < config.variants.size(); ++i) {
    out << (i > 0 ? ", " : "") << to_string(config.variants[i]);
  }
  out << "]\n";
  out << "threads: " << config.threads << "\n";
  out << "model:\n";
  out << "  measurement: " << to_string(config.model.measurement) << "\n";
  out << "  ts: " << format_double(config.model.ts) << "\n";
  out << "  q0: " << rows_of(config.model.q0) << "\n";
  out << "  r0: " << rows_of(config.model.r0) << "\n";
  out << "  q_true: " << rows_of(config.model.q_true) << "\n";
  out << "  x0: " << list_of(config.model.x0) << "\n";
  out << "  p0: " << rows_of(config.model.p0) << "\n";
  out << "case_b:\n";
  out << "  gamma: " << format_double(schedule.gamma) << "\n";
  out << "  start_epoch: " << schedule.start_epoch << "\n";
  out << "  end_epoch: " << schedule.end_epoch << "\n";
  out << "adaptive:\n";
  out << "  window: " << config.adaptive.window << "\n";
  out << "  a_max: " << format_double(config.adaptive.a_max) << "\n";
  out << "  eps_r: " << format_double(config.adaptive.eps_r) << "\n";
  out << "  estimate_q: " << (config.adaptive.estimate_q ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace afckf::cli
