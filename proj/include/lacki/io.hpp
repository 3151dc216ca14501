#pragma once

// CSV datasets and JSON model files.
//
// Dataset CSV: mandatory header x_1..x_d,y_1..y_m (query files carry only
// x_1..x_d); decimal floats; no missing or non-finite cells.
// Model JSON: {"format": "lacki-model-v1", "config": {...}, "ell": L,
//              "input_dim": d, "output_dim": m, "inputs": [[...]], "observations": [[...]]}

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lacki/dataset.hpp"
#include "lacki/errors.hpp"
#include "lacki/lacki.hpp"

namespace lacki::io {

using json = nlohmann::json;

inline constexpr const char* kModelFormat = "lacki-model-v1";

namespace detail {

inline std::vector<std::string_view> split_row(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    cells.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  for (auto& c : cells) {
    while (!c.empty() && (c.front() == ' ' || c.front() == '\t')) c.remove_prefix(1);
    while (!c.empty() && (c.back() == ' ' || c.back() == '\t' || c.back() == '\r')) c.remove_suffix(1);
  }
  return cells;
}

inline double parse_cell(std::string_view cell, std::size_t row, std::size_t col) {
  double v = 0;
  const auto* first = cell.data();
  const auto* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (cell.empty() || ec != std::errc() || ptr != last) {
    throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(col) +
                     ": cannot parse '" + std::string(cell) + "' as a number");
  }
  if (!std::isfinite(v)) {
    throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(col) +
                     ": non-finite value '" + std::string(cell) + "'");
  }
  return v;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("failed writing '" + path + "'");
}

/// Counts header columns named `<prefix>1..k`; they must be contiguous.
inline std::size_t count_prefixed(const std::vector<std::string_view>& header, std::size_t offset,
                                  std::string_view prefix) {
  std::size_t k = 0;
  while (offset + k < header.size() && header[offset + k] == std::string(prefix) + std::to_string(k + 1)) {
    ++k;
  }
  return k;
}

}  // namespace detail

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

/// Parses a dataset CSV with header x_1..x_d,y_1..y_m.
inline Dataset parse_dataset_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing CSV header");
  const auto header = detail::split_row(line);
  const std::size_t d = detail::count_prefixed(header, 0, "x_");
  const std::size_t m = detail::count_prefixed(header, d, "y_");
  if (d == 0 || m == 0 || d + m != header.size()) {
    throw ParseError("header must be x_1..x_d,y_1..y_m with d, m >= 1");
  }
  Dataset data(d, m);
  std::vector<double> x(d), y(m);
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = detail::split_row(line);
    if (cells.size() != d + m) {
      throw ParseError("row " + std::to_string(row) + ": expected " + std::to_string(d + m) +
                       " cells, found " + std::to_string(cells.size()));
    }
    for (std::size_t k = 0; k < d; ++k) x[k] = detail::parse_cell(cells[k], row, k + 1);
    for (std::size_t j = 0; j < m; ++j) y[j] = detail::parse_cell(cells[d + j], row, d + j + 1);
    data.add(x, y);
  }
  return data;
}

inline Dataset read_dataset_csv(const std::string& path) { return parse_dataset_csv(detail::read_file(path)); }

inline std::string format_dataset_csv(const Dataset& data) {
  std::string out;
  for (std::size_t k = 0; k < data.input_dim(); ++k) out += (k ? ",x_" : "x_") + std::to_string(k + 1);
  for (std::size_t j = 0; j < data.output_dim(); ++j) out += ",y_" + std::to_string(j + 1);
  out += '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto s = data.input(i);
    const auto f = data.observation(i);
    for (std::size_t k = 0; k < s.size(); ++k) out += (k ? "," : "") + format_double(s[k]);
    for (double v : f) out += "," + format_double(v);
    out += '\n';
  }
  return out;
}

/// Query CSV: header x_1..x_d. Returns rows flattened row-major.
struct QueryTable {
  std::size_t d = 0;
  std::vector<double> values;
  std::size_t rows() const { return d == 0 ? 0 : values.size() / d; }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * d, d}; }
};

inline QueryTable parse_query_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  QueryTable q;
  if (!std::getline(in, line)) return q;  // empty file: no queries
  const auto header = detail::split_row(line);
  q.d = detail::count_prefixed(header, 0, "x_");
  if (q.d == 0 || q.d != header.size()) throw ParseError("query header must be x_1..x_d");
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = detail::split_row(line);
    if (cells.size() != q.d) {
      throw ParseError("row " + std::to_string(row) + ": expected " + std::to_string(q.d) + " cells");
    }
    for (std::size_t k = 0; k < q.d; ++k) q.values.push_back(detail::parse_cell(cells[k], row, k + 1));
  }
  return q;
}

// --- JSON ------------------------------------------------------------------

/// Strict object reader: every key must be consumed, unknown keys are errors.
class StrictObject {
 public:
  StrictObject(const json& j, std::string context) : j_(j), context_(std::move(context)) {
    if (!j_.is_object()) throw ParseError(context_ + ": expected a JSON object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& at(const std::string& key) {
    if (!j_.contains(key)) throw ParseError(context_ + ": missing key '" + key + "'");
    seen_.push_back(key);
    return j_.at(key);
  }

  template <typename T>
  T get(const std::string& key) {
    try {
      return at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(context_ + "." + key + ": " + e.what());
    }
  }

  template <typename T>
  T get_or(const std::string& key, T fallback) {
    return has(key) ? get<T>(key) : fallback;
  }

  /// Throws on any key that was never read.
  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) {
        throw ParseError(context_ + ": unknown key '" + key + "'");
      }
    }
  }

  const std::string& context() const { return context_; }

 private:
  const json& j_;
  std::string context_;
  std::vector<std::string> seen_;
};

namespace detail {

/// Bounds: null entries stand for the matching infinity.
inline json bound_to_json(const std::optional<std::vector<double>>& b) {
  if (!b) return nullptr;
  json arr = json::array();
  for (double v : *b) arr.push_back(std::isfinite(v) ? json(v) : json(nullptr));
  return arr;
}

inline std::optional<std::vector<double>> bound_from_json(const json& j, double infinity,
                                                          const std::string& ctx) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_array()) throw ParseError(ctx + ": expected an array or null");
  std::vector<double> out;
  for (const auto& v : j) {
    if (v.is_null()) {
      out.push_back(infinity);
    } else if (v.is_number()) {
      out.push_back(v.get<double>());
    } else {
      throw ParseError(ctx + ": entries must be numbers or null");
    }
  }
  return out;
}

}  // namespace detail

inline json metric_to_json(const InputMetric& metric) {
  switch (metric.kind()) {
    case InputMetric::Kind::MaxNorm: return {{"kind", "max"}};
    case InputMetric::Kind::EuclideanNorm: return {{"kind", "euclidean"}};
    case InputMetric::Kind::WeightedMaxNorm: return {{"kind", "weighted_max"}, {"weights", metric.weights()}};
  }
  return nullptr;
}

inline InputMetric metric_from_json(const json& j, const std::string& ctx) {
  StrictObject o(j, ctx);
  const auto kind = o.get<std::string>("kind");
  InputMetric metric;
  if (kind == "max") {
    metric = InputMetric::max_norm();
  } else if (kind == "euclidean") {
    metric = InputMetric::euclidean();
  } else if (kind == "weighted_max") {
    metric = InputMetric::weighted_max(o.get<std::vector<double>>("weights"));
  } else {
    throw ParseError(ctx + ".kind: unknown metric '" + kind + "'");
  }
  o.finish();
  return metric;
}

inline json ki_config_to_json(const KiConfig& c) {
  return {{"alpha", c.alpha},
          {"lambda", c.lambda},
          {"l_floor", c.l_floor},
          {"e_bar", c.e_bar},
          {"lower_bound", detail::bound_to_json(c.lower_bound)},
          {"upper_bound", detail::bound_to_json(c.upper_bound)},
          {"metric", metric_to_json(c.metric)}};
}

/// Missing keys keep the values already in `base`.
inline KiConfig ki_config_from_json(const json& j, const std::string& ctx, KiConfig base = {}) {
  StrictObject o(j, ctx);
  base.alpha = o.get_or("alpha", base.alpha);
  base.lambda = o.get_or("lambda", base.lambda);
  base.l_floor = o.get_or("l_floor", base.l_floor);
  base.e_bar = o.get_or("e_bar", base.e_bar);
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (o.has("lower_bound")) base.lower_bound = detail::bound_from_json(o.at("lower_bound"), -inf, ctx + ".lower_bound");
  if (o.has("upper_bound")) base.upper_bound = detail::bound_from_json(o.at("upper_bound"), inf, ctx + ".upper_bound");
  if (o.has("metric")) base.metric = metric_from_json(o.at("metric"), ctx + ".metric");
  o.finish();
  base.validate();
  return base;
}

inline json model_to_json(const LackiState& state) {
  const auto& data = state.data();
  json inputs = json::array();
  json observations = json::array();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto s = data.input(i);
    const auto f = data.observation(i);
    inputs.push_back(std::vector<double>(s.begin(), s.end()));
    observations.push_back(std::vector<double>(f.begin(), f.end()));
  }
  return {{"format", kModelFormat},
          {"config", ki_config_to_json(state.config())},
          {"ell", state.ell()},
          {"input_dim", data.input_dim()},
          {"output_dim", data.output_dim()},
          {"inputs", std::move(inputs)},
          {"observations", std::move(observations)}};
}

inline LackiState model_from_json(const json& j) {
  StrictObject o(j, "model");
  if (o.get<std::string>("format") != kModelFormat) {
    throw ParseError("model: unsupported format (expected '" + std::string(kModelFormat) + "')");
  }
  const KiConfig config = ki_config_from_json(o.at("config"), "model.config");
  const auto ell = o.get<double>("ell");
  const auto d = o.get<std::size_t>("input_dim");
  const auto m = o.get<std::size_t>("output_dim");
  const auto inputs = o.get<std::vector<std::vector<double>>>("inputs");
  const auto observations = o.get<std::vector<std::vector<double>>>("observations");
  o.finish();
  if (inputs.size() != observations.size()) throw ParseError("model: inputs and observations differ in count");
  if (!(ell >= config.l_floor) || !std::isfinite(ell)) throw ParseError("model: ell must be finite and >= l_floor");
  Dataset data(d, m);
  for (std::size_t i = 0; i < inputs.size(); ++i) data.add(inputs[i], observations[i]);
  return LackiState::restore(std::move(data), config, ell);
}

inline void write_model(const std::string& path, const LackiState& state) {
  detail::write_file(path, model_to_json(state).dump(2) + "\n");
}

inline LackiState read_model(const std::string& path) {
  const std::string text = detail::read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("model '" + path + "': " + e.what());
  }
  return model_from_json(j);
}

}  // namespace lacki::io
