/*
 * Copyright 2026 The M-GAM Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "mgam/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mgam/error.hpp"
#include "mgam/random.hpp"

namespace mgam {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kInvalidArgument: return "invalid_argument";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kLimit: return "limit";
    case ErrorKind::kMismatch: return "mismatch";
  }
  return "unknown";
}

Dataset::Dataset(std::vector<std::string> feature_names, std::size_t rows)
    : feature_names_(std::move(feature_names)),
      values_(rows * feature_names_.size(), 0.0),
      reasons_(rows * feature_names_.size(), 0),
      labels_(rows, 0) {}

void Dataset::set_value(std::size_t i, std::size_t j, double v) {
  if (!std::isfinite(v)) {
    throw Error(ErrorKind::kInvalidArgument, "non-finite feature value");
  }
  values_[i * d() + j] = v;
  reasons_[i * d() + j] = 0;
}

void Dataset::set_absent(std::size_t i, std::size_t j, Reason reason) {
  if (reason == 0) {
    throw Error(ErrorKind::kInvalidArgument, "absent cell needs reason >= 1");
  }
  values_[i * d() + j] = std::numeric_limits<double>::quiet_NaN();
  reasons_[i * d() + j] = reason;
}

void Dataset::set_label(std::size_t i, int y) {
  if (y != 0 && y != 1) {
    throw Error(ErrorKind::kInvalidArgument, "label must be 0 or 1");
  }
  labels_[i] = y;
}

std::optional<std::size_t> Dataset::feature_index(
    const std::string& name) const {
  auto it = std::find(feature_names_.begin(), feature_names_.end(), name);
  if (it == feature_names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - feature_names_.begin());
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  Dataset out(feature_names_, rows.size());
  const std::size_t width = d();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t src = rows[r];
    std::copy_n(values_.begin() + src * width, width,
                out.values_.begin() + r * width);
    std::copy_n(reasons_.begin() + src * width, width,
                out.reasons_.begin() + r * width);
    out.labels_[r] = labels_[src];
  }
  out.n_reasons_ = n_reasons_;
  out.overall_reason_ = overall_reason_;
  out.metadata = metadata;
  return out;
}

bool Dataset::operator==(const Dataset& other) const {
  if (feature_names_ != other.feature_names_ || labels_ != other.labels_ ||
      reasons_ != other.reasons_ || n_reasons_ != other.n_reasons_ ||
      overall_reason_ != other.overall_reason_) {
    return false;
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (reasons_[k] == 0 && values_[k] != other.values_[k]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Encoding map

Reason EncodingMap::resolved_na_reason() const {
  if (na_reason != 0) return na_reason;
  Reason top = 0;
  for (const auto& [col, sentinels] : columns) {
    for (const auto& [text, code] : sentinels) top = std::max(top, code);
  }
  return static_cast<Reason>(top + 1);
}

EncodingMap parse_encoding_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("encoding json: ") + e.what());
  }
  EncodingMap enc;
  try {
    if (j.contains("na_token") && !j["na_token"].is_null()) {
      enc.na_token = j["na_token"].get<std::string>();
    }
    if (j.contains("na_reason") && !j["na_reason"].is_null()) {
      int r = j["na_reason"].get<int>();
      if (r < 1) throw Error(ErrorKind::kParse, "na_reason must be >= 1");
      enc.na_reason = static_cast<Reason>(r);
    }
    enc.add_overall_reason = j.value("add_overall_reason", false);
    if (j.contains("columns")) {
      for (const auto& [name, sentinels] : j["columns"].items()) {
        auto& dst = enc.columns[name];
        for (const auto& [sentinel, code] : sentinels.items()) {
          int c = code.get<int>();
          if (c < 1) {
            throw Error(ErrorKind::kParse,
                        "reason codes must be >= 1 (column " + name + ")");
          }
          dst[sentinel] = static_cast<Reason>(c);
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("encoding json: ") + e.what());
  }
  return enc;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out << text;
}

}  // namespace

EncodingMap load_encoding_json(const std::string& path) {
  return parse_encoding_json(read_file(path));
}

std::string encoding_to_json(const EncodingMap& enc) {
  nlohmann::ordered_json j;
  j["na_token"] = enc.na_token ? nlohmann::ordered_json(*enc.na_token)
                               : nlohmann::ordered_json(nullptr);
  if (enc.na_reason != 0) j["na_reason"] = enc.na_reason;
  j["add_overall_reason"] = enc.add_overall_reason;
  nlohmann::ordered_json cols = nlohmann::ordered_json::object();
  for (const auto& [name, sentinels] : enc.columns) {
    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    for (const auto& [text, code] : sentinels) m[text] = code;
    cols[name] = m;
  }
  j["columns"] = cols;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// CSV

namespace {

// RFC-4180 record splitter: quoted fields, doubled quotes, CRLF or LF.
std::vector<std::vector<std::string>> split_records(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t i = 0;
  if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) i = 3;
  auto end_row = [&] {
    row.push_back(std::move(field));
    field.clear();
    records.push_back(std::move(row));
    row.clear();
    field_started = false;
  };
  for (; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        break;
      default:
        field.push_back(ch);
        field_started = true;
    }
  }
  if (in_quotes) throw Error(ErrorKind::kParse, "csv: unterminated quote");
  if (field_started || !field.empty() || !row.empty()) end_row();
  // Drop blank trailing lines.
  while (!records.empty() && records.back().size() == 1 &&
         records.back()[0].empty()) {
    records.pop_back();
  }
  return records;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

std::string quote_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

Dataset parse_csv(const std::string& text, const std::string& label_column,
                  const EncodingMap& encoding) {
  auto records = split_records(text);
  if (records.empty()) throw Error(ErrorKind::kParse, "csv: missing header");
  const auto& header = records.front();
  std::size_t label_idx = header.size();
  std::vector<std::string> names;
  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    std::string name(trim(header[c]));
    if (name == label_column) {
      label_idx = c;
    } else {
      names.push_back(name);
      feature_cols.push_back(c);
    }
  }
  if (label_idx == header.size()) {
    throw Error(ErrorKind::kParse,
                "csv: label column '" + label_column + "' not found");
  }
  for (const auto& [col, sentinels] : encoding.columns) {
    (void)sentinels;
    if (std::find(names.begin(), names.end(), col) == names.end()) {
      throw Error(ErrorKind::kParse,
                  "encoding names unknown column '" + col + "'");
    }
  }

  // Per feature: sentinel text and its numeric value (if numeric).
  struct Sentinel {
    std::string text;
    std::optional<double> number;
    Reason code;
  };
  std::vector<std::vector<Sentinel>> sentinels(names.size());
  for (std::size_t f = 0; f < names.size(); ++f) {
    auto it = encoding.columns.find(names[f]);
    if (it == encoding.columns.end()) continue;
    for (const auto& [s, code] : it->second) {
      sentinels[f].push_back({s, parse_number(s), code});
    }
  }
  const Reason na_reason = encoding.resolved_na_reason();

  const std::size_t rows = records.size() - 1;
  Dataset ds(names, rows);
  Reason max_used = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& rec = records[r + 1];
    const std::size_t line = r + 2;
    if (rec.size() != header.size()) {
      throw Error(ErrorKind::kParse, "csv: row " + std::to_string(line) +
                                         " has " + std::to_string(rec.size()) +
                                         " fields, expected " +
                                         std::to_string(header.size()));
    }
    auto label_text = trim(rec[label_idx]);
    auto label_value = parse_number(label_text);
    if (label_text.empty()) {
      throw Error(ErrorKind::kParse,
                  "csv: row " + std::to_string(line) + " missing label");
    }
    if (!label_value || (*label_value != 0.0 && *label_value != 1.0)) {
      throw Error(ErrorKind::kParse, "csv: row " + std::to_string(line) +
                                         " label '" + std::string(label_text) +
                                         "' not in {0,1}");
    }
    ds.set_label(r, static_cast<int>(*label_value));

    for (std::size_t f = 0; f < names.size(); ++f) {
      const auto cell = trim(rec[feature_cols[f]]);
      Reason code = 0;
      if (cell.empty() || (encoding.na_token && cell == *encoding.na_token)) {
        code = na_reason;
      }
      const auto number = code == 0 ? parse_number(cell) : std::nullopt;
      if (code == 0) {
        for (const auto& s : sentinels[f]) {
          if (cell == s.text || (number && s.number && *number == *s.number)) {
            code = s.code;
            break;
          }
        }
      }
      if (code != 0) {
        ds.set_absent(r, f, code);
        max_used = std::max(max_used, code);
        continue;
      }
      if (!number) {
        throw Error(ErrorKind::kParse, "csv: row " + std::to_string(line) +
                                           " column '" + names[f] +
                                           "': cannot parse '" +
                                           std::string(cell) + "'");
      }
      ds.set_value(r, f, *number);
    }
  }
  Reason c = max_used;
  if (encoding.add_overall_reason && c > 0) {
    ++c;
    ds.set_overall_reason(c);
  }
  ds.set_n_reasons(c);
  return ds;
}

Dataset load_csv(const std::string& path, const std::string& label_column,
                 const EncodingMap& encoding) {
  return parse_csv(read_file(path), label_column, encoding);
}

std::string format_csv(const Dataset& ds, const std::string& label_column,
                       const EncodingMap& encoding) {
  const Reason na_reason = encoding.resolved_na_reason();
  // Per feature: reason -> text.
  std::vector<std::map<Reason, std::string>> render(ds.d());
  for (std::size_t j = 0; j < ds.d(); ++j) {
    auto it = encoding.columns.find(ds.feature_names()[j]);
    if (it == encoding.columns.end()) continue;
    for (const auto& [text, code] : it->second) {
      render[j].try_emplace(code, text);
    }
  }
  std::string out;
  for (std::size_t j = 0; j < ds.d(); ++j) {
    out += quote_field(ds.feature_names()[j]);
    out += ',';
  }
  out += quote_field(label_column);
  out += '\n';
  for (std::size_t i = 0; i < ds.n(); ++i) {
    for (std::size_t j = 0; j < ds.d(); ++j) {
      if (ds.present(i, j)) {
        out += format_double(ds.value(i, j));
      } else {
        const Reason m = ds.reason(i, j);
        auto it = render[j].find(m);
        if (it != render[j].end()) {
          out += quote_field(it->second);
        } else if (m != na_reason) {
          out += "NA_" + std::to_string(m);
        }
      }
      out += ',';
    }
    out += std::to_string(ds.label(i));
    out += '\n';
  }
  return out;
}

void write_csv(const Dataset& ds, const std::string& path,
               const std::string& label_column, const EncodingMap& encoding) {
  write_file(path, format_csv(ds, label_column, encoding));
}

EncodingMap extend_encoding(const Dataset& ds, const EncodingMap& encoding) {
  EncodingMap out = encoding;
  const Reason na_reason = encoding.resolved_na_reason();
  if (out.na_reason == 0) out.na_reason = na_reason;
  for (std::size_t j = 0; j < ds.d(); ++j) {
    std::set<Reason> used;
    for (std::size_t i = 0; i < ds.n(); ++i) {
      if (!ds.present(i, j)) used.insert(ds.reason(i, j));
    }
    auto& col = out.columns[ds.feature_names()[j]];
    for (Reason m : used) {
      if (m == na_reason) continue;
      bool expressible = std::any_of(col.begin(), col.end(),
                                     [&](const auto& e) {
                                       return e.second == m;
                                     });
      if (!expressible) col["NA_" + std::to_string(m)] = m;
    }
    if (col.empty()) out.columns.erase(ds.feature_names()[j]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Splitting and imputation

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "test_fraction must lie in (0, 1)");
  }
  if (n < 2) throw Error(ErrorKind::kInvalidArgument, "split needs n >= 2");
  const auto n_test = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * test_fraction));
  if (n_test == 0 || n_test >= n) {
    throw Error(ErrorKind::kInvalidArgument,
                "test_fraction leaves one side of the split empty");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::size_t> test(order.begin(), order.begin() + n_test);
  std::vector<std::size_t> train(order.begin() + n_test, order.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return {std::move(train), std::move(test)};
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double test_fraction,
                                  std::uint64_t seed) {
  auto [train, test] = split_indices(ds.n(), test_fraction, seed);
  return {ds.subset(train), ds.subset(test)};
}

std::vector<double> feature_means(const Dataset& ds) {
  std::vector<double> means(ds.d(), 0.0);
  for (std::size_t j = 0; j < ds.d(); ++j) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < ds.n(); ++i) {
      if (ds.present(i, j)) {
        sum += ds.value(i, j);
        ++count;
      }
    }
    if (count > 0) means[j] = sum / static_cast<double>(count);
  }
  return means;
}

Dataset impute_constant(const Dataset& ds, const std::vector<double>& fill) {
  if (fill.size() != ds.d()) {
    throw Error(ErrorKind::kInvalidArgument, "fill vector size mismatch");
  }
  Dataset out(ds.feature_names(), ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    for (std::size_t j = 0; j < ds.d(); ++j) {
      out.set_value(i, j, ds.present(i, j) ? ds.value(i, j) : fill[j]);
    }
    out.set_label(i, ds.label(i));
  }
  out.metadata = ds.metadata;
  return out;
}

}  // namespace mgam
