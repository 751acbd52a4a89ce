#include "bbc/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

namespace bbc {

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path.string() + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::string> split_whitespace(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string field;
  while (ss >> field) out.push_back(field);
  return out;
}

std::optional<double> to_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

double parse_feature(const std::string& field, std::size_t line_no) {
  const auto v = to_double(field);
  if (!v) throw FormatError("malformed numeric value '" + field + "'", line_no);
  return *v;
}

bool is_blank(const std::string& line) { return line.find_first_not_of(" \t") == std::string::npos; }

Dataset from_rows(std::vector<std::vector<double>>& rows, std::vector<int> labels,
                  std::vector<std::string> class_names) {
  Dataset d;
  const Index n = static_cast<Index>(rows.size());
  const Index dims = n ? static_cast<Index>(rows.front().size()) : 0;
  d.features.resize(n, dims);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < dims; ++j) d.features(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  d.labels = std::move(labels);
  d.class_names = std::move(class_names);
  d.validate();
  return d;
}

}  // namespace

std::vector<Index> Dataset::class_counts() const {
  std::vector<Index> counts(class_names.size(), 0);
  for (int l : labels) ++counts[static_cast<std::size_t>(l)];
  return counts;
}

void Dataset::validate() const {
  if (features.rows() == 0) throw DataError("dataset is empty");
  if (static_cast<Index>(labels.size()) != features.rows()) throw DataError("label count does not match rows");
  if (!features.allFinite()) throw DataError("dataset contains non-finite features");
  for (int l : labels)
    if (l < 0 || l >= num_classes()) throw DataError("label " + std::to_string(l) + " out of range");
  if (!source_index.empty() && static_cast<Index>(source_index.size()) != features.rows())
    throw DataError("source index count does not match rows");
}

Dataset load_wine(const std::filesystem::path& path) {
  constexpr std::size_t kFields = 14;
  const auto lines = read_lines(path);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (is_blank(lines[i])) continue;
    const auto fields = split_commas(lines[i]);
    if (fields.size() != kFields)
      throw FormatError("expected " + std::to_string(kFields) + " fields, found " + std::to_string(fields.size()),
                        line_no);
    const auto label = to_double(fields[0]);
    if (!label || (*label != 1 && *label != 2 && *label != 3))
      throw FormatError("class label must be 1, 2 or 3, found '" + fields[0] + "'", line_no);
    labels.push_back(static_cast<int>(*label) - 1);
    std::vector<double> row;
    row.reserve(kFields - 1);
    for (std::size_t f = 1; f < kFields; ++f) row.push_back(parse_feature(fields[f], line_no));
    rows.push_back(std::move(row));
  }
  return from_rows(rows, std::move(labels), {"1", "2", "3"});
}

Dataset load_satimage(const std::filesystem::path& path, bool drop_last_class) {
  constexpr std::size_t kFeatures = 36;
  const std::map<int, int> kept = drop_last_class ? std::map<int, int>{{1, 0}, {2, 1}, {3, 2}, {4, 3}, {5, 4}}
                                                  : std::map<int, int>{{1, 0}, {2, 1}, {3, 2}, {4, 3}, {5, 4}, {7, 5}};
  const auto lines = read_lines(path);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (is_blank(lines[i])) continue;
    const auto fields = split_whitespace(lines[i]);
    if (fields.size() != kFeatures + 1)
      throw FormatError("expected " + std::to_string(kFeatures + 1) + " fields, found " +
                            std::to_string(fields.size()),
                        line_no);
    const auto label = to_double(fields.back());
    if (!label || std::floor(*label) != *label) throw FormatError("malformed label '" + fields.back() + "'", line_no);
    const int raw = static_cast<int>(*label);
    if (raw == 7 && drop_last_class) continue;
    const auto it = kept.find(raw);
    if (it == kept.end()) throw FormatError("unknown satimage label " + std::to_string(raw), line_no);
    labels.push_back(it->second);
    std::vector<double> row;
    row.reserve(kFeatures);
    for (std::size_t f = 0; f < kFeatures; ++f) row.push_back(parse_feature(fields[f], line_no));
    rows.push_back(std::move(row));
  }
  std::vector<std::string> names;
  for (const auto& [raw, idx] : kept) names.push_back(std::to_string(raw));
  return from_rows(rows, std::move(labels), std::move(names));
}

Dataset load_csv(const std::filesystem::path& path, bool label_last) {
  const auto lines = read_lines(path);
  std::optional<std::vector<std::string>> declared_classes;
  std::optional<std::size_t> label_col;
  std::optional<std::size_t> source_col;
  std::size_t width = 0;
  bool first_data_line = true;

  std::vector<std::vector<double>> rows;
  std::vector<std::string> raw_labels;
  std::vector<Index> sources;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::string& line = lines[i];
    if (is_blank(line)) continue;
    if (line.front() == '#') {
      const std::string body = trim(std::string_view(line).substr(1));
      constexpr std::string_view kTag = "classes:";
      if (body.rfind(kTag, 0) == 0) declared_classes = split_commas(trim(body.substr(kTag.size())));
      continue;
    }
    const auto fields = split_commas(line);
    if (first_data_line) {
      first_data_line = false;
      width = fields.size();
      const bool header = std::any_of(fields.begin(), fields.end(), [](const std::string& f) { return !to_double(f); });
      if (header) {
        for (std::size_t c = 0; c < fields.size(); ++c) {
          if (fields[c] == "label" || fields[c] == "class") label_col = c;
          if (fields[c] == "source") source_col = c;
        }
        if (!label_col) label_col = label_last ? fields.size() - 1 : 0;
        continue;
      }
      label_col = label_last ? fields.size() - 1 : 0;
    }
    if (fields.size() != width)
      throw FormatError("expected " + std::to_string(width) + " fields, found " + std::to_string(fields.size()),
                        line_no);
    std::vector<double> row;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (c == *label_col) {
        raw_labels.push_back(fields[c]);
      } else if (source_col && c == *source_col) {
        const auto v = to_double(fields[c]);
        if (!v || *v < 0 || std::floor(*v) != *v) throw FormatError("malformed source index '" + fields[c] + "'", line_no);
        sources.push_back(static_cast<Index>(*v));
      } else {
        row.push_back(parse_feature(fields[c], line_no));
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("no data rows in '" + path.string() + "'");

  std::vector<std::string> names;
  std::vector<int> labels;
  labels.reserve(raw_labels.size());
  if (declared_classes) {
    names = *declared_classes;
    for (std::size_t r = 0; r < raw_labels.size(); ++r) {
      const auto v = to_double(raw_labels[r]);
      if (!v || *v < 0 || *v >= static_cast<double>(names.size()) || std::floor(*v) != *v)
        throw FormatError("label '" + raw_labels[r] + "' is not a declared class index");
      labels.push_back(static_cast<int>(*v));
    }
  } else {
    names = raw_labels;
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    const bool numeric = std::all_of(names.begin(), names.end(), [](const std::string& s) { return to_double(s).has_value(); });
    if (numeric)
      std::sort(names.begin(), names.end(), [](const std::string& a, const std::string& b) { return *to_double(a) < *to_double(b); });
    std::map<std::string, int> index;
    for (std::size_t c = 0; c < names.size(); ++c) index[names[c]] = static_cast<int>(c);
    for (const auto& l : raw_labels) labels.push_back(index.at(l));
  }
  Dataset d = from_rows(rows, std::move(labels), std::move(names));
  d.source_index = std::move(sources);
  d.validate();
  return d;
}

std::string to_csv(const Dataset& data) {
  std::string out = "# classes: ";
  for (std::size_t c = 0; c < data.class_names.size(); ++c) out += (c ? "," : "") + data.class_names[c];
  out += "\nlabel";
  for (Index j = 0; j < data.dims(); ++j) out += ",x" + std::to_string(j);
  const bool with_source = !data.source_index.empty();
  if (with_source) out += ",source";
  out += '\n';
  char buf[32];
  for (Index i = 0; i < data.size(); ++i) {
    out += std::to_string(data.labels[static_cast<std::size_t>(i)]);
    for (Index j = 0; j < data.dims(); ++j) {
      std::snprintf(buf, sizeof buf, ",%.17g", data.features(i, j));
      out += buf;
    }
    if (with_source) out += "," + std::to_string(data.source_index[static_cast<std::size_t>(i)]);
    out += '\n';
  }
  return out;
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << to_csv(data);
}

Dataset subset(const Dataset& data, const std::vector<Index>& rows) {
  Dataset out;
  out.features.resize(static_cast<Index>(rows.size()), data.dims());
  out.class_names = data.class_names;
  out.standardization = data.standardization;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] < 0 || rows[r] >= data.size()) throw DataError("row index " + std::to_string(rows[r]) + " out of range");
    out.features.row(static_cast<Index>(r)) = data.features.row(rows[r]);
    out.labels.push_back(data.labels[static_cast<std::size_t>(rows[r])]);
    out.source_index.push_back(data.source_of(rows[r]));
  }
  return out;
}

std::pair<Dataset, Dataset> split(const Dataset& data, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw DataError("split fraction must lie in (0, 1)");
  const Index n = data.size();
  const auto n_train = static_cast<Index>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
  if (n_train <= 0 || n_train >= n)
    throw DataError("split of " + std::to_string(n) + " rows leaves an empty side");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const std::vector<Index> train(order.begin(), order.begin() + n_train);
  const std::vector<Index> test(order.begin() + n_train, order.end());
  return {subset(data, train), subset(data, test)};
}

}  // namespace bbc
