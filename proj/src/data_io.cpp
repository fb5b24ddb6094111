#include "seedset/data_io.hpp"

#include <charconv>
#include <cmath>
#include <unordered_set>

#include "seedset/error.hpp"
#include "seedset/graph_io.hpp"

namespace seedset {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

double parse_number(std::string_view field, std::size_t line, std::size_t column) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty() || !std::isfinite(value))
    throw InputError("line " + std::to_string(line) + ", column " + std::to_string(column) +
                     ": not a finite number: '" + std::string(field) + "'");
  return value;
}

}  // namespace

DataMatrix parse_data_csv(std::string_view text, bool transpose) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> row_labels;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto fields = split_fields(line);
    if (header.empty()) {
      for (auto f : fields) header.push_back(unquote(f));
      continue;
    }
    if (fields.size() != header.size())
      throw InputError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                       " fields, found " + std::to_string(fields.size()));
    std::vector<double> row;
    std::size_t first = 0;
    if (transpose) {
      row_labels.push_back(unquote(fields[0]));
      first = 1;
    }
    for (std::size_t c = first; c < fields.size(); ++c) row.push_back(parse_number(fields[c], line_no, c + 1));
    rows.push_back(std::move(row));
    if (end == text.size()) break;
  }
  if (header.empty()) throw InputError("data file is empty; a header row is required");

  DataMatrix out;
  if (!transpose) {
    out.labels = header;
    out.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(header.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < header.size(); ++c)
        out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  } else {
    if (header.size() < 2) throw InputError("transposed data needs a label column and at least one sample");
    const std::size_t samples = header.size() - 1;
    out.labels = row_labels;
    out.values.resize(static_cast<Eigen::Index>(samples), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t v = 0; v < rows.size(); ++v)
      for (std::size_t s = 0; s < samples; ++s)
        out.values(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(v)) = rows[v][s];
  }
  std::unordered_set<std::string> seen;
  for (const auto& l : out.labels) {
    if (l.empty()) throw InputError("empty variable label in data file");
    if (!seen.insert(l).second) throw InputError("duplicate variable label '" + l + "' in data file");
  }
  return out;
}

DataMatrix read_data_csv(const std::string& path, bool transpose) {
  try {
    return parse_data_csv(read_text_file(path), transpose);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::string to_data_csv(const DataMatrix& x) {
  std::string out;
  for (std::size_t c = 0; c < x.labels.size(); ++c) {
    if (c) out += ',';
    out += x.labels[c];
  }
  out += '\n';
  char buf[32];
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      if (c) out += ',';
      const auto res = std::to_chars(buf, buf + sizeof buf, x.values(r, c));
      out.append(buf, res.ptr);
    }
    out += '\n';
  }
  return out;
}

}  // namespace seedset
