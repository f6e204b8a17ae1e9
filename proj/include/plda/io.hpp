// plda/io.hpp

// Copyright 2026  The plda2cov Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "plda/data_stats.hpp"
#include "plda/em_engine.hpp"
#include "plda/spd_math.hpp"

// Text formats.
//
// Embeddings ("PLDA-TXT v1"): header `PLDA-TXT 1 <dim>`, then one record
// per line, `<class_id><TAB><v1> <v2> ... <vd>`.
//
// Models ("PLDA-MODEL v1"): header `PLDA-MODEL 1 <dim>`, the mean on one
// line, then dim rows of the between-class covariance and dim rows of the
// within-class covariance.
//
// Trials: one `<enroll_class_id><TAB><test_vector_index>` per line, the
// index 0-based into a test embedding file.
//
// Floats are serialized with 17 significant digits, which round-trips
// 64-bit values exactly; write -> read -> write is byte-identical.

namespace plda {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

inline double parse_double(std::string_view token, std::size_t line) {
  double value = 0.0;
  const char *first = token.data();
  const char *last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw ParseError(line, "bad float '" + std::string(token) + "'");
  if (!std::isfinite(value))
    throw ParseError(line, "non-finite value '" + std::string(token) + "'");
  return value;
}

inline std::int64_t parse_int(std::string_view token, std::size_t line) {
  std::int64_t value = 0;
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw ParseError(line, "bad integer '" + std::string(token) + "'");
  return value;
}

/// Splits on runs of spaces and parses every field as a double.
inline std::vector<double> parse_vector(std::string_view text,
                                        std::size_t line) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    if (pos >= text.size()) break;
    std::size_t end = text.find(' ', pos);
    if (end == std::string_view::npos) end = text.size();
    values.push_back(parse_double(text.substr(pos, end - pos), line));
    pos = end;
  }
  return values;
}

inline int parse_header(std::string_view line_text, std::string_view magic,
                        std::size_t line) {
  const std::string expected(magic);
  if (line_text.substr(0, expected.size()) != expected ||
      line_text.size() <= expected.size() ||
      line_text[expected.size()] != ' ')
    throw ParseError(line, "expected header '" + expected + " 1 <dim>'");
  std::string_view rest = line_text.substr(expected.size() + 1);
  const std::size_t sp = rest.find(' ');
  if (sp == std::string_view::npos)
    throw ParseError(line, "expected header '" + expected + " 1 <dim>'");
  const std::int64_t version = parse_int(rest.substr(0, sp), line);
  if (version != 1)
    throw ParseError(line, "unsupported " + expected + " version " +
                               std::to_string(version));
  const std::int64_t dim = parse_int(rest.substr(sp + 1), line);
  if (dim < 1) throw ParseError(line, "dim must be >= 1");
  return static_cast<int>(dim);
}

inline std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace detail

inline void write_embeddings(std::ostream &os, const LabeledDataset &data) {
  os << "PLDA-TXT 1 " << data.dim << "\n";
  for (const Record &rec : data.records) {
    if (rec.class_id.empty() ||
        rec.class_id.find_first_of("\t\n\r") != std::string::npos)
      throw InvalidArgument("write_embeddings: class_id '" + rec.class_id +
                            "' is empty or contains tab/newline");
    os << rec.class_id << '\t';
    for (int j = 0; j < data.dim; ++j) {
      if (j) os << ' ';
      os << format_double(rec.values[j]);
    }
    os << '\n';
  }
}

inline LabeledDataset read_embeddings(std::istream &is) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError(1, "empty file");
  LabeledDataset data;
  data.dim = detail::parse_header(detail::strip_cr(line), "PLDA-TXT", 1);
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    line = detail::strip_cr(line);
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw ParseError(line_no, "expected '<class_id><TAB><values>'");
    std::vector<double> values = detail::parse_vector(
        std::string_view(line).substr(tab + 1), line_no);
    if (static_cast<int>(values.size()) != data.dim)
      throw ParseError(line_no, "row has " + std::to_string(values.size()) +
                                    " values, expected " +
                                    std::to_string(data.dim));
    data.records.push_back(
        Record{line.substr(0, tab), std::move(values)});
  }
  return data;
}

inline void write_model(std::ostream &os, const PldaModel &model) {
  model.validate();
  os << "PLDA-MODEL 1 " << model.dim << "\n";
  auto write_row = [&os](const double *row, int d) {
    for (int j = 0; j < d; ++j) {
      if (j) os << ' ';
      os << format_double(row[j]);
    }
    os << '\n';
  };
  write_row(model.mean.data(), model.dim);
  for (int r = 0; r < model.dim; ++r)
    write_row(model.between_var.data().data() +
                  static_cast<std::size_t>(r) * model.dim,
              model.dim);
  for (int r = 0; r < model.dim; ++r)
    write_row(model.within_var.data().data() +
                  static_cast<std::size_t>(r) * model.dim,
              model.dim);
}

inline PldaModel read_model(std::istream &is) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError(1, "empty file");
  const int d = detail::parse_header(detail::strip_cr(line), "PLDA-MODEL", 1);
  std::size_t line_no = 1;
  auto next_row = [&]() {
    if (!std::getline(is, line))
      throw ParseError(line_no + 1, "unexpected end of file");
    ++line_no;
    std::vector<double> values =
        detail::parse_vector(detail::strip_cr(line), line_no);
    if (static_cast<int>(values.size()) != d)
      throw ParseError(line_no, "row has " + std::to_string(values.size()) +
                                    " values, expected " + std::to_string(d));
    return values;
  };

  PldaModel model;
  model.dim = d;
  model.mean = next_row();
  std::vector<double> raw;
  raw.reserve(static_cast<std::size_t>(d) * d);
  for (int r = 0; r < d; ++r) {
    std::vector<double> row = next_row();
    raw.insert(raw.end(), row.begin(), row.end());
  }
  const std::size_t between_line = line_no;
  try {
    model.between_var = SymMatrix(d, raw);
  } catch (const InvalidArgument &e) {
    throw ParseError(between_line, std::string("between covariance: ") +
                                       e.what());
  }
  raw.clear();
  for (int r = 0; r < d; ++r) {
    std::vector<double> row = next_row();
    raw.insert(raw.end(), row.begin(), row.end());
  }
  try {
    model.within_var = SymMatrix(d, raw);
  } catch (const InvalidArgument &e) {
    throw ParseError(line_no, std::string("within covariance: ") + e.what());
  }
  return model;
}

struct Trial {
  std::string enroll_id;
  std::int64_t test_index = 0;
  std::size_t line_number = 0;
};

inline std::vector<Trial> read_trials(std::istream &is) {
  std::vector<Trial> trials;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    line = detail::strip_cr(line);
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw ParseError(line_no, "expected '<enroll_id><TAB><test_index>'");
    const std::int64_t index = detail::parse_int(
        std::string_view(line).substr(tab + 1), line_no);
    if (index < 0) throw ParseError(line_no, "test index must be >= 0");
    trials.push_back(Trial{line.substr(0, tab), index, line_no});
  }
  return trials;
}

/// Plain square matrix: dim rows of dim space-separated floats.
inline SymMatrix read_matrix(std::istream &is, int dim) {
  std::vector<double> raw;
  raw.reserve(static_cast<std::size_t>(dim) * dim);
  std::string line;
  std::size_t line_no = 0;
  int rows = 0;
  while (rows < dim && std::getline(is, line)) {
    ++line_no;
    line = detail::strip_cr(line);
    if (line.empty()) continue;
    std::vector<double> row = detail::parse_vector(line, line_no);
    if (static_cast<int>(row.size()) != dim)
      throw ParseError(line_no, "row has " + std::to_string(row.size()) +
                                    " values, expected " +
                                    std::to_string(dim));
    raw.insert(raw.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows != dim)
    throw ParseError(line_no + 1, "expected " + std::to_string(dim) +
                                      " rows, got " + std::to_string(rows));
  try {
    return SymMatrix(dim, raw);
  } catch (const InvalidArgument &e) {
    throw ParseError(line_no, e.what());
  }
}

// Path-based convenience wrappers.

namespace detail {

inline std::ifstream open_input(const std::filesystem::path &path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open '" + path.string() + "' for reading");
  return is;
}

inline std::ofstream open_output(const std::filesystem::path &path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open '" + path.string() + "' for writing");
  return os;
}

}  // namespace detail

inline LabeledDataset read_embeddings_file(const std::filesystem::path &p) {
  std::ifstream is = detail::open_input(p);
  return read_embeddings(is);
}

inline void write_embeddings_file(const std::filesystem::path &p,
                                  const LabeledDataset &data) {
  std::ofstream os = detail::open_output(p);
  write_embeddings(os, data);
}

inline PldaModel read_model_file(const std::filesystem::path &p) {
  std::ifstream is = detail::open_input(p);
  return read_model(is);
}

inline void write_model_file(const std::filesystem::path &p,
                             const PldaModel &model) {
  std::ofstream os = detail::open_output(p);
  write_model(os, model);
}

inline std::vector<Trial> read_trials_file(const std::filesystem::path &p) {
  std::ifstream is = detail::open_input(p);
  return read_trials(is);
}

inline SymMatrix read_matrix_file(const std::filesystem::path &p, int dim) {
  std::ifstream is = detail::open_input(p);
  return read_matrix(is, dim);
}

}  // namespace plda
