#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "iqcfact/error.hpp"
#include "iqcfact/simulation.hpp"

namespace iqcfact::io {

/// Shortest form is not guaranteed; 17 significant digits round-trip.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_signal_csv(std::ostream& out, const SampledSignal& s) {
  out << 't';
  for (Eigen::Index c = 0; c < s.channels(); ++c) out << ",ch" << c;
  out << '\n';
  for (Eigen::Index k = 0; k < s.steps(); ++k) {
    out << format_double(s.time(k));
    for (Eigen::Index c = 0; c < s.channels(); ++c) out << ',' << format_double(s.samples(c, k));
    out << '\n';
  }
}

inline void write_trace_csv(std::ostream& out, const IqcTrace& t) {
  out << "T,value\n";
  for (Eigen::Index k = 0; k < t.values.size(); ++k)
    out << format_double(t.time(k)) << ',' << format_double(t.values(k)) << '\n';
}

namespace detail {

inline std::vector<std::vector<double>> read_numeric_rows(std::istream& in,
                                                          std::vector<std::string>& header) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kParseError, "empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  header.clear();
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cell.size())
        throw Error(ErrorCode::kParseError,
                    "line " + std::to_string(lineno) + ": '" + cell + "' is not a number");
      row.push_back(v);
    }
    if (row.size() != header.size())
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(lineno) + " has the wrong number of fields");
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

/// Reads `t,ch0,...`; the time column must be uniformly spaced.
inline SampledSignal read_signal_csv(std::istream& in) {
  std::vector<std::string> header;
  const auto rows = detail::read_numeric_rows(in, header);
  if (header.size() < 2 || header[0] != "t")
    throw Error(ErrorCode::kParseError, "signal CSV header must be t,ch0,...");
  if (rows.size() < 2) throw Error(ErrorCode::kParseError, "signal CSV needs two samples");
  const auto N = static_cast<Eigen::Index>(rows.size());
  const double t0 = rows.front()[0];
  const double dt = (rows.back()[0] - t0) / static_cast<double>(N - 1);
  if (!(dt > 0.0)) throw Error(ErrorCode::kParseError, "time column must increase");
  Eigen::MatrixXd samples(static_cast<Eigen::Index>(header.size() - 1), N);
  for (Eigen::Index k = 0; k < N; ++k) {
    const auto& r = rows[static_cast<std::size_t>(k)];
    const double expect = t0 + static_cast<double>(k) * dt;
    if (std::abs(r[0] - expect) > 1e-9 * std::max(1.0, std::abs(expect)))
      throw Error(ErrorCode::kParseError, "time column is not uniformly spaced");
    for (Eigen::Index c = 0; c < samples.rows(); ++c)
      samples(c, k) = r[static_cast<std::size_t>(c + 1)];
  }
  return {t0, dt, std::move(samples)};
}

inline SampledSignal read_signal_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open '" + path + "'");
  return read_signal_csv(in);
}

inline IqcTrace read_trace_csv(std::istream& in) {
  std::vector<std::string> header;
  const auto rows = detail::read_numeric_rows(in, header);
  if (header.size() != 2 || header[0] != "T" || header[1] != "value")
    throw Error(ErrorCode::kParseError, "trace CSV header must be T,value");
  IqcTrace t;
  t.values.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) t.values(static_cast<Eigen::Index>(k)) = rows[k][1];
  if (!rows.empty()) t.t0 = rows.front()[0];
  if (rows.size() > 1) t.dt = (rows.back()[0] - t.t0) / static_cast<double>(rows.size() - 1);
  return t;
}

}  // namespace iqcfact::io
