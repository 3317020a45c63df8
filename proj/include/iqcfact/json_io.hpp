#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "iqcfact/conditions.hpp"
#include "iqcfact/error.hpp"
#include "iqcfact/factorization.hpp"
#include "iqcfact/iqc_analysis.hpp"
#include "iqcfact/multiplier.hpp"
#include "iqcfact/rational_matrix.hpp"
#include "iqcfact/state_space.hpp"

namespace iqcfact::io {

using nlohmann::json;

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& msg) {
  throw Error(ErrorCode::kParseError, msg);
}

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_fail(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline std::vector<double> number_array(const json& j, const char* what) {
  if (!j.is_array()) parse_fail(std::string(what) + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const json& x : j) {
    if (!x.is_number()) parse_fail(std::string(what) + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

// +/-inf are not JSON numbers; they are written as strings.
inline json real(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  return x;
}

inline double real_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j == "inf") return std::numeric_limits<double>::infinity();
  if (j == "-inf") return -std::numeric_limits<double>::infinity();
  if (j == "nan") return std::numeric_limits<double>::quiet_NaN();
  parse_fail("expected a number");
}

}  // namespace detail

inline json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Rows of numbers; an empty array gives a 0 x cols matrix.
inline Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index empty_cols = 0) {
  if (!j.is_array()) detail::parse_fail("matrix must be an array of rows");
  if (j.empty()) return Eigen::MatrixXd(0, empty_cols);
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::vector<double> row = detail::number_array(j[i], "matrix row");
    if (row.size() != cols) detail::parse_fail("matrix rows have different lengths");
    for (std::size_t k = 0; k < cols; ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k];
  }
  return m;
}

inline json to_json(const RationalFunction& f) {
  return {{"num", f.num().coeffs()}, {"den", f.den().coeffs()}};
}

inline RationalFunction rational_function_from_json(const json& j) {
  Polynomial num(detail::number_array(detail::field(j, "num"), "num"));
  Polynomial den(detail::number_array(detail::field(j, "den"), "den"));
  if (den.is_zero()) detail::parse_fail("denominator is identically zero");
  return {std::move(num), std::move(den)};
}

inline json to_json(const RationalMatrix& r) {
  json entries = json::array();
  for (int i = 0; i < r.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < r.cols(); ++j) row.push_back(to_json(r(i, j)));
    entries.push_back(std::move(row));
  }
  return {{"rows", r.rows()}, {"cols", r.cols()}, {"entries", std::move(entries)}};
}

inline RationalMatrix rational_matrix_from_json(const json& j) {
  const json& rows = detail::field(j, "rows");
  const json& cols = detail::field(j, "cols");
  if (!rows.is_number_integer() || !cols.is_number_integer() || rows.get<int>() <= 0 ||
      cols.get<int>() <= 0)
    detail::parse_fail("rows and cols must be positive integers");
  const int n = rows.get<int>(), m = cols.get<int>();
  const json& entries = detail::field(j, "entries");
  if (!entries.is_array() || static_cast<int>(entries.size()) != n)
    detail::parse_fail("entries must have 'rows' rows");
  RationalMatrix r(n, m);
  for (int i = 0; i < n; ++i) {
    if (!entries[i].is_array() || static_cast<int>(entries[i].size()) != m)
      detail::parse_fail("every entries row must have 'cols' entries");
    for (int k = 0; k < m; ++k) r(i, k) = rational_function_from_json(entries[i][k]);
  }
  return r;
}

/// A multiplier file is a rational matrix with an optional "block_sizes":
/// [m, l]; without it the matrix is split into equal halves.
inline json to_json(const Multiplier& pi) {
  json j = to_json(pi.matrix());
  j["block_sizes"] = {pi.m(), pi.l()};
  return j;
}

inline Multiplier multiplier_from_json(const json& j) {
  RationalMatrix r = rational_matrix_from_json(j);
  if (j.contains("block_sizes")) {
    const std::vector<double> bs = detail::number_array(j.at("block_sizes"), "block_sizes");
    if (bs.size() != 2) detail::parse_fail("block_sizes must be [m, l]");
    return Multiplier(std::move(r), BlockSizes{static_cast<int>(bs[0]), static_cast<int>(bs[1])});
  }
  return Multiplier(std::move(r));
}

inline json to_json(const StateSpace& s) {
  return {{"A", to_json(s.A)}, {"B", to_json(s.B)}, {"C", to_json(s.C)}, {"D", to_json(s.D)}};
}

inline StateSpace state_space_from_json(const json& j) {
  Eigen::MatrixXd D = matrix_from_json(detail::field(j, "D"));
  Eigen::MatrixXd A = matrix_from_json(detail::field(j, "A"));
  Eigen::MatrixXd B = matrix_from_json(detail::field(j, "B"), D.cols());
  Eigen::MatrixXd C = matrix_from_json(detail::field(j, "C"), A.rows());
  if (A.rows() == 0) {
    A.resize(0, 0);
    C.resize(D.rows(), 0);
  }
  return StateSpace(std::move(A), std::move(B), std::move(C), std::move(D));
}

inline json to_json(const Factorization& f) {
  return {{"psi", to_json(f.psi)},
          {"M", to_json(f.M)},
          {"classification", std::string(to_string(f.classification))}};
}

/// The stored classification is recomputed rather than trusted.
inline Factorization factorization_from_json(const json& j) {
  Factorization f;
  f.psi = rational_matrix_from_json(detail::field(j, "psi"));
  f.M = matrix_from_json(detail::field(j, "M"));
  if (f.M.rows() != f.M.cols() || f.M.rows() != f.psi.rows())
    detail::parse_fail("M must be square with as many rows as psi");
  if (!f.M.isApprox(f.M.transpose(), 1e-12) && f.M.size() > 0)
    detail::parse_fail("M must be symmetric");
  if (j.contains("classification"))
    (void)parse_classification(j.at("classification").get<std::string>());
  f.classification = classify(f);
  return f;
}

inline json to_json(const ConditionReport& c) {
  return {{"name", c.name},
          {"satisfied", c.satisfied},
          {"margin", detail::real(c.margin)},
          {"worst_frequency", detail::real(c.worst_frequency)},
          {"notes", c.notes}};
}

inline ConditionReport condition_report_from_json(const json& j) {
  ConditionReport c;
  c.name = detail::field(j, "name").get<std::string>();
  c.satisfied = detail::field(j, "satisfied").get<bool>();
  c.margin = detail::real_from(detail::field(j, "margin"));
  c.worst_frequency = detail::real_from(detail::field(j, "worst_frequency"));
  c.notes = detail::field(j, "notes").get<std::string>();
  return c;
}

inline json to_json(const VerificationReport& r) {
  json j = {{"residual", r.residual},
            {"abs_residual", r.abs_residual},
            {"worst_frequency", detail::real(r.worst_frequency)},
            {"psi_stable", r.psi_stability.stable},
            {"psi_margin", detail::real(r.psi_stability.margin)}};
  if (r.inverse_stability) {
    j["inverse_stable"] = r.inverse_stability->stable;
    j["inverse_margin"] = detail::real(r.inverse_stability->margin);
  } else {
    j["inverse_stable"] = nullptr;
    j["inverse_margin"] = nullptr;
  }
  return j;
}

inline json to_json(const VerdictReport& v) {
  json j = {{"conditions",
             {{"i", to_json(v.well_posedness)},
              {"ii", to_json(v.delta1_iqc)},
              {"iii", to_json(v.inverse_graph)},
              {"iv", to_json(v.positive_negative)}}},
            {"overall", v.overall},
            {"failed", v.failed},
            {"factorization_notes", v.factorization_notes}};
  j["factorization_used"] = v.factorization_used ? to_json(*v.factorization_used) : json(nullptr);
  return j;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace iqcfact::io
