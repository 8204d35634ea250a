#pragma once

// CSV ingestion and chain/draw output with round-trip float formatting.

#include <Eigen/Dense>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "scalemix/chain.hpp"
#include "scalemix/format.hpp"
#include "scalemix/model.hpp"

namespace scalemix {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    // trim surrounding whitespace
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    cells.push_back(first == std::string::npos
                        ? std::string()
                        : cell.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace detail

// Headerless numeric CSV; every row must have the same number of columns.
inline Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& cell : cells) {
      try {
        row.push_back(parse_double(cell));
      } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": not a number: '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected " + std::to_string(rows.front().size()) +
                               " columns, found " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path + ": no data rows");
  Eigen::MatrixXd out(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.front().size(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return out;
}

// One row per recorded state: iteration index, vec(beta), lower triangle of
// sigma, and the drift value V.
inline void write_chain_csv(std::ostream& out, const ChainOutput& chain) {
  if (chain.states.empty()) throw std::invalid_argument("write_chain_csv: empty chain");
  const int p = static_cast<int>(chain.states.front().beta.rows());
  const int d = static_cast<int>(chain.states.front().beta.cols());
  out << "iter";
  for (const auto& name : coordinate_names(p, d)) out << ',' << name;
  out << ",V\n";
  for (std::size_t k = 0; k < chain.states.size(); ++k) {
    const std::size_t iter =
        chain.burn_in + (k + 1) * static_cast<std::size_t>(chain.thin);
    out << iter;
    for (double v : state_coordinates(chain.states[k])) out << ',' << format_double(v);
    out << ',' << format_double(chain.drift_trace[k]) << '\n';
  }
}

inline void write_chain_csv(const std::string& path, const ChainOutput& chain) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_chain_csv(out, chain);
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

// Draws CSV: same columns as a chain file but indexed from 0 and without V.
inline void write_draws_csv(const std::string& path,
                            const std::vector<ParameterState>& draws) {
  if (draws.empty()) throw std::invalid_argument("write_draws_csv: no draws");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  const int p = static_cast<int>(draws.front().beta.rows());
  const int d = static_cast<int>(draws.front().beta.cols());
  out << "draw";
  for (const auto& name : coordinate_names(p, d)) out << ',' << name;
  out << '\n';
  for (std::size_t k = 0; k < draws.size(); ++k) {
    out << k;
    for (double v : state_coordinates(draws[k])) out << ',' << format_double(v);
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

struct NumericTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> values;  // one vector per column
};

// Reads a CSV with a header row and all-numeric body (chain or draws files).
inline NumericTable read_numeric_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  NumericTable table;
  table.columns = detail::split_csv_line(line);
  table.values.resize(table.columns.size());
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != table.columns.size())
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected " + std::to_string(table.columns.size()) +
                               " columns, found " + std::to_string(cells.size()));
    for (std::size_t j = 0; j < cells.size(); ++j) {
      try {
        table.values[j].push_back(parse_double(cells[j]));
      } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": not a number: '" + cells[j] + "'");
      }
    }
  }
  if (table.values.empty() || table.values.front().empty())
    throw std::runtime_error(path + ": no data rows");
  return table;
}

}  // namespace scalemix
