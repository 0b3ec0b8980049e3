#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "pairfuzz/strategy.hpp"

namespace pairfuzz {

class MatrixFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Header "1,2,...,32" followed by 32 rows of 32 counts; row i is the first
// mutator of the pair.
inline void write_matrix_csv(std::ostream& out, const PairCountMatrix& m) {
  for (std::size_t j = 0; j < kM; ++j) out << (j ? "," : "") << j + 1;
  out << '\n';
  for (std::size_t i = 0; i < kM; ++i) {
    for (std::size_t j = 0; j < kM; ++j) out << (j ? "," : "") << m.at_index(i, j);
    out << '\n';
  }
}

inline PairCountMatrix read_matrix_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw MatrixFormatError("matrix: missing header");
  {
    std::istringstream hs(line);
    std::string cell;
    std::size_t j = 0;
    while (std::getline(hs, cell, ',')) {
      if (j >= kM || cell != std::to_string(j + 1)) throw MatrixFormatError("matrix: bad header");
      ++j;
    }
    if (j != kM) throw MatrixFormatError("matrix: header needs 32 columns");
  }
  PairCountMatrix m;
  for (std::size_t i = 0; i < kM; ++i) {
    if (!std::getline(in, line)) throw MatrixFormatError("matrix: expected 32 rows, got " + std::to_string(i));
    std::istringstream rs(line);
    std::string cell;
    std::size_t j = 0;
    while (std::getline(rs, cell, ',')) {
      if (j >= kM) throw MatrixFormatError("matrix: row " + std::to_string(i + 1) + " has too many columns");
      std::size_t used = 0;
      unsigned long long v = 0;
      try {
        if (!cell.empty() && cell.back() == '\r') cell.pop_back();
        if (cell.empty() || cell[0] == '-') throw std::invalid_argument("neg");
        v = std::stoull(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cell.size())
        throw MatrixFormatError("matrix: row " + std::to_string(i + 1) + ": bad count '" + cell + "'");
      m.set_index(i, j++, v);
    }
    if (j != kM) throw MatrixFormatError("matrix: row " + std::to_string(i + 1) + " has " + std::to_string(j) + " columns");
  }
  return m;
}

inline void save_matrix(const std::filesystem::path& path, const PairCountMatrix& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_matrix_csv(out, m);
}

inline PairCountMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MatrixFormatError("cannot read matrix file " + path.string());
  return read_matrix_csv(in);
}

}  // namespace pairfuzz
