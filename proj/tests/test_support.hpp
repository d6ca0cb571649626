#ifndef POME_TESTS_TEST_SUPPORT_HPP_
#define POME_TESTS_TEST_SUPPORT_HPP_

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pome/array.hpp"
#include "pome/rng.hpp"

namespace pome::testing {

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

inline Array random_array(std::vector<int> shape, Rng& rng, double scale = 1.0) {
  Array a = Array::zeros(std::move(shape));
  for (double& v : a.data) v = scale * rng.normal();
  return a;
}

inline std::vector<double> random_vec(std::size_t n, Rng& rng, double scale = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = scale * rng.normal();
  return v;
}

// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / ("pome_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
  double num(std::size_t row, const std::string& name) const {
    return std::stod(rows[row][static_cast<std::size_t>(column(name))]);
  }
};

inline Csv parse_csv(const std::string& text) {
  Csv csv;
  std::istringstream is(text);
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (first) {
      csv.header = cells;
      first = false;
    } else {
      csv.rows.push_back(cells);
    }
  }
  return csv;
}

}  // namespace pome::testing

#endif  // POME_TESTS_TEST_SUPPORT_HPP_
