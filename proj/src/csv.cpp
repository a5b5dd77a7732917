#include "ydde/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace ydde {

void write_path_csv(std::ostream& os, const Path& path) {
  os << "t";
  for (Eigen::Index i = 0; i < path.dim(); ++i) os << ",x_" << (i + 1);
  os << '\n';
  char buf[64];
  for (std::size_t k = 0; k < path.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", path.time(k));
    os << buf;
    for (Eigen::Index i = 0; i < path.dim(); ++i) {
      std::snprintf(buf, sizeof buf, ",%.17g", path.at(static_cast<std::size_t>(i), k));
      os << buf;
    }
    os << '\n';
  }
}

void write_path_csv(const std::string& file, const Path& path) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw Error("cannot open '" + file + "' for writing");
  write_path_csv(os, path);
}

Path read_path_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error("empty path CSV");
  if (line.rfind("t,", 0) != 0) throw Error("path CSV header must start with 't,'");
  const auto dim = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ','));

  std::vector<double> times;
  std::vector<double> flat;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    Eigen::Index col = 0;
    while (std::getline(row, cell, ',')) {
      double v = 0.0;
      try {
        v = std::stod(cell);
      } catch (const std::exception&) {
        throw Error("malformed number '" + cell + "' in path CSV");
      }
      if (col == 0) times.push_back(v);
      else flat.push_back(v);
      ++col;
    }
    if (col != dim + 1) throw Error("path CSV row has " + std::to_string(col) + " fields, expected " +
                                    std::to_string(dim + 1));
  }
  if (times.size() < 3) throw Error("path CSV needs at least three rows");

  const double h = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  const double hist = -times.front() / h;
  const auto n_history = static_cast<std::size_t>(std::llround(hist));
  if (std::abs(hist - static_cast<double>(n_history)) > 1e-6) throw Error("time 0 is not a node of the path CSV");
  const std::size_t n_main = times.size() - 1 - n_history;
  const TimeGrid grid = make_history_grid(times.back(), n_main, n_history);
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (std::abs(times[k] - grid.time(k)) > 1e-9 * std::max(1.0, std::abs(times[k]))) {
      throw Error("path CSV time column is not uniform");
    }
  }
  Eigen::MatrixXd values = Eigen::Map<Eigen::MatrixXd>(flat.data(), dim, static_cast<Eigen::Index>(times.size()));
  return Path(grid, std::move(values));
}

Path read_path_csv(const std::string& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw Error("cannot open '" + file + "'");
  return read_path_csv(is);
}

}  // namespace ydde
