#include "pmf_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "errors.hpp"

namespace llt {

std::string format_double(double x) {
  if (std::isnan(x)) return "NA";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_pmf_csv(const LatticePmf& pmf, std::ostream& csv, std::ostream& meta) {
  const std::size_t d = pmf.dim();
  for (std::size_t a = 0; a < d; ++a) csv << "index_" << (a + 1) << ',';
  csv << "mass\n";
  const auto masses = pmf.masses();
  for (std::size_t lin = 0; lin < masses.size(); ++lin) {
    const IndexVec k = pmf.index_of(lin);
    for (std::size_t a = 0; a < d; ++a) csv << k[a] << ',';
    csv << format_double(masses[lin]) << '\n';
  }

  nlohmann::json j;
  j["d"] = d;
  j["v"] = pmf.grid().offset;
  j["w"] = pmf.grid().step;
  j["index_lo"] = pmf.index_lo();
  j["extents"] = pmf.extents();
  meta << j.dump(2) << '\n';
}

LatticePmf read_pmf_csv(std::istream& csv, std::istream& meta) {
  nlohmann::json j;
  try {
    meta >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kIo, std::string("bad pmf metadata: ") + e.what());
  }
  GridSpec grid;
  IndexVec index_lo;
  std::size_t d = 0;
  try {
    d = j.at("d").get<std::size_t>();
    grid.offset = j.at("v").get<Vec>();
    grid.step = j.at("w").get<Vec>();
    index_lo = j.at("index_lo").get<IndexVec>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kIo, std::string("bad pmf metadata: ") + e.what());
  }
  if (grid.offset.size() != d || grid.step.size() != d || index_lo.size() != d)
    fail(ErrorCode::kIo, "pmf metadata fields disagree with d");

  std::string line;
  if (!std::getline(csv, line)) fail(ErrorCode::kIo, "missing CSV header");
  std::vector<IndexVec> rows;
  std::vector<double> values;
  IndexVec max_index = index_lo;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    IndexVec k(d);
    std::string cell;
    for (std::size_t a = 0; a < d; ++a) {
      if (!std::getline(ls, cell, ',')) fail(ErrorCode::kIo, "short CSV row: " + line);
      k[a] = std::stoll(cell);
      if (k[a] < index_lo[a]) fail(ErrorCode::kIo, "CSV index below index_lo");
      max_index[a] = std::max(max_index[a], k[a]);
    }
    if (!std::getline(ls, cell)) fail(ErrorCode::kIo, "missing mass: " + line);
    values.push_back(std::strtod(cell.c_str(), nullptr));
    rows.push_back(std::move(k));
  }
  std::vector<std::size_t> extents(d);
  std::size_t total = 1;
  for (std::size_t a = 0; a < d; ++a) {
    extents[a] = static_cast<std::size_t>(max_index[a] - index_lo[a] + 1);
    total *= extents[a];
  }
  if (j.contains("extents")) {
    const auto stored = j["extents"].get<std::vector<std::size_t>>();
    if (stored.size() == d) {
      extents = stored;
      total = 1;
      for (std::size_t e : extents) total *= e;
    }
  }
  std::vector<double> masses(total, 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::size_t lin = 0;
    for (std::size_t a = 0; a < d; ++a) {
      const auto rel = static_cast<std::size_t>(rows[r][a] - index_lo[a]);
      if (rel >= extents[a]) fail(ErrorCode::kIo, "CSV index outside extents");
      lin = lin * extents[a] + rel;
    }
    masses[lin] = values[r];
  }
  return LatticePmf::adopt(std::move(grid), std::move(index_lo), std::move(extents),
                           std::move(masses));
}

void save_pmf(const LatticePmf& pmf, const std::string& csv_path, const std::string& meta_path) {
  std::ofstream csv(csv_path);
  std::ofstream meta(meta_path);
  if (!csv || !meta) fail(ErrorCode::kIo, "cannot open " + csv_path + " / " + meta_path);
  write_pmf_csv(pmf, csv, meta);
}

LatticePmf load_pmf(const std::string& csv_path, const std::string& meta_path) {
  std::ifstream csv(csv_path);
  std::ifstream meta(meta_path);
  if (!csv || !meta) fail(ErrorCode::kIo, "cannot open " + csv_path + " / " + meta_path);
  return read_pmf_csv(csv, meta);
}

}  // namespace llt
