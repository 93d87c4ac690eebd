#pragma once

// CSV table (`index_1,...,index_d,mass`) plus a JSON sidecar carrying d, v, w
// and index_lo. Masses are printed with 17 significant digits so a read
// reproduces every double exactly.

#include <iosfwd>
#include <string>

#include "lattice.hpp"

namespace llt {

void write_pmf_csv(const LatticePmf& pmf, std::ostream& csv, std::ostream& meta);
LatticePmf read_pmf_csv(std::istream& csv, std::istream& meta);

void save_pmf(const LatticePmf& pmf, const std::string& csv_path, const std::string& meta_path);
LatticePmf load_pmf(const std::string& csv_path, const std::string& meta_path);

// Shortest-roundtrip-safe decimal rendering used by every CSV writer.
std::string format_double(double x);

}  // namespace llt
