#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "todalab/ghs.hpp"
#include "todalab/lattice.hpp"
#include "todalab/sensitivity.hpp"

namespace todalab {

// Shortest round-trip decimal form of a double.
std::string format_double(double x);

// `t,n,a,b` rows for every sample and site.
void write_trajectory_csv(std::ostream& out, const std::vector<double>& times,
                          const std::vector<LatticeState>& states);
void write_trajectory_csv(const std::string& path, const std::vector<double>& times,
                          const std::vector<LatticeState>& states);

// Reads the earliest sample of a `t,n,a,b` file. Sites must be contiguous.
LatticeState read_state_csv(std::istream& in, const std::string& origin = "<stream>");
LatticeState read_state_csv(const std::string& path);

// `t,n,dadz,dbdz` rows.
void write_grid_csv(std::ostream& out, const SensitivityGrid& g);
void write_grid_csv(const std::string& path, const SensitivityGrid& g);

// `t,n,drdz,dpdz` rows.
void write_ghs_grid_csv(const std::string& path, const GHSSensitivity& g);

}  // namespace todalab
