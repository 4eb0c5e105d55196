#include "todalab/csvio.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "todalab/error.hpp"

namespace todalab {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open " + path + " for writing");
  return f;
}

void finish(std::ofstream& f, const std::string& path) {
  f.flush();
  if (!f) throw io_error("write to " + path + " failed");
}

double parse_number(const std::string& field, const std::string& origin, std::size_t line) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\r')) --last;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw io_error(origin + ":" + std::to_string(line) + ": cannot parse number \"" + field +
                   "\"");
  }
  return v;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const std::vector<double>& times,
                          const std::vector<LatticeState>& states) {
  if (times.size() != states.size()) {
    throw invalid_argument("write_trajectory_csv: times and states differ in length");
  }
  out << "t,n,a,b\n";
  for (std::size_t k = 0; k < times.size(); ++k) {
    const LatticeState& s = states[k];
    const std::string t = format_double(times[k]);
    for (std::size_t i = 0; i < s.size(); ++i) {
      out << t << ',' << s.offset + static_cast<long>(i) << ',' << format_double(s.a[i]) << ','
          << format_double(s.b[i]) << '\n';
    }
  }
}

void write_trajectory_csv(const std::string& path, const std::vector<double>& times,
                          const std::vector<LatticeState>& states) {
  auto f = open_out(path);
  write_trajectory_csv(f, times, states);
  finish(f, path);
}

LatticeState read_state_csv(std::istream& in, const std::string& origin) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw io_error(origin + ": empty file");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,n,a,b") {
    throw io_error(origin + ":1: expected header \"t,n,a,b\", got \"" + line + "\"");
  }
  double t_first = 0.0;
  bool have_t = false;
  std::map<long, std::pair<double, double>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 4) {
      throw io_error(origin + ":" + std::to_string(lineno) + ": expected 4 fields, got " +
                     std::to_string(fields.size()));
    }
    const double t = parse_number(fields[0], origin, lineno);
    const double nd = parse_number(fields[1], origin, lineno);
    const double a = parse_number(fields[2], origin, lineno);
    const double b = parse_number(fields[3], origin, lineno);
    if (nd != std::floor(nd)) {
      throw io_error(origin + ":" + std::to_string(lineno) + ": site index must be an integer");
    }
    if (!have_t) {
      t_first = t;
      have_t = true;
    }
    if (t != t_first) break;
    const long n = static_cast<long>(nd);
    if (!rows.emplace(n, std::make_pair(a, b)).second) {
      throw io_error(origin + ":" + std::to_string(lineno) + ": duplicate site " +
                     std::to_string(n));
    }
  }
  if (rows.empty()) throw io_error(origin + ": no data rows");
  LatticeState s;
  s.offset = rows.begin()->first;
  long expect = s.offset;
  for (const auto& [n, ab] : rows) {
    if (n != expect) {
      throw io_error(origin + ": sites are not contiguous (missing site " +
                     std::to_string(expect) + ")");
    }
    s.a.push_back(ab.first);
    s.b.push_back(ab.second);
    ++expect;
  }
  s.validate();
  return s;
}

LatticeState read_state_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open " + path);
  return read_state_csv(f, path);
}

void write_grid_csv(std::ostream& out, const SensitivityGrid& g) {
  out << "t,n,dadz,dbdz\n";
  for (std::size_t k = 0; k < g.times.size(); ++k) {
    const std::string t = format_double(g.times[k]);
    for (std::size_t i = 0; i < g.da[k].size(); ++i) {
      out << t << ',' << g.offset + static_cast<long>(i) << ',' << format_double(g.da[k][i])
          << ',' << format_double(g.db[k][i]) << '\n';
    }
  }
}

void write_grid_csv(const std::string& path, const SensitivityGrid& g) {
  auto f = open_out(path);
  write_grid_csv(f, g);
  finish(f, path);
}

void write_ghs_grid_csv(const std::string& path, const GHSSensitivity& g) {
  auto f = open_out(path);
  f << "t,n,drdz,dpdz\n";
  for (std::size_t k = 0; k < g.times.size(); ++k) {
    const std::string t = format_double(g.times[k]);
    for (std::size_t i = 0; i < g.dr[k].size(); ++i) {
      f << t << ',' << g.offset + static_cast<long>(i) << ',' << format_double(g.dr[k][i])
        << ',' << format_double(g.dp[k][i]) << '\n';
    }
  }
  finish(f, path);
}

}  // namespace todalab
