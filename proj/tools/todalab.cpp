#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "todalab/todalab.h"

namespace {

constexpr int kConfigError = 2;

bool read_file(const std::string& path, std::string& out) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return false;
  std::ostringstream ss;
  ss << f.rdbuf();
  out = ss.str();
  return true;
}

int finish(tl_status st, tl_run* run) {
  if (st != TL_OK) {
    std::cerr << "error: " << tl_status_name(st) << ": " << tl_last_error() << "\n";
    return st == TL_ERR_CONFIG ? kConfigError : 1;
  }
  const int code = tl_run_exit_code(run);
  const std::string summary = tl_run_summary_json(run);
  const std::string message = tl_run_message(run);
  if (!summary.empty()) std::cout << summary;
  if (code == kConfigError) {
    std::cerr << "config error: " << message << "\n";
  } else if (code != 0) {
    std::cerr << "FAIL: " << message << "\n";
  }
  tl_run_destroy(run);
  return code;
}

bool parse_values(const std::string& text, std::vector<double>& out, std::string& bad) {
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    item = item.substr(b, item.find_last_not_of(" \t") - b + 1);
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      bad = item;
      return false;
    }
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Toda lattice light-cone laboratory"};
  app.require_subcommand(1);

  std::string config, out_dir, axis, values;
  unsigned jobs = 0;

  auto* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("-c,--config", config, "JSON config file")->required();
  run->add_option("--out", out_dir, "Directory for CSV and JSON artifacts");

  auto* sweep = app.add_subcommand("sweep", "Run one experiment per value of a numeric field");
  sweep->add_option("-c,--config", config, "JSON config file")->required();
  sweep->add_option("--axis", axis, "kappa, w0, beta, mu or a dotted config path")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();
  sweep->add_option("--out", out_dir, "Directory for per-job artifacts and sweep.json");
  sweep->add_option("-j,--jobs", jobs, "Parallel jobs (0: hardware concurrency)");

  auto* defaults = app.add_subcommand("print-default-config", "Print the default config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  if (defaults->parsed()) {
    char* text = nullptr;
    if (tl_default_config_json(&text) != TL_OK) {
      std::cerr << "error: " << tl_last_error() << "\n";
      return 1;
    }
    std::cout << text;
    tl_string_free(text);
    return 0;
  }

  std::string text;
  if (!read_file(config, text)) {
    std::cerr << "config error: cannot read " << config << "\n";
    return kConfigError;
  }
  const char* out = out_dir.empty() ? nullptr : out_dir.c_str();

  if (run->parsed()) {
    tl_run* r = nullptr;
    const tl_status st = tl_run_config(text.c_str(), config.c_str(), out, &r);
    return finish(st, r);
  }

  std::vector<double> vals;
  std::string bad;
  if (!parse_values(values, vals, bad)) {
    std::cerr << "config error: --values: cannot parse \"" << bad << "\" as a number\n";
    return kConfigError;
  }
  if (vals.empty()) {
    std::cerr << "config error: --values: the value list is empty\n";
    return kConfigError;
  }
  tl_run* r = nullptr;
  const tl_status st =
      tl_sweep_config(text.c_str(), config.c_str(), axis.c_str(), vals.data(), vals.size(), out, jobs, &r);
  return finish(st, r);
}
