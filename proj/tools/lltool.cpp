// lltool: command-line front end over the C API.
//
//   lltool build --config model.json --out pmf.csv     (+ pmf.csv.meta.json)
//   lltool llt   --config study.json --out table.csv
//   lltool sup   --config study.json --out table.csv [--threads k]
//   lltool study --config study.json [--out table.csv] [--threads k]
//
// Exit codes: 0 success, 2 config error, 3 numerical or regime error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "llt/llt.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

bool read_file(const std::string& path, std::string& text) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  text = ss.str();
  return true;
}

int report(llt_status status) {
  if (status == LLT_OK) return 0;
  std::cerr << "lltool: " << llt_last_error() << '\n';
  return status == LLT_CONFIG_INVALID || status == LLT_IO ? kExitConfig : kExitNumerical;
}

int run_build(const std::string& config, const std::string& out) {
  llt_pmf* pmf = nullptr;
  llt_status status = llt_pmf_from_model_json(config.c_str(), &pmf);
  if (status == LLT_OK) {
    status = llt_pmf_write_csv(pmf, out.c_str(), (out + ".meta.json").c_str());
    llt_pmf_free(pmf);
  }
  return report(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact lattice laws and interval-type local limit statistics"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  unsigned threads = 1;

  auto add_common = [&](CLI::App* sub, bool out_required) {
    sub->add_option("--config", config_path, "JSON config file")->required();
    auto* out = sub->add_option("--out", out_path, "output CSV path");
    if (out_required) out->required();
    sub->add_option("--threads", threads, "worker threads")->check(CLI::Range(1U, 1024U));
  };
  CLI::App* build = app.add_subcommand("build", "write a model pmf to CSV");
  CLI::App* llt = app.add_subcommand("llt", "pointwise local-limit statistic over n_grid");
  CLI::App* sup = app.add_subcommand("sup", "interval supremum over n_grid");
  CLI::App* study = app.add_subcommand("study", "full convergence sweep");
  add_common(build, true);
  add_common(llt, true);
  add_common(sup, true);
  add_common(study, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  std::string config;
  if (!read_file(config_path, config)) {
    std::cerr << "lltool: cannot read " << config_path << '\n';
    return kExitConfig;
  }
  const char* out = out_path.empty() ? nullptr : out_path.c_str();
  if (build->parsed()) return run_build(config, out_path);
  if (llt->parsed()) return report(llt_study_pointwise(config.c_str(), out));
  if (sup->parsed()) return report(llt_study_sup(config.c_str(), out, threads));
  return report(llt_study_run(config.c_str(), out, threads));
}
