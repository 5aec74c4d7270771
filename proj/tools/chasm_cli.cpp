#include <CLI11.hpp>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "chasm/errors.hpp"
#include "chasm/harness.hpp"

namespace {

struct Overrides {
  std::string scheme, closure, out;
  std::size_t nnb = 0, patches = 0, workers = 0;
  bool allow_heavy = false;
  std::vector<std::string> set;
};

void add_overrides(CLI::App& cmd, Overrides& o) {
  cmd.add_option("--scheme", o.scheme, "lpc1, lapc2, lapc3 or os");
  cmd.add_option("--closure", o.closure, "serial, clshbc or pmbc");
  cmd.add_option("--nnb", o.nnb, "PMBC neighbour count");
  cmd.add_option("--patches", o.patches, "patches per x axis");
  cmd.add_option("--workers", o.workers, "worker threads");
  cmd.add_option("--out", o.out, "CSV output path");
  cmd.add_flag("--allow-heavy", o.allow_heavy, "run even when the cost estimate is large");
  cmd.add_option("--set", o.set, "extra key=value settings")->allow_extra_args(false);
}

chasm::RunConfig configure(const std::string& path, const Overrides& o) {
  chasm::RunConfig c = chasm::load_config(path);
  if (!o.scheme.empty()) chasm::apply_setting(c, "scheme", o.scheme);
  if (!o.closure.empty()) chasm::apply_setting(c, "closure", o.closure);
  if (o.nnb) c.closure.n_nb = o.nnb;
  if (o.patches) c.closure.patches = o.patches;
  if (o.workers) c.workers = o.workers;
  if (!o.out.empty()) c.output_path = o.out;
  if (o.allow_heavy) c.allow_heavy = true;
  for (const auto& kv : o.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw chasm::ConfigError("--set expects key=value, got '" + kv + "'");
    chasm::apply_setting(c, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return c;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wigner transport solver"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides o;
  auto* run = app.add_subcommand("run", "run one experiment");
  run->add_option("--config", config_path, "key=value config file")->required();
  add_overrides(*run, o);

  std::string vary, values;
  auto* sweep = app.add_subcommand("sweep", "convergence table over one parameter");
  sweep->add_option("--config", config_path, "key=value config file")->required();
  sweep->add_option("--vary", vary, "dx, nnb or nk")->required();
  sweep->add_option("--values", values, "comma-separated values")->required();
  add_overrides(*sweep, o);

  CLI11_PARSE(app, argc, argv);

  try {
    const chasm::RunConfig base = configure(config_path, o);
    if (run->parsed()) {
      const auto r = chasm::run_experiment(base);
      const auto& s = r.series;
      std::cout << std::setprecision(6) << "steps " << r.steps << "  t " << s.times.back()
                << "  eps_inf " << s.eps_inf.back() << "  eps_2 " << s.eps2.back()
                << "  eps_mass " << s.eps_mass.back() << '\n';
      return 0;
    }
    std::vector<chasm::RunConfig> configs;
    for (const auto& v : split(values)) {
      chasm::RunConfig c = base;
      chasm::apply_setting(c, vary, v);
      c.output_path.clear();
      configs.push_back(c);
    }
    const auto rows = chasm::convergence_table(configs, vary);
    std::cout << std::left << std::setw(12) << vary << std::setw(14) << "eps_inf" << std::setw(14)
              << "eps_2" << "order\n";
    for (const auto& row : rows) {
      std::cout << std::setprecision(5) << std::setw(12) << row.parameter << std::setw(14)
                << row.eps_inf << std::setw(14) << row.eps_2;
      if (row.order) std::cout << *row.order;
      std::cout << '\n';
    }
    return 0;
  } catch (const chasm::InstabilityError& e) {
    std::cerr << "instability: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
