#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "girg/experiment.hpp"

namespace {

struct Flags {
  std::string config;
  std::string seed, trials, out, threads;
  bool deterministic = false;
  std::vector<std::string> sets;
};

int fail(const std::string& kind, const std::string& message, int code) {
  std::cerr << girg::error_json(kind, message) << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"girglab: GIRG/IRG clique experiments"};
  app.require_subcommand(1);
  Flags flags;
  std::vector<std::pair<CLI::App*, girg::Scenario>> subs;
  for (const auto& [name, scenario] : girg::scenario_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " scenario");
    sub->add_option("--config", flags.config, "key = value configuration file");
    sub->add_option("--seed", flags.seed, "64-bit seed");
    sub->add_option("--trials", flags.trials, "trials or graphs per point");
    sub->add_option("--out", flags.out, "output path");
    sub->add_option("--threads", flags.threads, "worker threads (speed only)");
    sub->add_flag("--deterministic", flags.deterministic, "omit the manifest timestamp");
    sub->add_option("--set", flags.sets, "extra key=value override, repeatable");
    subs.emplace_back(sub, scenario);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  girg::ScenarioConfig cfg;
  try {
    std::map<std::string, std::string> entries;
    if (!flags.config.empty()) entries = girg::read_config_file(flags.config);
    for (const auto& kv : flags.sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw girg::ConfigError("--set expects key=value, got '" + kv + "'");
      entries[girg::detail::trim(kv.substr(0, eq))] = girg::detail::trim(kv.substr(eq + 1));
    }
    if (!flags.seed.empty()) entries["seed"] = flags.seed;
    if (!flags.trials.empty()) entries["trials"] = flags.trials;
    if (!flags.out.empty()) entries["out"] = flags.out;
    if (!flags.threads.empty()) entries["threads"] = flags.threads;
    if (flags.deterministic) entries["deterministic"] = "true";
    for (const auto& [sub, scenario] : subs)
      if (sub->parsed()) entries["scenario"] = girg::to_string(scenario);
    girg::apply_entries(cfg, entries);
    girg::finalize_config(cfg);
  } catch (const girg::ConfigError& e) {
    return fail("config", e.what(), 2);
  }

  try {
    girg::run_scenario(cfg);
  } catch (const std::exception& e) {
    return fail("runtime", e.what(), 1);
  }
  return 0;
}
