// secmacc: simulate, sweep, security and tradeoff commands.

#include "secmacc/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

struct Flags {
  std::map<std::string, std::string> values;
  struct Bound {
    std::string command, key;
    CLI::Option* option;
  };
  std::vector<Bound> options;
  std::string config;
  bool gap = false;
};

void add_flags(CLI::App& sub, Flags& f) {
  const std::pair<const char*, const char*> opts[] = {
      {"k", "number of users and caches (sweep: largest K)"},
      {"l", "caches accessed by each user"},
      {"n", "number of files (default K)"},
      {"i", "memory index of the uncoded point, iL <= K"},
      {"f", "file size in bits, or auto"},
      {"seed", "64-bit seed for files, keys and demands"},
      {"demand", "random, all-distinct, exhaustive, or a list such as 1,2,3"},
      {"samples", "sample count (sweep demands, sampled libraries, gap memories)"},
      {"out", "output directory"},
      {"scheme", "full-key, uncoded, coded or auto"},
      {"workers", "worker threads, 0 for one per hardware thread"},
  };
  for (const auto& [key, help] : opts)
    f.options.push_back({sub.get_name(), key, sub.add_option(std::string("--") + key, f.values[key], help)});
  sub.add_option("--config", f.config, "key=value file; flags override it");
  sub.add_flag("--gap", f.gap, "also check the secure/insecure rate gap");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secure multi-access coded caching simulator and tradeoff analyzer"};
  app.require_subcommand(1, 1);
  Flags flags;
  for (const auto* name : {"simulate", "sweep", "security", "tradeoff"}) {
    auto* sub = app.add_subcommand(name);
    add_flags(*sub, flags);
  }
  app.get_subcommand("simulate")->description("place, deliver and decode one demand");
  app.get_subcommand("sweep")->description("decode every valid configuration up to --k");
  app.get_subcommand("security")->description("mutual information oracle, keyed and unkeyed");
  app.get_subcommand("tradeoff")->description("corner points, envelope and gap bounds");

  CLI11_PARSE(app, argc, argv);

  secmacc::cli::RunConfig cfg;
  cfg.command = app.get_subcommands().front()->get_name();
  try {
    auto* chosen = app.get_subcommands().front();
    if (chosen->get_option("--config")->count()) secmacc::cli::apply_config_file(cfg, flags.config);
    // Every subcommand binds the same storage; only the chosen one's options carry counts.
    for (const auto& b : flags.options)
      if (b.command == cfg.command && b.option->count()) secmacc::cli::apply_setting(cfg, b.key, flags.values[b.key]);
    if (chosen->get_option("--gap")->count()) cfg.gap = true;
  } catch (const secmacc::Error& e) {
    std::cerr << e.what() << '\n';
    return secmacc::cli::kExitUsage;
  }
  return secmacc::cli::run(cfg, std::cout, std::cerr);
}
