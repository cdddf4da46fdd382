#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "oblivsim/experiments.hpp"

namespace {

struct SubArgs {
  std::string config_path;
  std::string out_path;
  std::string trace_path;
  uint64_t seed = 0;
  std::optional<uint64_t> trials;
  std::optional<int64_t> threshold;
  std::optional<uint64_t> floor_size;
  bool timing = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

// results.json -> results.bucketed.csv / results.oblivious.csv
std::string sibling_path(const std::string& out_path, const std::string& tag) {
  std::filesystem::path p(out_path);
  std::filesystem::path stem = p;
  stem.replace_extension();
  return stem.string() + "." + tag + ".csv";
}

void register_common(CLI::App* sub, SubArgs& args, bool with_trials) {
  sub->add_option("--config", args.config_path, "JSON config file")->check(CLI::ExistingFile);
  sub->add_option("--seed", args.seed, "base seed (no ambient randomness)")->required();
  sub->add_option("--out", args.out_path, "result record path (default stdout)");
  sub->add_option("--dump-trace", args.trace_path, "write the sample session trace here");
  sub->add_flag("--timing", args.timing, "include wall-clock time in the record");
  if (with_trials) sub->add_option("--trials", args.trials, "repetition count override");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cell-probe machine experiments: oblivious dynamization, epoch attacks, and "
               "the supporting inequalities"};
  app.require_subcommand(1);

  struct Entry {
    const char* name;
    const char* help;
    bool trials;
    bool attack_flags;
  };
  constexpr Entry kEntries[] = {
      {"oblivcheck", "trace distance over random operation-sequence pairs", true, false},
      {"attack", "per-epoch distinguisher advantage, leaky vs oblivious", true, true},
      {"dynbench", "measured probe totals against the closed forms", false, false},
      {"lemmas", "inequality property runs", true, false},
      {"expansion", "sampled neighborhoods against the exhaustive minimum", true, false},
      {"resolve", "cell sampling and resolved-query enumeration", false, false},
  };
  SubArgs args[std::size(kEntries)];
  CLI::App* subs[std::size(kEntries)];
  for (size_t i = 0; i < std::size(kEntries); ++i) {
    subs[i] = app.add_subcommand(kEntries[i].name, kEntries[i].help);
    register_common(subs[i], args[i], kEntries[i].trials);
    if (kEntries[i].attack_flags) {
      subs[i]->add_option("--threshold", args[i].threshold, "fixed distinguisher threshold");
      subs[i]->add_option("--floor", args[i].floor_size, "epoch floor override");
    }
  }

  CLI11_PARSE(app, argc, argv);

  size_t chosen = 0;
  while (chosen < std::size(kEntries) && !subs[chosen]->parsed()) ++chosen;

  try {
    const SubArgs& a = args[chosen];
    std::string config_text;
    if (!a.config_path.empty()) config_text = read_file(a.config_path);
    oblivsim::CliOverrides overrides;
    overrides.seed = a.seed;
    overrides.trials = a.trials;
    overrides.threshold = a.threshold;
    overrides.floor_size = a.floor_size;
    overrides.timing = a.timing;
    overrides.dump_trace = !a.trace_path.empty();
    auto started = std::chrono::steady_clock::now();
    oblivsim::RunResult result =
        oblivsim::run_experiment_json(kEntries[chosen].name, config_text, overrides);
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    // Stderr only; the record stays a pure function of (config, seed).
    std::cerr << kEntries[chosen].name << ": " << elapsed << "s\n";
    if (a.out_path.empty()) {
      std::cout << result.record_text;
    } else {
      write_file(a.out_path, result.record_text);
      if (!result.csv_bucketed.empty())
        write_file(sibling_path(a.out_path, "bucketed"), result.csv_bucketed);
      if (!result.csv_oblivious.empty())
        write_file(sibling_path(a.out_path, "oblivious"), result.csv_oblivious);
    }
    if (!a.trace_path.empty()) write_file(a.trace_path, result.trace_text);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
