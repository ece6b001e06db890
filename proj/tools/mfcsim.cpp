#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "mfc/csv.hpp"
#include "mfc/errors.hpp"
#include "mfc/metrics.hpp"
#include "mfc/presets.hpp"
#include "mfc/scenario.hpp"
#include "mfc/simulation.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitDiverged = 2;

fs::path default_out_dir() {
  if (const char* env = std::getenv("MFCSIM_OUT_DIR"); env && *env) return env;
  return ".";
}

mfc::Scenario resolve(const std::string& target) {
  const auto names = mfc::preset_names();
  if (std::find(names.begin(), names.end(), target) != names.end()) return mfc::preset(target);
  return mfc::load_scenario(target);
}

struct Outcome {
  std::string name;
  int code = kExitOk;
  std::string message;
};

Outcome run_one(mfc::Scenario sc, std::optional<std::uint64_t> seed, const fs::path& out_dir,
                bool print_metrics) {
  if (seed) sc.noise.seed = *seed;
  const mfc::TimeSeries ts = mfc::run_scenario(sc);
  const mfc::Metrics m = mfc::compute_metrics(ts);
  fs::create_directories(out_dir);
  mfc::emit_csv(ts, out_dir / (sc.name + ".csv"));
  const std::string json = mfc::metrics_to_json(m);
  {
    const fs::path mpath = out_dir / (sc.name + ".metrics.json");
    std::FILE* f = std::fopen(mpath.string().c_str(), "wb");
    if (!f) throw mfc::IoError("cannot open " + mpath.string() + " for writing");
    std::fwrite(json.data(), 1, json.size(), f);
    std::fclose(f);
  }
  if (print_metrics) std::cout << json;
  Outcome o{sc.name, kExitOk, "ok"};
  if (ts.diverged) {
    o.code = kExitDiverged;
    o.message = "diverged at t=" + std::to_string(ts.t.empty() ? 0.0 : ts.t.back()) + ": " + ts.divergence_reason;
  }
  return o;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const mfc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
  } catch (const mfc::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model-free control simulation harness"};
  app.require_subcommand(1);

  std::string target;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Run a preset or a scenario JSON file");
  run->add_option("target", target, "Preset name or config path")->required();
  run->add_option("--seed", seed, "Override the noise seed");
  run->add_option("--out", out_dir, "Output directory (default $MFCSIM_OUT_DIR or .)");

  app.add_subcommand("list-presets", "List built-in scenarios");

  std::string dump_name;
  auto* dump = app.add_subcommand("dump-preset", "Print a preset as JSON");
  dump->add_option("name", dump_name)->required();

  std::string batch_dir;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* batch = app.add_subcommand("batch", "Run every *.json scenario in a directory");
  batch->add_option("dir", batch_dir)->required()->check(CLI::ExistingDirectory);
  batch->add_option("--seed", seed, "Override the noise seed of every scenario");
  batch->add_option("--out", out_dir, "Output directory (default $MFCSIM_OUT_DIR or .)");
  batch->add_option("--jobs", jobs, "Concurrent scenarios")->check(CLI::PositiveNumber);

  std::string csv_path;
  auto* metrics = app.add_subcommand("metrics", "Compute metrics from a CSV log");
  metrics->add_option("csv", csv_path)->required();

  CLI11_PARSE(app, argc, argv);
  const fs::path out = out_dir.empty() ? default_out_dir() : fs::path(out_dir);

  if (*run) {
    return guarded([&] {
      const Outcome o = run_one(resolve(target), seed, out, true);
      if (o.code != kExitOk) std::cerr << o.name << ": " << o.message << "\n";
      return o.code;
    });
  }
  if (app.got_subcommand("list-presets")) {
    for (const auto& n : mfc::preset_names()) std::cout << n << "\t" << mfc::preset(n).description << "\n";
    return kExitOk;
  }
  if (*dump) {
    return guarded([&] {
      std::cout << mfc::scenario_to_json(mfc::preset(dump_name));
      return kExitOk;
    });
  }
  if (*metrics) {
    return guarded([&] {
      std::cout << mfc::metrics_to_json(mfc::compute_metrics(mfc::read_csv(csv_path)));
      return kExitOk;
    });
  }

  // batch
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(batch_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Outcome> results(files.size());
  std::size_t next = 0;
  while (next < files.size()) {
    std::vector<std::future<Outcome>> wave;
    for (unsigned j = 0; j < jobs && next < files.size(); ++j, ++next) {
      wave.push_back(std::async(std::launch::async, [path = files[next], &seed, &out] {
        try {
          return run_one(mfc::load_scenario(path), seed, out, false);
        } catch (const std::exception& e) {
          return Outcome{path.filename().string(), kExitConfig, e.what()};
        }
      }));
    }
    const std::size_t first = next - wave.size();
    for (std::size_t j = 0; j < wave.size(); ++j) results[first + j] = wave[j].get();
  }
  int code = kExitOk;
  for (std::size_t i = 0; i < files.size(); ++i) {
    std::cout << files[i].filename().string() << "\t" << results[i].message << "\n";
    if (results[i].code == kExitConfig) code = kExitConfig;
    if (results[i].code == kExitDiverged && code == kExitOk) code = kExitDiverged;
  }
  return code;
}
