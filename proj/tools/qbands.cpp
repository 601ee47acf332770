// qbands: band structures of tight-binding models via simulated VQD and QPE.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qbands/io.hpp"

namespace fs = std::filesystem;
using namespace qbands;

namespace {

struct Options {
  std::string model;
  std::string run;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::string> tier;
  std::string trials;                // refine: defaults to <out>/trials.json
  std::vector<std::string> tables;  // plotdata inputs
};

struct Job {
  TightBindingModel model;
  KPath path;
  RunConfig run;
  OutputHeader header;
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

fs::path output_dir(const Options& o) {
  const fs::path dir(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw ConfigError("output directory is not writable", o.out);
  return dir;
}

Job load_job(const Options& o) {
  if (o.run.empty()) throw ConfigError("--run is required");
  const std::string run_text = read_text(o.run);
  RunFile rf = parse_run(run_text, o.run, fs::path(o.run).parent_path());
  fs::path model_path;
  if (!o.model.empty())
    model_path = o.model;
  else if (rf.model)
    model_path = *rf.model;
  else
    throw ConfigError("no model: pass --model or set 'model' in the run file", o.run);
  const std::string model_text = read_text(model_path);
  TightBindingModel model = parse_model(model_text, model_path.string());

  RunConfig run = rf.run;
  if (o.seed) run.seed = *o.seed;
  if (o.workers) run.workers = *o.workers;
  if (o.tier) {
    try {
      run.tier = parse_tier(*o.tier);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what(), "--tier");
    }
  }
  try {
    run.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), o.run);
  }

  KPath path;
  try {
    path = rf.kpath.resolve(model);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), o.run);
  }

  std::uint64_t hash = fnv1a64(model_text);
  hash = fnv1a64(run_text, hash);
  hash = fnv1a64("tier=" + std::string(to_string(run.tier)) + ";seed=" + std::to_string(run.seed), hash);
  return {std::move(model), std::move(path), std::move(run), {hash, run.seed}};
}

void print_summary(const BandTable& table) {
  for (const auto& p : table.points) {
    std::printf("k %3zu  d=%.6f", p.k_index, p.path_distance);
    if (p.error) {
      std::printf("  FAILED: %s\n", p.error->c_str());
      continue;
    }
    for (std::size_t l = 0; l < p.energies.size(); ++l) {
      if (l < p.stats.size())
        std::printf("  E%zu median %.6f mean %.6f", l, p.energies[l], p.stats[l].mean);
      else
        std::printf("  E%zu %.6f", l, p.energies[l]);
    }
    std::printf("\n");
  }
  std::fflush(stdout);
}

void print_warnings(const BandRun& run) {
  for (std::size_t i = 0; i < run.solutions.size(); ++i)
    if (run.solutions[i])
      for (const auto& w : run.solutions[i]->warnings) std::fprintf(stderr, "warning: k %zu: %s\n", i, w.c_str());
}

int cmd_exact(const Options& o) {
  const Job job = load_job(o);
  const fs::path dir = output_dir(o);
  const BandTable table = exact_bands(job.model, job.path);
  write_file(dir / "exact.csv", band_csv(table, job.header));
  print_summary(table);
  return 0;
}

int cmd_vqd(const Options& o) {
  const Job job = load_job(o);
  const fs::path dir = output_dir(o);
  const BandRun run = band_structure(job.model, job.path, job.run);
  write_file(dir / "bands.csv", band_csv(run.table, job.header));
  write_file(dir / "trials.json", trials_json(job.path, run, job.header));
  print_summary(run.table);
  print_warnings(run);
  return 0;
}

int cmd_refine(const Options& o) {
  const Job job = load_job(o);
  if (!job.run.qpe) throw ConfigError("run file has no qpe block", o.run);
  const fs::path dir = output_dir(o);
  const fs::path trials_path = o.trials.empty() ? dir / "trials.json" : fs::path(o.trials);
  if (!fs::exists(trials_path)) throw ConfigError("trials file not found (run 'vqd' first)", trials_path.string());
  const auto stored = parse_trials_json(read_text(trials_path), trials_path.string());

  const TightBindingModel& model = job.model;
  const Backend backend = make_backend(job.run);
  BandRun run;
  run.table.num_bands = model.num_orbitals();
  run.solutions.resize(job.path.points.size());
  for (std::size_t i = 0; i < job.path.points.size(); ++i) {
    const KPoint& kp = job.path.points[i];
    BandPoint row;
    row.k_index = i;
    row.path_distance = kp.distance;
    row.k = kp.k;
    row.error = "no stored solution";
    for (const auto& s : stored) {
      if (s.k_index != i) continue;
      try {
        KSolution sol = s.solution;
        const PauliSum h = map_hamiltonian(bloch_matrix(model, kp.k));
        refine_levels(sol, h, *job.run.qpe, backend, kpoint_seed(job.run.seed, i));
        row = band_point(kp, i, sol);
        run.solutions[i] = std::move(sol);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
    run.table.points.push_back(std::move(row));
  }
  write_file(dir / "refined.csv", band_csv(run.table, job.header));
  write_file(dir / "refined_trials.json", trials_json(job.path, run, job.header));
  print_summary(run.table);
  print_warnings(run);
  return 0;
}

int cmd_plotdata(const Options& o) {
  if (o.tables.empty()) throw ConfigError("plotdata needs at least one band table");
  const fs::path dir = output_dir(o);
  std::vector<PlotRow> rows;
  std::uint64_t hash = fnv1a64("");
  std::uint64_t seed = 0;
  for (const auto& t : o.tables) {
    const std::string text = read_text(t);
    hash = fnv1a64(text, hash);
    // Inherit the seed of the first stamped input.
    if (const auto at = text.find(" seed="); text.rfind("#", 0) == 0 && at != std::string::npos && !o.seed && rows.empty())
      seed = std::strtoull(text.c_str() + at + 6, nullptr, 10);
    const BandTable table = parse_band_csv(text, t);
    for (auto& r : plot_rows(table)) rows.push_back(std::move(r));
  }
  if (o.seed) seed = *o.seed;
  write_file(dir / "plotdata.csv", plot_csv(rows, {hash, seed}));
  std::printf("%zu rows from %zu tables\n", rows.size(), o.tables.size());
  return 0;
}

void add_common(CLI::App* cmd, Options& o, bool pipeline) {
  cmd->add_option("--model", o.model, "Tight-binding model file (YAML)");
  cmd->add_option("--run", o.run, "Run configuration file (YAML)");
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Master seed override");
  if (pipeline) {
    cmd->add_option("--workers", o.workers, "Worker threads across k-points");
    cmd->add_option("--tier", o.tier, "Backend tier override: statevector, sampling, noisy, calibrated");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Band structures of tight-binding models by simulated variational deflation"};
  app.require_subcommand(1);
  Options o;

  auto* exact = app.add_subcommand("exact", "Exact diagonalization along the k-path");
  add_common(exact, o, false);
  auto* vqd = app.add_subcommand("vqd", "Variational deflation on the configured backend tier");
  add_common(vqd, o, true);
  auto* refine = app.add_subcommand("refine", "Phase-estimation refinement of stored trials");
  add_common(refine, o, true);
  refine->add_option("--trials", o.trials, "Trials file from 'vqd' (default <out>/trials.json)");
  auto* plot = app.add_subcommand("plotdata", "Merge band tables into long-format plot data");
  plot->add_option("tables", o.tables, "Band table CSV files");
  plot->add_option("--out", o.out, "Output directory")->capture_default_str();
  plot->add_option("--seed", o.seed, "Seed recorded in the header");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*exact) return cmd_exact(o);
    if (*vqd) return cmd_vqd(o);
    if (*refine) return cmd_refine(o);
    if (*plot) return cmd_plotdata(o);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
