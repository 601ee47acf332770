#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qbands/tightbinding.hpp"
#include "qbands/vqd.hpp"

namespace qbands {

/// Malformed or inconsistent input file. `line` is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, std::string source = {}, int line = 0);

  const std::string& source() const { return source_; }
  int line() const { return line_; }

 private:
  std::string source_;
  int line_;
};

std::string read_text(const std::filesystem::path& path);

/// Model file: YAML with `units` (energy: eV | meV | Ry, length: angstrom |
/// bohr | nm), `lattice_vectors`, `orbitals` and `hoppings`. Values are
/// converted to eV and Å; the model is returned hermitian-closed.
TightBindingModel parse_model(const std::string& text, const std::string& source = "<model>");
TightBindingModel load_model(const std::filesystem::path& path);

struct KPathSpec {
  enum class Coordinates { reduced, cartesian };
  Coordinates coordinates = Coordinates::reduced;
  std::vector<KAnchor> anchors;  // reduced: multiples of the reciprocal vectors; cartesian: 1/Å
  std::size_t points_per_segment = 6;

  KPath resolve(const TightBindingModel& model) const;
};

struct RunFile {
  std::optional<std::filesystem::path> model;  // resolved against the run file's directory
  KPathSpec kpath;
  RunConfig run;
};

/// Run file: YAML with `kpath` and pipeline settings. Validated on load.
RunFile parse_run(const std::string& text, const std::string& source = "<run>",
                  const std::filesystem::path& base_dir = {});
RunFile load_run(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view data, std::uint64_t hash = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

/// Provenance stamped on every output file as its first line.
struct OutputHeader {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;

  std::string line() const;  // "# config_hash=<hex> seed=<n>"
};

/// Columns k_index, path_distance, kx, ky, kz, E_0..E_{M-1}, method, then
/// mean_l, q1_l, q3_l per band when the table carries trial statistics. Failed
/// k-points are written with nan energies and method "error".
std::string band_csv(const BandTable& table, const OutputHeader& header);
BandTable parse_band_csv(const std::string& text, const std::string& source = "<table>");

/// Per-trial record of a pipeline run, enough to refine it later.
std::string trials_json(const KPath& path, const BandRun& run, const OutputHeader& header);

struct StoredKPoint {
  std::size_t k_index = 0;
  KSolution solution;
};
std::vector<StoredKPoint> parse_trials_json(const std::string& text, const std::string& source = "<trials>");

struct PlotRow {
  double path_distance = 0.0;
  std::size_t band = 0;
  std::string method;
  std::string statistic;  // value | median | mean | q1 | q3
  double value = 0.0;
};

std::vector<PlotRow> plot_rows(const BandTable& table);
std::string plot_csv(const std::vector<PlotRow>& rows, const OutputHeader& header);
std::vector<PlotRow> parse_plot_csv(const std::string& text, const std::string& source = "<plotdata>");

}  // namespace qbands
