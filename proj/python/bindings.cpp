#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qbands/io.hpp"
#include "qbands/vqd.hpp"

namespace py = pybind11;
using namespace qbands;

namespace {

using ComplexArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

CMatrix to_matrix(const ComplexArray& a) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw std::invalid_argument("expected a square matrix");
  const auto n = static_cast<std::size_t>(a.shape(0));
  CMatrix m(n, n);
  auto r = a.unchecked<2>();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = r(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j));
  return m;
}

py::array_t<cplx> to_array(const CMatrix& m) {
  py::array_t<cplx> out({m.rows(), m.cols()});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) w(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j)) = m(i, j);
  return out;
}

PauliSum image(const ComplexArray& h) { return map_hamiltonian(HermitianMatrix(to_matrix(h))); }

py::dict stats_dict(const TrialStats& s) {
  py::dict d;
  d["count"] = s.count;
  d["median"] = s.median;
  d["mean"] = s.mean;
  d["q1"] = s.q1;
  d["q3"] = s.q3;
  return d;
}

py::dict table_dict(const BandTable& t) {
  py::list points;
  for (const auto& p : t.points) {
    py::dict d;
    d["k_index"] = p.k_index;
    d["distance"] = p.path_distance;
    d["k"] = std::vector<double>(p.k.begin(), p.k.end());
    d["energies"] = p.energies;
    std::vector<std::string> prov;
    for (auto v : p.provenance) prov.emplace_back(to_string(v));
    d["provenance"] = prov;
    py::list stats;
    for (const auto& s : p.stats) stats.append(stats_dict(s));
    d["stats"] = stats;
    d["error"] = p.error ? py::object(py::str(*p.error)) : py::object(py::none());
    points.append(d);
  }
  py::dict out;
  out["num_bands"] = t.num_bands;
  out["points"] = points;
  return out;
}

struct LoadedRun {
  TightBindingModel model;
  KPath path;
  RunConfig config;
};

LoadedRun load(const std::filesystem::path& run_file, const std::optional<std::filesystem::path>& model_file,
               const std::optional<std::string>& tier, const std::optional<std::uint64_t>& seed,
               const std::optional<std::size_t>& workers) {
  RunFile rf = load_run(run_file);
  const auto mp = model_file ? model_file : rf.model;
  TightBindingModel model = mp ? load_model(*mp) : polonium_model();
  if (tier) rf.run.tier = parse_tier(*tier);
  if (seed) rf.run.seed = *seed;
  if (workers) rf.run.workers = *workers;
  rf.run.validate();
  KPath path = rf.kpath.resolve(model);
  return {std::move(model), std::move(path), rf.run};
}

}  // namespace

PYBIND11_MODULE(_qbands, m) {
  m.doc() = "Tight-binding band structures from variational and phase-estimation simulations";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<TightBindingModel>(m, "Model")
      .def_property_readonly("name", &TightBindingModel::name)
      .def_property_readonly("num_orbitals", &TightBindingModel::num_orbitals)
      .def(
          "bloch_matrix",
          [](const TightBindingModel& self, std::array<double, 3> k) { return to_array(bloch_matrix(self, k).matrix()); },
          py::arg("k"), "Bloch matrix at Cartesian k (1/Å).");

  m.def("polonium_model", &polonium_model, py::arg("lattice_constant") = 3.345);
  m.def("load_model", &load_model, py::arg("path"));
  m.def("parse_model", [](const std::string& text) { return parse_model(text); }, py::arg("text"));

  m.def(
      "pauli_image",
      [](const ComplexArray& h) {
        std::vector<std::pair<double, std::string>> out;
        for (const auto& t : image(h).terms()) out.emplace_back(t.coeff, t.word.str());
        return out;
      },
      py::arg("h"), "Qubit operator of a Hermitian matrix as (coefficient, word) pairs.");
  m.def(
      "commuting_groups",
      [](const ComplexArray& h) {
        const PauliSum p = image(h);
        std::vector<std::vector<std::string>> out;
        for (const auto& g : partition(p).groups) {
          auto& words = out.emplace_back();
          for (std::size_t i : g) words.push_back(p[i].word.str());
        }
        return out;
      },
      py::arg("h"));
  m.def(
      "excitation_block", [](const ComplexArray& h) { return to_array(excitation_block(image(h)).matrix()); },
      py::arg("h"), "Single-excitation block of the qubit image, for round-trip checks.");

  m.def(
      "ansatz_state",
      [](std::size_t num_qubits, std::vector<double> params) {
        const StateVector s = Backend().run_statevector(build_ansatz(AnsatzSpec(num_qubits, std::move(params))));
        py::array_t<cplx> out(std::vector<py::ssize_t>{static_cast<py::ssize_t>(s.dim())});
        auto w = out.mutable_unchecked<1>();
        for (std::size_t i = 0; i < s.dim(); ++i) w(static_cast<py::ssize_t>(i)) = s[i];
        return out;
      },
      py::arg("num_qubits"), py::arg("params"));

  m.def(
      "solve_k",
      [](const ComplexArray& h, const std::string& tier, std::uint64_t shots, std::size_t trials, std::uint64_t seed,
         double rho_end, std::size_t max_evals_per_dim) {
        RunConfig rc;
        rc.tier = parse_tier(tier);
        rc.shots = shots;
        rc.trials = trials;
        rc.seed = seed;
        rc.optimizer.rho_end = rho_end;
        rc.optimizer.max_evals_per_dim = max_evals_per_dim;
        rc.validate();
        const PauliSum p = image(h);
        const int n = static_cast<int>(p.n_qubits());
        const KSolution sol = solve_k(p, make_estimator(rc, n), rc, seed);
        py::list levels;
        for (const auto& l : sol.levels) {
          py::dict d;
          d["energy"] = l.energy;
          d["theta"] = l.theta;
          d["stats"] = stats_dict(l.stats);
          std::vector<double> energies;
          for (const auto& t : l.trials) energies.push_back(t.energy);
          d["trial_energies"] = energies;
          levels.append(d);
        }
        py::dict out;
        out["beta"] = sol.beta.beta;
        out["e_min"] = sol.beta.e_min;
        out["e_max"] = sol.beta.e_max;
        out["levels"] = levels;
        out["warnings"] = sol.warnings;
        return out;
      },
      py::arg("h"), py::arg("tier") = "statevector", py::arg("shots") = 8096, py::arg("trials") = 1,
      py::arg("seed") = 0, py::arg("rho_end") = 1e-4, py::arg("max_evals_per_dim") = 100,
      "Deflation solve of one Bloch matrix (noisy tiers need a run file; use band_structure).");

  m.def(
      "qpe_energy",
      [](const ComplexArray& h, std::vector<double> theta, double e_lo, double e_hi, int bits,
         double slices_per_unit_time, std::uint64_t seed) {
        QpeConfig cfg;
        cfg.bits = bits;
        cfg.e_lo = e_lo;
        cfg.e_hi = e_hi;
        cfg.slices_per_unit_time = slices_per_unit_time;
        Rng rng(seed);
        const auto est = refine_level(theta, image(h), cfg, Backend(), rng);
        py::dict out;
        out["energy"] = est.energy;
        out["phase"] = est.phase;
        out["bits"] = est.bits;
        out["grid_spacing"] = grid_spacing(cfg);
        return out;
      },
      py::arg("h"), py::arg("theta"), py::arg("e_lo"), py::arg("e_hi"), py::arg("bits") = 8,
      py::arg("slices_per_unit_time") = 8.0, py::arg("seed") = 0,
      "Phase estimation on the ansatz state at theta, statevector tier.");

  m.def(
      "exact_bands",
      [](const std::filesystem::path& run_file, std::optional<std::filesystem::path> model) {
        const auto r = load(run_file, model, std::nullopt, std::nullopt, std::nullopt);
        return table_dict(exact_bands(r.model, r.path));
      },
      py::arg("run_file"), py::arg("model") = py::none());
  m.def(
      "band_structure",
      [](const std::filesystem::path& run_file, std::optional<std::filesystem::path> model,
         std::optional<std::string> tier, std::optional<std::uint64_t> seed, std::optional<std::size_t> workers) {
        const auto r = load(run_file, model, tier, seed, workers);
        BandRun run;
        {
          py::gil_scoped_release release;
          run = band_structure(r.model, r.path, r.config);
        }
        return table_dict(run.table);
      },
      py::arg("run_file"), py::arg("model") = py::none(), py::arg("tier") = py::none(), py::arg("seed") = py::none(),
      py::arg("workers") = py::none());
}
