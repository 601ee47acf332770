#include "qbands/io.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace qbands {

using json = nlohmann::json;

ConfigError::ConfigError(const std::string& message, std::string source, int line)
    : std::runtime_error([&] {
        std::string where = source;
        if (line > 0) where += ":" + std::to_string(line);
        return where.empty() ? message : where + ": " + message;
      }()),
      source_(std::move(source)),
      line_(line) {}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file", path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// YAML helpers that report the offending node's line.
class Doc {
 public:
  explicit Doc(std::string source) : source_(std::move(source)) {}

  YAML::Node load(const std::string& text) const {
    try {
      YAML::Node root = YAML::Load(text);
      if (!root.IsMap()) throw ConfigError("top level must be a mapping", source_, 1);
      return root;
    } catch (const YAML::Exception& e) {
      throw ConfigError(e.msg, source_, e.mark.line + 1);
    }
  }

  [[noreturn]] void fail(const YAML::Node& node, const std::string& message) const {
    const int line = node.IsDefined() && !node.Mark().is_null() ? node.Mark().line + 1 : 0;
    throw ConfigError(message, source_, line);
  }

  YAML::Node require(const YAML::Node& map, const std::string& key) const {
    const YAML::Node n = map[key];
    if (!n) fail(map, "missing key '" + key + "'");
    return n;
  }

  void allow_keys(const YAML::Node& map, std::initializer_list<const char*> keys) const {
    if (!map.IsMap()) fail(map, "expected a mapping");
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (!ok.count(key)) fail(kv.first, "unknown key '" + key + "'");
    }
  }

  double number(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n, what + " must be a number");
    try {
      return n.as<double>();
    } catch (const YAML::Exception&) {
      fail(n, what + " must be a number, got '" + n.Scalar() + "'");
    }
  }

  std::uint64_t count(const YAML::Node& n, const std::string& what) const {
    const double v = number(n, what);
    if (v < 0 || v != std::floor(v) || v > 9.0e15) fail(n, what + " must be a non-negative integer");
    return static_cast<std::uint64_t>(v);
  }

  bool flag(const YAML::Node& n, const std::string& what) const {
    try {
      return n.as<bool>();
    } catch (const YAML::Exception&) {
      fail(n, what + " must be true or false");
    }
  }

  std::string text(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n, what + " must be a string");
    return n.Scalar();
  }

  Vec3 vec3(const YAML::Node& n, const std::string& what, double scale = 1.0) const {
    if (!n.IsSequence() || n.size() != 3) fail(n, what + " must be a list of three numbers");
    Vec3 v{};
    for (std::size_t i = 0; i < 3; ++i) v[i] = scale * number(n[i], what);
    return v;
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

double energy_unit(const Doc& doc, const YAML::Node& n) {
  const std::string u = doc.text(n, "energy unit");
  if (u == "eV") return 1.0;
  if (u == "meV") return 1e-3;
  if (u == "Ry") return 13.605693122994;
  doc.fail(n, "unknown energy unit '" + u + "' (expected eV, meV, Ry)");
}

double length_unit(const Doc& doc, const YAML::Node& n) {
  const std::string u = doc.text(n, "length unit");
  if (u == "angstrom" || u == "Å") return 1.0;
  if (u == "bohr") return 0.529177210903;
  if (u == "nm") return 10.0;
  doc.fail(n, "unknown length unit '" + u + "' (expected angstrom, bohr, nm)");
}

}  // namespace

TightBindingModel parse_model(const std::string& text, const std::string& source) {
  const Doc doc(source);
  const YAML::Node root = doc.load(text);
  doc.allow_keys(root, {"name", "units", "lattice_vectors", "orbitals", "hoppings"});

  double e_scale = 1.0, l_scale = 1.0;
  if (const YAML::Node units = root["units"]) {
    doc.allow_keys(units, {"energy", "length"});
    if (units["energy"]) e_scale = energy_unit(doc, units["energy"]);
    if (units["length"]) l_scale = length_unit(doc, units["length"]);
  }

  const YAML::Node lat = doc.require(root, "lattice_vectors");
  if (!lat.IsSequence() || lat.size() != 3) doc.fail(lat, "lattice_vectors must list three vectors");
  std::array<Vec3, 3> lattice{};
  for (std::size_t i = 0; i < 3; ++i) lattice[i] = doc.vec3(lat[i], "lattice vector", l_scale);

  const YAML::Node orbs = doc.require(root, "orbitals");
  if (!orbs.IsSequence() || orbs.size() == 0) doc.fail(orbs, "orbitals must be a non-empty list");
  std::vector<Orbital> orbitals;
  std::map<std::string, std::size_t> by_label;
  for (const auto& o : orbs) {
    Orbital orb;
    if (o.IsScalar()) {
      orb.label = o.Scalar();
    } else {
      doc.allow_keys(o, {"label", "position"});
      orb.label = doc.text(doc.require(o, "label"), "orbital label");
      if (o["position"]) orb.position = doc.vec3(o["position"], "orbital position");
    }
    if (!by_label.emplace(orb.label, orbitals.size()).second) doc.fail(o, "duplicate orbital label '" + orb.label + "'");
    orbitals.push_back(orb);
  }

  auto orbital_index = [&](const YAML::Node& n) -> std::size_t {
    const std::string s = doc.text(n, "orbital reference");
    if (auto it = by_label.find(s); it != by_label.end()) return it->second;
    try {
      std::size_t pos = 0;
      const long v = std::stol(s, &pos);
      if (pos == s.size() && v >= 0 && static_cast<std::size_t>(v) < orbitals.size()) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    doc.fail(n, "unknown orbital '" + s + "'");
  };

  std::vector<Hopping> hoppings;
  if (const YAML::Node hops = root["hoppings"]) {
    if (!hops.IsSequence()) doc.fail(hops, "hoppings must be a list");
    for (const auto& h : hops) {
      doc.allow_keys(h, {"orbitals", "cell", "delta", "t"});
      const YAML::Node pair = doc.require(h, "orbitals");
      if (!pair.IsSequence() || pair.size() != 2) doc.fail(pair, "orbitals must name two orbitals");
      Hopping hop;
      hop.alpha = orbital_index(pair[0]);
      hop.beta = orbital_index(pair[1]);
      if (h["cell"] && h["delta"]) doc.fail(h, "give either cell or delta, not both");
      if (h["delta"]) {
        hop.delta = doc.vec3(h["delta"], "delta", l_scale);
      } else {
        const Vec3 n = h["cell"] ? doc.vec3(h["cell"], "cell") : Vec3{};
        for (double c : n)
          if (c != std::round(c)) doc.fail(h["cell"], "cell entries must be integers");
        const Vec3& fa = orbitals[hop.alpha].position;
        const Vec3& fb = orbitals[hop.beta].position;
        for (std::size_t i = 0; i < 3; ++i) {
          const double c = n[i] + fa[i] - fb[i];
          for (std::size_t x = 0; x < 3; ++x) hop.delta[x] += c * lattice[i][x];
        }
      }
      const YAML::Node t = doc.require(h, "t");
      if (t.IsSequence()) {
        if (t.size() != 2) doc.fail(t, "complex t must be [re, im]");
        hop.t = e_scale * cplx(doc.number(t[0], "t"), doc.number(t[1], "t"));
      } else {
        hop.t = e_scale * doc.number(t, "t");
      }
      hoppings.push_back(hop);
    }
  }

  const std::string name = root["name"] ? doc.text(root["name"], "name") : std::string{};
  try {
    return close_hermitian(TightBindingModel(lattice, std::move(orbitals), std::move(hoppings), name));
  } catch (const std::invalid_argument& e) {
    doc.fail(root["hoppings"] ? root["hoppings"] : root, e.what());
  }
}

TightBindingModel load_model(const std::filesystem::path& path) { return parse_model(read_text(path), path.string()); }

KPath KPathSpec::resolve(const TightBindingModel& model) const {
  if (coordinates == Coordinates::cartesian) return resolve_kpath(anchors, points_per_segment);
  const auto b = model.reciprocal_vectors();
  std::vector<KAnchor> cart;
  for (const auto& a : anchors) {
    KAnchor c{a.label, {}};
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t x = 0; x < 3; ++x) c.k[x] += a.k[i] * b[i][x];
    cart.push_back(c);
  }
  return resolve_kpath(cart, points_per_segment);
}

RunFile parse_run(const std::string& text, const std::string& source, const std::filesystem::path& base_dir) {
  const Doc doc(source);
  const YAML::Node root = doc.load(text);
  doc.allow_keys(root, {"model", "kpath", "tier", "shots", "trials", "beta_trials", "beta_factor", "seed", "workers",
                        "optimizer", "noise", "mitigation", "qpe"});
  RunFile out;
  RunConfig& rc = out.run;

  if (root["model"]) out.model = base_dir / doc.text(root["model"], "model");

  const YAML::Node kp = doc.require(root, "kpath");
  doc.allow_keys(kp, {"coordinates", "anchors", "points_per_segment"});
  if (kp["coordinates"]) {
    const std::string c = doc.text(kp["coordinates"], "coordinates");
    if (c == "reduced")
      out.kpath.coordinates = KPathSpec::Coordinates::reduced;
    else if (c == "cartesian")
      out.kpath.coordinates = KPathSpec::Coordinates::cartesian;
    else
      doc.fail(kp["coordinates"], "coordinates must be reduced or cartesian");
  }
  const YAML::Node anchors = doc.require(kp, "anchors");
  if (!anchors.IsSequence() || anchors.size() < 2) doc.fail(anchors, "kpath needs at least two anchors");
  for (const auto& a : anchors) {
    doc.allow_keys(a, {"label", "k"});
    out.kpath.anchors.push_back({doc.text(doc.require(a, "label"), "label"), doc.vec3(doc.require(a, "k"), "k")});
  }
  if (kp["points_per_segment"]) {
    out.kpath.points_per_segment = doc.count(kp["points_per_segment"], "points_per_segment");
    if (out.kpath.points_per_segment == 0) doc.fail(kp["points_per_segment"], "points_per_segment must be positive");
  }
  for (std::size_t i = 1; i < out.kpath.anchors.size(); ++i)
    if (out.kpath.anchors[i].k == out.kpath.anchors[i - 1].k)
      doc.fail(anchors[i], "anchor '" + out.kpath.anchors[i].label + "' coincides with the previous one");

  if (root["tier"]) {
    try {
      rc.tier = parse_tier(doc.text(root["tier"], "tier"));
    } catch (const std::invalid_argument& e) {
      doc.fail(root["tier"], e.what());
    }
  }
  if (root["shots"]) rc.shots = doc.count(root["shots"], "shots");
  if (root["trials"]) rc.trials = doc.count(root["trials"], "trials");
  if (root["beta_trials"]) rc.beta_trials = doc.count(root["beta_trials"], "beta_trials");
  if (root["beta_factor"]) rc.beta_factor = doc.number(root["beta_factor"], "beta_factor");
  if (root["seed"]) rc.seed = doc.count(root["seed"], "seed");
  if (root["workers"]) rc.workers = doc.count(root["workers"], "workers");

  if (const YAML::Node o = root["optimizer"]) {
    doc.allow_keys(o, {"rho_begin", "rho_end", "max_evals_per_dim", "max_evals"});
    if (o["rho_begin"]) rc.optimizer.rho_begin = doc.number(o["rho_begin"], "rho_begin");
    if (o["rho_end"]) rc.optimizer.rho_end = doc.number(o["rho_end"], "rho_end");
    if (o["max_evals_per_dim"]) rc.optimizer.max_evals_per_dim = doc.count(o["max_evals_per_dim"], "max_evals_per_dim");
    if (o["max_evals"]) rc.optimizer.max_evals = doc.count(o["max_evals"], "max_evals");
  }
  if (const YAML::Node n = root["noise"]) {
    doc.allow_keys(n, {"gate_flip_prob", "readout_flip_prob"});
    NoiseDescriptor nd;
    if (n["gate_flip_prob"]) nd.gate_flip_prob = doc.number(n["gate_flip_prob"], "gate_flip_prob");
    if (n["readout_flip_prob"]) nd.readout_flip_prob = doc.number(n["readout_flip_prob"], "readout_flip_prob");
    rc.noise = nd;
  }
  if (const YAML::Node m = root["mitigation"]) {
    doc.allow_keys(m, {"readout", "calibration_shots", "zne", "zne_scales"});
    if (m["readout"]) rc.mitigation.readout = doc.flag(m["readout"], "readout");
    if (m["calibration_shots"]) rc.mitigation.calibration_shots = doc.count(m["calibration_shots"], "calibration_shots");
    if (m["zne"]) rc.mitigation.zne = doc.flag(m["zne"], "zne");
    if (const YAML::Node s = m["zne_scales"]) {
      if (!s.IsSequence()) doc.fail(s, "zne_scales must be a list");
      rc.mitigation.schedule.scales.clear();
      for (const auto& v : s) rc.mitigation.schedule.scales.push_back(static_cast<int>(doc.count(v, "zne scale")));
    }
  }
  if (const YAML::Node q = root["qpe"]) {
    doc.allow_keys(q, {"bits", "tau", "slices_per_unit_time", "shots_per_bit"});
    QpeConfig qc;
    if (q["bits"]) qc.bits = static_cast<int>(doc.count(q["bits"], "bits"));
    if (q["tau"]) qc.tau = doc.number(q["tau"], "tau");
    if (q["slices_per_unit_time"]) qc.slices_per_unit_time = doc.number(q["slices_per_unit_time"], "slices_per_unit_time");
    if (q["shots_per_bit"]) qc.shots_per_bit = doc.count(q["shots_per_bit"], "shots_per_bit");
    rc.qpe = qc;
  }

  try {
    rc.validate();
    rc.optimizer.validate(1);
  } catch (const std::invalid_argument& e) {
    doc.fail(root, e.what());
  }
  return out;
}

RunFile load_run(const std::filesystem::path& path) {
  return parse_run(read_text(path), path.string(), path.parent_path());
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t hash) {
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string OutputHeader::line() const {
  return "# config_hash=" + hex64(config_hash) + " seed=" + std::to_string(seed);
}

namespace {

std::string row_method(const BandPoint& p) {
  if (p.error) return "error";
  if (p.provenance.empty()) return "exact";
  const Provenance first = p.provenance.front();
  for (Provenance q : p.provenance)
    if (q != first) return "mixed";
  return to_string(first);
}

Provenance parse_provenance(const std::string& s) {
  if (s == "exact") return Provenance::exact;
  if (s == "optimized") return Provenance::optimized;
  if (s == "qpe-refined") return Provenance::qpe_refined;
  throw std::invalid_argument("unknown method '" + s + "'");
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double to_double(const std::string& s, const std::string& source, int line) {
  if (s == "nan") return std::nan("");
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("not a number: '" + s + "'", source, line);
}

bool has_stats(const BandTable& table) {
  for (const auto& p : table.points)
    if (!p.error && !p.stats.empty()) return true;
  return false;
}

}  // namespace

std::string band_csv(const BandTable& table, const OutputHeader& header) {
  const std::size_t m = table.num_bands;
  const bool stats = has_stats(table);
  std::ostringstream os;
  os << header.line() << "\n";
  os << "k_index,path_distance,kx,ky,kz";
  for (std::size_t l = 0; l < m; ++l) os << ",E_" << l;
  os << ",method";
  if (stats)
    for (const char* s : {"mean", "q1", "q3"})
      for (std::size_t l = 0; l < m; ++l) os << "," << s << "_" << l;
  os << "\n";
  for (const auto& p : table.points) {
    os << p.k_index << "," << fmt(p.path_distance) << "," << fmt(p.k[0]) << "," << fmt(p.k[1]) << "," << fmt(p.k[2]);
    for (std::size_t l = 0; l < m; ++l) os << "," << (l < p.energies.size() ? fmt(p.energies[l]) : "nan");
    os << "," << row_method(p);
    if (stats) {
      for (auto field : {&TrialStats::mean, &TrialStats::q1, &TrialStats::q3})
        for (std::size_t l = 0; l < m; ++l) os << "," << (l < p.stats.size() ? fmt(p.stats[l].*field) : "nan");
    }
    os << "\n";
  }
  return os.str();
}

BandTable parse_band_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  std::vector<std::string> cols;
  BandTable table;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line);
    if (cols.empty()) {
      cols = cells;
      if (cols.size() < 6 || cols[0] != "k_index") throw ConfigError("not a band table header", source, line_no);
      for (const auto& c : cols)
        if (c.rfind("E_", 0) == 0) ++table.num_bands;
      continue;
    }
    if (cells.size() != cols.size()) throw ConfigError("wrong number of columns", source, line_no);
    BandPoint p;
    std::string method;
    std::map<std::string, std::vector<double>> stat;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const std::string& c = cols[i];
      if (c == "method") {
        method = cells[i];
        continue;
      }
      const double v = to_double(cells[i], source, line_no);
      if (c == "k_index")
        p.k_index = static_cast<std::size_t>(v);
      else if (c == "path_distance")
        p.path_distance = v;
      else if (c == "kx")
        p.k[0] = v;
      else if (c == "ky")
        p.k[1] = v;
      else if (c == "kz")
        p.k[2] = v;
      else if (c.rfind("E_", 0) == 0)
        p.energies.push_back(v);
      else
        stat[c.substr(0, c.find('_'))].push_back(v);
    }
    if (method == "error") {
      p.energies.clear();
      p.error = "failed in source table";
    } else {
      try {
        p.provenance.assign(p.energies.size(), parse_provenance(method));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what(), source, line_no);
      }
      if (!stat.empty()) {
        for (std::size_t l = 0; l < p.energies.size(); ++l) {
          TrialStats s;
          s.median = p.energies[l];
          s.mean = stat["mean"].at(l);
          s.q1 = stat["q1"].at(l);
          s.q3 = stat["q3"].at(l);
          p.stats.push_back(s);
        }
      }
    }
    table.points.push_back(std::move(p));
  }
  if (cols.empty()) throw ConfigError("empty band table", source);
  return table;
}

namespace {

json stats_json(const TrialStats& s) {
  return {{"count", s.count}, {"median", s.median}, {"mean", s.mean}, {"q1", s.q1}, {"q3", s.q3}};
}

}  // namespace

std::string trials_json(const KPath& path, const BandRun& run, const OutputHeader& header) {
  json root;
  root["provenance"] = {{"config_hash", hex64(header.config_hash)}, {"seed", header.seed}};
  root["num_bands"] = run.table.num_bands;
  json points = json::array();
  for (std::size_t i = 0; i < run.table.points.size(); ++i) {
    const BandPoint& p = run.table.points[i];
    json kp;
    kp["k_index"] = p.k_index;
    kp["k"] = {p.k[0], p.k[1], p.k[2]};
    kp["path_distance"] = p.path_distance;
    if (path.points[i].label) kp["label"] = *path.points[i].label;
    if (p.error) kp["error"] = *p.error;
    if (i < run.solutions.size() && run.solutions[i]) {
      const KSolution& sol = *run.solutions[i];
      kp["beta"] = {{"e_min", sol.beta.e_min},           {"e_max", sol.beta.e_max},
                    {"beta", sol.beta.beta},             {"fallback", sol.beta.fallback},
                    {"theta_min", sol.beta.theta_min},   {"theta_max", sol.beta.theta_max}};
      kp["warnings"] = sol.warnings;
      json levels = json::array();
      for (const auto& level : sol.levels) {
        json lv;
        lv["theta"] = level.theta;
        lv["energy"] = level.energy;
        lv["non_converged"] = level.non_converged;
        lv["stats"] = stats_json(level.stats);
        if (level.refined_stats) lv["refined_stats"] = stats_json(*level.refined_stats);
        json trials = json::array();
        for (const auto& t : level.trials) {
          json tr = {{"theta", t.theta},
                     {"cost", t.cost},
                     {"energy", t.energy},
                     {"evaluations", t.evaluations},
                     {"converged", t.converged}};
          if (t.refined)
            tr["refined"] = {{"bits", t.refined->bits},
                             {"phase", t.refined->phase},
                             {"energy", t.refined->energy},
                             {"confidence", t.refined->confidence}};
          trials.push_back(std::move(tr));
        }
        lv["trials"] = std::move(trials);
        levels.push_back(std::move(lv));
      }
      kp["levels"] = std::move(levels);
    }
    points.push_back(std::move(kp));
  }
  root["kpoints"] = std::move(points);
  return root.dump(1) + "\n";
}

std::vector<StoredKPoint> parse_trials_json(const std::string& text, const std::string& source) {
  std::vector<StoredKPoint> out;
  try {
    const json root = json::parse(text);
    for (const auto& kp : root.at("kpoints")) {
      if (!kp.contains("levels")) continue;
      StoredKPoint s;
      s.k_index = kp.at("k_index").get<std::size_t>();
      const auto& b = kp.at("beta");
      s.solution.beta.e_min = b.at("e_min").get<double>();
      s.solution.beta.e_max = b.at("e_max").get<double>();
      s.solution.beta.beta = b.at("beta").get<double>();
      s.solution.beta.fallback = b.at("fallback").get<bool>();
      s.solution.beta.theta_min = b.at("theta_min").get<std::vector<double>>();
      s.solution.beta.theta_max = b.at("theta_max").get<std::vector<double>>();
      for (const auto& lv : kp.at("levels")) {
        LevelResult level;
        level.theta = lv.at("theta").get<std::vector<double>>();
        level.energy = lv.at("energy").get<double>();
        level.non_converged = lv.at("non_converged").get<std::size_t>();
        std::vector<double> energies;
        for (const auto& tr : lv.at("trials")) {
          TrialRecord t;
          t.theta = tr.at("theta").get<std::vector<double>>();
          t.cost = tr.at("cost").get<double>();
          t.energy = tr.at("energy").get<double>();
          t.evaluations = tr.at("evaluations").get<std::size_t>();
          t.converged = tr.at("converged").get<bool>();
          energies.push_back(t.energy);
          level.trials.push_back(std::move(t));
        }
        level.stats = summarize(energies);
        s.solution.levels.push_back(std::move(level));
      }
      out.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed trials file: ") + e.what(), source);
  }
  return out;
}

std::vector<PlotRow> plot_rows(const BandTable& table) {
  std::vector<PlotRow> rows;
  for (const auto& p : table.points) {
    if (p.error) continue;
    for (std::size_t l = 0; l < p.energies.size(); ++l) {
      const std::string method = l < p.provenance.size() ? to_string(p.provenance[l]) : "exact";
      if (l < p.stats.size()) {
        const TrialStats& s = p.stats[l];
        rows.push_back({p.path_distance, l, method, "median", p.energies[l]});
        rows.push_back({p.path_distance, l, method, "mean", s.mean});
        rows.push_back({p.path_distance, l, method, "q1", s.q1});
        rows.push_back({p.path_distance, l, method, "q3", s.q3});
      } else {
        rows.push_back({p.path_distance, l, method, "value", p.energies[l]});
      }
    }
  }
  return rows;
}

std::string plot_csv(const std::vector<PlotRow>& rows, const OutputHeader& header) {
  std::ostringstream os;
  os << header.line() << "\n";
  os << "path_distance,band,method,statistic,value\n";
  for (const auto& r : rows)
    os << fmt(r.path_distance) << "," << r.band << "," << r.method << "," << r.statistic << "," << fmt(r.value) << "\n";
  return os.str();
}

std::vector<PlotRow> parse_plot_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool header = false;
  std::vector<PlotRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line);
    if (!header) {
      if (cells != std::vector<std::string>{"path_distance", "band", "method", "statistic", "value"})
        throw ConfigError("not a plot data header", source, line_no);
      header = true;
      continue;
    }
    if (cells.size() != 5) throw ConfigError("wrong number of columns", source, line_no);
    PlotRow r;
    r.path_distance = to_double(cells[0], source, line_no);
    r.band = static_cast<std::size_t>(to_double(cells[1], source, line_no));
    r.method = cells[2];
    r.statistic = cells[3];
    r.value = to_double(cells[4], source, line_no);
    rows.push_back(std::move(r));
  }
  if (!header) throw ConfigError("empty plot data", source);
  return rows;
}

}  // namespace qbands
