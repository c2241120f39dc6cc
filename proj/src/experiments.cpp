#include "dal/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dal/averaging.hpp"
#include "dal/dynamics.hpp"
#include "dal/geometry.hpp"
#include "dal/parallel.hpp"
#include "dal/spectral.hpp"
#include "dal/statistics.hpp"

namespace dal {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t fnv1a64(const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes.data(), bytes.size())));
  return buf;
}

const std::string& ExperimentConfig::get(const std::string& key) const {
  auto it = entries.find(key);
  if (it == entries.end()) throw ConfigError("missing config key: " + key);
  return it->second;
}

std::string ExperimentConfig::get_or(const std::string& key, const std::string& fallback) const {
  auto it = entries.find(key);
  return it == entries.end() ? fallback : it->second;
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (key == "command") {
      cfg.command = val;
      continue;
    }
    if (!cfg.entries.emplace(key, val).second)
      throw ConfigError("config: duplicate key " + key);
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

void apply_overrides(ExperimentConfig& cfg, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("override must be key=value: " + o);
    std::string key = trim(o.substr(0, eq));
    std::string val = trim(o.substr(eq + 1));
    if (key == "command")
      cfg.command = val;
    else
      cfg.entries[key] = val;
  }
}

namespace {

struct CommandSchema {
  std::set<std::string> required;
  std::set<std::string> optional;
};

const std::set<std::string> kGeometryKeys = {"geometry.kind", "geometry.d",     "geometry.k",
                                             "geometry.alpha", "geometry.beta", "geometry.R",
                                             "geometry.seed",  "geometry.window", "geometry.file"};
const std::set<std::string> kDisorderKeys = {"disorder.law", "disorder.M", "disorder.tau",
                                             "disorder.a", "disorder.b", "disorder.reflected"};

std::map<std::string, CommandSchema> build_schemas() {
  std::map<std::string, CommandSchema> s;
  auto with = [](std::initializer_list<const std::set<std::string>*> groups,
                 std::initializer_list<std::string> extra) {
    std::set<std::string> out;
    for (const auto* g : groups) out.insert(g->begin(), g->end());
    out.insert(extra.begin(), extra.end());
    return out;
  };
  const std::set<std::string> run_common = {"run.master_seed", "run.threads", "output.dir"};

  s["delone-gen"] = {{}, with({&kGeometryKeys}, {"run.threads", "output.dir"})};
  s["delone-analyze"] = {{},
                         with({&kGeometryKeys},
                              {"box.centers", "box.Ls", "run.pattern_extent", "run.threads",
                               "output.dir"})};
  s["spectrum"] = {{},
                   with({&kGeometryKeys, &kDisorderKeys},
                        {"box.center", "box.L", "run.sample_index", "run.export_operator",
                         "run.master_seed", "run.threads", "output.dir"})};
  s["certify-lemma"] = {{},
                        with({&kGeometryKeys},
                             {"box.center", "box.L", "run.q", "run.nsamples", "run.master_seed",
                              "run.threads", "output.dir"})};
  s["certify-lifting"] = {{},
                          with({&kGeometryKeys, &kDisorderKeys},
                               {"box.center", "box.L", "run.K", "run.nsamples", "run.nphi",
                                "run.master_seed", "run.threads", "output.dir"})};
  s["wegner"] = {{},
                 with({&kGeometryKeys, &kDisorderKeys},
                      {"box.centers", "box.Ls", "run.E", "run.etas", "run.nsamples",
                       "run.master_seed", "run.threads", "output.dir"})};
  s["ilse"] = {{},
               with({&kGeometryKeys, &kDisorderKeys},
                    {"box.centers", "box.Ls", "run.p", "run.nsamples", "run.master_seed",
                     "run.threads", "output.dir"})};
  s["ids"] = {{},
              with({&kGeometryKeys, &kDisorderKeys},
                   {"box.centers", "box.L", "run.egrid", "run.nsamples", "run.master_seed",
                    "run.threads", "output.dir"})};
  s["dynamics"] = {{},
                   with({&kGeometryKeys, &kDisorderKeys},
                        {"box.center", "box.L", "run.interval", "run.moment_p", "run.times",
                         "run.saturation_window", "run.nsamples", "run.master_seed", "run.threads",
                         "output.dir"})};
  s["edges"] = {{},
                with({&kGeometryKeys, &kDisorderKeys},
                     {"box.center", "box.L", "run.nsamples", "run.master_seed", "run.threads",
                      "output.dir"})};
  (void)run_common;
  return s;
}

const std::map<std::string, CommandSchema>& schemas() {
  static const auto s = build_schemas();
  return s;
}

}  // namespace

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> cmds = {
      "delone-gen", "delone-analyze", "spectrum", "certify-lemma", "certify-lifting",
      "wegner",     "ilse",           "ids",      "dynamics",      "edges"};
  return cmds;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.command.empty()) throw ConfigError("no command given");
  auto it = schemas().find(cfg.command);
  if (it == schemas().end()) throw ConfigError("unknown command: " + cfg.command);
  const auto& schema = it->second;
  for (const auto& [key, value] : cfg.entries) {
    if (!schema.required.count(key) && !schema.optional.count(key))
      throw ConfigError("unknown config key for " + cfg.command + ": " + key);
  }
  for (const auto& key : schema.required)
    if (!cfg.has(key)) throw ConfigError("missing required key for " + cfg.command + ": " + key);
}

// -- Typed parsing -------------------------------------------------------------

namespace {

double parse_double(const std::string& s, const std::string& key) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (...) {
    throw ConfigError("bad numeric value for " + key + ": " + s);
  }
}

long long parse_int(const std::string& s, const std::string& key) {
  try {
    size_t pos = 0;
    long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (...) {
    throw ConfigError("bad integer value for " + key + ": " + s);
  }
}

bool parse_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("bad boolean value for " + key + ": " + s);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string piece;
  while (std::getline(ss, piece, sep)) out.push_back(trim(piece));
  return out;
}

Window parse_window(const std::string& s, int d) {
  auto axes = split(s, ',');
  if (static_cast<int>(axes.size()) != d)
    throw ConfigError("geometry.window: expected " + std::to_string(d) + " axis ranges");
  LatticePoint lo = LatticePoint::zero(d), hi = LatticePoint::zero(d);
  for (int a = 0; a < d; ++a) {
    auto colon = axes[static_cast<size_t>(a)].find(':');
    if (colon == std::string::npos) throw ConfigError("geometry.window: expected lo:hi per axis");
    lo[a] = parse_int(axes[static_cast<size_t>(a)].substr(0, colon), "geometry.window");
    hi[a] = parse_int(axes[static_cast<size_t>(a)].substr(colon + 1), "geometry.window");
  }
  try {
    return Window(lo, hi);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("geometry.window: ") + e.what());
  }
}

LatticePoint parse_point(const std::string& s, int d, const std::string& key) {
  auto coords = split(s, ',');
  if (static_cast<int>(coords.size()) != d)
    throw ConfigError(key + ": expected " + std::to_string(d) + " coordinates");
  LatticePoint p = LatticePoint::zero(d);
  for (int a = 0; a < d; ++a) p[a] = parse_int(coords[static_cast<size_t>(a)], key);
  return p;
}

std::vector<LatticePoint> parse_points(const std::string& s, int d, const std::string& key) {
  std::vector<LatticePoint> out;
  for (const auto& piece : split(s, ';')) out.push_back(parse_point(piece, d, key));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::vector<Index> parse_index_list(const std::string& s, const std::string& key) {
  std::vector<Index> out;
  for (const auto& piece : split(s, ',')) out.push_back(parse_int(piece, key));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::vector<double> parse_double_list(const std::string& s, const std::string& key) {
  std::vector<double> out;
  for (const auto& piece : split(s, ',')) out.push_back(parse_double(piece, key));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

// "lo:hi:n" -> n equally spaced points including both ends.
std::vector<double> parse_linear_grid(const std::string& s, const std::string& key) {
  auto parts = split(s, ':');
  if (parts.size() != 3) throw ConfigError(key + ": expected lo:hi:npoints");
  double lo = parse_double(parts[0], key), hi = parse_double(parts[1], key);
  long long n = parse_int(parts[2], key);
  if (n < 2 || hi <= lo) throw ConfigError(key + ": bad grid");
  std::vector<double> out(static_cast<size_t>(n));
  for (long long i = 0; i < n; ++i)
    out[static_cast<size_t>(i)] = lo + (hi - lo) * double(i) / double(n - 1);
  return out;
}

// Times: explicit "1,10,100" or "log:lo:hi:n" (t = 0 prepended).
std::vector<double> parse_times(const std::string& s) {
  if (s.rfind("log:", 0) == 0) {
    auto parts = split(s.substr(4), ':');
    if (parts.size() != 3) throw ConfigError("run.times: expected log:lo:hi:n");
    double lo = parse_double(parts[0], "run.times"), hi = parse_double(parts[1], "run.times");
    long long n = parse_int(parts[2], "run.times");
    if (!(lo > 0.0) || hi <= lo || n < 2) throw ConfigError("run.times: bad log grid");
    std::vector<double> out;
    out.push_back(0.0);
    for (long long i = 0; i < n; ++i)
      out.push_back(lo * std::pow(hi / lo, double(i) / double(n - 1)));
    return out;
  }
  return parse_double_list(s, "run.times");
}

std::pair<double, double> parse_interval(const std::string& s, const std::string& key) {
  auto colon = s.find(':');
  if (colon == std::string::npos) throw ConfigError(key + ": expected lo:hi");
  return {parse_double(s.substr(0, colon), key), parse_double(s.substr(colon + 1), key)};
}

DeloneSet build_geometry(const ExperimentConfig& cfg) {
  const std::string kind = cfg.get("geometry.kind");
  if (kind == "file") return load_delone_file(cfg.get("geometry.file"));
  const int d = static_cast<int>(parse_int(cfg.get("geometry.d"), "geometry.d"));
  Window w = parse_window(cfg.get("geometry.window"), d);
  if (kind == "periodic")
    return generate_periodic(d, parse_int(cfg.get("geometry.k"), "geometry.k"), w);
  if (kind == "sturmian") {
    const std::string alpha_s = cfg.get("geometry.alpha");
    const double alpha =
        alpha_s == "golden" ? (std::sqrt(5.0) - 1.0) / 2.0 : parse_double(alpha_s, "geometry.alpha");
    return generate_sturmian(alpha, parse_double(cfg.get("geometry.beta"), "geometry.beta"), w);
  }
  if (kind == "random-cell")
    return generate_random_cell(d, parse_int(cfg.get("geometry.R"), "geometry.R"), w,
                                static_cast<std::uint64_t>(
                                    parse_int(cfg.get("geometry.seed"), "geometry.seed")));
  throw ConfigError("geometry.kind must be periodic | sturmian | random-cell | file");
}

DisorderSpec build_disorder(const ExperimentConfig& cfg) {
  const std::string law = cfg.get("disorder.law");
  const double M = parse_double(cfg.get("disorder.M"), "disorder.M");
  DisorderSpec spec = DisorderSpec::uniform(1.0);
  if (law == "uniform")
    spec = DisorderSpec::uniform(M);
  else if (law == "power")
    spec = DisorderSpec::power_tail(M, parse_double(cfg.get("disorder.tau"), "disorder.tau"));
  else if (law == "kumaraswamy")
    spec = DisorderSpec::kumaraswamy(M, parse_double(cfg.get("disorder.a"), "disorder.a"),
                                     parse_double(cfg.get("disorder.b"), "disorder.b"));
  else
    throw ConfigError("disorder.law must be uniform | power | kumaraswamy");
  if (cfg.has("disorder.reflected") && parse_bool(cfg.get("disorder.reflected"), "disorder.reflected"))
    spec = spec.reflected();
  return spec;
}

std::uint64_t resolve_seed(const ExperimentConfig& cfg, const RunOptions& opts) {
  if (opts.seed_override) return *opts.seed_override;
  return static_cast<std::uint64_t>(
      parse_int(cfg.get_or("run.master_seed", "42"), "run.master_seed"));
}

// -- Artifact helpers ----------------------------------------------------------

class ArtifactSink {
 public:
  ArtifactSink(fs::path dir, RunManifest& manifest) : dir_(std::move(dir)), manifest_(manifest) {
    fs::create_directories(dir_);
  }
  void write(const std::string& name, const std::string& contents) {
    const fs::path p = dir_ / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ConfigError("cannot write artifact: " + p.string());
    f << contents;
    f.close();
    RunManifest::Artifact a;
    a.name = name;
    a.bytes = contents.size();
    a.checksum = fnv1a64_hex(contents);
    manifest_.artifacts.push_back(std::move(a));
  }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  RunManifest& manifest_;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string point_str(const LatticePoint& p) {
  std::string s;
  for (int a = 0; a < p.dim(); ++a) {
    if (a) s += " ";
    s += std::to_string(p[a]);
  }
  return s;
}

std::string certifier_csv(const std::vector<AveragingReport>& reports) {
  std::string csv = "test,parameter_set,worst_margin,pass,vacuous,nsamples\n";
  for (const auto& r : reports) {
    csv += r.test + ",\"" + r.parameter_set + "\"," + fmt(r.worst_margin) + "," +
           (r.pass ? "true" : "false") + "," + (r.vacuous ? "true" : "false") + "," +
           std::to_string(r.nsamples) + "\n";
  }
  return csv;
}

json certifier_json(const AveragingReport& r) {
  json j;
  j["test"] = r.test;
  j["parameter_set"] = r.parameter_set;
  j["worst_margin"] = r.worst_margin;
  j["pass"] = r.pass;
  j["vacuous"] = r.vacuous;
  j["nsamples"] = r.nsamples;
  j["tolerance"] = r.tolerance;
  for (const auto& [k, v] : r.metrics) j["metrics"][k] = v;
  return j;
}

// -- Command implementations ----------------------------------------------------

int cmd_delone_gen(const ExperimentConfig& cfg, ArtifactSink& sink, std::uint64_t) {
  DeloneSet D = build_geometry(cfg);
  std::ostringstream os;
  save_delone(D, os);
  sink.write("delone.txt", os.str());
  json j;
  j["dim"] = D.dim();
  j["points"] = D.size();
  j["declared_R"] = D.declared_R();
  j["computed_R"] = compute_R(D);
  sink.write("summary.json", j.dump(2) + "\n");
  return 0;
}

int cmd_delone_analyze(const ExperimentConfig& cfg, ArtifactSink& sink, std::uint64_t) {
  DeloneSet D = build_geometry(cfg);
  const Index K = parse_int(cfg.get_or("run.pattern_extent", "0"), "run.pattern_extent");
  const bool with_frequency = cfg.has("box.centers") && cfg.has("box.Ls");
  std::vector<LatticePoint> centers;
  std::vector<Index> Ls;
  if (with_frequency) {
    centers = parse_points(cfg.get("box.centers"), D.dim(), "box.centers");
    Ls = parse_index_list(cfg.get("box.Ls"), "box.Ls");
  }
  auto census = enumerate_patterns(D, K);
  std::sort(census.begin(), census.end(),
            [](const auto& a, const auto& b) { return a.second > b.second; });
  std::string csv = "rank,count,size\n";
  for (size_t i = 0; i < census.size(); ++i)
    csv += std::to_string(i) + "," + std::to_string(census[i].second) + "," +
           std::to_string(census[i].first.size()) + "\n";
  sink.write("patterns.csv", csv);

  json j;
  j["computed_R"] = compute_R(D);
  j["distinct_patterns"] = census.size();
  j["pattern_extent"] = K;

  if (with_frequency) {
    auto rep = supf_diagnostic(D, census.front().first, Ls, centers);
    std::string fcsv = "center,L,hits,anchors,eta\n";
    for (const auto& row : rep.rows)
      fcsv += "\"" + point_str(row.center) + "\"," + std::to_string(row.L) + "," +
              std::to_string(row.hits) + "," + std::to_string(row.anchors) + "," + fmt(row.eta) +
              "\n";
    sink.write("frequency.csv", fcsv);
    j["limit_estimate"] = rep.limit_estimate;
    j["uniformity_deviation"] = rep.uniformity_deviation;
    j["strictly_positive"] = rep.strictly_positive;
  }
  sink.write("summary.json", j.dump(2) + "\n");
  return 0;
}

int cmd_spectrum(const ExperimentConfig& cfg, ArtifactSink& sink, std::uint64_t seed) {
  DeloneSet D = build_geometry(cfg);
  DisorderSpec dis = build_disorder(cfg);
  BoxSpec box(parse_point(cfg.get("box.center"), D.dim(), "box.center"),
              parse_int(cfg.get("box.L"), "box.L"));
  const auto sample_index = static_cast<std::uint64_t>(
      parse_int(cfg.get_or("run.sample_index", "0"), "run.sample_index"));
  auto sample = sample_potential(D, box, dis, seed, sample_index);
  auto H = assemble_hamiltonian(box, D, sample, dis.support_max());
  auto res = eig_full(H, true);

  std::string csv = "index,eigenvalue,residual\n";
  for (size_t i = 0; i < res.eigenvalues.size(); ++i)
    csv += std::to_string(i) + "," + fmt(res.eigenvalues[i]) + "," + fmt(res.residuals[i]) + "\n";
  sink.write("spectrum.csv", csv);

  if (cfg.has("run.export_operator") && parse_bool(cfg.get("run.export_operator"), "run.export_operator")) {
    std::ostringstream os;
    export_operator(H, os);
    sink.write("operator.txt", os.str());
  }
  json j;
  j["dimension"] = H.dimension();
  j["lambda_min"] = res.min();
  j["lambda_max"] = res.max();
  j["sample_index"] = sample_index;
  sink.write("summary.json", j.dump(2) + "\n");
  return 0;
}

int cmd_certify_lemma(const ExperimentConfig& cfg, ArtifactSink& sink, std::uint64_t seed) {
  DeloneSet D = build_geometry(cfg);
  BoxSpec box(parse_point(cfg.get_or("box.center", "0"), D.dim(), "box.center"),
              parse_int(cfg.get("box.L"), "box.L"));
  const double q = parse_double(cfg.get_or("run.q", "0.5"), "run.q");
  const int nsamples = static_cast<int>(parse_int(cfg.get_or("run.nsamples", "1000"), "run.nsamples"));
  auto rep = certify_lemma_WE(D, box, q, nsamples, seed);
  auto covering = check_covering(D, box, compute_R(D));
  sink.write("certifier.csv", certifier_csv({covering, rep}));
  json j;
  j["lemma"] = certifier_json(rep);
  j["covering"] = certifier_json(covering);
  j["seed"] = seed;
  sink.write("summary.json", j.dump(2) + "\n");
  if (!covering.pass) return 2;
  return (rep.pass || rep.vacuous) ? 0 : 2;
}

int cmd_certify_lifting(const ExperimentConfig& cfg, ArtifactSink& sink, std::uint64_t seed) {
  DeloneSet D = build_geometry(cfg);
  DisorderSpec dis = build_disorder(cfg);
  BoxSpec box(parse_point(cfg.get_or("box.center", "0"), D.dim(), "box.center"),
              parse_int(cfg.get("box.L"), "box.L"));
  const Index K = parse_int(cfg.get_or("run.K", "2"), "run.K");
  const int nsamples = static_cast<int>(parse_int(cfg.get_or("run.nsamples", "200"), "run.nsamples"));
  const int nphi = static_cast<int>(parse_int(cfg.get_or("run.nphi", "100"), "run.nphi"));
  auto rep = certify_lifting(D, box, dis, K, nsamples, nphi, seed);
  sink.write("certifier.csv", certifier_csv({rep}));
  json j = certifier_json(rep);
  j["seed"] = seed;
  sink.write("summary.json", j.dump(2) + "\n");
  return rep.pass ? 0 : 2;
}

int cmd_wegner(const ExperimentConfig& cfg, ArtifactSink& sink, std::uint64_t seed) {
  DeloneSet D = build_geometry(cfg);
  DisorderSpec dis = build_disorder(cfg);
  auto centers = parse_points(cfg.get("box.centers"), D.dim(), "box.centers");
  auto Ls = parse_index_list(cfg.get("box.Ls"), "box.Ls");
  auto etas = parse_double_list(cfg.get("run.etas"), "run.etas");
  const double E = parse_double(cfg.get("run.E"), "run.E");
  const int nsamples = static_cast<int>(parse_int(cfg.get_or("run.nsamples", "1000"), "run.nsamples"));

  auto rep = wegner_scan(D, dis, E, etas, Ls, centers, nsamples, seed);
  auto fit = fit_QW(rep);

  std::string csv = "E,eta,L,center,nsamples,phat,ci_lo,ci_hi\n";
  for (const auto& c : rep.cells)
    csv += fmt(c.E) + "," + fmt(c.eta) + "," + std::to_string(c.L) + ",\"" + point_str(c.center) +
           "\"," + std::to_string(c.nsamples) + "," + fmt(c.phat) + "," + fmt(c.ci_lo) + "," +
           fmt(c.ci_hi) + "\n";
  sink.write("wegner.csv", csv);

  // Two-column table: phat against eta at the largest scale, first center.
  const Index lmax = *std::max_element(Ls.begin(), Ls.end());
  std::string dat = "# eta phat\n";
  for (const auto& c : rep.cells)
    if (c.L == lmax && c.center_index == 0) dat += fmt(c.eta) + " " + fmt(c.phat) + "\n";
  sink.write("wegner_phat_vs_eta.dat", dat);

  json j;
  j["q_w"] = fit.q_w;
  j["uniformity"] = fit.uniformity;
  j["c_fit"] = nullptr;
  j["p"] = nullptr;
  j["seed"] = seed;
  j["threshold_E_W"] = rep.threshold_ew;
  j["above_threshold_warning"] = rep.above_threshold_warning;
  sink.write("summary.json", j.dump(2) + "\n");
  return 0;
}

int cmd_ilse(const ExperimentConfig& cfg, ArtifactSink& sink, std::uint64_t seed) {
  DeloneSet D = build_geometry(cfg);
  DisorderSpec dis = build_disorder(cfg);
  auto centers = parse_points(cfg.get("box.centers"), D.dim(), "box.centers");
  auto Ls = parse_index_list(cfg.get("box.Ls"), "box.Ls");
  const double p = parse_double(cfg.get_or("run.p", "1"), "run.p");
  const int nsamples = static_cast<int>(parse_int(cfg.get_or("run.nsamples", "500"), "run.nsamples"));

  auto rep = ilse_scan(D, dis, Ls, centers, nsamples, p, seed);

  std::string csv = "L,center,sample,lambda_min\n";
  for (const auto& cell : rep.cells)
    for (size_t s = 0; s < cell.lambda_min.size(); ++s)
      csv += std::to_string(cell.L) + ",\"" + point_str(cell.center) + "\"," + std::to_string(s) +
             "," + fmt(cell.lambda_min[s]) + "\n";
  sink.write("ilse.csv", csv);

  std::string dat = "# L median_lambda_min\n";
  for (Index L : rep.Ls) {
    std::vector<double> pool;
    for (const auto& cell : rep.cells)
      if (cell.L == L) pool.insert(pool.end(), cell.lambda_min.begin(), cell.lambda_min.end());
    std::sort(pool.begin(), pool.end());
    dat += std::to_string(L) + " " + fmt(pool[pool.size() / 2]) + "\n";
  }
  sink.write("ilse_median_vs_L.dat", dat);

  json j;
  j["q_w"] = nullptr;
  j["uniformity"] = nullptr;
  j["c_fit"] = rep.c_fit;
  j["p"] = rep.p;
  j["seed"] = seed;
  j["R"] = rep.R;
  j["trend_slope"] = rep.trend_slope;
  j["trend_intercept"] = rep.trend_intercept;
  sink.write("summary.json", j.dump(2) + "\n");
  return 0;
}

int cmd_ids(const ExperimentConfig& cfg, ArtifactSink& sink, std::uint64_t seed) {
  DeloneSet D = build_geometry(cfg);
  DisorderSpec dis = build_disorder(cfg);
  auto centers = parse_points(cfg.get("box.centers"), D.dim(), "box.centers");
  const Index L = parse_int(cfg.get("box.L"), "box.L");
  auto grid = parse_linear_grid(cfg.get("run.egrid"), "run.egrid");
  const int nsamples = static_cast<int>(parse_int(cfg.get_or("run.nsamples", "100"), "run.nsamples"));

  auto curve = estimate_ids(D, dis, L, centers, nsamples, grid, seed);
  std::string csv = "E,N_mean,N_min,N_max,center_spread\n";
  std::string dat = "# E N_mean\n";
  for (size_t e = 0; e < curve.energies.size(); ++e) {
    csv += fmt(curve.energies[e]) + "," + fmt(curve.mean[e]) + "," + fmt(curve.center_min[e]) +
           "," + fmt(curve.center_max[e]) + "," + fmt(curve.center_spread[e]) + "\n";
    dat += fmt(curve.energies[e]) + " " + fmt(curve.mean[e]) + "\n";
  }
  sink.write("ids.csv", csv);
  sink.write("ids_curve.dat", dat);
  json j;
  j["uniformity"] = curve.uniformity;
  j["L"] = curve.L;
  j["nsamples"] = curve.nsamples;
  j["seed"] = seed;
  sink.write("summary.json", j.dump(2) + "\n");
  return 0;
}

int cmd_dynamics(const ExperimentConfig& cfg, ArtifactSink& sink, std::uint64_t seed) {
  DeloneSet D = build_geometry(cfg);
  DisorderSpec dis = build_disorder(cfg);
  BoxSpec box(parse_point(cfg.get_or("box.center", "0"), D.dim(), "box.center"),
              parse_int(cfg.get("box.L"), "box.L"));
  auto [ilo, ihi] = parse_interval(cfg.get("run.interval"), "run.interval");
  const double p = parse_double(cfg.get_or("run.moment_p", "2"), "run.moment_p");
  auto times = parse_times(cfg.get_or("run.times", "log:0.1:1000:59"));
  const int nsamples = static_cast<int>(parse_int(cfg.get_or("run.nsamples", "20"), "run.nsamples"));
  auto [slo, shi] = parse_interval(cfg.get_or("run.saturation_window", "100:1000"),
                                   "run.saturation_window");

  auto psi0 = delta_packet(box);
  auto trace = localization_profile(D, dis, box, ilo, ihi, psi0, p, times, nsamples, seed);

  std::string csv = "t,sample,m_p,p,interval_lo,interval_hi\n";
  for (size_t s = 0; s < trace.sample_values.size(); ++s)
    for (size_t ti = 0; ti < trace.times.size(); ++ti)
      csv += fmt(trace.times[ti]) + "," + std::to_string(s) + "," + fmt(trace.sample_values[s][ti]) +
             "," + fmt(p) + "," + fmt(ilo) + "," + fmt(ihi) + "\n";
  sink.write("dynamics.csv", csv);

  std::string dat = "# t mean_m_p\n";
  for (size_t ti = 0; ti < trace.times.size(); ++ti)
    dat += fmt(trace.times[ti]) + " " + fmt(trace.mean[ti]) + "\n";
  sink.write("dynamics_m_vs_t.dat", dat);

  json j;
  j["running_sup"] = trace.running_sup;
  const double sat = trace.saturation_ratio(slo, shi);
  if (std::isnan(sat))
    j["saturation_ratio"] = nullptr;
  else
    j["saturation_ratio"] = sat;
  j["negligible_fraction"] = trace.negligible_fraction;
  j["saturation_window"] = {slo, shi};
  j["p"] = p;
  j["seed"] = seed;
  sink.write("summary.json", j.dump(2) + "\n");
  return 0;
}

int cmd_edges(const ExperimentConfig& cfg, ArtifactSink& sink, std::uint64_t seed) {
  DeloneSet D = build_geometry(cfg);
  DisorderSpec dis = build_disorder(cfg);
  BoxSpec box(parse_point(cfg.get_or("box.center", "0"), D.dim(), "box.center"),
              parse_int(cfg.get("box.L"), "box.L"));
  const int nsamples = static_cast<int>(parse_int(cfg.get_or("run.nsamples", "100"), "run.nsamples"));
  auto rep = edge_scan(D, dis, box, nsamples, seed);

  std::string csv = "nsamples,min_lambda_min,max_lambda_max,bound_hi,contained,upper_edge_distance\n";
  csv += std::to_string(rep.nsamples) + "," + fmt(rep.min_lambda_min) + "," +
         fmt(rep.max_lambda_max) + "," + fmt(rep.bound_hi) + "," +
         (rep.contained ? "true" : "false") + "," + fmt(rep.upper_edge_distance) + "\n";
  sink.write("edges.csv", csv);
  json j;
  j["min_lambda_min"] = rep.min_lambda_min;
  j["max_lambda_max"] = rep.max_lambda_max;
  j["bound_hi"] = rep.bound_hi;
  j["contained"] = rep.contained;
  j["upper_edge_distance"] = rep.upper_edge_distance;
  j["seed"] = seed;
  sink.write("summary.json", j.dump(2) + "\n");
  return rep.contained ? 0 : 2;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, const RunOptions& opts, RunManifest* manifest_out) {
  validate_config(cfg);
  if (opts.threads_override)
    set_max_threads(*opts.threads_override);
  else if (cfg.has("run.threads"))
    set_max_threads(static_cast<int>(parse_int(cfg.get("run.threads"), "run.threads")));

  const std::uint64_t seed = resolve_seed(cfg, opts);
  const std::string out_dir =
      !opts.out_dir.empty() ? opts.out_dir : cfg.get_or("output.dir", "out");

  RunManifest manifest;
  manifest.command = cfg.command;
  manifest.master_seed = seed;
  manifest.version = DAL_VERSION;
  {
    // Canonical resolved config: sorted keys, resolved seed.
    std::string canon = "command=" + cfg.command + "\n";
    auto entries = cfg.entries;
    entries["run.master_seed"] = std::to_string(seed);
    for (const auto& [k, v] : entries) canon += k + "=" + v + "\n";
    manifest.config_hash = fnv1a64_hex(canon);
  }

  const auto t0 = std::chrono::steady_clock::now();
  ArtifactSink sink(out_dir, manifest);
  int code = 0;
  if (cfg.command == "delone-gen")
    code = cmd_delone_gen(cfg, sink, seed);
  else if (cfg.command == "delone-analyze")
    code = cmd_delone_analyze(cfg, sink, seed);
  else if (cfg.command == "spectrum")
    code = cmd_spectrum(cfg, sink, seed);
  else if (cfg.command == "certify-lemma")
    code = cmd_certify_lemma(cfg, sink, seed);
  else if (cfg.command == "certify-lifting")
    code = cmd_certify_lifting(cfg, sink, seed);
  else if (cfg.command == "wegner")
    code = cmd_wegner(cfg, sink, seed);
  else if (cfg.command == "ilse")
    code = cmd_ilse(cfg, sink, seed);
  else if (cfg.command == "ids")
    code = cmd_ids(cfg, sink, seed);
  else if (cfg.command == "dynamics")
    code = cmd_dynamics(cfg, sink, seed);
  else if (cfg.command == "edges")
    code = cmd_edges(cfg, sink, seed);
  else
    throw ConfigError("unknown command: " + cfg.command);
  manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json mj;
  mj["command"] = manifest.command;
  mj["config_hash"] = manifest.config_hash;
  mj["master_seed"] = manifest.master_seed;
  mj["version"] = manifest.version;
  mj["wall_seconds"] = manifest.wall_seconds;
  mj["artifacts"] = json::array();
  for (const auto& a : manifest.artifacts) {
    json aj;
    aj["name"] = a.name;
    aj["bytes"] = a.bytes;
    aj["checksum"] = a.checksum;
    mj["artifacts"].push_back(aj);
  }
  {
    std::ofstream f(fs::path(out_dir) / "manifest.json", std::ios::binary);
    if (!f) throw ConfigError("cannot write manifest.json");
    f << mj.dump(2) << "\n";
  }
  if (manifest_out) *manifest_out = manifest;
  return code;
}

}  // namespace dal
