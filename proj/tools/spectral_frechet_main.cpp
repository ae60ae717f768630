// Command-line front end: generate | estimate-c | mean | regress | spectrum.
//
// Every run is reproducible from its flags: all randomness derives from the
// single --seed value, CSV output uses '.' decimals with 17 significant
// digits, and graph files are written in a canonical edge order.
//
// Exit codes: 0 success, 2 argument error, 3 data error, 4 numeric failure.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spectral_frechet/spectral_frechet.hpp"
#include "spectral_frechet/kernel_io.hpp"

namespace sf = spectral_frechet;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sf::DataError("cannot open for writing: " + path.string());
  return out;
}

// Sample directories: a manifest.json (written by `generate`) pins the file
// list and order; otherwise every *.txt in the directory, sorted by name.
std::vector<std::string> sample_file_names(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw sf::DataError("not a directory: " + dir.string());
  const fs::path manifest = dir / "manifest.json";
  std::vector<std::string> names;
  if (fs::exists(manifest)) {
    std::ifstream in(manifest);
    json doc;
    try {
      in >> doc;
      names = doc.at("files").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
      throw sf::DataError("manifest.json: " + std::string(e.what()));
    }
  } else {
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".txt")
        names.push_back(entry.path().filename().string());
    std::sort(names.begin(), names.end());
  }
  if (names.empty()) throw sf::DataError("no graph files found in " + dir.string());
  return names;
}

std::vector<sf::Graph> load_sample(const fs::path& dir) {
  std::vector<sf::Graph> graphs;
  for (const std::string& name : sample_file_names(dir))
    graphs.push_back(sf::read_graph_file(dir / name));
  return graphs;
}

void write_estimate_csv(const sf::CEstimate& est, std::ostream& out) {
  out << "i,r,rank,observed,expected,std_dev\n";
  for (const auto& iter : est.iterations)
    for (const auto& rank : iter.ranks)
      out << iter.i << "," << fmt(iter.radius) << "," << rank.rank << ","
          << fmt(rank.observed) << "," << fmt(rank.expected) << ","
          << fmt(rank.std_dev) << "\n";
}

// --- generate -----------------------------------------------------------

struct GenerateConfig {
  std::string ensemble;
  int n = 600;
  int count = 50;
  std::uint64_t seed = 42;
  std::string out_dir = ".";
  // sbm
  double rho = 1.0;
  std::vector<double> p;
  std::vector<double> s;
  double q = 0.0;
  // ba
  int m0 = 5;
  int m = 5;
  // ws
  int K = 22;
  double beta = 0.7;
  // er
  double p_edge = 0.5;
};

int run_generate(const GenerateConfig& cfg) {
  if (cfg.count < 1) throw sf::ArgumentError("--N must be at least 1");
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);

  std::optional<sf::SbmKernel> kernel;
  json params;
  if (cfg.ensemble == "sbm") {
    if (cfg.p.empty() || cfg.s.size() != cfg.p.size())
      throw sf::ArgumentError("sbm needs --p and --s lists of equal length");
    Eigen::Map<const Eigen::VectorXd> s_raw(cfg.s.data(), cfg.s.size());
    Eigen::Map<const Eigen::VectorXd> p_raw(cfg.p.data(), cfg.p.size());
    if (!(s_raw.minCoeff() > 0.0)) throw sf::ArgumentError("--s entries must be positive");
    // Sizes may be given as counts or fractions; normalize either way.
    const Eigen::VectorXd s = s_raw / s_raw.sum();
    const auto c = s.size();
    Eigen::MatrixXd qm = Eigen::MatrixXd::Constant(c, c, cfg.q);
    qm.diagonal().setZero();
    kernel = sf::SbmKernel::canonicalized(cfg.rho, s, p_raw, qm);
    params = {{"rho", cfg.rho}, {"p", cfg.p}, {"s", cfg.s}, {"q", cfg.q}};
  } else if (cfg.ensemble == "er") {
    params = {{"p", cfg.p_edge}};
  } else if (cfg.ensemble == "ba") {
    params = {{"m0", cfg.m0}, {"m", cfg.m}};
  } else if (cfg.ensemble == "ws") {
    params = {{"K", cfg.K}, {"beta", cfg.beta}};
  } else {
    throw sf::ArgumentError("unknown ensemble: " + cfg.ensemble);
  }

  std::vector<std::string> files;
  for (int k = 0; k < cfg.count; ++k) {
    const sf::RngSeed seed{sf::derive_seed(sf::RngSeed{cfg.seed}, "generate", k)};
    sf::Graph g = [&] {
      if (cfg.ensemble == "sbm") return sf::sample_kernel_graph(*kernel, cfg.n, seed);
      if (cfg.ensemble == "er") return sf::erdos_renyi(cfg.n, cfg.p_edge, seed);
      if (cfg.ensemble == "ba") return sf::barabasi_albert(cfg.n, cfg.m0, cfg.m, seed);
      return sf::watts_strogatz(cfg.n, cfg.K, cfg.beta, seed);
    }();
    const std::string name = "g_" + std::to_string(k) + ".txt";
    sf::write_graph_file(g, dir / name);
    files.push_back(name);
  }

  json manifest = {
      {"command", "generate"}, {"ensemble", cfg.ensemble}, {"n", cfg.n},
      {"count", cfg.count},    {"seed", cfg.seed},         {"params", params},
      {"files", files},
  };
  open_out(dir / "manifest.json") << manifest.dump(2) << "\n";
  std::cout << "wrote " << cfg.count << " graphs to " << dir.string() << "\n";
  return 0;
}

// --- estimate-c -----------------------------------------------------------

int run_estimate_c(const std::string& in_dir, int k_bulk, const std::string& csv_path) {
  const std::vector<sf::Graph> sample = load_sample(in_dir);
  const sf::Spectrum mean = sf::mean_spectrum(sample, sample.front().vertex_count());
  const sf::CEstimate est = sf::estimate_c(mean, k_bulk);
  if (!csv_path.empty()) {
    auto out = open_out(csv_path);
    write_estimate_csv(est, out);
  }
  if (est.exhausted)
    std::cerr << "warning: bulk scan exhausted the spectrum; c is a floor\n";
  std::cout << est.c << "\n";
  return 0;
}

// --- mean -----------------------------------------------------------------

struct PipelineFlags {
  std::string in_dir;
  int k_bulk = 5;
  int c = 0;  // 0 = estimate via the bulk scan
  int n_tilde = 5;
  std::uint64_t seed = 42;
  int max_iters = 500;
  double tol = 1e-4;
  std::string out_prefix;
};

sf::FitOptions fit_options(const PipelineFlags& flags) {
  sf::FitOptions opts;
  opts.k_bulk = flags.k_bulk;
  opts.n_tilde = flags.n_tilde;
  opts.seed = sf::RngSeed{flags.seed};
  opts.max_iters = flags.max_iters;
  opts.rel_tol = flags.tol;
  if (flags.c > 0) opts.c_override = flags.c;
  return opts;
}

void write_alignment_csv(std::ostream& out, const sf::Spectrum& target,
                         const sf::Spectrum& fitted, const sf::Spectrum& realized,
                         std::optional<double> t = std::nullopt) {
  for (int i = 0; i < target.size(); ++i) {
    if (t) out << fmt(*t) << ",";
    out << (i + 1) << "," << fmt(target[i]) << "," << fmt(fitted[i]) << ","
        << fmt(realized[i]) << "\n";
  }
}

int run_mean(const PipelineFlags& flags) {
  const std::vector<sf::Graph> sample = load_sample(flags.in_dir);
  const sf::FitOptions opts = fit_options(flags);
  const sf::FrechetMeanResult result = sf::approximate_frechet_mean(sample, opts);

  const int n = result.mean_graph.vertex_count();
  const sf::Spectrum fitted = result.fit.fitted_extremes(n);
  const sf::Spectrum realized = sf::truncated_spectrum(result.mean_graph, result.c);

  sf::write_graph_file(result.mean_graph, flags.out_prefix + "graph.txt");
  sf::write_kernel_file(result.fit.kernel, flags.out_prefix + "kernel.json");
  auto csv = open_out(flags.out_prefix + "alignment.csv");
  csv << "i,target,fitted,realized\n";
  write_alignment_csv(csv, result.fit.target, fitted, realized);

  std::cout << "c " << result.c << "\n"
            << "rho_bar " << fmt(result.rho_bar) << "\n"
            << "converged " << (result.fit.converged ? 1 : 0) << "\n"
            << "objective " << fmt(result.fit.objective_trace.back()) << "\n";
  if (result.fit.negative_target)
    std::cerr << "warning: target spectrum has non-positive entries\n";
  return 0;
}

// --- regress ----------------------------------------------------------------

std::vector<std::pair<std::string, double>> read_regression_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw sf::DataError("cannot open manifest: " + path.string());
  std::vector<std::pair<std::string, double>> rows;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw sf::DataError("manifest line " + std::to_string(line_no) + ": expected 'file,t'");
    const std::string name = line.substr(0, comma);
    try {
      rows.emplace_back(name, std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      if (line_no == 1) continue;  // header row
      throw sf::DataError("manifest line " + std::to_string(line_no) + ": bad t value");
    }
  }
  if (rows.empty()) throw sf::DataError("manifest has no data rows: " + path.string());
  return rows;
}

int run_regress(const PipelineFlags& flags, const std::string& manifest,
                const std::vector<double>& t_queries) {
  if (t_queries.empty()) throw sf::ArgumentError("regress needs at least one --t");
  const fs::path dir(flags.in_dir);
  std::vector<double> ts;
  std::vector<sf::Graph> graphs;
  for (const auto& [name, t] : read_regression_manifest(dir / manifest)) {
    ts.push_back(t);
    graphs.push_back(sf::read_graph_file(dir / name));
  }
  const sf::RegressionDataset data(std::move(ts), std::move(graphs));
  const sf::FitOptions opts = fit_options(flags);

  auto csv = open_out(flags.out_prefix + "results.csv");
  csv << "t,i,target,fitted,realized\n";
  for (const double t : t_queries) {
    const sf::RegressionResult result = sf::regress_at(data, t, opts);
    const int n = result.graph.vertex_count();
    write_alignment_csv(csv, result.fit.target, result.fit.fitted_extremes(n),
                        sf::truncated_spectrum(result.graph, result.c), t);
    char tag[32];
    std::snprintf(tag, sizeof(tag), "%g", t);
    sf::write_kernel_file(result.fit.kernel,
                          flags.out_prefix + "kernel_t" + tag + ".json");
    std::cout << "t " << fmt(t) << " c " << result.c << " converged "
              << (result.fit.converged ? 1 : 0) << "\n";
  }
  return 0;
}

// --- spectrum ----------------------------------------------------------------

int run_spectrum(const std::string& in_file, int c, int bins, int exclude_top,
                 const std::string& out_path, const std::string& hist_path) {
  const sf::Graph g = sf::read_graph_file(in_file);
  const sf::Spectrum full = sf::adjacency_spectrum(g);
  const sf::Spectrum shown = c > 0 ? full.head(c) : full;

  std::ostringstream line;
  for (int i = 0; i < shown.size(); ++i) line << (i ? "," : "") << fmt(shown[i]);
  line << "\n";
  if (out_path.empty()) {
    std::cout << line.str();
  } else {
    open_out(out_path) << line.str();
  }

  if (bins > 0) {
    // Bulk histogram: drop the top `exclude_top` eigenvalues, then count
    // over equal-width bins spanning the rest.
    if (exclude_top < 0 || exclude_top >= full.size())
      throw sf::ArgumentError("--exclude-top out of range");
    const Eigen::VectorXd bulk = full.values.tail(full.size() - exclude_top);
    const double lo = bulk.minCoeff();
    const double hi = bulk.maxCoeff();
    const double width = (hi > lo ? hi - lo : 1.0) / bins;
    std::vector<long> counts(bins, 0);
    for (int i = 0; i < bulk.size(); ++i) {
      int b = static_cast<int>((bulk(i) - lo) / width);
      counts[std::clamp(b, 0, bins - 1)] += 1;
    }
    std::ostringstream hist;
    hist << "bin_lo,bin_hi,count\n";
    for (int b = 0; b < bins; ++b)
      hist << fmt(lo + b * width) << "," << fmt(lo + (b + 1) * width) << ","
           << counts[b] << "\n";
    if (hist_path.empty()) {
      std::cout << hist.str();
    } else {
      open_out(hist_path) << hist.str();
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate sample Frechet means of graph sets under the "
               "truncated adjacency spectral pseudometric"};
  app.require_subcommand(1);

  GenerateConfig gen;
  CLI::App* generate = app.add_subcommand("generate", "Sample a graph dataset");
  generate->add_option("--ensemble", gen.ensemble, "sbm | ba | ws | er")->required();
  generate->add_option("--n", gen.n, "vertices per graph")->required();
  generate->add_option("--N", gen.count, "number of graphs")->required();
  generate->add_option("--seed", gen.seed, "root seed (default 42)");
  generate->add_option("--out", gen.out_dir, "output directory (default .)");
  generate->add_option("--rho", gen.rho, "sbm: density scale rho");
  generate->add_option("--p", gen.p, "sbm: within-community densities")->delimiter(',');
  generate->add_option("--s", gen.s, "sbm: community sizes (counts or fractions)")->delimiter(',');
  generate->add_option("--q", gen.q, "sbm: shared cross-community density");
  generate->add_option("--m0", gen.m0, "ba: seed graph size");
  generate->add_option("--m", gen.m, "ba: edges per arriving vertex");
  generate->add_option("--K", gen.K, "ws: nearest neighbors (even)");
  generate->add_option("--beta", gen.beta, "ws: rewiring probability");
  generate->add_option("--p-edge", gen.p_edge, "er: edge probability");

  std::string est_dir, est_csv;
  int est_k = 5;
  CLI::App* est = app.add_subcommand("estimate-c", "Count eigenvalues outside the bulk");
  est->add_option("--in", est_dir, "sample directory")->required();
  est->add_option("--k-bulk", est_k, "order statistics compared per step (default 5)");
  est->add_option("--csv", est_csv, "write the per-iteration diagnostic table here");

  PipelineFlags mean_flags;
  mean_flags.out_prefix = "mean_";
  CLI::App* mean = app.add_subcommand("mean", "Approximate sample Frechet mean");
  mean->add_option("--in", mean_flags.in_dir, "sample directory")->required();
  mean->add_option("--k-bulk", mean_flags.k_bulk, "bulk scan width (default 5)");
  mean->add_option("--c", mean_flags.c, "override c (0 = estimate)");
  mean->add_option("--n-tilde", mean_flags.n_tilde, "draws for the set mean (default 5)");
  mean->add_option("--seed", mean_flags.seed, "root seed (default 42)");
  mean->add_option("--max-iters", mean_flags.max_iters, "fit iteration cap (default 500)");
  mean->add_option("--tol", mean_flags.tol, "fit relative tolerance (default 1e-4)");
  mean->add_option("--out-prefix", mean_flags.out_prefix, "output prefix (default mean_)");

  PipelineFlags reg_flags;
  reg_flags.out_prefix = "regress_";
  std::string reg_manifest = "manifest.csv";
  std::vector<double> reg_ts;
  CLI::App* regress = app.add_subcommand("regress", "Graph-valued Frechet regression");
  regress->add_option("--in", reg_flags.in_dir, "dataset directory")->required();
  regress->add_option("--manifest", reg_manifest, "CSV of file,t rows (default manifest.csv)");
  regress->add_option("--t", reg_ts, "query covariate value (repeatable)")->required();
  regress->add_option("--c", reg_flags.c, "override c (0 = estimate)");
  regress->add_option("--k-bulk", reg_flags.k_bulk, "bulk scan width (default 5)");
  regress->add_option("--n-tilde", reg_flags.n_tilde, "draws for the set mean (default 5)");
  regress->add_option("--seed", reg_flags.seed, "root seed (default 42)");
  regress->add_option("--max-iters", reg_flags.max_iters, "fit iteration cap (default 500)");
  regress->add_option("--tol", reg_flags.tol, "fit relative tolerance (default 1e-4)");
  regress->add_option("--out-prefix", reg_flags.out_prefix, "output prefix (default regress_)");

  std::string spec_in, spec_out, spec_hist;
  int spec_c = 0, spec_bins = 0, spec_exclude = 0;
  CLI::App* spectrum = app.add_subcommand("spectrum", "Adjacency spectrum of one graph");
  spectrum->add_option("--in", spec_in, "graph file")->required();
  spectrum->add_option("--c", spec_c, "truncate to the c largest (0 = full)");
  spectrum->add_option("--bins", spec_bins, "also emit a bulk histogram with this many bins");
  spectrum->add_option("--exclude-top", spec_exclude, "eigenvalues dropped from the histogram");
  spectrum->add_option("--out", spec_out, "spectrum CSV path (default stdout)");
  spectrum->add_option("--hist-out", spec_hist, "histogram CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*generate) return run_generate(gen);
    if (*est) return run_estimate_c(est_dir, est_k, est_csv);
    if (*mean) return run_mean(mean_flags);
    if (*regress) return run_regress(reg_flags, reg_manifest, reg_ts);
    if (*spectrum)
      return run_spectrum(spec_in, spec_c, spec_bins, spec_exclude, spec_out, spec_hist);
  } catch (const sf::ArgumentError& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return 2;
  } catch (const sf::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const sf::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
