// cspca: fit, select, eval, verify, sweep and generate.

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/stat.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "cspca/cspca.h"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;
constexpr int kExitInternal = 5;

struct Failure {
  int code;
  std::string message;
};

int exit_code_for(cspca_status s) {
  switch (s) {
    case CSPCA_OK: return 0;
    case CSPCA_ERR_INVALID_ARGUMENT: return kExitUsage;
    case CSPCA_ERR_IO:
    case CSPCA_ERR_PARSE:
    case CSPCA_ERR_DATA:
    case CSPCA_ERR_DIMENSION: return kExitData;
    case CSPCA_ERR_NUMERICAL: return kExitNumerical;
    case CSPCA_ERR_INTERNAL: return kExitInternal;
  }
  return kExitInternal;
}

void check(cspca_status s) {
  if (s != CSPCA_OK) throw Failure{exit_code_for(s), cspca_last_error()};
}

[[noreturn]] void usage_error(const std::string& msg) { throw Failure{kExitUsage, msg}; }

struct MatrixDeleter {
  void operator()(cspca_matrix* m) const { cspca_matrix_free(m); }
};
struct ResultDeleter {
  void operator()(cspca_result* r) const { cspca_result_free(r); }
};
struct RankingDeleter {
  void operator()(cspca_ranking* r) const { cspca_ranking_free(r); }
};
struct VerifyDeleter {
  void operator()(cspca_verify_report* r) const { cspca_verify_free(r); }
};
using Matrix = std::unique_ptr<cspca_matrix, MatrixDeleter>;
using Result = std::unique_ptr<cspca_result, ResultDeleter>;
using Ranking = std::unique_ptr<cspca_ranking, RankingDeleter>;
using VerifyReport = std::unique_ptr<cspca_verify_report, VerifyDeleter>;

std::string fmt(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

bool parse_number(const std::string& cell, double& out) {
  std::string_view v = cell;
  while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
  while (!v.empty() && (v.back() == ' ' || v.back() == '\t' || v.back() == '\r')) v.remove_suffix(1);
  if (!v.empty() && v.front() == '+') v.remove_prefix(1);
  if (v.empty()) return false;
  auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  return r.ec == std::errc() && r.ptr == v.data() + v.size();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::vector<double> parse_grid(const std::string& text, const char* flag) {
  std::vector<double> values;
  for (const auto& cell : split(text, ',')) {
    double v = 0.0;
    if (!parse_number(cell, v)) usage_error(std::string(flag) + ": bad value \"" + cell + "\"");
    values.push_back(v);
  }
  if (values.empty()) usage_error(std::string(flag) + ": empty list");
  return values;
}

std::vector<std::size_t> parse_counts(const std::string& text, const char* flag) {
  std::vector<std::size_t> values;
  for (const auto& cell : split(text, ',')) {
    double v = 0.0;
    if (!parse_number(cell, v) || v < 1 || v != static_cast<double>(static_cast<std::size_t>(v))) {
      usage_error(std::string(flag) + ": \"" + cell + "\" is not a positive integer");
    }
    values.push_back(static_cast<std::size_t>(v));
  }
  if (values.empty()) usage_error(std::string(flag) + ": empty list");
  return values;
}

// ---- shared options ----

struct InputOptions {
  std::string path;
  std::string header = "auto";
  std::string layout = "rows";
  bool center = true;

  void add(CLI::App& app, bool required) {
    auto* opt = app.add_option("--input", path, "data CSV");
    if (required) opt->required();
    app.add_option("--header", header, "first row holds feature names: auto, yes or no")
        ->check(CLI::IsMember({"auto", "yes", "no"}));
    app.add_option("--layout", layout, "rows: one sample per row; columns: one sample per column")
        ->check(CLI::IsMember({"rows", "columns"}));
    app.add_flag("--center,!--no-center", center, "subtract feature means before fitting (default on)");
  }
};

bool first_line_is_header(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitData, "cannot open " + path};
  std::string line;
  std::getline(in, line);
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  for (const auto& cell : split(line, ',')) {
    double v;
    if (!parse_number(cell, v)) return true;
  }
  return false;
}

struct LoadedData {
  Matrix raw;
  Matrix data;  // centered when requested
};

LoadedData load_input(const InputOptions& in) {
  const bool header = in.header == "yes" || (in.header == "auto" && first_line_is_header(in.path));
  cspca_matrix* m = nullptr;
  check(cspca_matrix_load_csv(in.path.c_str(), header ? 1 : 0, in.layout == "columns" ? 1 : 0, &m));
  LoadedData out;
  out.raw.reset(m);
  if (in.center) {
    cspca_matrix* c = nullptr;
    check(cspca_matrix_center(m, &c, nullptr));
    out.data.reset(c);
  } else {
    cspca_matrix* c = nullptr;
    const std::size_t d = cspca_matrix_features(m), n = cspca_matrix_samples(m);
    std::vector<double> v(d * n);
    check(cspca_matrix_values(m, v.data()));
    check(cspca_matrix_from_values(v.data(), d, n, &c));
    out.data.reset(c);
  }
  return out;
}

struct FitOptions {
  std::optional<double> alpha;
  std::optional<double> beta;
  double tol = 0;
  int max_iter = 0;
  double epsilon = 0;
  std::string init = "identity";
  std::uint64_t seed = 0;

  FitOptions() {
    cspca_solver_config c;
    cspca_solver_config_default(&c);
    tol = c.tol;
    max_iter = c.max_iter;
    epsilon = c.epsilon;
  }

  void add(CLI::App& app, bool penalties, bool penalties_required, const char* seed_flag = "--seed") {
    if (penalties) {
      auto* a = app.add_option("--alpha", alpha, "row-sparsity penalty weight");
      auto* b = app.add_option("--beta", beta, "trace-norm penalty weight");
      if (penalties_required) {
        a->required();
        b->required();
      }
    }
    app.add_option("--tol", tol, "relative objective change that ends the loop");
    app.add_option("--max-iter", max_iter, "iteration limit");
    app.add_option("--epsilon", epsilon, "lower clamp on norms in the reweighting");
    app.add_option("--init", init, "identity, diag:<c>, const:<c>, random or random:<seed>");
    app.add_option(seed_flag, seed, "seed used by --init random");
  }

  cspca_solver_config config(double a, double b) const {
    cspca_solver_config c;
    cspca_solver_config_default(&c);
    c.alpha = a;
    c.beta = b;
    c.tol = tol;
    c.max_iter = max_iter;
    c.epsilon = epsilon;
    const std::string spec = init == "random" ? "random:" + std::to_string(seed) : init;
    check(cspca_solver_config_set_init(&c, spec.c_str()));
    return c;
  }
};

Result run_fit(const cspca_matrix* x, const cspca_solver_config& c) {
  cspca_result* r = nullptr;
  check(cspca_solve(x, &c, &r));
  return Result(r);
}

Json config_json(const cspca_result* r) {
  char* text = nullptr;
  check(cspca_result_config_json(r, &text));
  Json j = Json::parse(text);
  cspca_string_free(text);
  j.erase("type");
  return j;
}

Json config_json(const cspca_solver_config& c) {
  Json j;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["epsilon"] = c.epsilon;
  j["tol"] = c.tol;
  j["max_iter"] = c.max_iter;
  switch (c.init) {
    case CSPCA_INIT_IDENTITY: j["init"] = "identity"; break;
    case CSPCA_INIT_SCALED_IDENTITY: j["init"] = "diag:" + fmt(c.init_value); break;
    case CSPCA_INIT_CONSTANT: j["init"] = "const:" + fmt(c.init_value); break;
    case CSPCA_INIT_RANDOM: j["init"] = "random:" + std::to_string(c.init_seed); break;
  }
  j["continuation"] = c.continuation;
  j["stationarity_tol"] = c.stationarity_tol;
  return j;
}

// ---- outputs ----

std::string iso_time(std::time_t t) {
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Reruns must produce identical bytes, so the manifest time is taken from
// SOURCE_DATE_EPOCH when set, else from the input file's modification time.
std::string manifest_time(const std::string& input) {
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
    double v;
    if (parse_number(env, v) && v >= 0) return iso_time(static_cast<std::time_t>(v));
  }
  struct stat st {};
  if (!input.empty() && ::stat(input.c_str(), &st) == 0) return iso_time(st.st_mtime);
  return iso_time(0);
}

class OutputDir {
 public:
  explicit OutputDir(std::string dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Failure{kExitData, "cannot create output directory " + dir_ + ": " + ec.message()};
  }

  std::string path(const std::string& name) {
    files_.push_back(name);
    return (fs::path(dir_) / name).string();
  }

  void write(const std::string& name, const std::string& text) { check(cspca_write_text(path(name).c_str(), text.c_str())); }

  void manifest(const std::string& command, const std::string& input, const Json& config, bool centering,
                const Json& arguments) {
    Json m;
    m["type"] = "run_manifest";
    m["command"] = command;
    m["input_path"] = input;
    m["config"] = config;
    m["centering"] = centering;
    m["timestamp"] = manifest_time(input);
    m["tool_version"] = cspca_version();
    m["arguments"] = arguments;
    m["outputs"] = files_;
    const std::string text = m.dump(2) + "\n";
    check(cspca_write_text((fs::path(dir_) / "manifest.json").string().c_str(), text.c_str()));
  }

 private:
  std::string dir_;
  std::vector<std::string> files_;
};

// ---- labels and selections ----

std::vector<long long> load_labels(const std::string& path) {
  std::size_t count = 0;
  check(cspca_labels_load(path.c_str(), nullptr, 0, &count));
  std::vector<long long> labels(count);
  check(cspca_labels_load(path.c_str(), labels.data(), labels.size(), &count));
  return labels;
}

// Reads the index column of a ranking/selection CSV written by `select`.
std::vector<std::size_t> load_selection(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitData, "cannot open " + path};
  std::string line;
  if (!std::getline(in, line)) throw Failure{kExitData, path + ": empty selection file"};
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line, ',');
  std::size_t col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "index") col = i;
  }
  if (col == header.size()) throw Failure{kExitData, path + ": no index column"};
  std::vector<std::size_t> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    double v;
    if (col >= cells.size() || !parse_number(cells[col], v) || v < 0 ||
        v != static_cast<double>(static_cast<std::size_t>(v))) {
      throw Failure{kExitData, path + ": bad index on line " + std::to_string(line_no)};
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw Failure{kExitData, path + ": selection is empty"};
  return out;
}

Ranking load_weights_ranking(const std::string& path) {
  cspca_matrix* m = nullptr;
  check(cspca_matrix_load_csv(path.c_str(), 0, 1, &m));
  Matrix w(m);
  const std::size_t d = cspca_matrix_features(m);
  if (cspca_matrix_samples(m) != d) {
    throw Failure{kExitData, path + ": W must be square, got " + std::to_string(d) + "x" +
                                 std::to_string(cspca_matrix_samples(m))};
  }
  std::vector<double> v(d * d);
  check(cspca_matrix_values(m, v.data()));
  cspca_ranking* r = nullptr;
  check(cspca_rank_from_weights(v.data(), d, &r));
  return Ranking(r);
}

std::vector<std::size_t> select(const cspca_ranking* r, std::size_t k) {
  std::vector<std::size_t> sel(k);
  check(cspca_ranking_select(r, k, sel.data()));
  return sel;
}

// Ranking used by eval and sweep: CSPCA fit on the data, or MaxVariance.
Ranking rank_features(const std::string& method, const cspca_matrix* x, const FitOptions& fit, double alpha,
                      double beta) {
  cspca_ranking* r = nullptr;
  if (method == "maxvariance") {
    check(cspca_rank_max_variance(x, &r));
  } else {
    const Result res = run_fit(x, fit.config(alpha, beta));
    check(cspca_rank_from_result(res.get(), &r));
  }
  return Ranking(r);
}

int cluster_count(const std::vector<long long>& labels, int requested) {
  if (requested > 0) return requested;
  return static_cast<int>(std::set<long long>(labels.begin(), labels.end()).size());
}

cspca_eval_report evaluate(const cspca_matrix* x, const std::vector<std::size_t>& sel,
                           const std::vector<long long>& labels, int c, int runs, std::uint64_t seed) {
  cspca_eval_report rep{};
  check(cspca_evaluate_selection(x, sel.data(), sel.size(), labels.data(), labels.size(), c, runs, seed, &rep));
  return rep;
}

// ---- commands ----

struct Common {
  std::string out_dir = ".";
};

int cmd_fit(const InputOptions& in, const FitOptions& fit, const Common& common) {
  const auto data = load_input(in);
  const auto config = fit.config(*fit.alpha, *fit.beta);
  const Result res = run_fit(data.data.get(), config);
  OutputDir out(common.out_dir);
  check(cspca_result_save_weights(res.get(), out.path("W.csv").c_str()));
  check(cspca_result_save_trace_csv(res.get(), out.path("trace.csv").c_str()));
  check(cspca_result_save_trace(res.get(), out.path("trace.json").c_str()));
  Json args;
  args["layout"] = in.layout;
  out.manifest("fit", in.path, config_json(res.get()), in.center, args);
  std::cout << "iterations " << cspca_result_iterations(res.get()) << ", " << cspca_result_stop_reason(res.get())
            << ", stationarity " << fmt(cspca_result_stationarity(res.get())) << "\n";
  return 0;
}

int cmd_select(const InputOptions& in, const FitOptions& fit, const std::string& w_path, std::size_t k,
               const std::string& method, const Common& common) {
  if (k == 0) usage_error("--num-features must be at least 1");
  if (w_path.empty() && in.path.empty()) usage_error("select needs --w-matrix or --input");
  if (method == "cspca" && w_path.empty() && (!fit.alpha || !fit.beta)) {
    usage_error("fitting inline needs --alpha and --beta");
  }
  std::optional<LoadedData> data;
  if (!in.path.empty()) data = load_input(in);
  Ranking ranking;
  Json config;
  if (method == "maxvariance") {
    if (!data) usage_error("--method maxvariance needs --input");
    ranking = rank_features(method, data->data.get(), fit, 0, 0);
  } else if (!w_path.empty()) {
    ranking = load_weights_ranking(w_path);
  } else {
    const auto c = fit.config(*fit.alpha, *fit.beta);
    config = config_json(c);
    ranking = rank_features(method, data->data.get(), fit, *fit.alpha, *fit.beta);
  }
  const std::size_t d = cspca_ranking_size(ranking.get());
  if (data && cspca_matrix_features(data->raw.get()) != d) {
    throw Failure{kExitData, "W has " + std::to_string(d) + " rows but the input has " +
                                 std::to_string(cspca_matrix_features(data->raw.get())) + " features"};
  }
  if (k > d) usage_error("--num-features " + std::to_string(k) + " exceeds the " + std::to_string(d) + " features");
  const cspca_matrix* names = data ? data->raw.get() : nullptr;
  OutputDir out(common.out_dir);
  check(cspca_ranking_save(ranking.get(), out.path("ranking.json").c_str()));
  check(cspca_ranking_save_csv(ranking.get(), names, 0, out.path("ranking.csv").c_str()));
  check(cspca_ranking_save_csv(ranking.get(), names, k, out.path("selected.csv").c_str()));
  Json args;
  args["method"] = method;
  args["w_matrix"] = w_path;
  args["num_features"] = k;
  out.manifest("select", in.path.empty() ? w_path : in.path, config, in.center, args);
  return 0;
}

struct EvalOptions {
  std::string labels;
  std::string selected;
  std::string num_features;
  std::string method = "cspca";
  int clusters = 0;
  int runs = 30;
  std::uint64_t seed = 0;

  void add(CLI::App& app, bool with_selection) {
    app.add_option("--labels", labels, "ground-truth labels CSV (first column)")->required();
    if (with_selection) {
      app.add_option("--selected", selected, "selection CSV written by select");
      app.add_option("--num-features", num_features, "feature count, or comma list to sweep");
    } else {
      app.add_option("--num-features", num_features, "number of selected features")->required();
    }
    app.add_option("--method", method, "cspca or maxvariance")->check(CLI::IsMember({"cspca", "maxvariance"}));
    app.add_option("--clusters", clusters, "k-means clusters (default: distinct labels)");
    app.add_option("--runs", runs, "k-means repetitions");
    app.add_option("--seed", seed, "first k-means seed");
  }
};

Json eval_args(const EvalOptions& e, int c) {
  Json a;
  a["labels"] = e.labels;
  a["method"] = e.method;
  a["clusters"] = c;
  a["runs"] = e.runs;
  a["seed"] = e.seed;
  return a;
}

std::string eval_json(const cspca_eval_report& r, OutputDir& out, const std::string& name) {
  const std::string p = out.path(name);
  check(cspca_eval_report_save(&r, p.c_str()));
  return p;
}

int cmd_eval(const InputOptions& in, const FitOptions& fit, const EvalOptions& e, const Common& common) {
  if (e.selected.empty() == e.num_features.empty()) usage_error("eval needs exactly one of --selected or --num-features");
  if (e.runs < 1) usage_error("--runs must be positive");
  const auto data = load_input(in);
  const auto labels = load_labels(e.labels);
  const std::size_t n = cspca_matrix_samples(data.raw.get());
  if (labels.size() != n) {
    throw Failure{kExitData, "labels file has " + std::to_string(labels.size()) + " entries for " + std::to_string(n) + " samples"};
  }
  const int c = cluster_count(labels, e.clusters);
  Json args = eval_args(e, c);
  Json config;
  OutputDir out(common.out_dir);

  if (!e.selected.empty()) {
    const auto sel = load_selection(e.selected);
    const auto rep = evaluate(data.data.get(), sel, labels, c, e.runs, e.seed);
    eval_json(rep, out, "eval.json");
    args["selected"] = e.selected;
    std::cout << "acc " << fmt(rep.acc_mean) << " +- " << fmt(rep.acc_std) << ", nmi " << fmt(rep.nmi_mean) << " +- "
              << fmt(rep.nmi_std) << "\n";
  } else {
    const auto counts = parse_counts(e.num_features, "--num-features");
    if (e.method == "cspca" && (!fit.alpha || !fit.beta)) usage_error("--num-features with cspca needs --alpha and --beta");
    const double a = fit.alpha.value_or(0), b = fit.beta.value_or(0);
    if (e.method == "cspca") config = config_json(fit.config(a, b));
    const Ranking ranking = rank_features(e.method, data.data.get(), fit, a, b);
    const std::size_t d = cspca_ranking_size(ranking.get());
    std::ostringstream curve;
    curve << "num_features,acc_mean,acc_std,nmi_mean,nmi_std\n";
    for (std::size_t k : counts) {
      if (k > d) usage_error("--num-features " + std::to_string(k) + " exceeds the " + std::to_string(d) + " features");
      const auto rep = evaluate(data.data.get(), select(ranking.get(), k), labels, c, e.runs, e.seed);
      curve << k << ',' << fmt(rep.acc_mean) << ',' << fmt(rep.acc_std) << ',' << fmt(rep.nmi_mean) << ','
            << fmt(rep.nmi_std) << '\n';
      if (counts.size() == 1) eval_json(rep, out, "eval.json");
      std::cout << "k=" << k << " acc " << fmt(rep.acc_mean) << " nmi " << fmt(rep.nmi_mean) << "\n";
    }
    out.write("curve.csv", curve.str());
    args["num_features"] = counts;
  }
  out.manifest("eval", in.path, config, in.center, args);
  return 0;
}

constexpr const char* kDefaultGrid = "1e-6,1e-4,1e-2,1,1e2,1e4,1e6";

int cmd_sweep(const InputOptions& in, const FitOptions& fit, const EvalOptions& e, const std::string& alpha_grid,
              const std::string& beta_grid, const Common& common) {
  const auto alphas = parse_grid(alpha_grid, "--alpha-grid");
  const auto betas = parse_grid(beta_grid, "--beta-grid");
  const auto counts = parse_counts(e.num_features, "--num-features");
  if (counts.size() != 1) usage_error("sweep takes a single --num-features value");
  if (e.runs < 1) usage_error("--runs must be positive");
  const std::size_t k = counts.front();
  const auto data = load_input(in);
  const auto labels = load_labels(e.labels);
  const std::size_t n = cspca_matrix_samples(data.raw.get());
  if (labels.size() != n) {
    throw Failure{kExitData, "labels file has " + std::to_string(labels.size()) + " entries for " + std::to_string(n) + " samples"};
  }
  if (k > cspca_matrix_features(data.raw.get())) usage_error("--num-features exceeds the feature count");
  const int c = cluster_count(labels, e.clusters);
  std::ostringstream grid;
  grid << "alpha,beta,acc_mean,nmi_mean\n";
  for (double a : alphas) {
    for (double b : betas) {
      const Ranking ranking = rank_features(e.method, data.data.get(), fit, a, b);
      const auto rep = evaluate(data.data.get(), select(ranking.get(), k), labels, c, e.runs, e.seed);
      grid << fmt(a) << ',' << fmt(b) << ',' << fmt(rep.acc_mean) << ',' << fmt(rep.nmi_mean) << '\n';
    }
  }
  OutputDir out(common.out_dir);
  out.write("sweep.csv", grid.str());
  Json args = eval_args(e, c);
  args["num_features"] = k;
  args["alpha_grid"] = alphas;
  args["beta_grid"] = betas;
  Json config = config_json(fit.config(1, 1));
  config.erase("alpha");
  config.erase("beta");
  out.manifest("sweep", in.path, config, in.center, args);
  return 0;
}

int cmd_verify(const cspca_verify_options& opts, const Common& common) {
  cspca_verify_report* raw = nullptr;
  check(cspca_verify(&opts, &raw));
  const VerifyReport report(raw);
  OutputDir out(common.out_dir);
  Json props = Json::array();
  bool all = true;
  std::string replay;
  for (std::size_t i = 0; i < cspca_verify_count(raw); ++i) {
    const bool pass = cspca_verify_passed(raw, i) != 0;
    all = all && pass;
    std::cout << (pass ? "PASS " : "FAIL ") << cspca_verify_name(raw, i) << " (" << cspca_verify_instances(raw, i)
              << " instances): " << cspca_verify_detail(raw, i) << "\n";
    Json p;
    p["name"] = cspca_verify_name(raw, i);
    p["passed"] = pass;
    p["instances"] = cspca_verify_instances(raw, i);
    p["detail"] = cspca_verify_detail(raw, i);
    props.push_back(p);
    if (!pass && replay.empty()) replay = cspca_verify_replay(raw, i);
  }
  Json rep;
  rep["type"] = "verify_report";
  rep["all_passed"] = all;
  rep["properties"] = props;
  out.write("verify.json", rep.dump(2) + "\n");
  if (!replay.empty()) {
    out.write("replay.json", replay);
    std::cerr << "failing instance written to " << (fs::path(common.out_dir) / "replay.json").string() << "\n";
  }
  Json args;
  args["trials"] = opts.trials;
  args["seed"] = opts.seed;
  args["max_dim"] = opts.max_dim;
  if (opts.inject_fault) args["inject_fault"] = true;
  out.manifest("verify", "", Json::object(), false, args);
  return all ? 0 : kExitVerifyFailed;
}

int cmd_generate(const cspca_synthetic_spec& spec, const Common& common) {
  cspca_matrix* m = nullptr;
  std::vector<int> labels(spec.n_samples);
  std::vector<std::size_t> informative(spec.n_informative);
  check(cspca_generate_synthetic(&spec, &m, labels.data(), informative.data()));
  const Matrix x(m);
  OutputDir out(common.out_dir);
  check(cspca_matrix_save_csv(x.get(), out.path("data.csv").c_str(), 0));
  std::ostringstream lab, inf;
  lab << "label\n";
  for (int l : labels) lab << l << '\n';
  inf << "index\n";
  for (auto i : informative) inf << i << '\n';
  out.write("labels.csv", lab.str());
  out.write("informative.csv", inf.str());
  Json args;
  args["n_samples"] = spec.n_samples;
  args["n_informative"] = spec.n_informative;
  args["n_noise"] = spec.n_noise;
  args["n_clusters"] = spec.n_clusters;
  args["cluster_separation"] = spec.cluster_separation;
  args["noise_scale"] = spec.noise_scale;
  args["outlier_fraction"] = spec.outlier_fraction;
  args["seed"] = spec.seed;
  out.manifest("generate", "", Json::object(), false, args);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convex sparse PCA: fit, feature selection and clustering evaluation"};
  app.require_subcommand(1);
  Common common;

  auto* fit = app.add_subcommand("fit", "learn W and write W.csv, trace.csv, trace.json");
  InputOptions fit_in;
  FitOptions fit_opts;
  fit_in.add(*fit, true);
  fit_opts.add(*fit, true, true);
  fit->add_option("--out-dir", common.out_dir, "output directory");

  auto* sel = app.add_subcommand("select", "rank features and write the top k");
  InputOptions sel_in;
  FitOptions sel_fit;
  std::string w_path, sel_method = "cspca";
  std::size_t sel_k = 0;
  sel_in.add(*sel, false);
  sel_fit.add(*sel, true, false);
  sel->add_option("--w-matrix", w_path, "W.csv from fit");
  sel->add_option("--num-features", sel_k, "number of features to keep")->required();
  sel->add_option("--method", sel_method, "cspca or maxvariance")->check(CLI::IsMember({"cspca", "maxvariance"}));
  sel->add_option("--out-dir", common.out_dir, "output directory");

  auto* ev = app.add_subcommand("eval", "cluster selected features and report ACC and NMI");
  InputOptions ev_in;
  FitOptions ev_fit;
  EvalOptions ev_opts;
  ev_in.add(*ev, true);
  ev_fit.add(*ev, true, false, "--init-seed");
  ev_opts.add(*ev, true);
  ev->add_option("--out-dir", common.out_dir, "output directory");

  auto* sw = app.add_subcommand("sweep", "ACC and NMI over an alpha x beta grid");
  InputOptions sw_in;
  FitOptions sw_fit;
  EvalOptions sw_opts;
  std::string alpha_grid = kDefaultGrid, beta_grid = kDefaultGrid;
  sw_in.add(*sw, true);
  sw_fit.add(*sw, false, false, "--init-seed");
  sw_opts.add(*sw, false);
  sw->add_option("--alpha-grid", alpha_grid, "comma-separated alpha values");
  sw->add_option("--beta-grid", beta_grid, "comma-separated beta values");
  sw->add_option("--out-dir", common.out_dir, "output directory");

  auto* ver = app.add_subcommand("verify", "run the built-in property battery");
  cspca_verify_options vopts;
  cspca_verify_options_default(&vopts);
  bool inject = false;
  ver->add_option("--trials", vopts.trials, "random instances");
  ver->add_option("--seed", vopts.seed, "first instance seed");
  ver->add_option("--max-dim", vopts.max_dim, "largest feature dimension");
  ver->add_flag("--inject-fault", inject, "corrupt solver updates to exercise the failure path")->group("");
  ver->add_option("--out-dir", common.out_dir, "output directory");

  auto* gen = app.add_subcommand("generate", "write a synthetic clustered data set with outliers");
  cspca_synthetic_spec spec;
  cspca_synthetic_spec_default(&spec);
  gen->add_option("--samples", spec.n_samples, "number of samples");
  gen->add_option("--informative", spec.n_informative, "informative features");
  gen->add_option("--noise-features", spec.n_noise, "pure-noise features");
  gen->add_option("--clusters", spec.n_clusters, "number of clusters");
  gen->add_option("--separation", spec.cluster_separation, "minimum distance between cluster centers");
  gen->add_option("--noise-scale", spec.noise_scale, "standard deviation of noise features");
  gen->add_option("--outlier-fraction", spec.outlier_fraction, "fraction of samples replaced by outliers");
  gen->add_option("--seed", spec.seed, "random seed");
  gen->add_option("--out-dir", common.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "cspca: " << e.what() << "\n\n";
    const auto used = app.get_subcommands();
    std::cerr << (used.empty() ? app.help() : used.front()->help());
    return kExitUsage;
  }

  try {
    if (fit->parsed()) return cmd_fit(fit_in, fit_opts, common);
    if (sel->parsed()) return cmd_select(sel_in, sel_fit, w_path, sel_k, sel_method, common);
    if (ev->parsed()) return cmd_eval(ev_in, ev_fit, ev_opts, common);
    if (sw->parsed()) return cmd_sweep(sw_in, sw_fit, sw_opts, alpha_grid, beta_grid, common);
    if (ver->parsed()) {
      vopts.inject_fault = inject ? 1 : 0;
      return cmd_verify(vopts, common);
    }
    if (gen->parsed()) return cmd_generate(spec, common);
  } catch (const Failure& f) {
    std::cerr << "cspca: " << f.message << "\n";
    if (f.code == kExitUsage) std::cerr << "run with --help for usage\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "cspca: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
