#include "cspca/cspca.h"

#include <cstring>
#include <string>

#include "cspca/dataio.hpp"
#include "cspca/error.hpp"
#include "cspca/eval.hpp"
#include "cspca/features.hpp"
#include "cspca/results.hpp"
#include "cspca/solver.hpp"
#include "cspca/verify.hpp"

struct cspca_matrix {
  cspca::DataMatrix data;
  std::vector<std::string> names;  // resolved, one per feature
};

struct cspca_result {
  cspca::SolverResult result;
};

struct cspca_ranking {
  cspca::FeatureRanking ranking;
};

struct cspca_verify_report {
  cspca::VerifyReport report;
};

namespace {

thread_local std::string last_error;

cspca_status code_for(cspca::ErrorKind kind) {
  switch (kind) {
    case cspca::ErrorKind::InvalidArgument: return CSPCA_ERR_INVALID_ARGUMENT;
    case cspca::ErrorKind::Io: return CSPCA_ERR_IO;
    case cspca::ErrorKind::Parse: return CSPCA_ERR_PARSE;
    case cspca::ErrorKind::Data: return CSPCA_ERR_DATA;
    case cspca::ErrorKind::Dimension: return CSPCA_ERR_DIMENSION;
    case cspca::ErrorKind::Numerical: return CSPCA_ERR_NUMERICAL;
  }
  return CSPCA_ERR_INTERNAL;
}

template <typename F>
cspca_status guard(F&& f) {
  try {
    f();
    return CSPCA_OK;
  } catch (const cspca::Error& e) {
    last_error = e.what();
    return code_for(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return CSPCA_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return CSPCA_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) cspca::fail(cspca::ErrorKind::InvalidArgument, what);
}

cspca_matrix* wrap(cspca::DataMatrix data) {
  auto* m = new cspca_matrix{std::move(data), {}};
  for (Eigen::Index i = 0; i < m->data.features(); ++i) m->names.push_back(m->data.feature_name(i));
  return m;
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Eigen::MatrixXd copy_in(const double* values, size_t rows, size_t cols) {
  require(values != nullptr, "values pointer is null");
  return Eigen::Map<const Eigen::MatrixXd>(values, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

void copy_out(const Eigen::MatrixXd& m, double* out) {
  require(out != nullptr, "output pointer is null");
  Eigen::Map<Eigen::MatrixXd>(out, m.rows(), m.cols()) = m;
}

cspca::SolverConfig to_config(const cspca_solver_config& c) {
  cspca::SolverConfig cfg;
  cfg.alpha = c.alpha;
  cfg.beta = c.beta;
  cfg.epsilon = c.epsilon;
  cfg.tol = c.tol;
  cfg.max_iter = c.max_iter;
  cfg.continuation = c.continuation;
  cfg.stationarity_tol = c.stationarity_tol;
  switch (c.init) {
    case CSPCA_INIT_IDENTITY: cfg.init = cspca::init::Identity{}; break;
    case CSPCA_INIT_SCALED_IDENTITY: cfg.init = cspca::init::ScaledIdentity{c.init_value}; break;
    case CSPCA_INIT_CONSTANT: cfg.init = cspca::init::Constant{c.init_value}; break;
    case CSPCA_INIT_RANDOM: cfg.init = cspca::init::RandomGaussian{c.init_seed}; break;
    default: cspca::fail(cspca::ErrorKind::InvalidArgument, "unknown initialization kind");
  }
  cfg.validate();
  return cfg;
}

cspca::ClusterLabels raw_labels(const long long* v, size_t n) {
  require(v != nullptr, "label pointer is null");
  return cspca::ClusterLabels::from_raw(std::vector<long long>(v, v + n));
}

std::vector<std::size_t> selection(const size_t* selected, size_t k) {
  require(selected != nullptr || k == 0, "selection pointer is null");
  return std::vector<std::size_t>(selected, selected + k);
}

}  // namespace

extern "C" {

const char* cspca_version(void) { return "0.1.0"; }
const char* cspca_last_error(void) { return last_error.c_str(); }

const char* cspca_status_name(cspca_status status) {
  switch (status) {
    case CSPCA_OK: return "ok";
    case CSPCA_ERR_INVALID_ARGUMENT: return "invalid argument";
    case CSPCA_ERR_IO: return "io error";
    case CSPCA_ERR_PARSE: return "parse error";
    case CSPCA_ERR_DATA: return "data error";
    case CSPCA_ERR_DIMENSION: return "dimension mismatch";
    case CSPCA_ERR_NUMERICAL: return "numerical failure";
    case CSPCA_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void cspca_string_free(char* s) { delete[] s; }

cspca_status cspca_matrix_load_csv(const char* path, int has_header, int samples_as_columns, cspca_matrix** out) {
  return guard([&] {
    require(path && out, "null argument");
    auto layout = samples_as_columns ? cspca::SampleLayout::Columns : cspca::SampleLayout::Rows;
    *out = wrap(cspca::load_csv(path, has_header != 0, layout));
  });
}

cspca_status cspca_matrix_from_values(const double* values, size_t d, size_t n, cspca_matrix** out) {
  return guard([&] {
    require(out != nullptr, "null argument");
    *out = wrap(cspca::DataMatrix(copy_in(values, d, n)));
  });
}

size_t cspca_matrix_features(const cspca_matrix* m) { return m ? static_cast<size_t>(m->data.features()) : 0; }
size_t cspca_matrix_samples(const cspca_matrix* m) { return m ? static_cast<size_t>(m->data.samples()) : 0; }

cspca_status cspca_matrix_values(const cspca_matrix* m, double* out) {
  return guard([&] {
    require(m != nullptr, "null matrix");
    copy_out(m->data.values(), out);
  });
}

const char* cspca_matrix_feature_name(const cspca_matrix* m, size_t i) {
  if (!m || i >= m->names.size()) return nullptr;
  return m->names[i].c_str();
}

cspca_status cspca_matrix_center(const cspca_matrix* m, cspca_matrix** out, double* mean_out) {
  return guard([&] {
    require(m && out, "null argument");
    auto centered = cspca::center_features(m->data);
    if (mean_out) copy_out(centered.mean, mean_out);
    *out = wrap(std::move(centered.data));
  });
}

cspca_status cspca_matrix_save_csv(const cspca_matrix* m, const char* path, int samples_as_columns) {
  return guard([&] {
    require(m && path, "null argument");
    if (samples_as_columns) {
      cspca::save_matrix(m->data.values(), {}, path, cspca::SampleLayout::Columns);
    } else {
      cspca::save_matrix(m->data.values(), m->data.feature_names(), path, cspca::SampleLayout::Rows);
    }
  });
}

void cspca_matrix_free(cspca_matrix* m) { delete m; }

cspca_status cspca_labels_load(const char* path, long long* out, size_t capacity, size_t* count) {
  return guard([&] {
    require(path && count, "null argument");
    const auto labels = cspca::load_labels(path);
    if (out) {
      if (labels.size() > capacity) {
        cspca::fail(cspca::ErrorKind::InvalidArgument,
                    "label buffer holds " + std::to_string(capacity) + " entries, file has " + std::to_string(labels.size()));
      }
      std::copy(labels.begin(), labels.end(), out);
    }
    *count = labels.size();
  });
}

void cspca_synthetic_spec_default(cspca_synthetic_spec* spec) {
  if (!spec) return;
  const cspca::SyntheticSpec s;
  *spec = {s.n_samples, s.n_informative, s.n_noise, s.n_clusters, s.cluster_separation,
           s.noise_scale, s.outlier_fraction, s.seed};
}

cspca_status cspca_generate_synthetic(const cspca_synthetic_spec* spec, cspca_matrix** x, int* labels,
                                      size_t* informative) {
  return guard([&] {
    require(spec && x, "null argument");
    cspca::SyntheticSpec s;
    s.n_samples = spec->n_samples;
    s.n_informative = spec->n_informative;
    s.n_noise = spec->n_noise;
    s.n_clusters = spec->n_clusters;
    s.cluster_separation = spec->cluster_separation;
    s.noise_scale = spec->noise_scale;
    s.outlier_fraction = spec->outlier_fraction;
    s.seed = spec->seed;
    auto data = cspca::generate_synthetic(s);
    if (labels) std::copy(data.labels.begin(), data.labels.end(), labels);
    if (informative) std::copy(data.informative.begin(), data.informative.end(), informative);
    *x = wrap(std::move(data.x));
  });
}

void cspca_solver_config_default(cspca_solver_config* config) {
  if (!config) return;
  const cspca::SolverConfig c;
  *config = {c.alpha, c.beta, c.epsilon, c.tol, c.max_iter, CSPCA_INIT_IDENTITY, 1.0, 0, c.continuation,
             c.stationarity_tol};
}

cspca_status cspca_solver_config_set_init(cspca_solver_config* config, const char* spec) {
  return guard([&] {
    require(config && spec, "null argument");
    const std::string s(spec);
    const auto colon = s.find(':');
    const std::string kind = s.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : s.substr(colon + 1);
    auto bad = [&] { cspca::fail(cspca::ErrorKind::InvalidArgument, "bad initialization \"" + s + "\""); };
    if (kind == "identity" && colon == std::string::npos) {
      config->init = CSPCA_INIT_IDENTITY;
    } else if (kind == "diag" || kind == "const") {
      double v = 0.0;
      if (!cspca::parse_double(arg, v)) bad();
      config->init = kind == "diag" ? CSPCA_INIT_SCALED_IDENTITY : CSPCA_INIT_CONSTANT;
      config->init_value = v;
    } else if (kind == "random") {
      if (arg.empty() || arg.find_first_not_of("0123456789") != std::string::npos) bad();
      try {
        config->init_seed = std::stoull(arg);
      } catch (const std::exception&) {
        bad();
      }
      config->init = CSPCA_INIT_RANDOM;
    } else {
      bad();
    }
  });
}

cspca_status cspca_solve(const cspca_matrix* x, const cspca_solver_config* config, cspca_result** out) {
  return guard([&] {
    require(x && config && out, "null argument");
    auto res = cspca::solve(x->data, to_config(*config));
    *out = new cspca_result{std::move(res)};
  });
}

cspca_status cspca_objective_eval(const double* w, size_t d, const cspca_matrix* x, double alpha, double beta,
                                  cspca_objective* out) {
  return guard([&] {
    require(x && out, "null argument");
    const auto v = cspca::evaluate_objective(cspca::ProjectionMatrix(copy_in(w, d, d)), x->data, alpha, beta);
    *out = {v.total, v.loss, v.l21_penalty, v.trace_penalty};
  });
}

size_t cspca_result_dim(const cspca_result* r) { return r ? static_cast<size_t>(r->result.w.dim()) : 0; }

cspca_status cspca_result_weights(const cspca_result* r, double* out) {
  return guard([&] {
    require(r != nullptr, "null result");
    copy_out(r->result.w.values(), out);
  });
}

int cspca_result_iterations(const cspca_result* r) { return r ? r->result.trace.iterations : 0; }
int cspca_result_converged(const cspca_result* r) { return r && r->result.trace.converged ? 1 : 0; }

const char* cspca_result_stop_reason(const cspca_result* r) {
  if (!r) return nullptr;
  switch (r->result.trace.stop_reason) {
    case cspca::StopReason::ToleranceReached: return "ToleranceReached";
    case cspca::StopReason::MaxIterations: return "MaxIterations";
    case cspca::StopReason::Stalled: return "Stalled";
  }
  return nullptr;
}

double cspca_result_stationarity(const cspca_result* r) { return r ? r->result.trace.stationarity : 0.0; }
size_t cspca_result_objective_count(const cspca_result* r) { return r ? r->result.trace.objectives.size() : 0; }

cspca_status cspca_result_objective(const cspca_result* r, size_t i, cspca_objective* out) {
  return guard([&] {
    require(r && out, "null argument");
    require(i < r->result.trace.objectives.size(), "objective index out of range");
    const auto& v = r->result.trace.objectives[i];
    *out = {v.total, v.loss, v.l21_penalty, v.trace_penalty};
  });
}

cspca_status cspca_result_trace_json(const cspca_result* r, char** out) {
  return guard([&] {
    require(r && out, "null argument");
    *out = copy_string(cspca::to_text(r->result.trace));
  });
}

cspca_status cspca_result_config_json(const cspca_result* r, char** out) {
  return guard([&] {
    require(r && out, "null argument");
    *out = copy_string(cspca::to_text(r->result.config_echo));
  });
}

cspca_status cspca_result_save_trace(const cspca_result* r, const char* path) {
  return guard([&] {
    require(r && path, "null argument");
    cspca::save_results(r->result.trace, path);
  });
}

cspca_status cspca_result_save_trace_csv(const cspca_result* r, const char* path) {
  return guard([&] {
    require(r && path, "null argument");
    cspca::write_file_atomic(path, cspca::trace_csv(r->result.trace));
  });
}

cspca_status cspca_result_save_weights(const cspca_result* r, const char* path) {
  return guard([&] {
    require(r && path, "null argument");
    cspca::save_matrix(r->result.w.values(), {}, path, cspca::SampleLayout::Columns);
  });
}

void cspca_result_free(cspca_result* r) { delete r; }

cspca_status cspca_project(const double* w, size_t d, const double* x, const double* mean, double* out) {
  return guard([&] {
    const cspca::ProjectionMatrix pm(copy_in(w, d, d));
    const Eigen::VectorXd xv = copy_in(x, d, 1);
    std::optional<Eigen::VectorXd> m;
    if (mean) m = Eigen::VectorXd(copy_in(mean, d, 1));
    copy_out(cspca::project(pm, xv, m), out);
  });
}

cspca_status cspca_rank_from_result(const cspca_result* r, cspca_ranking** out) {
  return guard([&] {
    require(r && out, "null argument");
    *out = new cspca_ranking{cspca::score_features(r->result.w)};
  });
}

cspca_status cspca_rank_from_weights(const double* w, size_t d, cspca_ranking** out) {
  return guard([&] {
    require(out != nullptr, "null argument");
    *out = new cspca_ranking{cspca::score_features(cspca::ProjectionMatrix(copy_in(w, d, d)))};
  });
}

cspca_status cspca_rank_max_variance(const cspca_matrix* x, cspca_ranking** out) {
  return guard([&] {
    require(x && out, "null argument");
    *out = new cspca_ranking{cspca::max_variance_ranking(x->data)};
  });
}

cspca_status cspca_ranking_load(const char* path, cspca_ranking** out) {
  return guard([&] {
    require(path && out, "null argument");
    *out = new cspca_ranking{cspca::load_ranking(path)};
  });
}

size_t cspca_ranking_size(const cspca_ranking* r) { return r ? r->ranking.order.size() : 0; }
const char* cspca_ranking_tie_rule(const cspca_ranking* r) { return r ? r->ranking.tie_rule.c_str() : nullptr; }

cspca_status cspca_ranking_order(const cspca_ranking* r, size_t* out) {
  return guard([&] {
    require(r && out, "null argument");
    std::copy(r->ranking.order.begin(), r->ranking.order.end(), out);
  });
}

cspca_status cspca_ranking_scores(const cspca_ranking* r, double* out) {
  return guard([&] {
    require(r && out, "null argument");
    std::copy(r->ranking.scores.begin(), r->ranking.scores.end(), out);
  });
}

cspca_status cspca_ranking_select(const cspca_ranking* r, size_t k, size_t* out) {
  return guard([&] {
    require(r && out, "null argument");
    const auto sel = cspca::select_top_k(r->ranking, k);
    std::copy(sel.begin(), sel.end(), out);
  });
}

cspca_status cspca_ranking_save(const cspca_ranking* r, const char* path) {
  return guard([&] {
    require(r && path, "null argument");
    cspca::save_results(r->ranking, path);
  });
}

cspca_status cspca_ranking_save_csv(const cspca_ranking* r, const cspca_matrix* names, size_t limit,
                                    const char* path) {
  return guard([&] {
    require(r && path, "null argument");
    if (names) require(names->names.size() == r->ranking.order.size(), "name count does not match ranking size");
    const std::vector<std::string> empty;
    cspca::write_file_atomic(path, cspca::ranking_csv(r->ranking, names ? names->names : empty, limit));
  });
}

void cspca_ranking_free(cspca_ranking* r) { delete r; }

cspca_status cspca_matrix_restrict(const cspca_matrix* x, const size_t* selected, size_t k, cspca_matrix** out) {
  return guard([&] {
    require(x && out, "null argument");
    *out = wrap(cspca::restrict_to_features(x->data, selection(selected, k)));
  });
}

cspca_status cspca_kmeans(const cspca_matrix* x, int c, uint64_t seed, int max_iter, int* labels_out) {
  return guard([&] {
    require(x && labels_out, "null argument");
    const auto labels = cspca::kmeans(x->data, c, seed, max_iter);
    std::copy(labels.labels.begin(), labels.labels.end(), labels_out);
  });
}

cspca_status cspca_accuracy(const long long* pred, const long long* truth, size_t n, double* out) {
  return guard([&] {
    require(out != nullptr, "null argument");
    *out = cspca::accuracy(raw_labels(pred, n), raw_labels(truth, n));
  });
}

cspca_status cspca_nmi(const long long* pred, const long long* truth, size_t n, double* out) {
  return guard([&] {
    require(out != nullptr, "null argument");
    *out = cspca::nmi(raw_labels(pred, n), raw_labels(truth, n));
  });
}

cspca_status cspca_evaluate_selection(const cspca_matrix* x, const size_t* selected, size_t k,
                                      const long long* truth, size_t n, int c, int runs, uint64_t base_seed,
                                      cspca_eval_report* out) {
  return guard([&] {
    require(x && out, "null argument");
    const auto rep =
        cspca::evaluate_selection(x->data, selection(selected, k), raw_labels(truth, n), c, runs, base_seed);
    *out = {rep.acc_mean, rep.acc_std, rep.nmi_mean, rep.nmi_std, rep.runs, base_seed};
  });
}

cspca_status cspca_eval_report_save(const cspca_eval_report* report, const char* path) {
  return guard([&] {
    require(report && path, "null argument");
    cspca::EvalReport rep;
    rep.acc_mean = report->acc_mean;
    rep.acc_std = report->acc_std;
    rep.nmi_mean = report->nmi_mean;
    rep.nmi_std = report->nmi_std;
    rep.runs = report->runs;
    for (int i = 0; i < report->runs; ++i) rep.seeds.push_back(report->base_seed + static_cast<uint64_t>(i));
    cspca::save_results(rep, path);
  });
}

void cspca_verify_options_default(cspca_verify_options* options) {
  if (!options) return;
  const cspca::VerifyOptions o;
  *options = {o.trials, o.seed, o.max_dim, o.inject_fault ? 1 : 0};
}

cspca_status cspca_verify(const cspca_verify_options* options, cspca_verify_report** out) {
  return guard([&] {
    require(options && out, "null argument");
    cspca::VerifyOptions o;
    o.trials = options->trials;
    o.seed = options->seed;
    o.max_dim = options->max_dim;
    o.inject_fault = options->inject_fault != 0;
    *out = new cspca_verify_report{cspca::run_verification(o)};
  });
}

size_t cspca_verify_count(const cspca_verify_report* r) { return r ? r->report.properties.size() : 0; }

#define CSPCA_PROPERTY(r, i) (r && i < r->report.properties.size() ? &r->report.properties[i] : nullptr)

const char* cspca_verify_name(const cspca_verify_report* r, size_t i) {
  auto* p = CSPCA_PROPERTY(r, i);
  return p ? p->name.c_str() : nullptr;
}
int cspca_verify_passed(const cspca_verify_report* r, size_t i) {
  auto* p = CSPCA_PROPERTY(r, i);
  return p && p->passed ? 1 : 0;
}
int cspca_verify_instances(const cspca_verify_report* r, size_t i) {
  auto* p = CSPCA_PROPERTY(r, i);
  return p ? p->instances : 0;
}
const char* cspca_verify_detail(const cspca_verify_report* r, size_t i) {
  auto* p = CSPCA_PROPERTY(r, i);
  return p ? p->detail.c_str() : nullptr;
}
const char* cspca_verify_replay(const cspca_verify_report* r, size_t i) {
  auto* p = CSPCA_PROPERTY(r, i);
  return p ? p->replay.c_str() : nullptr;
}

void cspca_verify_free(cspca_verify_report* r) { delete r; }

cspca_status cspca_write_text(const char* path, const char* text) {
  return guard([&] {
    require(path && text, "null argument");
    cspca::write_file_atomic(path, text);
  });
}

}  // extern "C"
