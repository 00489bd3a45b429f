#include "cspca/results.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cspca/error.hpp"

namespace cspca {

namespace {

using Json = nlohmann::ordered_json;

Json objective_json(const ObjectiveValue& v) {
  Json j;
  j["total"] = v.total;
  j["loss"] = v.loss;
  j["l21"] = v.l21_penalty;
  j["trace"] = v.trace_penalty;
  return j;
}

Json trace_json(const SolverTrace& trace) {
  Json j;
  j["type"] = "solver_trace";
  j["iterations"] = trace.iterations;
  j["converged"] = trace.converged;
  j["stop_reason"] = to_string(trace.stop_reason);
  j["stationarity"] = trace.stationarity;
  j["alpha"] = trace.objectives.empty() ? 0.0 : trace.objectives.front().alpha;
  j["beta"] = trace.objectives.empty() ? 0.0 : trace.objectives.front().beta;
  Json objs = Json::array();
  for (const auto& o : trace.objectives) objs.push_back(objective_json(o));
  j["objectives"] = std::move(objs);
  return j;
}

Json ranking_json(const FeatureRanking& r) {
  Json j;
  j["type"] = "feature_ranking";
  j["tie_rule"] = r.tie_rule;
  j["scores"] = r.scores;
  j["order"] = r.order;
  return j;
}

Json report_json(const EvalReport& r) {
  Json j;
  j["type"] = "eval_report";
  j["runs"] = r.runs;
  j["acc_mean"] = r.acc_mean;
  j["acc_std"] = r.acc_std;
  j["nmi_mean"] = r.nmi_mean;
  j["nmi_std"] = r.nmi_std;
  j["seeds"] = r.seeds;
  return j;
}

Json config_json(const SolverConfig& c) {
  Json j;
  j["type"] = "solver_config";
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["epsilon"] = c.epsilon;
  j["tol"] = c.tol;
  j["max_iter"] = c.max_iter;
  j["init"] = describe(c.init);
  j["continuation"] = c.continuation;
  j["stationarity_tol"] = c.stationarity_tol;
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json read_json(const std::filesystem::path& path, const char* type) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  Json j = Json::parse(buf.str(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) fail(ErrorKind::Parse, path.string() + ": not a JSON object");
  if (!j.contains("type") || j["type"] != type) {
    fail(ErrorKind::Parse, path.string() + ": expected type \"" + std::string(type) + "\"");
  }
  return j;
}

template <typename F>
auto guarded(const std::filesystem::path& path, F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    fail(ErrorKind::Parse, path.string() + ": " + e.what());
  }
}

}  // namespace

std::string to_text(const SolverTrace& trace) { return dump(trace_json(trace)); }
std::string to_text(const FeatureRanking& ranking) { return dump(ranking_json(ranking)); }
std::string to_text(const EvalReport& report) { return dump(report_json(report)); }
std::string to_text(const SolverConfig& config) { return dump(config_json(config)); }

void save_results(const SolverTrace& trace, const std::filesystem::path& path) {
  write_file_atomic(path, to_text(trace));
}
void save_results(const FeatureRanking& ranking, const std::filesystem::path& path) {
  write_file_atomic(path, to_text(ranking));
}
void save_results(const EvalReport& report, const std::filesystem::path& path) {
  write_file_atomic(path, to_text(report));
}

SolverTrace load_trace(const std::filesystem::path& path) {
  const Json j = read_json(path, "solver_trace");
  return guarded(path, [&] {
    SolverTrace t;
    t.iterations = j.at("iterations").get<int>();
    t.converged = j.at("converged").get<bool>();
    const auto reason = j.at("stop_reason").get<std::string>();
    if (reason == to_string(StopReason::ToleranceReached)) {
      t.stop_reason = StopReason::ToleranceReached;
    } else if (reason == to_string(StopReason::MaxIterations)) {
      t.stop_reason = StopReason::MaxIterations;
    } else if (reason == to_string(StopReason::Stalled)) {
      t.stop_reason = StopReason::Stalled;
    } else {
      fail(ErrorKind::Parse, path.string() + ": unknown stop reason " + reason);
    }
    t.stationarity = j.at("stationarity").get<double>();
    const double alpha = j.at("alpha").get<double>();
    const double beta = j.at("beta").get<double>();
    for (const auto& o : j.at("objectives")) {
      ObjectiveValue v;
      v.total = o.at("total").get<double>();
      v.loss = o.at("loss").get<double>();
      v.l21_penalty = o.at("l21").get<double>();
      v.trace_penalty = o.at("trace").get<double>();
      v.alpha = alpha;
      v.beta = beta;
      t.objectives.push_back(v);
    }
    return t;
  });
}

FeatureRanking load_ranking(const std::filesystem::path& path) {
  const Json j = read_json(path, "feature_ranking");
  return guarded(path, [&] {
    FeatureRanking r;
    r.tie_rule = j.at("tie_rule").get<std::string>();
    r.scores = j.at("scores").get<std::vector<double>>();
    r.order = j.at("order").get<std::vector<std::size_t>>();
    if (r.order.size() != r.scores.size()) fail(ErrorKind::Parse, path.string() + ": order and scores differ in length");
    return r;
  });
}

EvalReport load_eval_report(const std::filesystem::path& path) {
  const Json j = read_json(path, "eval_report");
  return guarded(path, [&] {
    EvalReport r;
    r.runs = j.at("runs").get<int>();
    r.acc_mean = j.at("acc_mean").get<double>();
    r.acc_std = j.at("acc_std").get<double>();
    r.nmi_mean = j.at("nmi_mean").get<double>();
    r.nmi_std = j.at("nmi_std").get<double>();
    r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    return r;
  });
}

std::string trace_csv(const SolverTrace& trace) {
  std::ostringstream out;
  out << "iteration,total,loss,l21,trace\n";
  for (std::size_t i = 0; i < trace.objectives.size(); ++i) {
    const auto& o = trace.objectives[i];
    out << i << ',' << format_double(o.total) << ',' << format_double(o.loss) << ','
        << format_double(o.l21_penalty) << ',' << format_double(o.trace_penalty) << '\n';
  }
  return out.str();
}

std::string ranking_csv(const FeatureRanking& ranking, const std::vector<std::string>& names,
                        std::size_t limit) {
  std::ostringstream out;
  out << "rank,index,name,score\n";
  const std::size_t count = limit == 0 ? ranking.order.size() : std::min(limit, ranking.order.size());
  for (std::size_t r = 0; r < count; ++r) {
    const std::size_t idx = ranking.order[r];
    const std::string name = idx < names.size() ? names[idx] : "f" + std::to_string(idx);
    out << r + 1 << ',' << idx << ',' << name << ',' << format_double(ranking.scores[idx]) << '\n';
  }
  return out.str();
}

}  // namespace cspca
