#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cspca/eval.hpp"
#include "cspca/features.hpp"
#include "cspca/solver.hpp"

namespace cspca {

// Structured-text result files. The format is JSON with a fixed key order per
// object type and doubles printed with round-trip precision; each file has a
// top-level "type" tag naming the object it holds.

std::string to_text(const SolverTrace& trace);
std::string to_text(const FeatureRanking& ranking);
std::string to_text(const EvalReport& report);
std::string to_text(const SolverConfig& config);

void save_results(const SolverTrace& trace, const std::filesystem::path& path);
void save_results(const FeatureRanking& ranking, const std::filesystem::path& path);
void save_results(const EvalReport& report, const std::filesystem::path& path);

SolverTrace load_trace(const std::filesystem::path& path);
FeatureRanking load_ranking(const std::filesystem::path& path);
EvalReport load_eval_report(const std::filesystem::path& path);

/// iteration,total,loss,l21,trace; one row per objective entry.
std::string trace_csv(const SolverTrace& trace);

/// rank,index,name,score for the first `limit` ranked features (0 = all).
/// Names default to f<index> when `names` is empty.
std::string ranking_csv(const FeatureRanking& ranking, const std::vector<std::string>& names,
                        std::size_t limit);

}  // namespace cspca
