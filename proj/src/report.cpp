#include "qmcgs/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace qmcgs {

Evaluator::Evaluator(const Task& task, std::size_t budget)
    : task_(task), budget_(budget), best_(std::numeric_limits<double>::infinity()) {}

void Evaluator::observe(double loss) {
  improved_ = loss < best_;
  if (!improved_) return;
  best_ = loss;
  if (!trace_.empty() && trace_.back().sample == used_) {
    trace_.back().best_loss = loss;
  } else {
    trace_.push_back({used_, loss, nodes_, edges_});
  }
}

double Evaluator::evaluate(const Matrix& u) {
  if (exhausted()) throw std::logic_error("evaluation budget exhausted");
  ++used_;
  const double l = task_.loss(u);
  observe(l);
  return l;
}

double Evaluator::evaluate_aux(const Matrix& u) {
  ++aux_;
  const double l = task_.loss(u);
  observe(l);
  return l;
}

void Evaluator::note_graph(std::size_t nodes, std::size_t edges) {
  nodes_ = nodes;
  edges_ = edges;
  if (!trace_.empty() && trace_.back().sample == used_) {
    trace_.back().nodes = nodes;
    trace_.back().edges = edges;
  }
}

void Evaluator::finish(SearchReport& r) {
  if (trace_.empty() || trace_.back().sample != used_) {
    trace_.push_back({used_, best_, nodes_, edges_});
  }
  r.samples_used = used_;
  r.gradient_steps = gradient_steps_;
  r.aux_evaluations = aux_;
  r.best_loss = best_;
  r.trace = trace_;
}

double quality_score(double loss, double beta) {
  if (!(loss >= 0.0)) throw std::invalid_argument("quality_score: loss must be nonnegative");
  if (!(beta >= 0.0)) throw std::invalid_argument("quality_score: beta must be nonnegative");
  if (beta == 0.0) return 1.0;
  return std::exp(-beta * loss);
}

nlohmann::json report_to_json(const SearchReport& r) {
  nlohmann::json j;
  j["schema"] = "qmcgs.search_report.v1";
  j["method"] = r.method;
  j["seed"] = r.seed;
  j["samples_used"] = r.samples_used;
  j["gradient_steps"] = r.gradient_steps;
  j["aux_evaluations"] = r.aux_evaluations;
  j["success"] = r.success;
  j["best_loss"] = r.best_loss;
  j["nodes"] = r.nodes;
  j["edges"] = r.edges;
  j["result_length"] = r.result_length ? nlohmann::json(*r.result_length) : nlohmann::json(nullptr);
  j["result_circuit"] =
      r.result_circuit ? nlohmann::json(to_text(*r.result_circuit)) : nlohmann::json(nullptr);
  j["extra"] = r.extra;
  return j;
}

void write_trace_csv(std::ostream& os, const SearchReport& r) {
  os << "#schema=qmcgs.trace.v1\n";
  os << "sample,best_loss,nodes,edges\n";
  char buf[40];
  for (const auto& p : r.trace) {
    std::snprintf(buf, sizeof buf, "%.17g", p.best_loss);
    os << p.sample << "," << buf << "," << p.nodes << "," << p.edges << "\n";
  }
}

}  // namespace qmcgs
