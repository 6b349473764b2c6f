#pragma once

// Shared accounting for every search method: one sample per candidate circuit
// evaluation, charged through a single Evaluator, and the common report.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmcgs/circuit.hpp"
#include "qmcgs/tasks.hpp"

namespace qmcgs {

struct TracePoint {
  std::size_t sample = 0;
  double best_loss = 0.0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
};

struct SearchReport {
  std::string method;
  std::uint64_t seed = 0;
  std::size_t samples_used = 0;
  std::size_t gradient_steps = 0;
  // Loss evaluations not charged as samples (root scoring, re-anchored chains).
  std::size_t aux_evaluations = 0;
  bool success = false;
  double best_loss = 0.0;
  std::vector<TracePoint> trace;
  std::optional<Circuit> result_circuit;
  std::optional<std::size_t> result_length;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  // Task-specific figures (accuracies, rule, ...), copied verbatim into JSON.
  nlohmann::json extra = nlohmann::json::object();
};

class Evaluator {
 public:
  Evaluator(const Task& task, std::size_t budget);

  const Task& task() const { return task_; }
  std::size_t budget() const { return budget_; }
  std::size_t used() const { return used_; }
  bool exhausted() const { return used_ >= budget_; }

  // Charges one sample. Throws std::logic_error past the budget.
  double evaluate(const Matrix& u);
  double evaluate(const Circuit& c) { return evaluate(qmcgs::evaluate(c)); }
  // Uncharged evaluation, counted as auxiliary.
  double evaluate_aux(const Matrix& u);

  void add_gradient_steps(std::size_t n) { gradient_steps_ += n; }
  std::size_t gradient_steps() const { return gradient_steps_; }
  std::size_t aux_evaluations() const { return aux_; }

  // Graph size shown in trace rows; updates the row of the current sample.
  void note_graph(std::size_t nodes, std::size_t edges);

  double best_loss() const { return best_; }
  bool improved_last() const { return improved_; }
  const std::vector<TracePoint>& trace() const { return trace_; }
  // Fills the accounting fields of a report and closes the trace with a row
  // for the final sample.
  void finish(SearchReport& r);

 private:
  void observe(double loss);

  const Task& task_;
  std::size_t budget_;
  std::size_t used_ = 0;
  std::size_t gradient_steps_ = 0;
  std::size_t aux_ = 0;
  std::size_t nodes_ = 0;
  std::size_t edges_ = 0;
  double best_;
  bool improved_ = false;
  std::vector<TracePoint> trace_;
};

nlohmann::json report_to_json(const SearchReport& r);
void write_trace_csv(std::ostream& os, const SearchReport& r);

// s = exp(-beta * loss). Throws for negative loss or beta.
double quality_score(double loss, double beta);

}  // namespace qmcgs
