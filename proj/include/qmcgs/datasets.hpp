#pragma once

// Tabular datasets for the classification task: loading (UCI layouts, the
// CSV copies shipped with scikit-learn, or this library's canonical CSV),
// per-feature k-means binarization and a stratified split.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qmcgs/random.hpp"
#include "qmcgs/tasks.hpp"

namespace qmcgs {

struct Dataset {
  std::string name;
  std::vector<std::vector<double>> features;
  std::vector<int> labels;  // 0-based
  int n_classes = 0;
};

// Shape of a known dataset: raw dimension, binary dimension, register size,
// training-set size, class count, and the bins per feature (0: indicator bit,
// value > 0).
struct DatasetLayout {
  std::string name;
  std::size_t dim = 0;
  std::size_t rows = 0;
  std::size_t bdim = 0;
  int qubits = 0;
  std::size_t train = 0;
  int classes = 0;
  int k_bins = 3;
};

// iris, wine, zoo. Throws std::invalid_argument for other names.
const DatasetLayout& dataset_layout(std::string_view name);
std::span<const DatasetLayout> dataset_layouts();

// Column maps:
//   iris  UCI iris.data: 4 features, class name last (Iris-setosa, ...)
//   wine  UCI wine.data: class 1..3 first, 13 features
//   zoo   UCI zoo.data: animal name first, 16 attributes, type 1..7 last
// The scikit-learn copies (header "N,F,class names...", 0-based label last)
// the Orange zoo.tab copy (tab separated, three header rows, type name last,
// mapped to UCI type order) and the canonical CSV written by `ingest` are
// recognised as well.
Dataset parse_dataset(std::string_view text, std::string_view name);
Dataset load_dataset(const std::string& path, std::string_view name);

// "#schema=qmcgs.dataset.v1", header "f0,...,label", one row per sample.
std::string to_canonical_csv(const Dataset& d);

std::string sha256_hex(std::string_view bytes);
// Known source files and their SHA-256, for ingest validation.
struct PinnedSource {
  std::string dataset;
  std::string file;
  std::string sha256;
};
std::span<const PinnedSource> pinned_sources();

struct FeatureBins {
  bool indicator = false;       // single bit: value > 0
  std::vector<double> centers;  // ascending; empty for indicator features
  int requested_k = 0;
  std::size_t width() const { return indicator ? 1 : centers.size(); }
};

struct Binarizer {
  std::vector<FeatureBins> features;
  std::size_t dim() const;
  // One-hot of the nearest center per feature (ties: lower center).
  std::vector<int> apply(std::span<const double> x) const;
  nlohmann::json to_json() const;
};

// 1-D k-means per feature on the given rows: k-means++ seeding, Lloyd
// iterations until assignments settle or 100 iterations. A feature with
// fewer than k distinct values gets one bin per distinct value.
Binarizer kmeans_binarize(std::span<const std::vector<double>> rows, int k, Rng& rng);
Binarizer fit_binarizer(std::span<const std::vector<double>> rows, const DatasetLayout& layout,
                        Rng& rng);

// Stratified split with exactly n_train training rows: each class gets its
// proportional share (largest remainders), rows shuffled within classes.
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};
Split stratified_split(std::span<const int> labels, int n_classes, std::size_t n_train, Rng& rng);

struct PreparedData {
  Binarizer binarizer;
  std::vector<LabeledSample> train;
  std::vector<LabeledSample> test;
  int qubits = 0;
  nlohmann::json metadata;
};

// Split, fit the binarizer on the training rows only, binarize both parts.
PreparedData prepare_classification(const Dataset& d, const DatasetLayout& layout, Rng& rng);

}  // namespace qmcgs
