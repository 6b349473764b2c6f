#include "qmcgs/datasets.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace qmcgs {

namespace {

const std::array<DatasetLayout, 3> kLayouts{{
    {"iris", 4, 150, 12, 4, 100, 3, 3},
    {"wine", 13, 178, 26, 5, 133, 3, 2},
    {"zoo", 16, 101, 16, 4, 75, 7, 0},
}};

const std::array<PinnedSource, 3> kPinned{{
    {"iris", "iris.csv", "f13ffa8fdd56fd8e6c8d16d4081a3fbd3114bcd0aae4256c43205169cd9d1449"},
    {"wine", "wine_data.csv", "10e8a802908b34f86e5da8ce962f3c806694bc98450a18f61851af59f324bede"},
    {"zoo", "zoo.tab", "4cbf8af5bda8edcb35b37a4cae3ac42544abcd84ecfa9e21dd3da94f5f6758ff"},
}};

// Type names of the Orange copy of zoo, in UCI type order 1..7.
const std::array<std::string_view, 7> kZooTypes{"mammal", "bird",   "reptile",     "fish",
                                                 "amphibian", "insect", "invertebrate"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double to_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("line " + std::to_string(line) + ": '" + s + "' is not a number");
  }
}

int to_int(const std::string& s, std::size_t line) {
  const double v = to_double(s, line);
  if (v != std::floor(v)) {
    throw std::invalid_argument("line " + std::to_string(line) + ": '" + s + "' is not an integer");
  }
  return static_cast<int>(v);
}

bool is_number(const std::string& s) {
  if (s.empty()) return false;
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

void finish(Dataset& d, const DatasetLayout& layout) {
  if (d.features.size() != layout.rows) {
    throw std::invalid_argument(layout.name + ": expected " + std::to_string(layout.rows) +
                                " rows, found " + std::to_string(d.features.size()));
  }
  d.n_classes = layout.classes;
  for (int l : d.labels) {
    if (l < 0 || l >= layout.classes) {
      throw std::invalid_argument(layout.name + ": class label " + std::to_string(l) + " out of range");
    }
  }
}

}  // namespace

std::span<const DatasetLayout> dataset_layouts() { return kLayouts; }

const DatasetLayout& dataset_layout(std::string_view name) {
  for (const auto& l : kLayouts) {
    if (l.name == name) return l;
  }
  throw std::invalid_argument("unknown dataset '" + std::string(name) + "' (iris, wine, zoo)");
}

std::span<const PinnedSource> pinned_sources() { return kPinned; }

Dataset parse_dataset(std::string_view text, std::string_view name) {
  const DatasetLayout& layout = dataset_layout(name);
  Dataset d;
  d.name = layout.name;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  enum class Format { Unknown, Canonical, Sklearn, Uci, OrangeTab } format = Format::Unknown;
  std::map<std::string, int> class_names;  // UCI iris
  std::vector<std::pair<std::vector<double>, std::string>> named_rows;

  std::size_t tab_headers = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (format == Format::Unknown && line.find('\t') != std::string::npos) {
      if (layout.name != "zoo") {
        throw std::invalid_argument(layout.name + ": tab-separated input is only read for zoo");
      }
      format = Format::OrangeTab;
    }
    if (format == Format::OrangeTab) {
      // Three header rows: names, types, flags.
      if (tab_headers < 3) {
        ++tab_headers;
        continue;
      }
      std::vector<std::string> cells;
      std::size_t start = 0;
      for (std::size_t pos; (pos = raw.find('\t', start)) != std::string::npos; start = pos + 1) {
        cells.push_back(trim(std::string_view(raw).substr(start, pos - start)));
      }
      cells.push_back(trim(std::string_view(raw).substr(start)));
      if (cells.size() != 18) throw std::invalid_argument("line " + std::to_string(line_no) + ": zoo rows have 18 columns");
      std::vector<double> x;
      for (std::size_t j = 1; j < 17; ++j) x.push_back(to_double(cells[j], line_no));
      const auto it = std::find(kZooTypes.begin(), kZooTypes.end(), cells[17]);
      if (it == kZooTypes.end()) throw std::invalid_argument("line " + std::to_string(line_no) + ": unknown zoo type '" + cells[17] + "'");
      d.features.push_back(std::move(x));
      d.labels.push_back(static_cast<int>(it - kZooTypes.begin()));
      continue;
    }
    if (format == Format::Unknown) {
      if (line.rfind("#schema=qmcgs.dataset.v1", 0) == 0) {
        format = Format::Canonical;
        continue;
      }
      const auto cells = split_csv(line);
      if (cells.size() >= 2 && is_number(cells[0]) && is_number(cells[1]) &&
          cells.size() == 2 + static_cast<std::size_t>(layout.classes) && !is_number(cells.back())) {
        format = Format::Sklearn;
        if (to_int(cells[1], line_no) != static_cast<int>(layout.dim)) {
          throw std::invalid_argument(layout.name + ": header declares " + cells[1] + " features");
        }
        continue;
      }
      format = Format::Uci;
    }
    if (line[0] == '#') continue;
    const auto cells = split_csv(line);
    if (format == Format::Canonical) {
      if (cells.front() == "f0") continue;  // header
      if (cells.size() != layout.dim + 1) {
        throw std::invalid_argument("line " + std::to_string(line_no) + ": wrong column count");
      }
      std::vector<double> x;
      for (std::size_t j = 0; j < layout.dim; ++j) x.push_back(to_double(cells[j], line_no));
      d.features.push_back(std::move(x));
      d.labels.push_back(to_int(cells.back(), line_no));
    } else if (format == Format::Sklearn) {
      if (cells.size() != layout.dim + 1) {
        throw std::invalid_argument("line " + std::to_string(line_no) + ": wrong column count");
      }
      std::vector<double> x;
      for (std::size_t j = 0; j < layout.dim; ++j) x.push_back(to_double(cells[j], line_no));
      d.features.push_back(std::move(x));
      d.labels.push_back(to_int(cells.back(), line_no));
    } else if (layout.name == "iris") {
      if (cells.size() != 5) throw std::invalid_argument("line " + std::to_string(line_no) + ": iris rows have 5 columns");
      std::vector<double> x;
      for (std::size_t j = 0; j < 4; ++j) x.push_back(to_double(cells[j], line_no));
      named_rows.emplace_back(std::move(x), cells[4]);
      class_names[cells[4]] = 0;
    } else if (layout.name == "wine") {
      if (cells.size() != 14) throw std::invalid_argument("line " + std::to_string(line_no) + ": wine rows have 14 columns");
      std::vector<double> x;
      for (std::size_t j = 1; j < 14; ++j) x.push_back(to_double(cells[j], line_no));
      d.features.push_back(std::move(x));
      d.labels.push_back(to_int(cells[0], line_no) - 1);
    } else {
      if (cells.size() != 18) throw std::invalid_argument("line " + std::to_string(line_no) + ": zoo rows have 18 columns");
      std::vector<double> x;
      for (std::size_t j = 1; j < 17; ++j) x.push_back(to_double(cells[j], line_no));
      d.features.push_back(std::move(x));
      d.labels.push_back(to_int(cells[17], line_no) - 1);
    }
  }
  if (!named_rows.empty()) {
    if (class_names.size() != static_cast<std::size_t>(layout.classes)) {
      throw std::invalid_argument("iris: expected 3 class names");
    }
    int next = 0;
    for (auto& [k, v] : class_names) v = next++;  // alphabetical order
    for (auto& [x, c] : named_rows) {
      d.features.push_back(std::move(x));
      d.labels.push_back(class_names.at(c));
    }
  }
  finish(d, layout);
  return d;
}

Dataset load_dataset(const std::string& path, std::string_view name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str(), name);
}

std::string to_canonical_csv(const Dataset& d) {
  std::ostringstream os;
  os << "#schema=qmcgs.dataset.v1\n";
  const std::size_t dim = d.features.empty() ? 0 : d.features[0].size();
  for (std::size_t j = 0; j < dim; ++j) os << "f" << j << ",";
  os << "label\n";
  char buf[32];
  for (std::size_t i = 0; i < d.features.size(); ++i) {
    for (double v : d.features[i]) {
      std::snprintf(buf, sizeof buf, "%.15g", v);
      os << buf << ",";
    }
    os << d.labels[i] << "\n";
  }
  return os.str();
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::size_t Binarizer::dim() const {
  std::size_t n = 0;
  for (const auto& f : features) n += f.width();
  return n;
}

std::vector<int> Binarizer::apply(std::span<const double> x) const {
  if (x.size() != features.size()) throw DimensionError("binarizer: feature count mismatch");
  std::vector<int> bits;
  bits.reserve(dim());
  for (std::size_t j = 0; j < features.size(); ++j) {
    const auto& f = features[j];
    if (f.indicator) {
      bits.push_back(x[j] > 0.0 ? 1 : 0);
      continue;
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < f.centers.size(); ++c) {
      if (std::abs(x[j] - f.centers[c]) < std::abs(x[j] - f.centers[best])) best = c;
    }
    for (std::size_t c = 0; c < f.centers.size(); ++c) bits.push_back(c == best ? 1 : 0);
  }
  return bits;
}

nlohmann::json Binarizer::to_json() const {
  nlohmann::json feats = nlohmann::json::array();
  for (const auto& f : features) {
    nlohmann::json j;
    j["kind"] = f.indicator ? "indicator" : "kmeans";
    j["requested_k"] = f.requested_k;
    j["bins"] = f.width();
    j["centers"] = f.centers;
    feats.push_back(j);
  }
  return feats;
}

namespace {

std::vector<double> kmeans_1d(std::vector<double> values, int k, Rng& rng) {
  std::vector<double> distinct = values;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() <= static_cast<std::size_t>(k)) return distinct;

  // k-means++ seeding.
  std::vector<double> centers{values[uniform_index(rng, values.size())]};
  std::vector<double> d2(values.size());
  while (centers.size() < static_cast<std::size_t>(k)) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      double m = std::numeric_limits<double>::infinity();
      for (double c : centers) m = std::min(m, (values[i] - c) * (values[i] - c));
      d2[i] = m;
    }
    centers.push_back(values[categorical(rng, d2)]);
  }
  std::sort(centers.begin(), centers.end());

  std::vector<std::size_t> assign(values.size(), 0);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = iter == 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::size_t best = 0;
      for (std::size_t c = 1; c < centers.size(); ++c) {
        if (std::abs(values[i] - centers[c]) < std::abs(values[i] - centers[best])) best = c;
      }
      if (best != assign[i]) changed = true;
      assign[i] = best;
    }
    if (!changed) break;
    std::vector<double> sum(centers.size(), 0.0);
    std::vector<std::size_t> count(centers.size(), 0);
    for (std::size_t i = 0; i < values.size(); ++i) {
      sum[assign[i]] += values[i];
      ++count[assign[i]];
    }
    for (std::size_t c = 0; c < centers.size(); ++c) {
      if (count[c] > 0) centers[c] = sum[c] / static_cast<double>(count[c]);
    }
    std::sort(centers.begin(), centers.end());
  }
  return centers;
}

}  // namespace

Binarizer kmeans_binarize(std::span<const std::vector<double>> rows, int k, Rng& rng) {
  if (k < 2) throw std::invalid_argument("k must be at least 2");
  if (rows.empty()) throw std::invalid_argument("no rows to binarize");
  Binarizer b;
  const std::size_t dim = rows[0].size();
  for (std::size_t j = 0; j < dim; ++j) {
    std::vector<double> col;
    for (const auto& r : rows) {
      if (r.size() != dim) throw DimensionError("ragged feature rows");
      if (!std::isfinite(r[j])) throw std::invalid_argument("non-finite feature value");
      col.push_back(r[j]);
    }
    FeatureBins f;
    f.requested_k = k;
    f.centers = kmeans_1d(std::move(col), k, rng);
    b.features.push_back(std::move(f));
  }
  return b;
}

Binarizer fit_binarizer(std::span<const std::vector<double>> rows, const DatasetLayout& layout,
                        Rng& rng) {
  if (layout.k_bins > 0) return kmeans_binarize(rows, layout.k_bins, rng);
  Binarizer b;
  for (std::size_t j = 0; j < layout.dim; ++j) {
    FeatureBins f;
    f.indicator = true;
    b.features.push_back(f);
  }
  return b;
}

Split stratified_split(std::span<const int> labels, int n_classes, std::size_t n_train, Rng& rng) {
  if (n_train > labels.size()) throw std::invalid_argument("training size exceeds the data");
  std::vector<std::vector<std::size_t>> by_class(n_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= n_classes) throw std::out_of_range("label out of range");
    by_class[labels[i]].push_back(i);
  }
  const double n = static_cast<double>(labels.size());
  std::vector<std::size_t> take(n_classes);
  std::vector<std::pair<double, int>> remainder;
  std::size_t assigned = 0;
  for (int c = 0; c < n_classes; ++c) {
    const double share = static_cast<double>(by_class[c].size()) * static_cast<double>(n_train) / n;
    take[c] = static_cast<std::size_t>(std::floor(share));
    assigned += take[c];
    remainder.emplace_back(share - std::floor(share), c);
  }
  std::stable_sort(remainder.begin(), remainder.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; assigned < n_train; ++r) {
    const int c = remainder[r % remainder.size()].second;
    if (take[c] < by_class[c].size()) {
      ++take[c];
      ++assigned;
    }
  }
  Split s;
  for (int c = 0; c < n_classes; ++c) {
    auto& idx = by_class[c];
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[uniform_index(rng, i)]);
    s.train.insert(s.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take[c]));
    s.test.insert(s.test.end(), idx.begin() + static_cast<std::ptrdiff_t>(take[c]), idx.end());
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

PreparedData prepare_classification(const Dataset& d, const DatasetLayout& layout, Rng& rng) {
  const Split split = stratified_split(d.labels, layout.classes, layout.train, rng);
  std::vector<std::vector<double>> train_rows;
  for (std::size_t i : split.train) train_rows.push_back(d.features[i]);
  PreparedData p;
  p.binarizer = fit_binarizer(train_rows, layout, rng);
  const std::size_t bdim = p.binarizer.dim();
  int q = 0;
  while ((std::size_t{1} << q) < bdim) ++q;
  p.qubits = q;
  for (std::size_t i : split.train) p.train.push_back({p.binarizer.apply(d.features[i]), d.labels[i]});
  for (std::size_t i : split.test) p.test.push_back({p.binarizer.apply(d.features[i]), d.labels[i]});

  nlohmann::json m;
  m["schema"] = "qmcgs.binarization.v1";
  m["dataset"] = layout.name;
  m["dim"] = layout.dim;
  m["bdim"] = bdim;
  m["qubits"] = q;
  m["train"] = p.train.size();
  m["test"] = p.test.size();
  m["classes"] = layout.classes;
  m["k"] = layout.k_bins;
  m["features"] = p.binarizer.to_json();
  p.metadata = m;
  return p;
}

}  // namespace qmcgs
