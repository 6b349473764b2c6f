#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "qmcgs/datasets.hpp"

using namespace qmcgs;

namespace {
std::string data_file(const std::string& name) { return std::string(QMCGS_DATA_DIR) + "/" + name; }

bool have(const std::string& name) {
  if (std::filesystem::exists(data_file(name))) return true;
  MESSAGE("skipped: " << data_file(name) << " missing (scripts/fetch_datasets.py)");
  return false;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

TEST_SUITE("datasets") {
  TEST_CASE("layouts") {
    CHECK(dataset_layout("iris").bdim == 12);
    CHECK(dataset_layout("iris").qubits == 4);
    CHECK(dataset_layout("wine").bdim == 26);
    CHECK(dataset_layout("wine").qubits == 5);
    CHECK(dataset_layout("zoo").bdim == 16);
    CHECK(dataset_layout("zoo").classes == 7);
    CHECK_THROWS_AS(dataset_layout("mnist"), std::invalid_argument);
  }

  TEST_CASE("sha256 of known strings") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }

  TEST_CASE("binarizer: constant feature, sorted centers, idempotent") {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 30; ++i) rows.push_back({5.0, static_cast<double>(i % 10), i < 15 ? 0.0 : 100.0});
    Rng rng(1);
    const Binarizer b = kmeans_binarize(rows, 3, rng);
    REQUIRE(b.features.size() == 3);
    CHECK(b.features[0].width() == 1);
    CHECK(b.features[1].width() == 3);
    CHECK(b.features[2].width() == 2);
    for (const auto& f : b.features) CHECK(std::is_sorted(f.centers.begin(), f.centers.end()));
    for (const auto& r : rows) {
      const auto bits = b.apply(r);
      CHECK(bits.size() == b.dim());
      CHECK(std::count(bits.begin(), bits.end(), 1) == 3);
      CHECK(b.apply(r) == bits);
    }
    CHECK(b.apply(std::vector<double>{5.0, -100.0, 0.0})[1] == 1);
  }

  TEST_CASE("stratified split hits exact counts") {
    std::vector<int> labels;
    for (int c = 0; c < 3; ++c) labels.insert(labels.end(), 50, c);
    Rng rng(2);
    const Split s = stratified_split(labels, 3, 100, rng);
    CHECK(s.train.size() == 100);
    CHECK(s.test.size() == 50);
    std::map<int, int> per;
    for (auto i : s.train) ++per[labels[i]];
    CHECK(per[0] + per[1] + per[2] == 100);
    for (auto& [c, n] : per) CHECK((n == 33 || n == 34));
    std::set<std::size_t> all(s.train.begin(), s.train.end());
    all.insert(s.test.begin(), s.test.end());
    CHECK(all.size() == 150);
  }

  TEST_CASE("parse rejects malformed input") {
    CHECK_THROWS(parse_dataset("1,2,3\n", "iris"));
    CHECK_THROWS(parse_dataset("5.1,3.5,1.4,0.2,Iris-setosa\n", "mnist"));
  }

  TEST_CASE("iris file") {
    if (!have("iris.csv")) return;
    const std::string raw = slurp(data_file("iris.csv"));
    CHECK(sha256_hex(raw) == pinned_sources()[0].sha256);
    const Dataset d = parse_dataset(raw, "iris");
    CHECK(d.features.size() == 150);
    CHECK(d.n_classes == 3);
    Rng rng(0);
    const PreparedData p = prepare_classification(d, dataset_layout("iris"), rng);
    CHECK(p.binarizer.dim() == 12);
    CHECK(p.qubits == 4);
    CHECK(p.train.size() == 100);
    CHECK(p.test.size() == 50);
    for (const auto& s : p.train) CHECK(std::count(s.bits.begin(), s.bits.end(), 1) == 4);
    CHECK(p.metadata["bdim"] == 12);

    const Dataset again = parse_dataset(to_canonical_csv(d), "iris");
    CHECK(again.features == d.features);
    CHECK(again.labels == d.labels);
  }

  TEST_CASE("wine file") {
    if (!have("wine_data.csv")) return;
    const std::string raw = slurp(data_file("wine_data.csv"));
    CHECK(sha256_hex(raw) == pinned_sources()[1].sha256);
    const Dataset d = parse_dataset(raw, "wine");
    CHECK(d.features.size() == 178);
    Rng rng(0);
    const PreparedData p = prepare_classification(d, dataset_layout("wine"), rng);
    CHECK(p.binarizer.dim() == 26);
    CHECK(p.qubits == 5);
    CHECK(p.train.size() == 133);
  }

  TEST_CASE("zoo file") {
    if (!have("zoo.tab")) return;
    const std::string raw = slurp(data_file("zoo.tab"));
    CHECK(sha256_hex(raw) == pinned_sources()[2].sha256);
    const Dataset d = parse_dataset(raw, "zoo");
    CHECK(d.features.size() == 101);
    CHECK(d.n_classes == 7);
    Rng rng(0);
    const PreparedData p = prepare_classification(d, dataset_layout("zoo"), rng);
    CHECK(p.binarizer.dim() == 16);
    CHECK(p.qubits == 4);
    CHECK(p.train.size() == 75);
    std::set<int> seen(d.labels.begin(), d.labels.end());
    CHECK(seen.size() == 7);
  }
}
