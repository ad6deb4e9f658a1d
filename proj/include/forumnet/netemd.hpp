#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "forumnet/distribution.hpp"
#include "forumnet/orbits.hpp"

namespace forumnet {

/// Ordered, non-empty set of orbit ids used in a comparison.
class OrbitSet {
 public:
  /// All 15 orbits.
  OrbitSet();
  explicit OrbitSet(std::vector<int> ids);

  std::span<const int> ids() const { return ids_; }
  std::size_t size() const { return ids_.size(); }

 private:
  std::vector<int> ids_;
};

/// Dense row-major real matrix with named columns: one row per node, one
/// column per feature (an orbit, or a reconstructed orbit after PCA).
struct FeatureMatrix {
  std::size_t rows = 0;
  std::vector<std::string> names;
  std::vector<double> values;

  std::size_t cols() const { return names.size(); }
  double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
  std::vector<double> column(std::size_t c) const;
};

FeatureMatrix orbit_features(const OrbitMatrix& m, const OrbitSet& orbits);

struct NetEmdResult {
  double total = 0.0;
  std::vector<double> per_feature;
};

/// Mean over orbits of the EMD* between the two per-node count distributions.
NetEmdResult netemd(const OrbitMatrix& a, const OrbitMatrix& b, const OrbitSet& orbits);
/// Same, treating every column as a feature; column names must agree.
NetEmdResult netemd(const FeatureMatrix& a, const FeatureMatrix& b);

/// Symmetric all-pairs distances with zero diagonal, plus one matrix per feature.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::vector<std::string> labels, std::vector<std::string> feature_names);

  std::size_t size() const { return labels_.size(); }
  std::span<const std::string> labels() const { return labels_; }
  std::span<const std::string> feature_names() const { return feature_names_; }

  double operator()(std::size_t i, std::size_t j) const { return values_[i * size() + j]; }
  double feature(std::size_t f, std::size_t i, std::size_t j) const {
    return per_feature_[f][i * size() + j];
  }
  /// Writes (i, j) and (j, i).
  void set(std::size_t i, std::size_t j, double value);
  void set_feature(std::size_t f, std::size_t i, std::size_t j, double value);

  /// Relabels the windows (the matrix contents are unchanged).
  void set_labels(std::vector<std::string> labels);

 private:
  std::vector<std::string> labels_;
  std::vector<std::string> feature_names_;
  std::vector<double> values_;
  std::vector<std::vector<double>> per_feature_;
};

/// All pairwise NetEmd values; pair work is spread over `workers` threads.
DistanceMatrix netemd_matrix(std::span<const OrbitMatrix> collection, const OrbitSet& orbits,
                             std::vector<std::string> labels = {}, unsigned workers = 0);
DistanceMatrix netemd_matrix(std::span<const FeatureMatrix> collection,
                             std::vector<std::string> labels = {}, unsigned workers = 0);

struct PcaReconstruction {
  std::vector<FeatureMatrix> networks;  // log(1+x) features projected and reconstructed
  std::size_t components = 0;
  std::vector<double> eigenvalues;      // descending, population covariance
  bool degenerate = false;              // pooled rows were all identical
};

/// Pools log(1+x) orbit rows from every network, centers them, keeps the
/// fewest principal components reaching `explained_variance` of the total,
/// and maps each row back to the full orbit dimension.
PcaReconstruction pca_reconstruct(std::span<const OrbitMatrix> collection, const OrbitSet& orbits,
                                  double explained_variance);

/// The log(1+x) features that pca_reconstruct starts from.
std::vector<FeatureMatrix> log_features(std::span<const OrbitMatrix> collection, const OrbitSet& orbits);

DistanceMatrix pca_netemd_matrix(std::span<const OrbitMatrix> collection, const OrbitSet& orbits,
                                 double explained_variance, std::vector<std::string> labels = {},
                                 unsigned workers = 0);

/// Header row and first column carry the labels.
void write_distance_csv(std::ostream& out, const DistanceMatrix& d);
/// Same layout for the per-feature matrix f.
void write_feature_distance_csv(std::ostream& out, const DistanceMatrix& d, std::size_t f);
/// Reads the layout produced by write_distance_csv (no per-feature stack).
DistanceMatrix read_distance_csv(std::istream& in);

}  // namespace forumnet
