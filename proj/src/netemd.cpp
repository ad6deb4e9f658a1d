#include "forumnet/netemd.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include <Eigen/Dense>
#include <spdlog/spdlog.h>

#include "forumnet/error.hpp"
#include "forumnet/parallel.hpp"

namespace forumnet {

OrbitSet::OrbitSet() : ids_(orbits_up_to(4)) {}

OrbitSet::OrbitSet(std::vector<int> ids) : ids_(std::move(ids)) {
  if (ids_.empty()) throw ValidationError("orbit set must not be empty");
  for (int o : ids_)
    if (o < 0 || o >= kOrbitCount) throw ValidationError("orbit id " + std::to_string(o) + " out of range");
  auto sorted = ids_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ValidationError("orbit set has repeated ids");
}

std::vector<double> FeatureMatrix::column(std::size_t c) const {
  std::vector<double> out(rows);
  for (std::size_t r = 0; r < rows; ++r) out[r] = at(r, c);
  return out;
}

FeatureMatrix orbit_features(const OrbitMatrix& m, const OrbitSet& orbits) {
  FeatureMatrix f;
  f.rows = m.node_count();
  for (int o : orbits.ids()) {
    if (!m.has_orbit(o)) throw ValidationError("orbit matrix lacks orbit " + std::to_string(o));
    f.names.push_back("o" + std::to_string(o));
  }
  f.values.resize(f.rows * f.cols());
  for (std::size_t r = 0; r < f.rows; ++r)
    for (std::size_t c = 0; c < f.cols(); ++c)
      f.values[r * f.cols() + c] = static_cast<double>(m.at(r, orbits.ids()[c]));
  return f;
}

namespace {

std::vector<EmpiricalDistribution> column_distributions(const FeatureMatrix& f) {
  if (f.rows == 0) throw ValidationError("cannot compare a network with no nodes");
  std::vector<EmpiricalDistribution> out;
  out.reserve(f.cols());
  for (std::size_t c = 0; c < f.cols(); ++c) out.push_back(make_distribution(f.column(c)));
  return out;
}

NetEmdResult compare(std::span<const EmpiricalDistribution> a, std::span<const EmpiricalDistribution> b) {
  NetEmdResult r;
  r.per_feature.resize(a.size());
  double sum = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    r.per_feature[c] = emd_star(a[c], b[c]).distance;
    sum += r.per_feature[c];
  }
  r.total = sum / static_cast<double>(a.size());
  return r;
}

std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::to_string(i));
  return out;
}

}  // namespace

NetEmdResult netemd(const FeatureMatrix& a, const FeatureMatrix& b) {
  if (a.names != b.names) throw ValidationError("feature columns differ between networks");
  if (a.cols() == 0) throw ValidationError("no features to compare");
  return compare(column_distributions(a), column_distributions(b));
}

NetEmdResult netemd(const OrbitMatrix& a, const OrbitMatrix& b, const OrbitSet& orbits) {
  return netemd(orbit_features(a, orbits), orbit_features(b, orbits));
}

DistanceMatrix::DistanceMatrix(std::vector<std::string> labels, std::vector<std::string> feature_names)
    : labels_(std::move(labels)), feature_names_(std::move(feature_names)) {
  const std::size_t n = labels_.size();
  values_.assign(n * n, 0.0);
  per_feature_.assign(feature_names_.size(), std::vector<double>(n * n, 0.0));
}

void DistanceMatrix::set(std::size_t i, std::size_t j, double value) {
  values_[i * size() + j] = value;
  values_[j * size() + i] = value;
}

void DistanceMatrix::set_feature(std::size_t f, std::size_t i, std::size_t j, double value) {
  per_feature_[f][i * size() + j] = value;
  per_feature_[f][j * size() + i] = value;
}

void DistanceMatrix::set_labels(std::vector<std::string> labels) {
  if (labels.size() != labels_.size()) throw ValidationError("label count does not match matrix size");
  labels_ = std::move(labels);
}

DistanceMatrix netemd_matrix(std::span<const FeatureMatrix> collection, std::vector<std::string> labels,
                             unsigned workers) {
  const std::size_t n = collection.size();
  if (n < 2) throw ValidationError("need at least 2 networks for a distance matrix");
  if (labels.empty()) labels = default_labels(n);
  if (labels.size() != n) throw ValidationError("label count does not match network count");
  for (const auto& f : collection)
    if (f.names != collection[0].names) throw ValidationError("feature columns differ between networks");

  std::vector<std::vector<EmpiricalDistribution>> dists(n);
  parallel_for(n, workers, [&](std::size_t i) { dists[i] = column_distributions(collection[i]); });

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  std::vector<NetEmdResult> results(pairs.size());
  parallel_for(pairs.size(), workers, [&](std::size_t k) {
    results[k] = compare(dists[pairs[k].first], dists[pairs[k].second]);
  });

  DistanceMatrix d(std::move(labels), collection[0].names);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    auto [i, j] = pairs[k];
    d.set(i, j, results[k].total);
    for (std::size_t f = 0; f < results[k].per_feature.size(); ++f) d.set_feature(f, i, j, results[k].per_feature[f]);
  }
  return d;
}

DistanceMatrix netemd_matrix(std::span<const OrbitMatrix> collection, const OrbitSet& orbits,
                             std::vector<std::string> labels, unsigned workers) {
  std::vector<FeatureMatrix> features;
  features.reserve(collection.size());
  for (const auto& m : collection) features.push_back(orbit_features(m, orbits));
  return netemd_matrix(features, std::move(labels), workers);
}

std::vector<FeatureMatrix> log_features(std::span<const OrbitMatrix> collection, const OrbitSet& orbits) {
  std::vector<FeatureMatrix> out;
  for (const auto& m : collection) {
    auto f = orbit_features(m, orbits);
    for (double& x : f.values) x = std::log1p(x);
    out.push_back(std::move(f));
  }
  return out;
}

PcaReconstruction pca_reconstruct(std::span<const OrbitMatrix> collection, const OrbitSet& orbits,
                                  double explained_variance) {
  if (!(explained_variance > 0.0 && explained_variance <= 1.0))
    throw ValidationError("explained variance must lie in (0, 1]");
  auto features = log_features(collection, orbits);
  const auto d = static_cast<Eigen::Index>(orbits.size());
  Eigen::Index total_rows = 0;
  for (const auto& f : features) total_rows += static_cast<Eigen::Index>(f.rows);
  if (total_rows < d)
    throw ValidationError("PCA needs at least as many pooled rows (" + std::to_string(total_rows) +
                          ") as features (" + std::to_string(d) + ")");

  Eigen::MatrixXd pooled(total_rows, d);
  Eigen::Index r = 0;
  for (const auto& f : features)
    for (std::size_t i = 0; i < f.rows; ++i, ++r)
      for (Eigen::Index c = 0; c < d; ++c) pooled(r, c) = f.at(i, static_cast<std::size_t>(c));
  const Eigen::RowVectorXd mean = pooled.colwise().mean();
  const Eigen::MatrixXd centered = pooled.rowwise() - mean;
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(total_rows);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw RuntimeError("eigendecomposition of the orbit covariance failed");
  // Eigen returns ascending order; flip to descending.
  Eigen::VectorXd values = solver.eigenvalues().reverse();
  Eigen::MatrixXd vectors = solver.eigenvectors().rowwise().reverse();
  for (Eigen::Index k = 0; k < d; ++k) {
    values(k) = std::max(values(k), 0.0);
    Eigen::Index arg = 0;
    vectors.col(k).cwiseAbs().maxCoeff(&arg);
    if (vectors(arg, k) < 0.0) vectors.col(k) *= -1.0;
  }

  PcaReconstruction out;
  out.eigenvalues.assign(values.data(), values.data() + d);
  const double total = values.sum();
  std::size_t keep = 0;
  if (total <= 0.0) {
    spdlog::warn("pooled orbit rows are identical; PCA falls back to a single component");
    out.degenerate = true;
    keep = 1;
  } else if (explained_variance >= 1.0) {
    keep = static_cast<std::size_t>(d);
  } else {
    double cumulative = 0.0;
    while (keep < static_cast<std::size_t>(d)) {
      cumulative += values(static_cast<Eigen::Index>(keep));
      ++keep;
      if (cumulative >= explained_variance * total) break;
    }
  }
  out.components = keep;
  const Eigen::MatrixXd basis = vectors.leftCols(static_cast<Eigen::Index>(keep));
  const Eigen::MatrixXd rebuilt = (centered * basis * basis.transpose()).rowwise() + mean;

  r = 0;
  for (const auto& f : features) {
    FeatureMatrix g;
    g.rows = f.rows;
    g.names = f.names;
    g.values.resize(f.values.size());
    for (std::size_t i = 0; i < f.rows; ++i, ++r)
      for (Eigen::Index c = 0; c < d; ++c) g.values[i * g.cols() + static_cast<std::size_t>(c)] = rebuilt(r, c);
    out.networks.push_back(std::move(g));
  }
  return out;
}

DistanceMatrix pca_netemd_matrix(std::span<const OrbitMatrix> collection, const OrbitSet& orbits,
                                 double explained_variance, std::vector<std::string> labels, unsigned workers) {
  auto rec = pca_reconstruct(collection, orbits, explained_variance);
  return netemd_matrix(rec.networks, std::move(labels), workers);
}

namespace {

void write_square(std::ostream& out, const DistanceMatrix& d, auto&& value) {
  std::ostringstream buf;
  buf << std::setprecision(12);
  buf << "label";
  for (const auto& l : d.labels()) buf << ',' << l;
  buf << '\n';
  for (std::size_t i = 0; i < d.size(); ++i) {
    buf << d.labels()[i];
    for (std::size_t j = 0; j < d.size(); ++j) buf << ',' << value(i, j);
    buf << '\n';
  }
  out << buf.str();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream s(line);
  while (std::getline(s, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void write_distance_csv(std::ostream& out, const DistanceMatrix& d) {
  write_square(out, d, [&](std::size_t i, std::size_t j) { return d(i, j); });
}

void write_feature_distance_csv(std::ostream& out, const DistanceMatrix& d, std::size_t f) {
  write_square(out, d, [&](std::size_t i, std::size_t j) { return d.feature(f, i, j); });
}

DistanceMatrix read_distance_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("distance CSV is empty");
  auto header = split_csv(line);
  if (header.size() < 2) throw ValidationError("distance CSV header has no labels");
  std::vector<std::string> labels(header.begin() + 1, header.end());
  DistanceMatrix d(labels, {});
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!std::getline(in, line)) throw ValidationError("distance CSV has too few rows");
    auto cells = split_csv(line);
    if (cells.size() != labels.size() + 1 || cells[0] != labels[i])
      throw ValidationError("distance CSV row " + std::to_string(i + 1) + " is malformed");
    for (std::size_t j = 0; j < labels.size(); ++j) {
      double v = 0.0;
      try {
        v = std::stod(cells[j + 1]);
      } catch (const std::exception&) {
        throw ValidationError("distance CSV row " + std::to_string(i + 1) + " has a non-numeric cell");
      }
      if (j > i) d.set(i, j, v);
      else if (j < i && std::abs(v - d(i, j)) > 1e-10) throw ValidationError("distance CSV is not symmetric");
      else if (j == i && v != 0.0) throw ValidationError("distance CSV has a non-zero diagonal");
    }
  }
  return d;
}

}  // namespace forumnet
