#include "gmfr/grouping.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "gmfr/errors.hpp"

namespace gmfr {

GroupingStructure::GroupingStructure(std::vector<std::vector<std::size_t>> blocks, std::size_t num_covariates)
    : p_(num_covariates), blocks_(std::move(blocks)) {
  if (p_ == 0) throw InvalidInput("grouping needs at least one covariate");
  std::vector<int> seen(p_, 0);
  for (auto& b : blocks_) {
    if (b.empty()) throw InvalidInput("grouping has an empty block");
    std::sort(b.begin(), b.end());
    for (std::size_t j : b) {
      if (j >= p_) throw InvalidInput("grouping index " + std::to_string(j + 1) + " exceeds p = " + std::to_string(p_));
      if (seen[j]++) throw InvalidInput("covariate " + std::to_string(j + 1) + " appears in more than one block");
    }
  }
  for (std::size_t j = 0; j < p_; ++j)
    if (!seen[j]) throw InvalidInput("grouping does not cover covariate " + std::to_string(j + 1));
  std::sort(blocks_.begin(), blocks_.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

GroupingStructure GroupingStructure::singletons(std::size_t p) {
  std::vector<std::vector<std::size_t>> blocks(p);
  for (std::size_t j = 0; j < p; ++j) blocks[j] = {j};
  return GroupingStructure(std::move(blocks), p);
}

GroupingStructure GroupingStructure::single_group(std::size_t p) {
  std::vector<std::size_t> all(p);
  std::iota(all.begin(), all.end(), std::size_t{0});
  return GroupingStructure({std::move(all)}, p);
}

GroupingStructure GroupingStructure::from_labels(const std::vector<std::size_t>& labels) {
  std::map<std::size_t, std::vector<std::size_t>> by_label;
  for (std::size_t j = 0; j < labels.size(); ++j) by_label[labels[j]].push_back(j);
  std::vector<std::vector<std::size_t>> blocks;
  for (auto& [label, members] : by_label) blocks.push_back(std::move(members));
  return GroupingStructure(std::move(blocks), labels.size());
}

std::vector<std::size_t> GroupingStructure::membership() const {
  std::vector<std::size_t> out(p_);
  for (std::size_t k = 0; k < blocks_.size(); ++k)
    for (std::size_t j : blocks_[k]) out[j] = k;
  return out;
}

std::string GroupingStructure::to_string() const {
  std::string s;
  for (const auto& b : blocks_) {
    s += '{';
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(b[i] + 1);
    }
    s += '}';
  }
  return s;
}

UnionFind::UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t UnionFind::find(std::size_t x) {
  std::size_t root = x;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[x] != root) {
    const std::size_t next = parent_[x];
    parent_[x] = root;
    x = next;
  }
  return root;
}

void UnionFind::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return;
  if (rank_[a] < rank_[b]) std::swap(a, b);
  parent_[b] = a;
  if (rank_[a] == rank_[b]) ++rank_[a];
}

namespace {

std::vector<std::vector<std::size_t>> average_linkage(const std::vector<std::size_t>& members,
                                                      const Eigen::MatrixXd& dist, double cutoff) {
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t m : members) clusters.push_back({m});
  auto linkage = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    double s = 0.0;
    for (std::size_t i : a)
      for (std::size_t j : b) s += dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return s / static_cast<double>(a.size() * b.size());
  };
  while (clusters.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t ba = 0, bb = 0;
    for (std::size_t a = 0; a < clusters.size(); ++a)
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        const double l = linkage(clusters[a], clusters[b]);
        if (l < best) {
          best = l;
          ba = a;
          bb = b;
        }
      }
    if (!(best <= cutoff)) break;
    clusters[ba].insert(clusters[ba].end(), clusters[bb].begin(), clusters[bb].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bb));
  }
  return clusters;
}

}  // namespace

GroupingStructure partition_by_threshold(const Eigen::MatrixXd& dist, double cutoff) {
  const auto p = static_cast<std::size_t>(dist.rows());
  if (dist.cols() != dist.rows() || p == 0) throw InvalidInput("dissimilarity matrix must be square and nonempty");
  auto at = [&](std::size_t i, std::size_t j) { return dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)); };

  UnionFind uf(p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j)
      if (at(i, j) <= cutoff) uf.unite(i, j);

  std::map<std::size_t, std::vector<std::size_t>> components;
  for (std::size_t j = 0; j < p; ++j) components[uf.find(j)].push_back(j);

  std::vector<std::vector<std::size_t>> blocks;
  for (auto& [root, members] : components) {
    bool all_pairs = true;
    for (std::size_t a = 0; a < members.size() && all_pairs; ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b)
        if (!(at(members[a], members[b]) <= cutoff)) {
          all_pairs = false;
          break;
        }
    if (all_pairs) {
      blocks.push_back(std::move(members));
    } else {
      for (auto& c : average_linkage(members, dist, cutoff)) blocks.push_back(std::move(c));
    }
  }
  return GroupingStructure(std::move(blocks), p);
}

}  // namespace gmfr
