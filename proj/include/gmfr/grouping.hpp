#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gmfr {

// Partition of covariates {0, ..., p-1} into K nonempty disjoint blocks.
// Always held in canonical form: members ascending, blocks ordered by their
// smallest member. Files and printed forms use 1-based indices.
class GroupingStructure {
 public:
  GroupingStructure() = default;
  GroupingStructure(std::vector<std::vector<std::size_t>> blocks, std::size_t num_covariates);

  static GroupingStructure singletons(std::size_t p);
  static GroupingStructure single_group(std::size_t p);
  // From a label per covariate (labels need not be contiguous).
  static GroupingStructure from_labels(const std::vector<std::size_t>& labels);

  std::size_t num_groups() const { return blocks_.size(); }
  std::size_t num_covariates() const { return p_; }
  const std::vector<std::vector<std::size_t>>& blocks() const { return blocks_; }
  const std::vector<std::size_t>& block(std::size_t k) const { return blocks_[k]; }
  // Group index of each covariate.
  std::vector<std::size_t> membership() const;

  // e.g. "{1,2,3}{4,5}"
  std::string to_string() const;

  friend bool operator==(const GroupingStructure& a, const GroupingStructure& b) {
    return a.p_ == b.p_ && a.blocks_ == b.blocks_;
  }
  friend bool operator<(const GroupingStructure& a, const GroupingStructure& b) {
    return a.p_ != b.p_ ? a.p_ < b.p_ : a.blocks_ < b.blocks_;
  }

 private:
  std::size_t p_ = 0;
  std::vector<std::vector<std::size_t>> blocks_;
};

class UnionFind {
 public:
  explicit UnionFind(std::size_t n);
  std::size_t find(std::size_t x);
  void unite(std::size_t a, std::size_t b);

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> rank_;
};

// Partition from a symmetric dissimilarity matrix: connected components of
// the graph with edges dist(i,j) <= cutoff. A component containing any pair
// above the cutoff is split by average-linkage agglomeration that stops once
// the closest clusters are farther apart than cutoff.
GroupingStructure partition_by_threshold(const Eigen::MatrixXd& dist, double cutoff);

}  // namespace gmfr
