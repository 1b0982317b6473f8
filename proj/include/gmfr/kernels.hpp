#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

// Inner loops of the detection solver, over coefficient rows B_j (p x D).
//
// Misalignments are stored P x Q with P = p(p-1)/2 pairs (i<j, lexicographic)
// and Q = D(D-1)/2 index pairs (d<d', lexicographic).
//
// serial:: is the reference implementation; it assembles the constraint
// Jacobian row by row. parallel:: computes the same quantities from closed-form
// D x D blocks, one covariate per work item, so each output entry is written by
// exactly one thread in a fixed summation order and results do not depend on
// the thread count.
namespace gmfr::kernels {

inline std::size_t pair_count(std::size_t p) { return p * (p - 1) / 2; }
inline std::size_t wedge_length(std::size_t dim) { return dim * (dim - 1) / 2; }

// Row of pair (i, j), i < j, in the P x Q layout.
inline std::size_t pair_index(std::size_t i, std::size_t j, std::size_t p) {
  return i * p - i * (i + 1) / 2 + (j - i - 1);
}

std::vector<std::pair<std::size_t, std::size_t>> pair_list(std::size_t p);

enum class Backend { Serial, Parallel };

namespace serial {

void wedge_all(const Eigen::MatrixXd& B, Eigen::MatrixXd& W);

// JtJ = J(B)' J(B) and JtT = J(B)' vec(T), where J is the Jacobian of
// wedge_all with respect to vec(B) (row-major B, covariate outer).
void constraint_normal_equations(const Eigen::MatrixXd& B, const Eigen::MatrixXd& T, Eigen::MatrixXd& JtJ,
                                 Eigen::VectorXd& JtT);

// p x p symmetric matrix of ||wedge(B_i,B_j)|| / (||B_i|| ||B_j||), zero diagonal.
void normalized_misalignment_matrix(const Eigen::MatrixXd& B, Eigen::MatrixXd& out);

}  // namespace serial

namespace parallel {

void wedge_all(const Eigen::MatrixXd& B, Eigen::MatrixXd& W);
void constraint_normal_equations(const Eigen::MatrixXd& B, const Eigen::MatrixXd& T, Eigen::MatrixXd& JtJ,
                                 Eigen::VectorXd& JtT);
void normalized_misalignment_matrix(const Eigen::MatrixXd& B, Eigen::MatrixXd& out);

}  // namespace parallel

inline void wedge_all(Backend b, const Eigen::MatrixXd& B, Eigen::MatrixXd& W) {
  b == Backend::Serial ? serial::wedge_all(B, W) : parallel::wedge_all(B, W);
}
inline void constraint_normal_equations(Backend b, const Eigen::MatrixXd& B, const Eigen::MatrixXd& T,
                                        Eigen::MatrixXd& JtJ, Eigen::VectorXd& JtT) {
  b == Backend::Serial ? serial::constraint_normal_equations(B, T, JtJ, JtT)
                       : parallel::constraint_normal_equations(B, T, JtJ, JtT);
}
inline void normalized_misalignment_matrix(Backend b, const Eigen::MatrixXd& B, Eigen::MatrixXd& out) {
  b == Backend::Serial ? serial::normalized_misalignment_matrix(B, out)
                       : parallel::normalized_misalignment_matrix(B, out);
}

}  // namespace gmfr::kernels
