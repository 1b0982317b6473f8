#include <cmath>

#include "gmfr/kernels.hpp"

namespace gmfr::kernels::parallel {

void wedge_all(const Eigen::MatrixXd& B, Eigen::MatrixXd& W) {
  const Eigen::Index p = B.rows();
  const Eigen::Index dim = B.cols();
  const auto up = static_cast<std::size_t>(p);
  W.resize(static_cast<Eigen::Index>(pair_count(up)), static_cast<Eigen::Index>(wedge_length(static_cast<std::size_t>(dim))));
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      const auto row = static_cast<Eigen::Index>(pair_index(static_cast<std::size_t>(i), static_cast<std::size_t>(j), up));
      Eigen::Index q = 0;
      for (Eigen::Index d = 0; d < dim; ++d)
        for (Eigen::Index e = d + 1; e < dim; ++e, ++q) W(row, q) = B(i, d) * B(j, e) - B(j, d) * B(i, e);
    }
  }
}

// Block form of J'J:
//   (i,i) = sum_{j != i} ||B_j||^2 I - B_j B_j'
//   (i,j) = B_i B_j' - (B_i . B_j) I
// and of J'T for covariate i: sum_j s_ij (T_de B_je at d, -T_de B_jd at e),
// s_ij = +1 when i < j.
void constraint_normal_equations(const Eigen::MatrixXd& B, const Eigen::MatrixXd& T, Eigen::MatrixXd& JtJ,
                                 Eigen::VectorXd& JtT) {
  const Eigen::Index p = B.rows();
  const Eigen::Index dim = B.cols();
  const auto up = static_cast<std::size_t>(p);
  JtJ.setZero(p * dim, p * dim);
  JtT.setZero(p * dim);
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < p; ++i) {
    auto diag = JtJ.block(i * dim, i * dim, dim, dim);
    auto rhs = JtT.segment(i * dim, dim);
    for (Eigen::Index j = 0; j < p; ++j) {
      if (j == i) continue;
      const auto bj = B.row(j);
      diag.noalias() -= bj.transpose() * bj;
      diag.diagonal().array() += bj.squaredNorm();

      auto off = JtJ.block(i * dim, j * dim, dim, dim);
      off.noalias() = B.row(i).transpose() * bj;
      off.diagonal().array() -= B.row(i).dot(bj);

      const bool i_first = i < j;
      const auto row = static_cast<Eigen::Index>(
          i_first ? pair_index(static_cast<std::size_t>(i), static_cast<std::size_t>(j), up)
                  : pair_index(static_cast<std::size_t>(j), static_cast<std::size_t>(i), up));
      const double s = i_first ? 1.0 : -1.0;
      Eigen::Index q = 0;
      for (Eigen::Index d = 0; d < dim; ++d)
        for (Eigen::Index e = d + 1; e < dim; ++e, ++q) {
          const double t = s * T(row, q);
          rhs[d] += bj[e] * t;
          rhs[e] -= bj[d] * t;
        }
    }
  }
}

void normalized_misalignment_matrix(const Eigen::MatrixXd& B, Eigen::MatrixXd& out) {
  const Eigen::Index p = B.rows();
  const Eigen::Index dim = B.cols();
  out.setZero(p, p);
  const Eigen::VectorXd norms = B.rowwise().norm();
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      double ss = 0.0;
      for (Eigen::Index d = 0; d < dim; ++d)
        for (Eigen::Index e = d + 1; e < dim; ++e) {
          const double m = B(i, d) * B(j, e) - B(j, d) * B(i, e);
          ss += m * m;
        }
      const double v = std::sqrt(ss) / (norms[i] * norms[j]);
      out(i, j) = v;
      out(j, i) = v;
    }
  }
}

}  // namespace gmfr::kernels::parallel
