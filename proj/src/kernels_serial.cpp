#include "gmfr/kernels.hpp"

#include <cmath>

namespace gmfr::kernels {

std::vector<std::pair<std::size_t, std::size_t>> pair_list(std::size_t p) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(pair_count(p));
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) out.emplace_back(i, j);
  return out;
}

namespace serial {

void wedge_all(const Eigen::MatrixXd& B, Eigen::MatrixXd& W) {
  const Eigen::Index p = B.rows();
  const Eigen::Index dim = B.cols();
  W.resize(static_cast<Eigen::Index>(pair_count(static_cast<std::size_t>(p))),
           static_cast<Eigen::Index>(wedge_length(static_cast<std::size_t>(dim))));
  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j, ++row) {
      Eigen::Index q = 0;
      for (Eigen::Index d = 0; d < dim; ++d)
        for (Eigen::Index e = d + 1; e < dim; ++e, ++q) W(row, q) = B(i, d) * B(j, e) - B(j, d) * B(i, e);
    }
  }
}

void constraint_normal_equations(const Eigen::MatrixXd& B, const Eigen::MatrixXd& T, Eigen::MatrixXd& JtJ,
                                 Eigen::VectorXd& JtT) {
  const Eigen::Index p = B.rows();
  const Eigen::Index dim = B.cols();
  const Eigen::Index n = p * dim;
  JtJ.setZero(n, n);
  JtT.setZero(n);
  Eigen::Index cols[4];
  double vals[4];
  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j, ++row) {
      Eigen::Index q = 0;
      for (Eigen::Index d = 0; d < dim; ++d) {
        for (Eigen::Index e = d + 1; e < dim; ++e, ++q) {
          // d/dB of b_id b_je - b_jd b_ie
          cols[0] = i * dim + d;  vals[0] = B(j, e);
          cols[1] = i * dim + e;  vals[1] = -B(j, d);
          cols[2] = j * dim + e;  vals[2] = B(i, d);
          cols[3] = j * dim + d;  vals[3] = -B(i, e);
          const double t = T(row, q);
          for (int a = 0; a < 4; ++a) {
            JtT[cols[a]] += vals[a] * t;
            for (int b = 0; b < 4; ++b) JtJ(cols[a], cols[b]) += vals[a] * vals[b];
          }
        }
      }
    }
  }
}

void normalized_misalignment_matrix(const Eigen::MatrixXd& B, Eigen::MatrixXd& out) {
  const Eigen::Index p = B.rows();
  const Eigen::Index dim = B.cols();
  out.setZero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      double ss = 0.0;
      for (Eigen::Index d = 0; d < dim; ++d)
        for (Eigen::Index e = d + 1; e < dim; ++e) {
          const double m = B(i, d) * B(j, e) - B(j, d) * B(i, e);
          ss += m * m;
        }
      const double v = std::sqrt(ss) / (B.row(i).norm() * B.row(j).norm());
      out(i, j) = v;
      out(j, i) = v;
    }
  }
}

}  // namespace serial
}  // namespace gmfr::kernels
