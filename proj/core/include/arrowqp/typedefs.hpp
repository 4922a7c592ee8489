#ifndef ARROWQP_TYPEDEFS_HPP
#define ARROWQP_TYPEDEFS_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace arrowqp
{

using isize = Eigen::Index;

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SparseMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using SparseMatRow = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
using Triplet = Eigen::Triplet<double, int>;

using VecRef = Eigen::Ref<Vec>;
using CVecRef = Eigen::Ref<const Vec>;
using MatRef = Eigen::Ref<Mat>;
using CMatRef = Eigen::Ref<const Mat>;

} // namespace arrowqp

#endif
