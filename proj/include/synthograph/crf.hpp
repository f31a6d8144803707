#pragma once

// Exact inference for linear-chain models.
//
// A chain of length T over D tags is described by
//   local(t, j)  score of tag j at position t        (T x D)
//   trans(i, j)  score of tag i followed by tag j    (D x D)
// and the score of a path y is
//   local(0, y0) + sum_{t>0} [trans(y_{t-1}, y_t) + local(t, y_t)].
//
// All routines are templated on the Eigen expression type so that any
// floating scalar works; the library itself instantiates them with double.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace synthograph::crf {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Hard transition constraints; a forbidden move scores -inf.
struct Constraints {
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> allowed;  // D x D
  Eigen::Array<bool, Eigen::Dynamic, 1> may_start;             // D
  Eigen::Array<bool, Eigen::Dynamic, 1> may_end;               // D
};

template <typename Scalar>
inline Scalar negative_infinity() {
  return -std::numeric_limits<Scalar>::infinity();
}

/// log(sum(exp(v))) with max shift; -inf for an empty or all -inf input.
template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  if (v.size() == 0) return negative_infinity<Scalar>();
  const Scalar m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

/// Score of `path` under the chain, accumulated left to right in the same
/// order as the Viterbi recursion.
template <typename DerivedL, typename DerivedT, typename Path>
typename DerivedL::Scalar sequence_score(const Eigen::MatrixBase<DerivedL>& local,
                                         const Eigen::MatrixBase<DerivedT>& trans, const Path& path) {
  using Scalar = typename DerivedL::Scalar;
  if (path.empty()) return Scalar(0);
  Scalar s = local(0, path[0]);
  for (std::size_t t = 1; t < path.size(); ++t) {
    s = s + trans(path[t - 1], path[t]);
    s = s + local(static_cast<Eigen::Index>(t), path[t]);
  }
  return s;
}

template <typename Scalar>
struct ForwardBackward {
  Matrix<Scalar> log_alpha;  // T x D, includes local(t, .)
  Matrix<Scalar> log_beta;   // T x D, excludes local(t, .)
  Scalar log_z = 0;
  Scalar log_z_backward = 0;
  Matrix<Scalar> node_marginals;        // T x D, rows sum to 1
  Matrix<Scalar> transition_marginals;  // D x D, summed over t
};

namespace detail {

// out(j) = log sum_i exp(prev(i) + trans(i, j)); column shift first, exact
// log-sum-exp fallback for any column that underflows.
template <typename Scalar>
void propagate_forward(const Vector<Scalar>& prev, const Matrix<Scalar>& trans, const Matrix<Scalar>& trans_exp,
                       const Vector<Scalar>& col_max, Vector<Scalar>& out) {
  const Scalar m = prev.maxCoeff();
  const Vector<Scalar> u = (prev.array() - m).exp().matrix();
  const Vector<Scalar> s = trans_exp.transpose() * u;
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    if (s[j] > std::numeric_limits<Scalar>::min() && std::isfinite(s[j])) {
      out[j] = m + col_max[j] + std::log(s[j]);
    } else {
      out[j] = log_sum_exp(prev + trans.col(j));
    }
  }
}

template <typename Scalar>
void propagate_backward(const Vector<Scalar>& next, const Matrix<Scalar>& trans, const Matrix<Scalar>& trans_exp_rows,
                        const Vector<Scalar>& row_max, Vector<Scalar>& out) {
  const Scalar m = next.maxCoeff();
  const Vector<Scalar> w = (next.array() - m).exp().matrix();
  const Vector<Scalar> s = trans_exp_rows * w;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > std::numeric_limits<Scalar>::min() && std::isfinite(s[i])) {
      out[i] = m + row_max[i] + std::log(s[i]);
    } else {
      out[i] = log_sum_exp(next + trans.row(i).transpose());
    }
  }
}

}  // namespace detail

/// Log partition function by the forward recursion in the log domain.
template <typename DerivedL, typename DerivedT>
typename DerivedL::Scalar log_partition(const Eigen::MatrixBase<DerivedL>& local,
                                        const Eigen::MatrixBase<DerivedT>& trans) {
  using Scalar = typename DerivedL::Scalar;
  const Eigen::Index T = local.rows();
  if (T == 0) return Scalar(0);
  const Matrix<Scalar> tr = trans;
  const Vector<Scalar> col_max = tr.colwise().maxCoeff().transpose();
  const Matrix<Scalar> tr_exp = (tr.rowwise() - col_max.transpose()).array().exp().matrix();
  Vector<Scalar> alpha = local.row(0).transpose();
  Vector<Scalar> next(alpha.size());
  for (Eigen::Index t = 1; t < T; ++t) {
    detail::propagate_forward<Scalar>(alpha, tr, tr_exp, col_max, next);
    alpha = next + local.row(t).transpose();
  }
  return log_sum_exp(alpha);
}

/// Forward and backward passes with node and summed transition marginals.
template <typename DerivedL, typename DerivedT>
ForwardBackward<typename DerivedL::Scalar> forward_backward(const Eigen::MatrixBase<DerivedL>& local,
                                                           const Eigen::MatrixBase<DerivedT>& trans) {
  using Scalar = typename DerivedL::Scalar;
  const Eigen::Index T = local.rows();
  const Eigen::Index D = local.cols();
  ForwardBackward<Scalar> fb;
  fb.log_alpha.resize(T, D);
  fb.log_beta.resize(T, D);
  fb.node_marginals.resize(T, D);
  fb.transition_marginals = Matrix<Scalar>::Zero(D, D);
  if (T == 0) return fb;

  const Matrix<Scalar> tr = trans;
  const Vector<Scalar> col_max = tr.colwise().maxCoeff().transpose();
  const Vector<Scalar> row_max = tr.rowwise().maxCoeff();
  const Matrix<Scalar> tr_exp_cols = (tr.rowwise() - col_max.transpose()).array().exp().matrix();
  const Matrix<Scalar> tr_exp_rows = (tr.colwise() - row_max).array().exp().matrix();

  Vector<Scalar> buf(D);
  fb.log_alpha.row(0) = local.row(0);
  for (Eigen::Index t = 1; t < T; ++t) {
    detail::propagate_forward<Scalar>(fb.log_alpha.row(t - 1).transpose(), tr, tr_exp_cols, col_max, buf);
    fb.log_alpha.row(t) = buf.transpose() + local.row(t);
  }
  fb.log_beta.row(T - 1).setZero();
  for (Eigen::Index t = T - 2; t >= 0; --t) {
    const Vector<Scalar> next = (local.row(t + 1) + fb.log_beta.row(t + 1)).transpose();
    detail::propagate_backward<Scalar>(next, tr, tr_exp_rows, row_max, buf);
    fb.log_beta.row(t) = buf.transpose();
  }
  fb.log_z = log_sum_exp(fb.log_alpha.row(T - 1).transpose());
  fb.log_z_backward = log_sum_exp((local.row(0) + fb.log_beta.row(0)).transpose());

  fb.node_marginals = ((fb.log_alpha + fb.log_beta).array() - fb.log_z).exp().matrix();

  if (T > 1) {
    // xi_t(i, j) = exp(alpha_{t-1}(i) + trans(i, j) + local_t(j) + beta_t(j) - log Z),
    // factored as scale_t * u_t(i) * w_t(j) * exp(trans(i, j) - g).
    const Scalar g = tr.maxCoeff();
    Matrix<Scalar> U(D, T - 1), W(D, T - 1);
    for (Eigen::Index t = 1; t < T; ++t) {
      const Vector<Scalar> a = fb.log_alpha.row(t - 1).transpose();
      const Vector<Scalar> b = (local.row(t) + fb.log_beta.row(t)).transpose();
      const Scalar ma = a.maxCoeff();
      const Scalar mb = b.maxCoeff();
      const Scalar scale = std::exp(ma + mb + g - fb.log_z);
      U.col(t - 1) = scale * (a.array() - ma).exp().matrix();
      W.col(t - 1) = (b.array() - mb).exp().matrix();
    }
    fb.transition_marginals = ((U * W.transpose()).array() * (tr.array() - g).exp()).matrix();
  }
  return fb;
}

template <typename Scalar>
struct ViterbiResult {
  std::vector<int> path;
  Scalar score = 0;
};

/// Exact best path. Ties go to the lower tag id at the latest differing
/// position. Throws std::domain_error when constraints admit no path.
template <typename DerivedL, typename DerivedT>
ViterbiResult<typename DerivedL::Scalar> viterbi(const Eigen::MatrixBase<DerivedL>& local,
                                                const Eigen::MatrixBase<DerivedT>& trans,
                                                const Constraints* constraints = nullptr) {
  using Scalar = typename DerivedL::Scalar;
  const Eigen::Index T = local.rows();
  const Eigen::Index D = local.cols();
  ViterbiResult<Scalar> result;
  if (T == 0) return result;
  const Scalar ninf = negative_infinity<Scalar>();

  Matrix<Scalar> delta(T, D);
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic> back(T, D);
  for (Eigen::Index j = 0; j < D; ++j) {
    delta(0, j) = (constraints && !constraints->may_start[j]) ? ninf : local(0, j);
    back(0, j) = -1;
  }
  for (Eigen::Index t = 1; t < T; ++t) {
    for (Eigen::Index j = 0; j < D; ++j) {
      Scalar best = ninf;
      int arg = -1;
      for (Eigen::Index i = 0; i < D; ++i) {
        if (delta(t - 1, i) == ninf) continue;
        if (constraints && !constraints->allowed(i, j)) continue;
        const Scalar s = delta(t - 1, i) + trans(i, j);
        if (arg < 0 || s > best) {
          best = s;
          arg = static_cast<int>(i);
        }
      }
      delta(t, j) = arg < 0 ? ninf : best + local(t, j);
      back(t, j) = arg;
    }
  }
  int last = -1;
  Scalar best = ninf;
  for (Eigen::Index j = 0; j < D; ++j) {
    if (delta(T - 1, j) == ninf) continue;
    if (constraints && !constraints->may_end[j]) continue;
    if (last < 0 || delta(T - 1, j) > best) {
      best = delta(T - 1, j);
      last = static_cast<int>(j);
    }
  }
  if (last < 0) throw std::domain_error("no path satisfies the transition constraints");
  result.path.resize(T);
  result.path[T - 1] = last;
  for (Eigen::Index t = T - 1; t > 0; --t) result.path[t - 1] = back(t, result.path[t]);
  result.score = best;
  return result;
}

}  // namespace synthograph::crf
