#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace slr {

using Index = Eigen::Index;

/// Dense real symmetric matrix. Symmetry is exact: every constructor either
/// verifies a_ij == a_ji bit-for-bit or builds the matrix symmetrically.
template <typename Scalar>
class SymmetricMatrix {
 public:
  using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  explicit SymmetricMatrix(Index dim = 1) : m_(Dense::Zero(checked_dim(dim), dim)) {}

  /// Adopts `a` after checking exact symmetry.
  static SymmetricMatrix from(const Dense& a) {
    if (a.rows() != a.cols()) {
      throw std::invalid_argument("SymmetricMatrix: matrix is not square");
    }
    for (Index j = 0; j < a.cols(); ++j) {
      for (Index i = j + 1; i < a.rows(); ++i) {
        if (a(i, j) != a(j, i)) {
          throw std::invalid_argument("SymmetricMatrix: entries (" + std::to_string(i) + "," +
                                      std::to_string(j) + ") and transpose differ");
        }
      }
    }
    SymmetricMatrix out(a.rows());
    out.m_ = a;
    return out;
  }

  /// (a + aᵀ) / 2, written so that the result is exactly symmetric.
  template <typename Derived>
  static SymmetricMatrix symmetrize(const Eigen::MatrixBase<Derived>& a) {
    if (a.rows() != a.cols()) {
      throw std::invalid_argument("SymmetricMatrix: matrix is not square");
    }
    SymmetricMatrix out(a.rows());
    for (Index j = 0; j < a.cols(); ++j) {
      out.m_(j, j) = a(j, j);
      for (Index i = j + 1; i < a.rows(); ++i) {
        const Scalar v = (a(i, j) + a(j, i)) / Scalar(2);
        out.m_(i, j) = v;
        out.m_(j, i) = v;
      }
    }
    return out;
  }

  static SymmetricMatrix identity(Index dim) {
    SymmetricMatrix out(dim);
    out.m_.setIdentity();
    return out;
  }

  static SymmetricMatrix constant(Index dim, Scalar value) {
    SymmetricMatrix out(dim);
    out.m_.setConstant(value);
    return out;
  }

  /// e_i e_jᵀ + e_j e_iᵀ for i != j, e_i e_iᵀ on the diagonal.
  static SymmetricMatrix unit(Index dim, Index i, Index j) {
    SymmetricMatrix out(dim);
    out.set(i, j, Scalar(1));
    return out;
  }

  Index dim() const { return m_.rows(); }
  const Dense& matrix() const { return m_; }
  Scalar operator()(Index i, Index j) const { return m_(i, j); }

  void set(Index i, Index j, Scalar v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }

  SymmetricMatrix& operator+=(const SymmetricMatrix& o) {
    check_same_dim(o);
    m_ += o.m_;
    return *this;
  }
  SymmetricMatrix& operator-=(const SymmetricMatrix& o) {
    check_same_dim(o);
    m_ -= o.m_;
    return *this;
  }
  SymmetricMatrix& operator*=(Scalar c) {
    m_ *= c;
    return *this;
  }

  friend SymmetricMatrix operator+(SymmetricMatrix a, const SymmetricMatrix& b) { return a += b; }
  friend SymmetricMatrix operator-(SymmetricMatrix a, const SymmetricMatrix& b) { return a -= b; }
  friend SymmetricMatrix operator*(SymmetricMatrix a, Scalar c) { return a *= c; }
  friend SymmetricMatrix operator*(Scalar c, SymmetricMatrix a) { return a *= c; }
  friend SymmetricMatrix operator-(SymmetricMatrix a) { return a *= Scalar(-1); }
  friend bool operator==(const SymmetricMatrix& a, const SymmetricMatrix& b) {
    return a.dim() == b.dim() && a.m_ == b.m_;
  }

  void check_same_dim(const SymmetricMatrix& o) const {
    if (o.dim() != dim()) {
      throw std::invalid_argument("SymmetricMatrix: dimension mismatch (" + std::to_string(dim()) +
                                  " vs " + std::to_string(o.dim()) + ")");
    }
  }

 private:
  static Index checked_dim(Index dim) {
    if (dim < 1) throw std::invalid_argument("SymmetricMatrix: dim must be >= 1");
    return dim;
  }

  Dense m_;
};

using SymMat = SymmetricMatrix<double>;

// Norms and inner products on Sym(d).

/// Frobenius inner product ⟨A, B⟩ = tr(AᵀB).
template <typename Scalar>
Scalar inner(const SymmetricMatrix<Scalar>& a, const SymmetricMatrix<Scalar>& b) {
  a.check_same_dim(b);
  return a.matrix().cwiseProduct(b.matrix()).sum();
}

/// Entrywise maximum norm.
template <typename Scalar>
Scalar max_abs(const SymmetricMatrix<Scalar>& a) {
  return a.matrix().cwiseAbs().maxCoeff();
}

/// Entrywise l1 norm, summing over all (i, j).
template <typename Scalar>
Scalar l1_norm(const SymmetricMatrix<Scalar>& a) {
  return a.matrix().cwiseAbs().sum();
}

template <typename Scalar>
Scalar frobenius_norm(const SymmetricMatrix<Scalar>& a) {
  return a.matrix().norm();
}

template <typename Scalar>
Scalar trace(const SymmetricMatrix<Scalar>& a) {
  return a.matrix().trace();
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> eigenvalues(const SymmetricMatrix<Scalar>& a) {
  Eigen::SelfAdjointEigenSolver<typename SymmetricMatrix<Scalar>::Dense> es(a.matrix(),
                                                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// Spectral norm: the largest absolute eigenvalue.
template <typename Scalar>
Scalar spectral_norm(const SymmetricMatrix<Scalar>& a) {
  const auto ev = eigenvalues(a);
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

template <typename Scalar>
Scalar max_eigenvalue(const SymmetricMatrix<Scalar>& a) {
  const auto ev = eigenvalues(a);
  return ev(ev.size() - 1);
}

template <typename Scalar>
Scalar min_eigenvalue(const SymmetricMatrix<Scalar>& a) {
  return eigenvalues(a)(0);
}

/// Sign pattern, entries in {-1, 0, 1}.
template <typename Scalar>
SymmetricMatrix<Scalar> sign(const SymmetricMatrix<Scalar>& a) {
  auto s = a.matrix().unaryExpr([](Scalar v) {
    return v > Scalar(0) ? Scalar(1) : (v < Scalar(0) ? Scalar(-1) : Scalar(0));
  });
  return SymmetricMatrix<Scalar>::from(s.eval());
}

/// Q sign(E) Qᵀ for a = Q E Qᵀ: the maximizer of ⟨M, a⟩ over the unit
/// spectral-norm ball (zero eigenvalues mapped to +1).
template <typename Scalar>
SymmetricMatrix<Scalar> spectral_sign(const SymmetricMatrix<Scalar>& a) {
  using Dense = typename SymmetricMatrix<Scalar>::Dense;
  Eigen::SelfAdjointEigenSolver<Dense> es(a.matrix());
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> s =
      es.eigenvalues().unaryExpr([](Scalar v) { return v < Scalar(0) ? Scalar(-1) : Scalar(1); });
  const Dense& q = es.eigenvectors();
  return SymmetricMatrix<Scalar>::symmetrize(q * s.asDiagonal() * q.transpose());
}

}  // namespace slr
