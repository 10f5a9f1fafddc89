#pragma once

// Periodic Cartesian grids and discrete vector calculus.
//
// Fields are plain Eigen arrays indexed by a linear grid-point index with x1
// varying fastest. A vector field is an (points x dim) array, one column per
// Cartesian component. Tensor fields wrap an (points x dim*dim) array with
// entry (i, j) stored in column i*dim + j.

#include <Eigen/Core>
#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "helicity/error.hpp"

namespace helicity {

using Index = Eigen::Index;

enum class Backend { Spectral, FD2, FD4 };

struct Grid {
  int dim = 3;
  std::array<int, 3> n{32, 32, 32};
  std::array<double, 3> length{2 * std::numbers::pi, 2 * std::numbers::pi,
                               2 * std::numbers::pi};
  Backend backend = Backend::Spectral;
  /// Apply the 2/3-rule filter to nonlinear tendencies (spectral only).
  bool dealias = false;

  static Grid cube(int dim, int points, Backend backend = Backend::Spectral,
                   double extent = 2 * std::numbers::pi) {
    Grid g;
    g.dim = dim;
    g.n = {points, points, dim == 3 ? points : 1};
    g.length = {extent, extent, extent};
    g.backend = backend;
    return g;
  }

  /// Throws ConfigError if the descriptor is unusable.
  void validate() const {
    if (dim != 2 && dim != 3)
      throw ConfigError("grid dimension must be 2 or 3, got " + std::to_string(dim));
    for (int a = 0; a < dim; ++a) {
      if (n[a] < 8)
        throw ConfigError("grid needs at least 8 points per axis, axis " +
                          std::to_string(a + 1) + " has " + std::to_string(n[a]));
      if (!(length[a] > 0) || !std::isfinite(length[a]))
        throw ConfigError("grid extent must be positive on axis " + std::to_string(a + 1));
    }
  }

  Index size() const {
    Index total = 1;
    for (int a = 0; a < dim; ++a) total *= n[a];
    return total;
  }

  int points(int axis) const { return axis < dim ? n[axis] : 1; }
  double spacing(int axis) const { return length[axis] / n[axis]; }

  double min_spacing() const {
    double h = spacing(0);
    for (int a = 1; a < dim; ++a) h = std::min(h, spacing(a));
    return h;
  }

  double cell_volume() const {
    double v = 1;
    for (int a = 0; a < dim; ++a) v *= spacing(a);
    return v;
  }

  double volume() const {
    double v = 1;
    for (int a = 0; a < dim; ++a) v *= length[a];
    return v;
  }

  Index stride(int axis) const {
    Index s = 1;
    for (int a = 0; a < axis; ++a) s *= n[a];
    return s;
  }

  std::array<int, 3> multi_index(Index p) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      idx[a] = static_cast<int>(p % n[a]);
      p /= n[a];
    }
    return idx;
  }

  /// Node coordinate x_axis = i_axis * spacing.
  double coordinate(int axis, Index p) const {
    return multi_index(p)[axis] * spacing(axis);
  }

  /// Signed integer wavenumber of DFT bin m (Nyquist reported as +n/2).
  int wavenumber(int axis, int m) const {
    const int nn = n[axis];
    return m <= nn / 2 ? m : m - nn;
  }

  bool operator==(const Grid& other) const {
    if (dim != other.dim || backend != other.backend || dealias != other.dealias) return false;
    for (int a = 0; a < dim; ++a)
      if (n[a] != other.n[a] || length[a] != other.length[a]) return false;
    return true;
  }
};

template <class S>
using ScalarFieldT = Eigen::Array<S, Eigen::Dynamic, 1>;

template <class S>
using VectorFieldT = Eigen::Array<S, Eigen::Dynamic, Eigen::Dynamic>;

template <class S>
class TensorFieldT {
 public:
  using Storage = Eigen::Array<S, Eigen::Dynamic, Eigen::Dynamic>;
  using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

  TensorFieldT() = default;
  TensorFieldT(Index points, int dim) : dim_(dim), data_(Storage::Zero(points, dim * dim)) {}

  static TensorFieldT zero(Index points, int dim) { return TensorFieldT(points, dim); }

  static TensorFieldT identity(Index points, int dim) {
    TensorFieldT t(points, dim);
    for (int i = 0; i < dim; ++i) t(i, i).setOnes();
    return t;
  }

  /// Entry (i, j) as a column expression over all grid points.
  auto operator()(int i, int j) { return data_.col(i * dim_ + j); }
  auto operator()(int i, int j) const { return data_.col(i * dim_ + j); }

  int dim() const { return dim_; }
  Index points() const { return data_.rows(); }
  Storage& data() { return data_; }
  const Storage& data() const { return data_; }

  Matrix at(Index p) const {
    Matrix m(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) m(i, j) = data_(p, i * dim_ + j);
    return m;
  }

  void set(Index p, const Matrix& m) {
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) data_(p, i * dim_ + j) = m(i, j);
  }

  /// Column j of the pointwise matrix as a vector field.
  VectorFieldT<S> column(int j) const {
    VectorFieldT<S> v(points(), dim_);
    for (int i = 0; i < dim_; ++i) v.col(i) = (*this)(i, j);
    return v;
  }

  /// Row i of the pointwise matrix as a vector field.
  VectorFieldT<S> row(int i) const {
    VectorFieldT<S> v(points(), dim_);
    for (int j = 0; j < dim_; ++j) v.col(j) = (*this)(i, j);
    return v;
  }

  TensorFieldT& operator+=(const TensorFieldT& o) { data_ += o.data_; return *this; }
  TensorFieldT& operator-=(const TensorFieldT& o) { data_ -= o.data_; return *this; }
  TensorFieldT& operator*=(S s) { data_ *= s; return *this; }

  friend TensorFieldT operator+(TensorFieldT a, const TensorFieldT& b) { return a += b; }
  friend TensorFieldT operator-(TensorFieldT a, const TensorFieldT& b) { return a -= b; }
  friend TensorFieldT operator*(TensorFieldT a, S s) { return a *= s; }
  friend TensorFieldT operator*(S s, TensorFieldT a) { return a *= s; }

 private:
  int dim_ = 0;
  Storage data_;
};

using ScalarField = ScalarFieldT<double>;
using VectorField = VectorFieldT<double>;
using TensorField = TensorFieldT<double>;

// ---------------------------------------------------------------------------
// Pointwise algebra

template <class S>
ScalarFieldT<S> dot(const VectorFieldT<S>& a, const VectorFieldT<S>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw GridMismatchError("dot: vector fields have different shapes");
  return (a * b).rowwise().sum();
}

template <class S>
VectorFieldT<S> cross(const VectorFieldT<S>& a, const VectorFieldT<S>& b) {
  if (a.cols() != 3 || b.cols() != 3 || a.rows() != b.rows())
    throw GridMismatchError("cross: needs two 3-component fields on one grid");
  VectorFieldT<S> c(a.rows(), 3);
  c.col(0) = a.col(1) * b.col(2) - a.col(2) * b.col(1);
  c.col(1) = a.col(2) * b.col(0) - a.col(0) * b.col(2);
  c.col(2) = a.col(0) * b.col(1) - a.col(1) * b.col(0);
  return c;
}

/// (A v)_i = sum_j A_ij v_j
template <class S>
VectorFieldT<S> matvec(const TensorFieldT<S>& A, const VectorFieldT<S>& v) {
  const int d = A.dim();
  VectorFieldT<S> r = VectorFieldT<S>::Zero(v.rows(), d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) r.col(i) += A(i, j) * v.col(j);
  return r;
}

/// (A^T v)_i = sum_j A_ji v_j
template <class S>
VectorFieldT<S> matvec_transposed(const TensorFieldT<S>& A, const VectorFieldT<S>& v) {
  const int d = A.dim();
  VectorFieldT<S> r = VectorFieldT<S>::Zero(v.rows(), d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) r.col(i) += A(j, i) * v.col(j);
  return r;
}

template <class S>
TensorFieldT<S> matmul(const TensorFieldT<S>& A, const TensorFieldT<S>& B) {
  const int d = A.dim();
  TensorFieldT<S> C(A.points(), d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) C(i, j) += A(i, k) * B(k, j);
  return C;
}

template <class S>
TensorFieldT<S> transpose(const TensorFieldT<S>& A) {
  const int d = A.dim();
  TensorFieldT<S> T(A.points(), d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) T(i, j) = A(j, i);
  return T;
}

/// a ⊗ b, entry (i, j) = a_i b_j
template <class S>
TensorFieldT<S> outer(const VectorFieldT<S>& a, const VectorFieldT<S>& b) {
  const int d = static_cast<int>(a.cols());
  TensorFieldT<S> T(a.rows(), d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) T(i, j) = a.col(i) * b.col(j);
  return T;
}

template <class S>
ScalarFieldT<S> determinant(const TensorFieldT<S>& A) {
  if (A.dim() == 2) return A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
  return A(0, 0) * (A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1)) -
         A(0, 1) * (A(1, 0) * A(2, 2) - A(1, 2) * A(2, 0)) +
         A(0, 2) * (A(1, 0) * A(2, 1) - A(1, 1) * A(2, 0));
}

/// Pointwise adjugate, adj(A) = det(A) A^{-1}.
template <class S>
TensorFieldT<S> adjugate(const TensorFieldT<S>& A) {
  const int d = A.dim();
  TensorFieldT<S> R(A.points(), d);
  if (d == 2) {
    R(0, 0) = A(1, 1);
    R(0, 1) = -A(0, 1);
    R(1, 0) = -A(1, 0);
    R(1, 1) = A(0, 0);
    return R;
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      // cofactor of (j, i)
      const int r0 = (j + 1) % 3, r1 = (j + 2) % 3;
      const int c0 = (i + 1) % 3, c1 = (i + 2) % 3;
      R(i, j) = A(r0, c0) * A(r1, c1) - A(r0, c1) * A(r1, c0);
    }
  }
  return R;
}

template <class S>
TensorFieldT<S> inverse(const TensorFieldT<S>& A) {
  TensorFieldT<S> R = adjugate(A);
  const ScalarFieldT<S> inv_det = determinant(A).inverse();
  R.data().colwise() *= inv_det;
  return R;
}

template <class Derived>
typename Derived::Scalar sup_norm(const Eigen::ArrayBase<Derived>& a) {
  if (a.size() == 0) return 0;
  return a.abs().maxCoeff();
}

template <class S>
S sup_norm(const TensorFieldT<S>& t) {
  return sup_norm(t.data());
}

template <class Derived>
void require_finite(const Eigen::ArrayBase<Derived>& a, const char* what) {
  if (!a.allFinite()) throw NonFiniteError(std::string(what) + ": non-finite values in input field");
}

// ---------------------------------------------------------------------------
// Differential operators

template <class S>
class Calculus {
 public:
  using Scalar = S;
  using Complex = std::complex<S>;
  using ScalarF = ScalarFieldT<S>;
  using VectorF = VectorFieldT<S>;
  using TensorF = TensorFieldT<S>;
  using Spectrum = Eigen::Array<Complex, Eigen::Dynamic, 1>;

  explicit Calculus(Grid grid) : grid_(std::move(grid)) {
    grid_.validate();
    if (grid_.dim == 2) grid_.n[2] = 1;
    for (int a = 0; a < grid_.dim; ++a) {
      const Index st = grid_.stride(a);
      const int na = grid_.n[a];
      auto& starts = line_starts_[a];
      starts.reserve(static_cast<std::size_t>(grid_.size() / na));
      for (Index p = 0; p < grid_.size(); ++p)
        if ((p / st) % na == 0) starts.push_back(p);

      symbol_[a].resize(na);
      filter_[a].resize(na);
      const S h = static_cast<S>(grid_.spacing(a));
      for (int m = 0; m < na; ++m) {
        const int k = grid_.wavenumber(a, m);
        const S kp = static_cast<S>(2 * std::numbers::pi * k / grid_.length[a]);
        S s = 0;
        switch (grid_.backend) {
          case Backend::Spectral:
            s = (2 * k == na) ? S(0) : kp;
            break;
          case Backend::FD2:
            s = std::sin(kp * h) / h;
            break;
          case Backend::FD4:
            s = (8 * std::sin(kp * h) - std::sin(2 * kp * h)) / (6 * h);
            break;
        }
        symbol_[a][m] = s;
        filter_[a][m] = (3 * std::abs(k) < na) ? S(1) : S(0);
      }
    }
  }

  const Grid& grid() const { return grid_; }
  int dim() const { return grid_.dim; }
  Index size() const { return grid_.size(); }

  /// Fourier symbol s of the discrete derivative along `axis`: d/dx <-> i*s.
  S symbol(int axis, int m) const { return symbol_[axis][m]; }

  /// Partial derivative along one axis.
  ScalarF diff(const ScalarF& f, int axis) const {
    check_scalar(f, "diff");
    ScalarF out(f.size());
    if (grid_.backend == Backend::Spectral) {
      std::vector<Complex> mult(symbol_[axis].size());
      for (std::size_t m = 0; m < mult.size(); ++m) mult[m] = Complex(0, symbol_[axis][m]);
      apply_line_multiplier(f, out, axis, mult);
    } else {
      finite_difference(f, out, axis);
    }
    return out;
  }

  VectorF gradient(const ScalarF& f) const {
    VectorF g(f.size(), grid_.dim);
    for (int a = 0; a < grid_.dim; ++a) g.col(a) = diff(f, a);
    return g;
  }

  ScalarF divergence(const VectorF& v) const {
    check_vector(v, "divergence");
    ScalarF d = ScalarF::Zero(v.rows());
    for (int a = 0; a < grid_.dim; ++a) d += diff(v.col(a), a);
    return d;
  }

  /// 3D: the usual curl. 2D: a one-column field holding d v2/dx1 - d v1/dx2.
  VectorF curl(const VectorF& v) const {
    check_vector(v, "curl");
    if (grid_.dim == 2) {
      VectorF c(v.rows(), 1);
      c.col(0) = diff(v.col(1), 0) - diff(v.col(0), 1);
      return c;
    }
    VectorF c(v.rows(), 3);
    c.col(0) = diff(v.col(2), 1) - diff(v.col(1), 2);
    c.col(1) = diff(v.col(0), 2) - diff(v.col(2), 0);
    c.col(2) = diff(v.col(1), 0) - diff(v.col(0), 1);
    return c;
  }

  /// Entry (i, j) = d v_i / d x_j.
  TensorF jacobian(const VectorF& v) const {
    check_vector(v, "jacobian");
    TensorF J(v.rows(), grid_.dim);
    for (int i = 0; i < grid_.dim; ++i)
      for (int j = 0; j < grid_.dim; ++j) J(i, j) = diff(v.col(i), j);
    return J;
  }

  /// Covector divergence: component j = sum_i d A_ij / d x_i.
  VectorF tensor_divergence(const TensorF& A) const {
    if (A.points() != size() || A.dim() != grid_.dim)
      throw GridMismatchError("tensor_divergence: tensor field does not match grid");
    VectorF r = VectorF::Zero(size(), grid_.dim);
    for (int i = 0; i < grid_.dim; ++i)
      for (int j = 0; j < grid_.dim; ++j) r.col(j) += diff(A(i, j), i);
    return r;
  }

  ScalarF laplacian(const ScalarF& f) const { return divergence(gradient(f)); }

  /// (u . grad) f
  ScalarF advect(const VectorF& u, const ScalarF& f) const {
    check_vector(u, "advect");
    ScalarF r = ScalarF::Zero(f.size());
    for (int a = 0; a < grid_.dim; ++a) r += u.col(a) * diff(f, a);
    return r;
  }

  /// (u . grad) w, componentwise
  VectorF advect(const VectorF& u, const VectorF& w) const {
    VectorF r(w.rows(), w.cols());
    for (Index c = 0; c < w.cols(); ++c) r.col(c) = advect(u, ScalarF(w.col(c)));
    return r;
  }

  TensorF advect(const VectorF& u, const TensorF& T) const {
    TensorF r(T.points(), T.dim());
    for (Index c = 0; c < T.data().cols(); ++c) r.data().col(c) = advect(u, ScalarF(T.data().col(c)));
    return r;
  }

  /// Rectangle rule; exact for trigonometric polynomials below Nyquist.
  S integrate(const ScalarF& f) const {
    check_scalar(f, "integrate");
    return f.sum() * static_cast<S>(grid_.cell_volume());
  }

  S mean(const ScalarF& f) const {
    check_scalar(f, "mean");
    return f.mean();
  }

  /// Unconditional 2/3-rule truncation on spectral grids; identity otherwise.
  ScalarF two_thirds_filter(const ScalarF& f) const {
    if (grid_.backend != Backend::Spectral) return f;
    ScalarF out = f;
    for (int a = 0; a < grid_.dim; ++a) {
      std::vector<Complex> mult(filter_[a].begin(), filter_[a].end());
      ScalarF tmp(out.size());
      apply_line_multiplier(out, tmp, a, mult);
      out.swap(tmp);
    }
    return out;
  }

  /// Dealiasing filter, active only when the grid asks for it.
  ScalarF dealias(const ScalarF& f) const {
    return grid_.dealias ? two_thirds_filter(f) : f;
  }

  VectorF dealias(const VectorF& v) const {
    if (!grid_.dealias || grid_.backend != Backend::Spectral) return v;
    VectorF r(v.rows(), v.cols());
    for (Index c = 0; c < v.cols(); ++c) r.col(c) = two_thirds_filter(v.col(c));
    return r;
  }

  TensorF dealias(const TensorF& T) const {
    if (!grid_.dealias || grid_.backend != Backend::Spectral) return T;
    TensorF r(T.points(), T.dim());
    for (Index c = 0; c < T.data().cols(); ++c) r.data().col(c) = two_thirds_filter(T.data().col(c));
    return r;
  }

  /// Full multidimensional DFT (unnormalized forward).
  Spectrum forward(const ScalarF& f) const {
    check_scalar(f, "forward");
    Spectrum c = f.template cast<Complex>();
    for (int a = 0; a < grid_.dim; ++a) transform_lines(c, a, false);
    return c;
  }

  /// Inverse of forward(); returns the real part.
  ScalarF inverse(Spectrum c) const {
    for (int a = 0; a < grid_.dim; ++a) transform_lines(c, a, true);
    return c.real();
  }

 private:
  void check_scalar(const ScalarF& f, const char* what) const {
    if (f.size() != size())
      throw GridMismatchError(std::string(what) + ": field has " + std::to_string(f.size()) +
                              " values, grid has " + std::to_string(size()));
    require_finite(f, what);
  }

  void check_vector(const VectorF& v, const char* what) const {
    if (v.rows() != size() || v.cols() != grid_.dim)
      throw GridMismatchError(std::string(what) + ": vector field does not match grid");
    require_finite(v, what);
  }

  // Two real lines are packed into one complex transform; the multiplier maps
  // real data to real data so real and imaginary parts stay separate.
  void apply_line_multiplier(const ScalarF& in, ScalarF& out, int axis,
                             const std::vector<Complex>& mult) const {
    const int na = grid_.n[axis];
    const Index st = grid_.stride(axis);
    const auto& starts = line_starts_[axis];
    Eigen::FFT<S> fft;
    std::vector<Complex> buf(na), spec(na);
    for (std::size_t l = 0; l < starts.size(); l += 2) {
      const Index p0 = starts[l];
      const bool pair = l + 1 < starts.size();
      const Index p1 = pair ? starts[l + 1] : 0;
      for (int j = 0; j < na; ++j)
        buf[j] = Complex(in[p0 + j * st], pair ? in[p1 + j * st] : S(0));
      fft.fwd(spec.data(), buf.data(), na);
      for (int j = 0; j < na; ++j) spec[j] *= mult[j];
      fft.inv(buf.data(), spec.data(), na);
      for (int j = 0; j < na; ++j) {
        out[p0 + j * st] = buf[j].real();
        if (pair) out[p1 + j * st] = buf[j].imag();
      }
    }
  }

  void transform_lines(Spectrum& c, int axis, bool inverse) const {
    const int na = grid_.n[axis];
    const Index st = grid_.stride(axis);
    Eigen::FFT<S> fft;
    std::vector<Complex> buf(na), spec(na);
    for (Index p0 : line_starts_[axis]) {
      for (int j = 0; j < na; ++j) buf[j] = c[p0 + j * st];
      if (inverse)
        fft.inv(spec.data(), buf.data(), na);
      else
        fft.fwd(spec.data(), buf.data(), na);
      for (int j = 0; j < na; ++j) c[p0 + j * st] = spec[j];
    }
  }

  void finite_difference(const ScalarF& f, ScalarF& out, int axis) const {
    const int na = grid_.n[axis];
    const Index st = grid_.stride(axis);
    const S h = static_cast<S>(grid_.spacing(axis));
    const bool fd2 = grid_.backend == Backend::FD2;
    const int reach = fd2 ? 1 : 2;
    const S c1 = fd2 ? S(1) / (2 * h) : S(8) / (12 * h);
    const S c2 = fd2 ? S(0) : S(-1) / (12 * h);
    if (st > 1) {
      // memory is [outer][j][st]: difference whole contiguous slabs
      using Slab = Eigen::Map<const Eigen::Array<S, Eigen::Dynamic, 1>>;
      const Index block = st * na;
      auto slab = [&](Index base, int j) { return Slab(f.data() + base + ((j % na + na) % na) * st, st); };
      for (Index base = 0; base < f.size(); base += block) {
        for (int j = 0; j < na; ++j) {
          auto o = Eigen::Map<Eigen::Array<S, Eigen::Dynamic, 1>>(out.data() + base + j * st, st);
          o = c1 * (slab(base, j + 1) - slab(base, j - 1));
          if (!fd2) o += c2 * (slab(base, j + 2) - slab(base, j - 2));
        }
      }
      return;
    }
    for (Index p0 : line_starts_[axis]) {
      const S* line = f.data() + p0;
      auto wrapped = [&](int j) { return line[static_cast<Index>(((j % na) + na) % na) * st]; };
      for (int j = 0; j < na; ++j) {
        S d;
        if (j >= reach && j < na - reach) {
          const S* q = line + j * st;
          d = c1 * (q[st] - q[-st]);
          if (!fd2) d += c2 * (q[2 * st] - q[-2 * st]);
        } else {
          d = c1 * (wrapped(j + 1) - wrapped(j - 1));
          if (!fd2) d += c2 * (wrapped(j + 2) - wrapped(j - 2));
        }
        out[p0 + j * st] = d;
      }
    }
  }

  Grid grid_;
  std::array<std::vector<Index>, 3> line_starts_;
  std::array<std::vector<S>, 3> symbol_;
  std::array<std::vector<S>, 3> filter_;
};

using Ops = Calculus<double>;

/// Coordinates of every grid point along one axis.
inline ScalarField coordinate_field(const Grid& grid, int axis) {
  ScalarField x(grid.size());
  for (Index p = 0; p < grid.size(); ++p) x[p] = grid.coordinate(axis, p);
  return x;
}

inline std::string to_string(Backend backend) {
  switch (backend) {
    case Backend::Spectral: return "spectral";
    case Backend::FD2: return "fd2";
    case Backend::FD4: return "fd4";
  }
  return "unknown";
}

inline Backend backend_from_string(const std::string& name) {
  if (name == "spectral") return Backend::Spectral;
  if (name == "fd2") return Backend::FD2;
  if (name == "fd4") return Backend::FD4;
  throw ConfigError("unknown backend '" + name + "' (expected spectral, fd2 or fd4)");
}

}  // namespace helicity
