#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace viscospec {

struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NullspaceDeficient : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Interior nodes of a rectangle (0,lx) x (0,ly). Node (i,j) sits at
/// ((i+1)hx, (j+1)hy) with h = l/(n+1).
struct RectGrid {
  int nx = 0;
  int ny = 0;
  double lx = 1.0;
  double ly = 1.0;
  double hx = 0.0;
  double hy = 0.0;
  bool periodic = false;  // cross-check mode: wrap links, uniform mass

  RectGrid(int nx_, int ny_, double lx_ = 1.0, double ly_ = 1.0,
           bool periodic_ = false)
      : nx(nx_), ny(ny_), lx(lx_), ly(ly_), periodic(periodic_) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("RectGrid: n < 1");
    if (lx <= 0.0 || ly <= 0.0) throw std::invalid_argument("RectGrid: l <= 0");
    if (static_cast<long>(nx) * ny > 4096)
      throw BudgetExceeded("RectGrid: nx*ny > 4096");
    hx = periodic ? lx / nx : lx / (nx + 1);
    hy = periodic ? ly / ny : ly / (ny + 1);
  }

  int nodes() const { return nx * ny; }
  int node(int i, int j) const { return j * nx + i; }
};

/// Discrete operators for one column of the matrix-field problem.
/// A matrix field decouples column-wise: column j is the vector field
/// (phi_1j, phi_2j), and stiffness, mass and the divergence constraint
/// act on each column independently and identically. The full
/// matrix-field operators are two diagonal blocks of these.
struct Assembly {
  Eigen::MatrixXd A;  // (grad,grad) + (.,.), 2N x 2N
  Eigen::MatrixXd M;  // diagonal quadrature mass, 2N x 2N
  Eigen::MatrixXd D;  // column divergence, N x 2N
};

namespace detail {

// Per-axis quadrature weight: boundary cells extend to the wall.
inline double axis_weight(int i, int n, double h, bool periodic) {
  if (periodic) return h;
  return (n > 1 && (i == 0 || i == n - 1)) ? 1.5 * h : h;
}

}  // namespace detail

inline Assembly assemble(const RectGrid& g) {
  const int N = g.nodes();
  Assembly out;
  out.A = Eigen::MatrixXd::Zero(2 * N, 2 * N);
  out.M = Eigen::MatrixXd::Zero(2 * N, 2 * N);
  out.D = Eigen::MatrixXd::Zero(N, 2 * N);

  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      double w = detail::axis_weight(i, g.nx, g.hx, g.periodic) *
                 detail::axis_weight(j, g.ny, g.hy, g.periodic);
      int p = g.node(i, j);
      out.M(p, p) = w;
      out.M(N + p, N + p) = w;
    }

  // Gradient energy over forward-difference links; a missing link at the
  // wall is simply absent, which is the natural boundary condition.
  auto add_link = [&](int p, int q, double coef) {
    for (int c = 0; c < 2; ++c) {
      int a = c * N + p, b = c * N + q;
      out.A(a, a) += coef;
      out.A(b, b) += coef;
      out.A(a, b) -= coef;
      out.A(b, a) -= coef;
    }
  };
  // Transverse quadrature weight of the link strip, wall-extended like the
  // mass weights; plain h/h would under-count gradient energy in the wall
  // strips and cost an order of accuracy in the eigenvalues.
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      int p = g.node(i, j);
      if (i + 1 < g.nx || g.periodic)
        add_link(p, g.node((i + 1) % g.nx, j),
                 detail::axis_weight(j, g.ny, g.hy, g.periodic) / g.hx);
      if (j + 1 < g.ny || g.periodic)
        add_link(p, g.node(i, (j + 1) % g.ny),
                 detail::axis_weight(i, g.nx, g.hx, g.periodic) / g.hy);
    }
  out.A += out.M;

  // Divergence: centered in the interior, one-sided at the walls.
  auto add_dx = [&](int row, int comp, int i, int j, double coef) {
    out.D(row, comp * N + g.node(i, j)) += coef;
  };
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      int p = g.node(i, j);
      if (g.periodic) {
        if (g.nx > 1) {
          add_dx(p, 0, (i + 1) % g.nx, j, 0.5 / g.hx);
          add_dx(p, 0, (i - 1 + g.nx) % g.nx, j, -0.5 / g.hx);
        }
        if (g.ny > 1) {
          add_dx(p, 1, i, (j + 1) % g.ny, 0.5 / g.hy);
          add_dx(p, 1, i, (j - 1 + g.ny) % g.ny, -0.5 / g.hy);
        }
        continue;
      }
      if (g.nx > 1) {
        if (i == 0) {
          if (g.nx > 2) {  // second-order one-sided
            add_dx(p, 0, 0, j, -1.5 / g.hx);
            add_dx(p, 0, 1, j, 2.0 / g.hx);
            add_dx(p, 0, 2, j, -0.5 / g.hx);
          } else {
            add_dx(p, 0, 1, j, 1.0 / g.hx);
            add_dx(p, 0, 0, j, -1.0 / g.hx);
          }
        } else if (i == g.nx - 1) {
          if (g.nx > 2) {
            add_dx(p, 0, i, j, 1.5 / g.hx);
            add_dx(p, 0, i - 1, j, -2.0 / g.hx);
            add_dx(p, 0, i - 2, j, 0.5 / g.hx);
          } else {
            add_dx(p, 0, i, j, 1.0 / g.hx);
            add_dx(p, 0, i - 1, j, -1.0 / g.hx);
          }
        } else {
          add_dx(p, 0, i + 1, j, 0.5 / g.hx);
          add_dx(p, 0, i - 1, j, -0.5 / g.hx);
        }
      }
      if (g.ny > 1) {
        if (j == 0) {
          if (g.ny > 2) {
            add_dx(p, 1, i, 0, -1.5 / g.hy);
            add_dx(p, 1, i, 1, 2.0 / g.hy);
            add_dx(p, 1, i, 2, -0.5 / g.hy);
          } else {
            add_dx(p, 1, i, 1, 1.0 / g.hy);
            add_dx(p, 1, i, 0, -1.0 / g.hy);
          }
        } else if (j == g.ny - 1) {
          if (g.ny > 2) {
            add_dx(p, 1, i, j, 1.5 / g.hy);
            add_dx(p, 1, i, j - 1, -2.0 / g.hy);
            add_dx(p, 1, i, j - 2, 0.5 / g.hy);
          } else {
            add_dx(p, 1, i, j, 1.0 / g.hy);
            add_dx(p, 1, i, j - 1, -1.0 / g.hy);
          }
        } else {
          add_dx(p, 1, i, j + 1, 0.5 / g.hy);
          add_dx(p, 1, i, j - 1, -0.5 / g.hy);
        }
      }
    }
  return out;
}

/// Eigenvalue and matrix-field eigenfunction. phi holds the d^2 = 4
/// component grids flattened as phi[c], c = 2*row + col, each of size
/// grid.nodes(), node-major as RectGrid::node.
struct EigenPair {
  double lambda = 0.0;
  std::vector<Eigen::VectorXd> phi;  // 4 components
};

namespace detail {

struct ColumnModes {
  Eigen::VectorXd lambda;  // ascending
  Eigen::MatrixXd vecs;    // 2N x m, M-orthonormal, D vecs = 0
};

inline ColumnModes solve_column(const Assembly& asm_, int want) {
  const int two_n = static_cast<int>(asm_.A.rows());

  // Null space of the divergence constraint: orthogonal complement of the
  // column space of D^T via rank-revealing QR.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(asm_.D.transpose());
  qr.setThreshold(1e-10);
  int rank = static_cast<int>(qr.rank());
  int dim = two_n - rank;
  if (dim < want)
    throw NullspaceDeficient("eigensolve: divergence-free subspace too small");
  Eigen::MatrixXd Q = qr.householderQ();
  Eigen::MatrixXd Z = Q.rightCols(dim);

  Eigen::MatrixXd Ar = Z.transpose() * asm_.A * Z;
  Eigen::MatrixXd Mr = Z.transpose() * asm_.M * Z;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Ar, Mr);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigensolve: eigendecomposition failed");

  ColumnModes out;
  out.lambda = es.eigenvalues().head(want);
  out.vecs = Z * es.eigenvectors().leftCols(want);
  // The solver returns B-orthonormal vectors of the reduced pencil, which
  // are already M-orthonormal after lifting; renormalize for safety.
  for (int c = 0; c < want; ++c) {
    double nrm = std::sqrt(out.vecs.col(c).dot(asm_.M * out.vecs.col(c)));
    out.vecs.col(c) /= nrm;
  }
  return out;
}

}  // namespace detail

/// k smallest eigenpairs of the matrix-field Neumann problem, ascending.
/// Solves the column subproblem once and duplicates it across the two
/// columns, interleaving by eigenvalue.
inline std::vector<EigenPair> eigensolve(const RectGrid& g, int k) {
  if (k < 1) throw std::invalid_argument("eigensolve: k < 1");
  const int N = g.nodes();
  Assembly asm_ = assemble(g);
  int per_column = (k + 1) / 2;
  auto col = detail::solve_column(asm_, std::min(per_column + 1, 2 * N));
  if (2 * col.lambda.size() < k)
    throw NullspaceDeficient("eigensolve: divergence-free subspace too small");

  std::vector<EigenPair> out;
  out.reserve(k);
  for (int m = 0; m < col.lambda.size() && static_cast<int>(out.size()) < k; ++m) {
    for (int column = 0; column < 2 && static_cast<int>(out.size()) < k; ++column) {
      EigenPair ep;
      ep.lambda = col.lambda(m);
      ep.phi.assign(4, Eigen::VectorXd::Zero(N));
      // Column vector (v1, v2) fills phi_1c and phi_2c.
      ep.phi[0 * 2 + column] = col.vecs.col(m).head(N);
      ep.phi[1 * 2 + column] = col.vecs.col(m).tail(N);
      out.push_back(std::move(ep));
    }
  }
  return out;
}

struct Projection {
  Eigen::VectorXd coeffs;
  std::vector<Eigen::VectorXd> reconstruction;  // 4 components
  double residual_norm = 0.0;
  double residual_alignment = 0.0;  // max |(residual, phi^j)|
};

/// Expand a matrix field in an M-orthonormal basis and rebuild it.
inline Projection project_Pn(const RectGrid& g,
                             const std::vector<Eigen::VectorXd>& field,
                             const std::vector<EigenPair>& basis) {
  const int N = g.nodes();
  Eigen::VectorXd w(N);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      w(g.node(i, j)) = detail::axis_weight(i, g.nx, g.hx, g.periodic) *
                        detail::axis_weight(j, g.ny, g.hy, g.periodic);
  auto dot_h = [&](const std::vector<Eigen::VectorXd>& a,
                   const std::vector<Eigen::VectorXd>& b) {
    double s = 0.0;
    for (int c = 0; c < 4; ++c) s += (a[c].array() * b[c].array() * w.array()).sum();
    return s;
  };

  Projection out;
  out.coeffs.resize(static_cast<int>(basis.size()));
  out.reconstruction.assign(4, Eigen::VectorXd::Zero(N));
  for (std::size_t m = 0; m < basis.size(); ++m) {
    double d = dot_h(field, basis[m].phi);
    out.coeffs(static_cast<int>(m)) = d;
    for (int c = 0; c < 4; ++c) out.reconstruction[c] += d * basis[m].phi[c];
  }
  std::vector<Eigen::VectorXd> res(4);
  for (int c = 0; c < 4; ++c) res[c] = field[c] - out.reconstruction[c];
  out.residual_norm = std::sqrt(dot_h(res, res));
  for (const auto& ep : basis)
    out.residual_alignment =
        std::max(out.residual_alignment, std::abs(dot_h(res, ep.phi)));
  return out;
}

}  // namespace viscospec
