#include "rbws/grid_fem.hpp"

#include <cmath>
#include <numbers>

namespace rbws {

bool ParamBox::contains(const ParamPoint& mu) const noexcept {
  if (mu.size() != dimension()) return false;
  for (std::size_t d = 0; d < dimension(); ++d) {
    if (!(mu[d] >= lower[d] && mu[d] <= upper[d])) return false;
  }
  return true;
}

void ParamBox::validate() const {
  if (lower.size() != upper.size() || lower.empty()) throw DomainError("parameter box: bad dimension");
  for (std::size_t d = 0; d < lower.size(); ++d) {
    if (!(lower[d] < upper[d])) throw DomainError("parameter box: degenerate bounds in dimension " + std::to_string(d));
  }
}

ProblemSpec ProblemSpec::example1() {
  return ProblemSpec(ProblemId::example1, ParamBox{{0.0, 0.0}, {2.0, 1.0}}, Boundary::all_dirichlet,
                     {1.0, 1.0, 1.0});
}

ProblemSpec ProblemSpec::example2() {
  return ProblemSpec(ProblemId::example2,
                     ParamBox{{0.1, 0.1, 0.1, 0.4, 0.4, 0.4, 0.25}, {1.0, 1.0, 1.0, 0.6, 0.6, 0.6, 0.5}},
                     Boundary::neumann_x1, {1.0, 1.0, 1e-2});
}

ProblemSpec ProblemSpec::from_name(std::string_view name) {
  if (name == "example-1" || name == "ex1" || name == "1") return example1();
  if (name == "example-2" || name == "ex2" || name == "2") return example2();
  throw ConfigError("unknown problem '" + std::string(name) + "'");
}

std::string ProblemSpec::name() const { return id_ == ProblemId::example1 ? "example-1" : "example-2"; }

namespace {

constexpr double kPi = std::numbers::pi;

double ex1_radius(Point3 p) {
  const double dx = p.x - 0.5, dy = p.y - 0.5, dz = p.z - 0.5;
  return 4.0 * dx * dx + dy * dy + dz * dz;
}

}  // namespace

double ProblemSpec::diffusion(Point3 p, const ParamPoint& mu) const {
  if (id_ == ProblemId::example1) {
    const double s = std::sin(20.0 * kPi * ex1_radius(p));
    return 1.0 + mu[0] * s * s;
  }
  const bool upper_y = p.y >= 0.5;
  const bool upper_z = p.z >= 0.5;
  if (!upper_y && !upper_z) return mu[0];
  if (!upper_y && upper_z) return mu[1];
  if (upper_y && !upper_z) return mu[2];
  return 1.0;
}

double ProblemSpec::source(Point3 p, const ParamPoint& mu) const {
  if (id_ == ProblemId::example1) {
    return 3.0 * kPi * kPi * std::sin(kPi * p.x) * std::sin(kPi * p.y) * std::sin(kPi * p.z);
  }
  const double dx = p.x - mu[3], dy = p.y - mu[4], dz = p.z - mu[5];
  const double width = mu[6];
  return width + std::exp(-(dx * dx + dy * dy + dz * dz) / width) / width;
}

double ProblemSpec::dirichlet(Point3 p, const ParamPoint& mu) const {
  if (id_ == ProblemId::example2) return 0.0;
  const double blend = mu[1];
  return (1.0 - blend) * std::cos(10.0 * kPi * ex1_radius(p)) +
         blend * std::cos(10.0 * kPi * (p.x + p.y + p.z));
}

void ProblemSpec::check(const ParamPoint& mu) const {
  if (mu.size() != parameter_dimension()) {
    throw DomainError(name() + ": parameter has dimension " + std::to_string(mu.size()) + ", expected " +
                      std::to_string(parameter_dimension()));
  }
  if (!box_.contains(mu)) throw DomainError(name() + ": parameter outside its box");
}

// ---------------------------------------------------------------------------

GridLevel::GridLevel(Index cells, Boundary boundary) : cells_(cells), boundary_(boundary) {
  if (cells < 1) throw DomainError("GridLevel: need at least one cell per dimension");
  const Index n = cells;
  const Index np = n + 1;
  node_to_dof_.assign(static_cast<std::size_t>(np) * np * np, -1);
  for (Index k = 0; k < np; ++k) {
    for (Index j = 0; j < np; ++j) {
      for (Index i = 0; i < np; ++i) {
        bool free = true;
        switch (boundary) {
          case Boundary::all_dirichlet:
            free = i > 0 && i < n && j > 0 && j < n && k > 0 && k < n;
            break;
          case Boundary::neumann_x1:
            free = i > 0 && j > 0 && j < n && k > 0 && k < n;
            break;
          case Boundary::natural:
            break;
        }
        if (free) {
          node_to_dof_[node(i, j, k)] = static_cast<Index>(dof_to_node_.size());
          dof_to_node_.push_back(node(i, j, k));
        }
      }
    }
  }

  // 27-point pattern; neighbour loop order matches increasing node (and DoF) index.
  std::vector<std::int64_t> ptr{0};
  std::vector<Index> cols;
  stencil_slots_.assign(dof_to_node_.size() * 27, -1);
  for (Index d = 0; d < dofs(); ++d) {
    const auto [i, j, k] = node_ijk(dof_to_node_[d]);
    for (int dk = -1; dk <= 1; ++dk) {
      for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          const Index ii = i + di, jj = j + dj, kk = k + dk;
          if (ii < 0 || jj < 0 || kk < 0 || ii > n || jj > n || kk > n) continue;
          const Index nb = node_to_dof_[node(ii, jj, kk)];
          if (nb < 0) continue;
          const int s = (di + 1) + 3 * (dj + 1) + 9 * (dk + 1);
          stencil_slots_[static_cast<std::size_t>(d) * 27 + s] = static_cast<std::int64_t>(cols.size());
          cols.push_back(nb);
        }
      }
    }
    ptr.push_back(static_cast<std::int64_t>(cols.size()));
  }
  std::vector<double> zeros(cols.size(), 0.0);
  pattern_ = CsrMatrix(dofs(), dofs(), std::move(ptr), std::move(cols), std::move(zeros));
}

std::array<Index, 3> GridLevel::node_ijk(Index node) const noexcept {
  const Index np = nodes_per_dim();
  return {node % np, (node / np) % np, node / (np * np)};
}

Point3 GridLevel::coordinates(Index node) const noexcept {
  const auto [i, j, k] = node_ijk(node);
  const double h = spacing();
  return {i * h, j * h, k * h};
}

// ---------------------------------------------------------------------------

namespace {

// Coarse-node weights of one fine node along one axis.
struct AxisWeights {
  Index idx[2];
  double w[2];
  int count;
};

AxisWeights axis_weights(Index fine) {
  if (fine % 2 == 0) return {{fine / 2, 0}, {1.0, 0.0}, 1};
  return {{(fine - 1) / 2, (fine + 1) / 2}, {0.5, 0.5}, 2};
}

CsrMatrix trilinear_prolongation(const GridLevel& coarse, const GridLevel& fine) {
  std::vector<std::int64_t> ptr{0};
  std::vector<Index> cols;
  std::vector<double> vals;
  for (Index d = 0; d < fine.dofs(); ++d) {
    const auto [i, j, k] = fine.node_ijk(fine.node_of_dof(d));
    const AxisWeights wx = axis_weights(i), wy = axis_weights(j), wz = axis_weights(k);
    for (int c = 0; c < wz.count; ++c) {
      for (int b = 0; b < wy.count; ++b) {
        for (int a = 0; a < wx.count; ++a) {
          const Index cd = coarse.dof_of_node(coarse.node(wx.idx[a], wy.idx[b], wz.idx[c]));
          if (cd < 0) continue;
          cols.push_back(cd);
          vals.push_back(wx.w[a] * wy.w[b] * wz.w[c]);
        }
      }
    }
    ptr.push_back(static_cast<std::int64_t>(cols.size()));
  }
  return CsrMatrix(fine.dofs(), coarse.dofs(), std::move(ptr), std::move(cols), std::move(vals));
}

}  // namespace

MeshHierarchy build_hierarchy(int levels, Index base_cells, Boundary boundary) {
  if (levels < 2) throw DomainError("build_hierarchy: need at least 2 levels for a coarse-grid correction");
  if (base_cells < 2) throw DomainError("build_hierarchy: need at least 2 base cells per dimension");
  MeshHierarchy mesh;
  for (int i = 0; i < levels; ++i) {
    mesh.levels.push_back(std::make_shared<const GridLevel>(base_cells << i, boundary));
  }
  for (int i = 0; i + 1 < levels; ++i) {
    mesh.prolongations.push_back(trilinear_prolongation(*mesh.levels[i], *mesh.levels[i + 1]));
    mesh.restrictions.push_back(mesh.prolongations.back().transpose());
  }
  return mesh;
}

// ---------------------------------------------------------------------------

namespace {

// Reference tables for 2x2x2 Gauss quadrature on the unit element [0,1]^3.
// Local node a = ax + 2 ay + 4 az.
struct HexTables {
  std::array<std::array<double, 3>, 8> qp{};              // local coordinates
  std::array<std::array<double, 8>, 8> shape{};           // [q][a]
  std::array<std::array<std::array<double, 3>, 8>, 8> grad{};  // [q][a][d], d/dt

  HexTables() {
    const double g = 0.5 / std::sqrt(3.0);
    const double pts[2] = {0.5 - g, 0.5 + g};
    for (int q = 0; q < 8; ++q) {
      const double t[3] = {pts[q & 1], pts[(q >> 1) & 1], pts[(q >> 2) & 1]};
      qp[q] = {t[0], t[1], t[2]};
      for (int a = 0; a < 8; ++a) {
        double f[3], df[3];
        for (int d = 0; d < 3; ++d) {
          const bool hi = (a >> d) & 1;
          f[d] = hi ? t[d] : 1.0 - t[d];
          df[d] = hi ? 1.0 : -1.0;
        }
        shape[q][a] = f[0] * f[1] * f[2];
        grad[q][a] = {df[0] * f[1] * f[2], f[0] * df[1] * f[2], f[0] * f[1] * df[2]};
      }
    }
  }
};

const HexTables& hex_tables() {
  static const HexTables tables;
  return tables;
}

using ElementMatrix = std::array<std::array<double, 8>, 8>;
using QuadMatrices = std::array<ElementMatrix, 8>;

// sum_d aniso_d grad_a,d grad_b,d at each quadrature point.
QuadMatrices anisotropic_products(const std::array<double, 3>& aniso) {
  const HexTables& t = hex_tables();
  QuadMatrices m{};
  for (int q = 0; q < 8; ++q) {
    for (int a = 0; a < 8; ++a) {
      for (int b = 0; b < 8; ++b) {
        double s = 0.0;
        for (int d = 0; d < 3; ++d) s += aniso[d] * t.grad[q][a][d] * t.grad[q][b][d];
        m[q][a][b] = s;
      }
    }
  }
  return m;
}

class ElementIntegrator {
 public:
  ElementIntegrator(const ProblemSpec& spec, const ParamPoint& mu, double h)
      : spec_(spec), mu_(mu), h_(h), products_(anisotropic_products(spec.anisotropy())) {}

  // Stiffness and load of element (ei, ej, ek).
  void integrate(Index ei, Index ej, Index ek, ElementMatrix& ke, std::array<double, 8>& fe) const {
    const HexTables& t = hex_tables();
    double kappa[8], src[8];
    for (int q = 0; q < 8; ++q) {
      const Point3 p{(ei + t.qp[q][0]) * h_, (ej + t.qp[q][1]) * h_, (ek + t.qp[q][2]) * h_};
      kappa[q] = spec_.diffusion(p, mu_);
      if (!(kappa[q] > 0.0)) throw DomainError("non-positive diffusion coefficient");
      src[q] = spec_.source(p, mu_);
    }
    const double stiff_w = h_ / 8.0;
    const double mass_w = h_ * h_ * h_ / 8.0;
    for (int a = 0; a < 8; ++a) {
      double fa = 0.0;
      for (int q = 0; q < 8; ++q) fa += src[q] * t.shape[q][a];
      fe[a] = mass_w * fa;
      for (int b = 0; b < 8; ++b) {
        double s = 0.0;
        for (int q = 0; q < 8; ++q) s += kappa[q] * products_[q][a][b];
        ke[a][b] = stiff_w * s;
      }
    }
  }

 private:
  const ProblemSpec& spec_;
  const ParamPoint& mu_;
  double h_;
  QuadMatrices products_;
};

constexpr int stencil_offset(int a, int b) {
  return ((b & 1) - (a & 1) + 1) + 3 * (((b >> 1) & 1) - ((a >> 1) & 1) + 1) +
         9 * (((b >> 2) & 1) - ((a >> 2) & 1) + 1);
}

}  // namespace

AssembledSystem assemble_system(const ProblemSpec& spec, const ParamPoint& mu,
                                std::shared_ptr<const GridLevel> grid_ptr) {
  spec.check(mu);
  const GridLevel& grid = *grid_ptr;
  const Index n = grid.cells();
  CsrMatrix a = grid.pattern();
  std::vector<double>& values = a.values();
  Vector f(static_cast<std::size_t>(grid.dofs()), 0.0);

  std::vector<double> g(static_cast<std::size_t>(grid.node_count()), 0.0);
  for (Index node = 0; node < grid.node_count(); ++node) {
    if (grid.dof_of_node(node) < 0) g[node] = spec.dirichlet(grid.coordinates(node), mu);
  }

  const ElementIntegrator integrator(spec, mu, grid.spacing());
  ElementMatrix ke;
  std::array<double, 8> fe;
  std::array<Index, 8> nodes, dofs;
  for (Index ek = 0; ek < n; ++ek) {
    for (Index ej = 0; ej < n; ++ej) {
      for (Index ei = 0; ei < n; ++ei) {
        bool any_free = false;
        for (int c = 0; c < 8; ++c) {
          nodes[c] = grid.node(ei + (c & 1), ej + ((c >> 1) & 1), ek + ((c >> 2) & 1));
          dofs[c] = grid.dof_of_node(nodes[c]);
          any_free = any_free || dofs[c] >= 0;
        }
        if (!any_free) continue;
        integrator.integrate(ei, ej, ek, ke, fe);
        for (int r = 0; r < 8; ++r) {
          const Index row = dofs[r];
          if (row < 0) continue;
          f[row] += fe[r];
          for (int c = 0; c < 8; ++c) {
            if (dofs[c] >= 0) {
              values[grid.stencil_slot(row, stencil_offset(r, c))] += ke[r][c];
            } else {
              f[row] -= ke[r][c] * g[nodes[c]];
            }
          }
        }
      }
    }
  }
  return AssembledSystem{std::make_shared<const CsrMatrix>(std::move(a)), std::move(f), mu,
                         std::move(grid_ptr)};
}

SampledRows assemble_rows(const ProblemSpec& spec, const ParamPoint& mu, const GridLevel& grid,
                          std::span<const Index> dofs) {
  spec.check(mu);
  const Index n = grid.cells();
  const ElementIntegrator integrator(spec, mu, grid.spacing());
  const CsrMatrix& pattern = grid.pattern();

  std::vector<std::int64_t> ptr{0};
  std::vector<Index> cols;
  std::vector<double> vals;
  Vector rhs;
  rhs.reserve(dofs.size());
  ElementMatrix ke;
  std::array<double, 8> fe;
  for (Index row : dofs) {
    if (row < 0 || row >= grid.dofs()) throw DomainError("assemble_rows: DoF out of range");
    const auto [i, j, k] = grid.node_ijk(grid.node_of_dof(row));
    double stencil[27] = {};
    double f = 0.0;
    // The eight elements sharing this node; local index r of the node in each.
    for (int e = 0; e < 8; ++e) {
      const Index ei = i - 1 + (e & 1), ej = j - 1 + ((e >> 1) & 1), ek = k - 1 + ((e >> 2) & 1);
      if (ei < 0 || ej < 0 || ek < 0 || ei >= n || ej >= n || ek >= n) continue;
      const int r = (i - ei) + 2 * (j - ej) + 4 * (k - ek);
      integrator.integrate(ei, ej, ek, ke, fe);
      f += fe[r];
      for (int c = 0; c < 8; ++c) {
        const Index node = grid.node(ei + (c & 1), ej + ((c >> 1) & 1), ek + ((c >> 2) & 1));
        if (grid.dof_of_node(node) >= 0) {
          stencil[stencil_offset(r, c)] += ke[r][c];
        } else {
          f -= ke[r][c] * spec.dirichlet(grid.coordinates(node), mu);
        }
      }
    }
    for (int s = 0; s < 27; ++s) {
      const std::int64_t slot = grid.stencil_slot(row, s);
      if (slot < 0) continue;
      cols.push_back(pattern.col_idx()[slot]);
      vals.push_back(stencil[s]);
    }
    rhs.push_back(f);
    ptr.push_back(static_cast<std::int64_t>(cols.size()));
  }
  return SampledRows{CsrMatrix(static_cast<Index>(dofs.size()), grid.dofs(), std::move(ptr),
                               std::move(cols), std::move(vals)),
                     std::move(rhs)};
}

CsrMatrix galerkin_coarsen(const CsrMatrix& a_fine, const CsrMatrix& prolongation) {
  if (a_fine.rows() != a_fine.cols() || a_fine.cols() != prolongation.rows()) {
    throw DomainError("galerkin_coarsen: dimension mismatch");
  }
  return multiply(prolongation.transpose(), multiply(a_fine, prolongation));
}

// ---------------------------------------------------------------------------

SampledRows DiscreteProblem::assemble_rows(const ParamPoint& mu, std::span<const Index> dofs) const {
  const AssembledSystem sys = assemble(mu);
  Vector rhs;
  rhs.reserve(dofs.size());
  for (Index d : dofs) rhs.push_back(sys.rhs.at(static_cast<std::size_t>(d)));
  return SampledRows{sys.A().select_rows(dofs), std::move(rhs)};
}

FemProblem::FemProblem(ProblemSpec spec, std::shared_ptr<const MeshHierarchy> mesh)
    : spec_(std::move(spec)), mesh_(std::move(mesh)) {
  if (!mesh_ || mesh_->levels.empty()) throw DomainError("FemProblem: empty mesh hierarchy");
  if (mesh_->finest().boundary() != spec_.boundary()) {
    throw DomainError("FemProblem: mesh boundary partition does not match the problem");
  }
}

AssembledSystem FemProblem::assemble(const ParamPoint& mu) const {
  return assemble_system(spec_, mu, mesh_->finest_ptr());
}

SampledRows FemProblem::assemble_rows(const ParamPoint& mu, std::span<const Index> dofs) const {
  return rbws::assemble_rows(spec_, mu, mesh_->finest(), dofs);
}

}  // namespace rbws
