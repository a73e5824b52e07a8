#pragma once

// Structured trilinear-hex discretization of the two parametrized diffusion
// problems on the unit cube, with nested grids for geometric multigrid.

#include <array>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rbws/common.hpp"
#include "rbws/sparse.hpp"

namespace rbws {

struct ParamPoint {
  std::vector<double> values;

  ParamPoint() = default;
  explicit ParamPoint(std::vector<double> v) : values(std::move(v)) {}
  ParamPoint(std::initializer_list<double> v) : values(v) {}

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  bool operator==(const ParamPoint&) const = default;
};

struct ParamBox {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dimension() const noexcept { return lower.size(); }
  bool contains(const ParamPoint& mu) const noexcept;
  // Throws DomainError unless lower < upper in every dimension.
  void validate() const;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

enum class ProblemId { example1, example2 };

// Which grid nodes carry Dirichlet data. `natural` has none (singular
// operator, only used to inspect unconstrained stiffness).
enum class Boundary { all_dirichlet, neumann_x1, natural };

class ProblemSpec {
 public:
  // -div((1 + mu1 sin^2(20 pi rho)) grad u) = 3 pi^2 sin(pi x) sin(pi y) sin(pi z),
  // rho = 4(x-1/2)^2 + (y-1/2)^2 + (z-1/2)^2, Dirichlet everywhere. mu in [0,2]x[0,1].
  static ProblemSpec example1();
  // Piecewise-constant anisotropic diffusion nu(x;mu) diag(1,1,1e-2), Gaussian
  // source, homogeneous Dirichlet except a homogeneous Neumann face at x = 1.
  static ProblemSpec example2();
  // "example-1" / "example-2" (also "ex1", "ex2", "1", "2").
  static ProblemSpec from_name(std::string_view name);

  ProblemId id() const noexcept { return id_; }
  std::string name() const;
  const ParamBox& box() const noexcept { return box_; }
  std::size_t parameter_dimension() const noexcept { return box_.dimension(); }
  Boundary boundary() const noexcept { return boundary_; }

  // Scalar diffusion factor; the full tensor is diffusion() * diag(anisotropy()).
  double diffusion(Point3 p, const ParamPoint& mu) const;
  std::array<double, 3> anisotropy() const noexcept { return anisotropy_; }
  double source(Point3 p, const ParamPoint& mu) const;
  double dirichlet(Point3 p, const ParamPoint& mu) const;

  // DomainError when mu has the wrong size or lies outside the box.
  void check(const ParamPoint& mu) const;

 private:
  ProblemSpec(ProblemId id, ParamBox box, Boundary boundary, std::array<double, 3> anisotropy)
      : id_(id), box_(std::move(box)), boundary_(boundary), anisotropy_(anisotropy) {}

  ProblemId id_;
  ParamBox box_;
  Boundary boundary_;
  std::array<double, 3> anisotropy_;
};

// One uniform level of the unit-cube grid with its free-DoF numbering.
class GridLevel {
 public:
  GridLevel(Index cells, Boundary boundary);

  Index cells() const noexcept { return cells_; }
  Index nodes_per_dim() const noexcept { return cells_ + 1; }
  Index node_count() const noexcept { return nodes_per_dim() * nodes_per_dim() * nodes_per_dim(); }
  Index dofs() const noexcept { return static_cast<Index>(dof_to_node_.size()); }
  Boundary boundary() const noexcept { return boundary_; }
  double spacing() const noexcept { return 1.0 / cells_; }

  Index node(Index i, Index j, Index k) const noexcept {
    return i + nodes_per_dim() * (j + nodes_per_dim() * k);
  }
  std::array<Index, 3> node_ijk(Index node) const noexcept;
  Point3 coordinates(Index node) const noexcept;

  // -1 for Dirichlet nodes.
  Index dof_of_node(Index node) const noexcept { return node_to_dof_[static_cast<std::size_t>(node)]; }
  Index node_of_dof(Index dof) const noexcept { return dof_to_node_[static_cast<std::size_t>(dof)]; }

  // Sparsity of the 27-point stencil restricted to free DoFs. stencil_slot(d, s)
  // is the value position of neighbour s = (di+1) + 3(dj+1) + 9(dk+1), or -1.
  const CsrMatrix& pattern() const noexcept { return pattern_; }
  std::int64_t stencil_slot(Index dof, int s) const noexcept {
    return stencil_slots_[static_cast<std::size_t>(dof) * 27 + static_cast<std::size_t>(s)];
  }

 private:
  Index cells_;
  Boundary boundary_;
  std::vector<Index> node_to_dof_;
  std::vector<Index> dof_to_node_;
  CsrMatrix pattern_;
  std::vector<std::int64_t> stencil_slots_;
};

struct MeshHierarchy {
  std::vector<std::shared_ptr<const GridLevel>> levels;  // coarsest first
  std::vector<CsrMatrix> prolongations;                  // [i]: level i -> i+1
  std::vector<CsrMatrix> restrictions;                   // transposes of prolongations

  std::size_t level_count() const noexcept { return levels.size(); }
  const GridLevel& finest() const { return *levels.back(); }
  std::shared_ptr<const GridLevel> finest_ptr() const { return levels.back(); }
};

// Level i has base_cells * 2^i cells per dimension; prolongation is trilinear
// interpolation restricted to free DoFs. Requires levels >= 2, base_cells >= 2.
MeshHierarchy build_hierarchy(int levels, Index base_cells, Boundary boundary = Boundary::all_dirichlet);

struct AssembledSystem {
  std::shared_ptr<const CsrMatrix> matrix;
  Vector rhs;
  ParamPoint mu;
  std::shared_ptr<const GridLevel> grid;

  const CsrMatrix& A() const { return *matrix; }
  const Vector& f() const noexcept { return rhs; }
  Index size() const noexcept { return matrix ? matrix->rows() : 0; }
};

// Rows of A(mu) and f(mu) at a subset of DoFs (in the order requested).
struct SampledRows {
  CsrMatrix rows;
  Vector rhs;
};

AssembledSystem assemble_system(const ProblemSpec& spec, const ParamPoint& mu,
                                std::shared_ptr<const GridLevel> grid);

SampledRows assemble_rows(const ProblemSpec& spec, const ParamPoint& mu, const GridLevel& grid,
                          std::span<const Index> dofs);

// P^T A P.
CsrMatrix galerkin_coarsen(const CsrMatrix& a_fine, const CsrMatrix& prolongation);

// A parametrized family mu -> (A(mu), f(mu)) of fixed size.
class DiscreteProblem {
 public:
  virtual ~DiscreteProblem() = default;
  virtual Index size() const = 0;
  virtual std::size_t parameter_dimension() const = 0;
  virtual AssembledSystem assemble(const ParamPoint& mu) const = 0;
  // Default implementation assembles the full system and slices it.
  virtual SampledRows assemble_rows(const ParamPoint& mu, std::span<const Index> dofs) const;
};

class FemProblem final : public DiscreteProblem {
 public:
  FemProblem(ProblemSpec spec, std::shared_ptr<const MeshHierarchy> mesh);

  Index size() const override { return mesh_->finest().dofs(); }
  std::size_t parameter_dimension() const override { return spec_.parameter_dimension(); }
  AssembledSystem assemble(const ParamPoint& mu) const override;
  SampledRows assemble_rows(const ParamPoint& mu, std::span<const Index> dofs) const override;

  const ProblemSpec& spec() const noexcept { return spec_; }
  const std::shared_ptr<const MeshHierarchy>& mesh() const noexcept { return mesh_; }

 private:
  ProblemSpec spec_;
  std::shared_ptr<const MeshHierarchy> mesh_;
};

}  // namespace rbws
