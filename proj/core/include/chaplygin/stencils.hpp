#pragma once

#include <vector>

#include "chaplygin/geometry.hpp"
#include "chaplygin/types.hpp"

namespace chaplygin::solver {

using geometry::Mesh;

/// Per-node linear operators that recover the xi-gradient (all nodes) and
/// xi-Hessian (interior nodes) from nodal values.
///
/// The weights are built from difference quotients in the mapped (u,v)
/// coordinates combined with *discretely differenced* metrics: the same 1-D
/// operators are applied to the mesh coordinates themselves. That choice
/// makes every operator annihilate fields that are linear in xi exactly (up
/// to roundoff), independent of the curvature of the map. Second-order
/// centered stencils are used in the interior and second-order one-sided
/// closures on the boundaries.
struct NodeOperator {
  std::vector<int> stencil;   // flat node indices
  std::vector<double> w_p1;   // d/d xi1
  std::vector<double> w_p2;   // d/d xi2
  std::vector<double> w_h11;  // d^2/d xi1^2   (interior nodes only)
  std::vector<double> w_h12;
  std::vector<double> w_h22;
  bool has_hessian = false;
};

class DiscreteOps {
 public:
  explicit DiscreteOps(const Mesh& mesh);

  const Mesh& mesh() const { return *mesh_; }
  const NodeOperator& at(int i, int j) const { return ops_[mesh_->idx(i, j)]; }
  const NodeOperator& at(int k) const { return ops_[k]; }

  Vec2 gradient(const ScalarField& f, int i, int j) const;
  Sym2 hessian(const ScalarField& f, int i, int j) const;

  /// Gradient of an arbitrary nodal field (used by diagnostics on derived
  /// fields such as L^2).
  Vec2 gradient_of(const std::vector<double>& nodal, int i, int j) const;

 private:
  const Mesh* mesh_;
  std::vector<NodeOperator> ops_;
};

}  // namespace chaplygin::solver
