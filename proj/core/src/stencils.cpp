#include "chaplygin/stencils.hpp"

#include <array>
#include <cmath>

#include "chaplygin/errors.hpp"

namespace chaplygin::solver {

namespace {

using geometry::BoundaryTag;

// A 3-point 1-D difference operator along one mapped direction.
struct Op1D {
  std::array<int, 3> off;
  std::array<double, 3> w;
};

Op1D first_centered(double h) { return {{-1, 0, 1}, {-0.5 / h, 0.0, 0.5 / h}}; }
Op1D first_onesided_low(double h) { return {{0, 1, 2}, {-1.5 / h, 2.0 / h, -0.5 / h}}; }
Op1D first_onesided_high(double h) { return {{0, -1, -2}, {1.5 / h, -2.0 / h, 0.5 / h}}; }
Op1D second_centered(double h) { return {{-1, 0, 1}, {1.0 / (h * h), -2.0 / (h * h), 1.0 / (h * h)}}; }

// Weights over the local (-2..2)^2 offset grid.
struct LocalWeights {
  std::array<double, 25> w{};
  static int slot(int di, int dj) { return (di + 2) + 5 * (dj + 2); }
  void add_u(const Op1D& op) {
    for (int k = 0; k < 3; ++k) w[slot(op.off[k], 0)] += op.w[k];
  }
  void add_v(const Op1D& op) {
    for (int k = 0; k < 3; ++k) w[slot(0, op.off[k])] += op.w[k];
  }
  void add_cross(const Op1D& opu, const Op1D& opv) {
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) w[slot(opu.off[a], opv.off[b])] += opu.w[a] * opv.w[b];
  }
};

struct Mat3 {
  std::array<double, 9> m{};
  double& at(int r, int c) { return m[3 * r + c]; }
  double at(int r, int c) const { return m[3 * r + c]; }
};

Mat3 invert3(const Mat3& a) {
  Mat3 inv;
  const double* v = a.m.data();
  const double c00 = v[4] * v[8] - v[5] * v[7];
  const double c01 = v[5] * v[6] - v[3] * v[8];
  const double c02 = v[3] * v[7] - v[4] * v[6];
  const double det = v[0] * c00 + v[1] * c01 + v[2] * c02;
  if (det == 0.0) throw Error(ErrorCode::FoldedMesh, "degenerate Hessian metric system");
  const double id = 1.0 / det;
  inv.at(0, 0) = c00 * id;
  inv.at(0, 1) = (v[2] * v[7] - v[1] * v[8]) * id;
  inv.at(0, 2) = (v[1] * v[5] - v[2] * v[4]) * id;
  inv.at(1, 0) = c01 * id;
  inv.at(1, 1) = (v[0] * v[8] - v[2] * v[6]) * id;
  inv.at(1, 2) = (v[2] * v[3] - v[0] * v[5]) * id;
  inv.at(2, 0) = c02 * id;
  inv.at(2, 1) = (v[1] * v[6] - v[0] * v[7]) * id;
  inv.at(2, 2) = (v[0] * v[4] - v[1] * v[3]) * id;
  return inv;
}

}  // namespace

DiscreteOps::DiscreteOps(const Mesh& mesh) : mesh_(&mesh) {
  ops_.resize(mesh.size());
  const int nu = mesh.n_u, nv = mesh.n_v;

  for (int j = 0; j < nv; ++j) {
    for (int i = 0; i < nu; ++i) {
      NodeOperator& op = ops_[mesh.idx(i, j)];

      const Op1D du = (i == 0)        ? first_onesided_low(mesh.h_u)
                      : (i == nu - 1) ? first_onesided_high(mesh.h_u)
                                      : first_centered(mesh.h_u);
      const Op1D dv = (j == 0)        ? first_onesided_low(mesh.h_v)
                      : (j == nv - 1) ? first_onesided_high(mesh.h_v)
                                      : first_centered(mesh.h_v);

      LocalWeights wu, wv;
      wu.add_u(du);
      wv.add_v(dv);

      const bool interior = mesh.tag(i, j) == BoundaryTag::interior;
      LocalWeights wuu, wvv, wuv;
      if (interior) {
        wuu.add_u(second_centered(mesh.h_u));
        wvv.add_v(second_centered(mesh.h_v));
        wuv.add_cross(du, dv);
      }

      // Union of involved offsets, in deterministic order.
      std::array<bool, 25> used{};
      auto mark = [&used](const LocalWeights& lw) {
        for (int s = 0; s < 25; ++s)
          if (lw.w[s] != 0.0) used[s] = true;
      };
      mark(wu);
      mark(wv);
      used[LocalWeights::slot(0, 0)] = true;
      if (interior) {
        mark(wuu);
        mark(wvv);
        mark(wuv);
      }

      std::vector<int> slots;
      for (int dj = -2; dj <= 2; ++dj)
        for (int di = -2; di <= 2; ++di)
          if (used[LocalWeights::slot(di, dj)]) {
            slots.push_back(LocalWeights::slot(di, dj));
            op.stencil.push_back(mesh.idx(i + di, j + dj));
          }
      const int ns = static_cast<int>(slots.size());

      auto gather = [&slots, ns](const LocalWeights& lw) {
        std::vector<double> out(ns);
        for (int k = 0; k < ns; ++k) out[k] = lw.w[slots[k]];
        return out;
      };
      const std::vector<double> cu = gather(wu);
      const std::vector<double> cv = gather(wv);

      // Discretely differenced metrics: the same operators applied to the
      // node coordinates. This is what makes xi-linear fields annihilate
      // exactly.
      Vec2 xu{}, xv{};
      for (int k = 0; k < ns; ++k) {
        const Vec2 p = mesh.nodes[op.stencil[k]];
        xu = xu + cu[k] * p;
        xv = xv + cv[k] * p;
      }
      const double det = xu.x1 * xv.x2 - xu.x2 * xv.x1;
      if (det == 0.0) throw Error(ErrorCode::FoldedMesh, "degenerate discrete metric");

      op.w_p1.resize(ns);
      op.w_p2.resize(ns);
      for (int k = 0; k < ns; ++k) {
        op.w_p1[k] = (xv.x2 * cu[k] - xu.x2 * cv[k]) / det;
        op.w_p2[k] = (-xv.x1 * cu[k] + xu.x1 * cv[k]) / det;
      }

      if (interior) {
        const std::vector<double> cuu = gather(wuu);
        const std::vector<double> cvv = gather(wvv);
        const std::vector<double> cuv = gather(wuv);
        Vec2 xuu{}, xvv{}, xuv{};
        for (int k = 0; k < ns; ++k) {
          const Vec2 p = mesh.nodes[op.stencil[k]];
          xuu = xuu + cuu[k] * p;
          xvv = xvv + cvv[k] * p;
          xuv = xuv + cuv[k] * p;
        }

        Mat3 s;
        s.at(0, 0) = xu.x1 * xu.x1;
        s.at(0, 1) = 2.0 * xu.x1 * xu.x2;
        s.at(0, 2) = xu.x2 * xu.x2;
        s.at(1, 0) = xu.x1 * xv.x1;
        s.at(1, 1) = xu.x1 * xv.x2 + xu.x2 * xv.x1;
        s.at(1, 2) = xu.x2 * xv.x2;
        s.at(2, 0) = xv.x1 * xv.x1;
        s.at(2, 1) = 2.0 * xv.x1 * xv.x2;
        s.at(2, 2) = xv.x2 * xv.x2;
        const Mat3 sinv = invert3(s);

        op.w_h11.resize(ns);
        op.w_h12.resize(ns);
        op.w_h22.resize(ns);
        for (int k = 0; k < ns; ++k) {
          const double ruu = cuu[k] - xuu.x1 * op.w_p1[k] - xuu.x2 * op.w_p2[k];
          const double ruv = cuv[k] - xuv.x1 * op.w_p1[k] - xuv.x2 * op.w_p2[k];
          const double rvv = cvv[k] - xvv.x1 * op.w_p1[k] - xvv.x2 * op.w_p2[k];
          op.w_h11[k] = sinv.at(0, 0) * ruu + sinv.at(0, 1) * ruv + sinv.at(0, 2) * rvv;
          op.w_h12[k] = sinv.at(1, 0) * ruu + sinv.at(1, 1) * ruv + sinv.at(1, 2) * rvv;
          op.w_h22[k] = sinv.at(2, 0) * ruu + sinv.at(2, 1) * ruv + sinv.at(2, 2) * rvv;
        }
        op.has_hessian = true;
      }
    }
  }
}

Vec2 DiscreteOps::gradient(const ScalarField& f, int i, int j) const {
  return gradient_of(f.values, i, j);
}

Vec2 DiscreteOps::gradient_of(const std::vector<double>& nodal, int i, int j) const {
  const NodeOperator& op = ops_[mesh_->idx(i, j)];
  Vec2 g{};
  for (size_t k = 0; k < op.stencil.size(); ++k) {
    const double f = nodal[op.stencil[k]];
    g.x1 += op.w_p1[k] * f;
    g.x2 += op.w_p2[k] * f;
  }
  return g;
}

Sym2 DiscreteOps::hessian(const ScalarField& f, int i, int j) const {
  const NodeOperator& op = ops_[mesh_->idx(i, j)];
  if (!op.has_hessian)
    throw Error(ErrorCode::BadParameter, "Hessian stencils exist at interior nodes only");
  Sym2 h{};
  for (size_t k = 0; k < op.stencil.size(); ++k) {
    const double v = f.values[op.stencil[k]];
    h.a11 += op.w_h11[k] * v;
    h.a12 += op.w_h12[k] * v;
    h.a22 += op.w_h22[k] * v;
  }
  return h;
}

}  // namespace chaplygin::solver
