#include "tmc/assembly.hpp"

#include <thread>

namespace tmc {

MaterialModel MaterialMap::model_for(const Region& region) const {
  if (region.is_medium()) return MaterialModel::make_medium(medium);
  auto it = bodies.find(region.body_id);
  if (it == bodies.end())
    throw std::invalid_argument("no material for body" + std::to_string(region.body_id));
  return MaterialModel::make_body(it->second.K, it->second.mu);
}

DofPartition build_partition(const PolygonalMesh& mesh, const GlobalDofMap& dofmap,
                             const std::map<std::string, PrescribedMotion>& targets) {
  DofPartition part;
  part.n_total = dofmap.vector_count();
  part.is_prescribed.assign(part.n_total, 0);
  part.full_load_value = VectorXd::Zero(part.n_total);

  auto prescribe_scalar = [&](int scalar_dof, const PrescribedMotion& motion) {
    if (motion.ux) {
      const int d = GlobalDofMap::x_dof(scalar_dof);
      part.is_prescribed[d] = 1;
      part.full_load_value(d) = *motion.ux;
    }
    if (motion.uy) {
      const int d = GlobalDofMap::y_dof(scalar_dof);
      part.is_prescribed[d] = 1;
      part.full_load_value(d) = *motion.uy;
    }
  };

  for (const auto& [name, motion] : targets) {
    auto it = mesh.boundary_sets.find(name);
    if (it == mesh.boundary_sets.end())
      throw std::invalid_argument("unknown boundary set '" + name + "'");
    for (int v : it->second.vertices) prescribe_scalar(dofmap.vertex_dof(v), motion);
    for (const auto& ed : it->second.edges) {
      const int e = mesh.edge_index(ed[0], ed[1]);
      if (e < 0)
        throw std::invalid_argument("boundary set '" + name + "' references a missing edge");
      prescribe_scalar(dofmap.edge_dof(e), motion);
    }
  }

  part.free_of_global.assign(part.n_total, -1);
  for (int d = 0; d < part.n_total; ++d)
    if (!part.is_prescribed[d]) {
      part.free_of_global[d] = static_cast<int>(part.global_of_free.size());
      part.global_of_free.push_back(d);
    }
  return part;
}

void apply_prescribed(const DofPartition& partition, double factor, VectorXd& u) {
  for (int d = 0; d < partition.n_total; ++d)
    if (partition.is_prescribed[d]) u(d) = factor * partition.full_load_value(d);
}

VectorXd gather_element_dofs(const ElementOperators& ops, const VectorXd& u) {
  VectorXd e(ops.n_vector());
  for (int s = 0; s < ops.n_scalar(); ++s) {
    const int g = ops.dofs.scalar[s];
    e(2 * s) = u(GlobalDofMap::x_dof(g));
    e(2 * s + 1) = u(GlobalDofMap::y_dof(g));
  }
  return e;
}

namespace {

struct ElementSystem {
  VectorXd r;
  MatrixXd K;
  double energy = 0.0;
};

ElementSystem element_system(const ElementOperators& ops, const VectorXd& edofs,
                             const MaterialModel& model, bool need_tangent) {
  const bool is_body = model.kind == MaterialModel::Kind::Body;
  const int nv = ops.n_vector();
  ElementSystem out;
  out.r = VectorXd::Zero(nv);
  if (need_tangent) out.K = MatrixXd::Zero(nv, nv);
  const Vector4d identity_hat = flatten_f(Matrix2d::Identity());

  for (int q = 0; q < ops.quadrature.size(); ++q) {
    const Vector2d x = ops.quadrature.point(q);
    const double w = ops.quadrature.weights(q);
    const MatrixXd B1 = ops.b1(x);
    const Vector4d f_hat = identity_hat + B1 * edofs;
    GradF grad;
    MatrixXd B2;
    if (!is_body) {
      B2 = ops.b2(x);
      grad.hat = B2 * edofs;
    }
    MaterialPointState state;
    try {
      state = evaluate_material(unflatten_f(f_hat), grad, model);
    } catch (const DegenerateState& err) {
      throw DegenerateState(std::string(err.what()) + " (element " +
                                std::to_string(ops.element) + ")",
                            ops.element);
    }
    out.energy += w * state.psi;
    out.r.noalias() += w * (B1.transpose() * state.P_hat);
    if (!is_body) out.r.noalias() += w * (B2.transpose() * state.T_hat);
    if (need_tangent) {
      out.K.noalias() += w * (B1.transpose() * state.D_hat * B1);
      if (!is_body) {
        const MatrixXd AB1 = state.A_hat * B1;
        out.K.noalias() += w * (B2.transpose() * AB1);
        out.K.noalias() += w * (AB1.transpose() * B2);
        out.K.noalias() += w * (B2.transpose() * state.B_hat * B2);
      }
    }
  }
  if (need_tangent) out.K = 0.5 * (out.K + out.K.transpose()).eval();
  return out;
}

}  // namespace

VectorXd element_residual(const ElementOperators& ops, const VectorXd& edofs,
                          const MaterialModel& model) {
  return element_system(ops, edofs, model, false).r;
}

MatrixXd element_tangent(const ElementOperators& ops, const VectorXd& edofs,
                         const MaterialModel& model) {
  return element_system(ops, edofs, model, true).K;
}

double element_energy(const ElementOperators& ops, const VectorXd& edofs,
                      const MaterialModel& model) {
  return element_system(ops, edofs, model, false).energy;
}

GlobalSystem assemble(const PolygonalMesh& mesh, const std::vector<ElementOperators>& ops,
                      const MaterialMap& materials, const VectorXd& u,
                      const DofPartition& partition, int threads, bool need_tangent) {
  const int ne = mesh.n_elements();
  std::vector<ElementSystem> systems(ne);

  auto worker = [&](int first, int stride) {
    for (int e = first; e < ne; e += stride) {
      const MaterialModel model = materials.model_for(mesh.element_region[e]);
      systems[e] = element_system(ops[e], gather_element_dofs(ops[e], u), model, need_tangent);
    }
  };
  if (threads <= 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        try {
          worker(t, threads);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (const auto& err : errors)
      if (err) std::rethrow_exception(err);
  }

  GlobalSystem sys;
  sys.full_residual = VectorXd::Zero(partition.n_total);
  std::vector<Eigen::Triplet<double>> triplets;

  // Serial merge in element order keeps the result thread-count independent.
  for (int e = 0; e < ne; ++e) {
    const auto& dofs = ops[e].dofs.scalar;
    const int nv = ops[e].n_vector();
    std::vector<int> global(nv);
    for (int s = 0; s < ops[e].n_scalar(); ++s) {
      global[2 * s] = GlobalDofMap::x_dof(dofs[s]);
      global[2 * s + 1] = GlobalDofMap::y_dof(dofs[s]);
    }
    sys.energy += systems[e].energy;
    for (int i = 0; i < nv; ++i) sys.full_residual(global[i]) += systems[e].r(i);
    if (need_tangent) {
      for (int i = 0; i < nv; ++i) {
        const int fi = partition.free_of_global[global[i]];
        if (fi < 0) continue;
        for (int j = 0; j < nv; ++j) {
          const int fj = partition.free_of_global[global[j]];
          if (fj >= 0) triplets.emplace_back(fi, fj, systems[e].K(i, j));
        }
      }
    }
  }

  sys.residual.resize(partition.n_free());
  for (int f = 0; f < partition.n_free(); ++f)
    sys.residual(f) = sys.full_residual(partition.global_of_free[f]);
  if (need_tangent) {
    sys.tangent.resize(partition.n_free(), partition.n_free());
    sys.tangent.setFromTriplets(triplets.begin(), triplets.end());
  }
  return sys;
}

Vector2d reaction_force(const PolygonalMesh& mesh, const GlobalDofMap& dofmap,
                        const DofPartition& partition, const VectorXd& full_residual,
                        const std::string& set_name) {
  auto it = mesh.boundary_sets.find(set_name);
  if (it == mesh.boundary_sets.end())
    throw std::invalid_argument("unknown boundary set '" + set_name + "'");
  const auto& set = it->second;
  if (set.vertices.empty() && set.edges.empty())
    throw std::invalid_argument("boundary set '" + set_name + "' is empty");

  Vector2d reaction = Vector2d::Zero();
  auto accumulate = [&](int scalar_dof) {
    const int dx = GlobalDofMap::x_dof(scalar_dof);
    const int dy = GlobalDofMap::y_dof(scalar_dof);
    if (partition.is_prescribed[dx]) reaction.x() += full_residual(dx);
    if (partition.is_prescribed[dy]) reaction.y() += full_residual(dy);
  };
  for (int v : set.vertices) accumulate(dofmap.vertex_dof(v));
  for (const auto& ed : set.edges) {
    const int e = mesh.edge_index(ed[0], ed[1]);
    if (e >= 0) accumulate(dofmap.edge_dof(e));
  }
  return reaction;
}

}  // namespace tmc
