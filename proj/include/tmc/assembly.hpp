#pragma once

#include <map>
#include <optional>

#include <Eigen/Sparse>

#include "tmc/material.hpp"
#include "tmc/projection.hpp"

namespace tmc {

/// Material parameters per region tag.
struct MaterialMap {
  std::map<int, BodyParams> bodies;
  ThirdMediumParams medium;

  MaterialModel model_for(const Region& region) const;
};

/// Component-wise prescribed displacement at full load; unset components
/// stay free.
struct PrescribedMotion {
  std::optional<double> ux;
  std::optional<double> uy;
};

/// Free/prescribed split of the global vector DOFs. Prescribing a boundary
/// set constrains its vertex DOFs and the midpoint DOFs of its edges.
struct DofPartition {
  int n_total = 0;
  std::vector<char> is_prescribed;
  VectorXd full_load_value;          // per-DOF value at load factor 1
  std::vector<int> free_of_global;   // -1 on prescribed DOFs
  std::vector<int> global_of_free;

  int n_free() const { return static_cast<int>(global_of_free.size()); }
};

DofPartition build_partition(const PolygonalMesh& mesh, const GlobalDofMap& dofmap,
                             const std::map<std::string, PrescribedMotion>& targets);

/// u[p] = factor * full_load_value[p] on prescribed DOFs.
void apply_prescribed(const DofPartition& partition, double factor, VectorXd& u);

struct GlobalSystem {
  VectorXd full_residual;                // all vector DOFs, prescribed rows kept
  VectorXd residual;                     // free DOFs
  Eigen::SparseMatrix<double> tangent;   // free x free, symmetric
  double energy = 0.0;
};

/// Element displacement vector in the canonical interleaved layout.
VectorXd gather_element_dofs(const ElementOperators& ops, const VectorXd& u);

VectorXd element_residual(const ElementOperators& ops, const VectorXd& edofs,
                          const MaterialModel& model);
MatrixXd element_tangent(const ElementOperators& ops, const VectorXd& edofs,
                         const MaterialModel& model);
double element_energy(const ElementOperators& ops, const VectorXd& edofs,
                      const MaterialModel& model);

/// Scatter-add of all element systems; element evaluation may run in
/// parallel, results are merged in element order so the outcome is bitwise
/// independent of the thread count. Material failures carry the element id.
GlobalSystem assemble(const PolygonalMesh& mesh, const std::vector<ElementOperators>& ops,
                      const MaterialMap& materials, const VectorXd& u,
                      const DofPartition& partition, int threads = 1, bool need_tangent = true);

/// Sum of full-residual entries over the set's prescribed DOFs, componentwise.
Vector2d reaction_force(const PolygonalMesh& mesh, const GlobalDofMap& dofmap,
                        const DofPartition& partition, const VectorXd& full_residual,
                        const std::string& set_name);

}  // namespace tmc
