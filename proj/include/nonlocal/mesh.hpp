#pragma once

#include "nonlocal/errors.hpp"
#include "nonlocal/interval.hpp"

#include <Eigen/Core>

#include <vector>

namespace nonlocal {

/// Uniform vertex grid over the truncated line [a-R, b+R] plus one far-field
/// degree of freedom. Vertices carry the unknowns (piecewise-linear hats);
/// the far-field value u_inf closes the field beyond one virtual ramp cell
/// on each side, so every representable field is continuous on all of R and
/// identically u_inf beyond [a-R-h, b+R+h].
class Mesh {
public:
    static Mesh build(const Interval& omega, double h, double R);

    const Interval& omega() const { return omega_; }
    double h() const { return h_; }
    double R() const { return R_; }

    int node_count() const { return n_nodes_; }
    double node(int i) const { return (omega_.a - R_) + i * h_; }

    /// Degrees of freedom: all nodes followed by the far-field value.
    int dof_count() const { return n_nodes_ + 1; }
    int farfield_dof() const { return n_nodes_; }

    int cell_count() const { return n_nodes_ - 1; }
    double cell_left(int c) const { return node(c); }
    double cell_right(int c) const { return node(c + 1); }
    /// A cell is inside Omega iff its midpoint is; cells never straddle the boundary.
    bool cell_inside(int c) const { return omega_.contains(0.5 * (cell_left(c) + cell_right(c))); }

    /// Node indices with coordinate in [a, b]; the vertices exactly at a and b
    /// belong to the interior view.
    const std::vector<int>& interior_nodes() const { return interior_nodes_; }
    /// The remaining node indices (the far-field DOF also counts as exterior).
    const std::vector<int>& exterior_nodes() const { return exterior_nodes_; }

    int index_of_a() const { return idx_a_; }
    int index_of_b() const { return idx_b_; }

    bool node_interior(int i) const { return i >= idx_a_ && i <= idx_b_; }

    /// Outer edges of the virtual ramp cells; the field is constant beyond.
    double left_tail_edge() const { return node(0) - h_; }
    double right_tail_edge() const { return node(n_nodes_ - 1) + h_; }

    /// Index of the cell containing x, clamped to [0, cell_count-1];
    /// valid for x within [a-R, b+R].
    int cell_of(double x) const;

private:
    Interval omega_;
    double h_ = 0.0;
    double R_ = 0.0;
    int n_nodes_ = 0;
    int idx_a_ = 0;
    int idx_b_ = 0;
    std::vector<int> interior_nodes_;
    std::vector<int> exterior_nodes_;
};

/// Nodal values plus the far-field value; evaluable anywhere on the line.
class Field {
public:
    explicit Field(const Mesh& mesh)
        : values(Eigen::VectorXd::Zero(mesh.node_count())), farfield(0.0), mesh_(&mesh) {}

    Field(const Mesh& mesh, Eigen::VectorXd nodal, double u_inf)
        : values(std::move(nodal)), farfield(u_inf), mesh_(&mesh) {
        if (values.size() != mesh.node_count()) throw ValidationError("field size mismatch");
    }

    const Mesh& mesh() const { return *mesh_; }

    /// Pointwise evaluation: P1 on the grid, linear ramps to u_inf over one
    /// virtual cell on each side, constant u_inf beyond.
    double operator()(double x) const;

    /// Stacked DOF vector [nodal values; farfield].
    Eigen::VectorXd dofs() const;
    static Field from_dofs(const Mesh& mesh, const Eigen::VectorXd& dofs);

    template <typename F>
    static Field interpolate(const Mesh& mesh, F&& f, double u_inf) {
        Field out(mesh);
        for (int i = 0; i < mesh.node_count(); ++i) out.values[i] = f(mesh.node(i));
        out.farfield = u_inf;
        return out;
    }

    Eigen::VectorXd values;
    double farfield;

private:
    const Mesh* mesh_;
};

enum class Region { Interior, Exterior };

/// Restriction view: the DOF indices (into the stacked vector) making up one
/// side of the interior/exterior partition, plus accessors into a field.
struct RestrictionView {
    const Field* field = nullptr;
    std::vector<int> node_indices;
    bool includes_farfield = false;

    std::size_t size() const { return node_indices.size() + (includes_farfield ? 1 : 0); }
    double value(std::size_t k) const {
        if (k < node_indices.size()) return field->values[node_indices[k]];
        return field->farfield;
    }
};

RestrictionView restrict(const Field& field, Region region);

}  // namespace nonlocal
