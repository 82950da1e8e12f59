#include "nonlocal/mesh.hpp"

#include <cmath>
#include <sstream>

namespace nonlocal {

Mesh Mesh::build(const Interval& omega, double h, double R) {
    if (!(h > 0.0)) throw ValidationError("build_mesh: spacing h must be positive");
    if (!(R > 0.0)) throw ValidationError("build_mesh: truncation radius R must be positive");

    const double ratio_len = omega.length() / h;
    const double ratio_R = R / h;
    auto integral = [](double r) { return std::abs(r - std::round(r)) <= 1e-9; };
    if (!integral(ratio_len)) {
        std::ostringstream msg;
        msg << "build_mesh: (b-a)/h = " << ratio_len << " is not an integer";
        throw ValidationError(msg.str());
    }
    if (!integral(ratio_R)) {
        std::ostringstream msg;
        msg << "build_mesh: R/h = " << ratio_R << " is not an integer";
        throw ValidationError(msg.str());
    }
    if (R < 2.0 * omega.length() - 1e-12) {
        std::ostringstream msg;
        msg << "build_mesh: R = " << R << " is smaller than 2(b-a) = " << 2.0 * omega.length();
        throw ValidationError(msg.str());
    }

    Mesh m;
    m.omega_ = omega;
    m.h_ = h;
    m.R_ = R;
    const int n_omega = static_cast<int>(std::round(ratio_len));
    const int n_R = static_cast<int>(std::round(ratio_R));
    m.n_nodes_ = n_omega + 2 * n_R + 1;
    m.idx_a_ = n_R;
    m.idx_b_ = n_R + n_omega;
    m.interior_nodes_.reserve(n_omega + 1);
    m.exterior_nodes_.reserve(m.n_nodes_ - n_omega - 1);
    for (int i = 0; i < m.n_nodes_; ++i) {
        if (m.node_interior(i)) {
            m.interior_nodes_.push_back(i);
        } else {
            m.exterior_nodes_.push_back(i);
        }
    }
    return m;
}

int Mesh::cell_of(double x) const {
    const double t = (x - node(0)) / h_;
    int c = static_cast<int>(std::floor(t));
    if (c < 0) c = 0;
    if (c > cell_count() - 1) c = cell_count() - 1;
    return c;
}

double Field::operator()(double x) const {
    const Mesh& m = *mesh_;
    const double lo = m.node(0);
    const double hi = m.node(m.node_count() - 1);
    const double h = m.h();
    if (x <= lo - h || x >= hi + h) return farfield;
    if (x < lo) {
        const double t = (lo - x) / h;  // 0 at the first node, 1 at the tail edge
        return (1.0 - t) * values[0] + t * farfield;
    }
    if (x > hi) {
        const double t = (x - hi) / h;
        return (1.0 - t) * values[m.node_count() - 1] + t * farfield;
    }
    const int c = m.cell_of(x);
    const double t = (x - m.cell_left(c)) / h;
    return (1.0 - t) * values[c] + t * values[c + 1];
}

Eigen::VectorXd Field::dofs() const {
    Eigen::VectorXd out(mesh_->dof_count());
    out.head(mesh_->node_count()) = values;
    out[mesh_->farfield_dof()] = farfield;
    return out;
}

Field Field::from_dofs(const Mesh& mesh, const Eigen::VectorXd& dofs) {
    if (dofs.size() != mesh.dof_count()) throw ValidationError("from_dofs: size mismatch");
    return Field(mesh, dofs.head(mesh.node_count()), dofs[mesh.farfield_dof()]);
}

RestrictionView restrict(const Field& field, Region region) {
    RestrictionView view;
    view.field = &field;
    if (region == Region::Interior) {
        view.node_indices = field.mesh().interior_nodes();
        view.includes_farfield = false;
    } else {
        view.node_indices = field.mesh().exterior_nodes();
        view.includes_farfield = true;
    }
    return view;
}

}  // namespace nonlocal
