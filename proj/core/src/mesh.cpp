#include "vishell/mesh.hpp"

#include <algorithm>
#include <cmath>

namespace vishell {

Mesh2D::Mesh2D(const ChartDomain& dom, int nx, int ny, std::set<Edge> clamped)
    : dom_(dom), nx_(nx), ny_(ny), clamped_(std::move(clamped)) {
    if (nx_ < 1 || ny_ < 1) throw Error("Mesh2D: need at least one element per direction");
    if (periodic() && (clamped_.count(Edge::Left) || clamped_.count(Edge::Right))) {
        throw Error("Mesh2D: periodic strips have no left/right edges to clamp");
    }
    nnx_ = periodic() ? nx_ : nx_ + 1;
    hx_ = dom_.l1 / nx_;
    hy_ = dom_.l2 / ny_;

    clamped_node_.assign(n_nodes(), false);
    clamped_vertical_.assign(n_nodes(), false);
    clamped_horizontal_.assign(n_nodes(), false);
    for (int j = 0; j <= ny_; ++j)
        for (int i = 0; i < nnx_; ++i) {
            const int node = node_id(i, j);
            bool vert = false, horiz = false;
            if (!periodic() && clamped_.count(Edge::Left) && i == 0) vert = true;
            if (!periodic() && clamped_.count(Edge::Right) && i == nnx_ - 1) vert = true;
            if (clamped_.count(Edge::Bottom) && j == 0) horiz = true;
            if (clamped_.count(Edge::Top) && j == ny_) horiz = true;
            clamped_vertical_[node] = vert;
            clamped_horizontal_[node] = horiz;
            clamped_node_[node] = vert || horiz;
        }
}

Eigen::Vector2d Mesh2D::node_coord(int node) const {
    const int j = node / nnx_;
    const int i = node % nnx_;
    return node_coord(i, j);
}

std::array<int, 4> Mesh2D::element_nodes(int e) const {
    const auto [i, j] = element_ij(e);
    return {node_id(i, j), node_id(i + 1, j), node_id(i + 1, j + 1), node_id(i, j + 1)};
}

Eigen::Vector2d Mesh2D::element_origin(int e) const {
    const auto [i, j] = element_ij(e);
    return node_coord(i, j);
}

int Mesh2D::locate(const Eigen::Vector2d& y, Eigen::Vector2d& local) const {
    double u = (y[0] - dom_.o1) / hx_;
    double v = (y[1] - dom_.o2) / hy_;
    if (periodic()) u = u - nx_ * std::floor(u / nx_);
    const int i = std::clamp(static_cast<int>(std::floor(u)), 0, nx_ - 1);
    const int j = std::clamp(static_cast<int>(std::floor(v)), 0, ny_ - 1);
    local << u - i, v - j;
    local[0] = std::clamp(local[0], 0.0, 1.0);
    local[1] = std::clamp(local[1], 0.0, 1.0);
    return j * nx_ + i;
}

Mesh3D::Mesh3D(const Mesh2D& footprint, int nz) : footprint_(&footprint), nz_(nz) {
    if (nz_ < 1) throw Error("Mesh3D: need at least one layer");
}

std::array<int, 8> Mesh3D::element_nodes(int e) const {
    const auto [e2d, layer] = element_split(e);
    const auto base = footprint_->element_nodes(e2d);
    std::array<int, 8> nodes;
    for (int n = 0; n < 4; ++n) {
        nodes[n] = node_id(base[n], layer);
        nodes[4 + n] = node_id(base[n], layer + 1);
    }
    return nodes;
}

Eigen::Vector3d Mesh3D::element_origin(int e) const {
    const auto [e2d, layer] = element_split(e);
    const Eigen::Vector2d o = footprint_->element_origin(e2d);
    return {o[0], o[1], level_x3(layer)};
}

} // namespace vishell
