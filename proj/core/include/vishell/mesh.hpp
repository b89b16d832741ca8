#pragma once

#include "vishell/errors.hpp"
#include "vishell/geometry.hpp"

#include <Eigen/Dense>

#include <array>
#include <set>
#include <vector>

namespace vishell {

enum class Edge { Left, Right, Bottom, Top };

// Structured conforming quad mesh of the parameter rectangle. With periodic
// y1 the left/right seam is identified and those edges cannot be clamped.
class Mesh2D {
public:
    Mesh2D(const ChartDomain& dom, int nx, int ny, std::set<Edge> clamped);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    bool periodic() const { return dom_.periodic_y1; }
    const ChartDomain& domain() const { return dom_; }
    double hx() const { return hx_; }
    double hy() const { return hy_; }

    int n_nodes() const { return nnx_ * (ny_ + 1); }
    int n_elements() const { return nx_ * ny_; }

    int node_id(int i, int j) const { return j * nnx_ + (periodic() ? (i % nx_) : i); }
    Eigen::Vector2d node_coord(int node) const;
    Eigen::Vector2d node_coord(int i, int j) const {
        return {dom_.o1 + i * hx_, dom_.o2 + j * hy_};
    }

    // corner order (i,j), (i+1,j), (i+1,j+1), (i,j+1)
    std::array<int, 4> element_nodes(int e) const;
    Eigen::Vector2d element_origin(int e) const;
    std::pair<int, int> element_ij(int e) const { return {e % nx_, e / nx_}; }

    const std::set<Edge>& clamped_edges() const { return clamped_; }
    const std::vector<bool>& clamped_node() const { return clamped_node_; }
    // orientation of the clamped edges through a node, for trace constraints
    bool clamped_on_vertical(int node) const { return clamped_vertical_[node]; }
    bool clamped_on_horizontal(int node) const { return clamped_horizontal_[node]; }

    // element containing y (clamped to the domain), and local [0,1]^2 coords
    int locate(const Eigen::Vector2d& y, Eigen::Vector2d& local) const;

private:
    ChartDomain dom_;
    int nx_, ny_, nnx_;
    double hx_, hy_;
    std::set<Edge> clamped_;
    std::vector<bool> clamped_node_;
    std::vector<bool> clamped_vertical_;
    std::vector<bool> clamped_horizontal_;
};

// Conforming extrusion of a footprint mesh into nz layers over x3 in [-1,1].
class Mesh3D {
public:
    Mesh3D(const Mesh2D& footprint, int nz);

    const Mesh2D& footprint() const { return *footprint_; }
    int nz() const { return nz_; }
    double hz() const { return 2.0 / nz_; }
    double level_x3(int k) const { return -1.0 + k * hz(); }

    int n_nodes() const { return (nz_ + 1) * footprint_->n_nodes(); }
    int n_elements() const { return nz_ * footprint_->n_elements(); }

    int node_id(int node2d, int level) const { return level * footprint_->n_nodes() + node2d; }
    // bottom-face corners then top-face corners
    std::array<int, 8> element_nodes(int e) const;
    std::pair<int, int> element_split(int e) const { // (2D element, layer)
        return {e % footprint_->n_elements(), e / footprint_->n_elements()};
    }
    Eigen::Vector3d element_origin(int e) const;

    // nodes on Gamma_0 = clamped footprint edges x [-1,1]
    bool on_gamma0(int node) const { return footprint_->clamped_node()[node % footprint_->n_nodes()]; }

private:
    const Mesh2D* footprint_;
    int nz_;
};

} // namespace vishell
