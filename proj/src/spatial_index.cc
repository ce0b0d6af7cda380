#include "reqc/spatial_index.h"

namespace reqc {

SpatialIndex::SpatialIndex(std::span<const Vec3> points, double box_edge, double cell_size)
    : points_(points) {
    require(box_edge > 0.0 && cell_size > 0.0, "SpatialIndex: box edge and cell size must be > 0");
    dim_ = std::max(1, static_cast<int>(std::floor(box_edge / cell_size)));
    // Cap the grid so sparse boxes do not allocate huge empty cell arrays.
    dim_ = std::min(dim_, 256);
    cell_ = box_edge / dim_;

    const std::size_t ncells = static_cast<std::size_t>(dim_) * dim_ * dim_;
    std::vector<std::size_t> cell_ids(points_.size());
    start_.assign(ncells + 1, 0);
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const auto& p = points_[i];
        cell_ids[i] = flat(cell_of(p.x), cell_of(p.y), cell_of(p.z));
        ++start_[cell_ids[i] + 1];
    }
    for (std::size_t c = 0; c < ncells; ++c) {
        start_[c + 1] += start_[c];
    }
    order_.resize(points_.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < points_.size(); ++i) {
        order_[fill[cell_ids[i]]++] = i;
    }
}

}  // namespace reqc
