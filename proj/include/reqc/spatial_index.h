#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "reqc/common.h"

namespace reqc {

/// Uniform cell list over an axis-aligned box. Cells are at least `cell_size`
/// wide, so a radius query with r <= cell_size touches at most 27 cells.
class SpatialIndex {
public:
    SpatialIndex(std::span<const Vec3> points, double box_edge, double cell_size);

    template <class Fn>
    void for_each_within(const Vec3& center, double radius, Fn&& fn) const {
        const double r2 = radius * radius;
        const int reach = static_cast<int>(std::ceil(radius / cell_));
        const int cx = cell_of(center.x), cy = cell_of(center.y), cz = cell_of(center.z);
        for (int ix = std::max(0, cx - reach); ix <= std::min(dim_ - 1, cx + reach); ++ix) {
            for (int iy = std::max(0, cy - reach); iy <= std::min(dim_ - 1, cy + reach); ++iy) {
                for (int iz = std::max(0, cz - reach); iz <= std::min(dim_ - 1, cz + reach); ++iz) {
                    const std::size_t c = flat(ix, iy, iz);
                    for (std::size_t k = start_[c]; k < start_[c + 1]; ++k) {
                        const std::size_t idx = order_[k];
                        if ((points_[idx] - center).norm2() <= r2) {
                            fn(idx);
                        }
                    }
                }
            }
        }
    }

    std::size_t size() const { return points_.size(); }

private:
    int cell_of(double v) const {
        const int c = static_cast<int>(std::floor(v / cell_));
        return std::clamp(c, 0, dim_ - 1);
    }
    std::size_t flat(int ix, int iy, int iz) const {
        return (static_cast<std::size_t>(ix) * dim_ + iy) * dim_ + iz;
    }

    std::span<const Vec3> points_;
    double cell_ = 1.0;
    int dim_ = 1;
    std::vector<std::size_t> start_;
    std::vector<std::size_t> order_;
};

}  // namespace reqc
