#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "frosting/math.hpp"

namespace frosting {

// Exact 3-d kd-tree with full backtracking. Ties on squared distance resolve
// to the smallest point index so queries are deterministic under permutation
// of equal-distance candidates.
class KdTree {
  public:
    KdTree() = default;
    explicit KdTree(std::vector<Vec3> points);

    std::size_t size() const { return pts_.size(); }
    const Vec3& point(std::size_t i) const { return pts_[i]; }

    // Nearest point to q; `exclude` skips one index (self-queries). Returns
    // (index, squared distance); index npos when the tree is empty or only
    // holds the excluded point.
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::pair<std::size_t, double> nearest(const Vec3& q, std::size_t exclude = npos) const;

    // k nearest points ordered by (squared distance, index) ascending.
    std::vector<std::pair<std::size_t, double>> k_nearest(const Vec3& q, std::size_t k,
                                                          std::size_t exclude = npos) const;

    // All indices with |p - q|^2 <= r2, ascending by index.
    std::vector<std::size_t> radius(const Vec3& q, double r2) const;

  private:
    struct Node {
        int axis = 0;
        std::size_t point = 0;
        int left = -1;
        int right = -1;
    };

    int build(std::vector<std::size_t>& idx, std::size_t begin, std::size_t end);

    std::vector<Vec3> pts_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

}  // namespace frosting
