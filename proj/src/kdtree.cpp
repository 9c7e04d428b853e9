#include "frosting/kdtree.hpp"

#include <algorithm>
#include <numeric>

namespace frosting {

KdTree::KdTree(std::vector<Vec3> points) : pts_(std::move(points)) {
    if (pts_.empty()) return;
    std::vector<std::size_t> idx(pts_.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    nodes_.reserve(pts_.size());
    root_ = build(idx, 0, idx.size());
}

int KdTree::build(std::vector<std::size_t>& idx, std::size_t begin, std::size_t end) {
    if (begin >= end) return -1;
    // Split on the widest axis of the subset's bounding box.
    Vec3 lo = pts_[idx[begin]], hi = lo;
    for (std::size_t i = begin + 1; i < end; ++i) {
        lo = lo.cwiseMin(pts_[idx[i]]);
        hi = hi.cwiseMax(pts_[idx[i]]);
    }
    Vec3 extent = hi - lo;
    int axis = 0;
    if (extent.y() > extent.x()) axis = 1;
    if (extent.z() > extent[axis]) axis = 2;

    std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(idx.begin() + begin, idx.begin() + mid, idx.begin() + end,
                     [&](std::size_t a, std::size_t b) {
                         double pa = pts_[a][axis], pb = pts_[b][axis];
                         return pa < pb || (pa == pb && a < b);
                     });

    int node = static_cast<int>(nodes_.size());
    nodes_.push_back({axis, idx[mid], -1, -1});
    int left = build(idx, begin, mid);
    int right = build(idx, mid + 1, end);
    nodes_[node].left = left;
    nodes_[node].right = right;
    return node;
}

namespace {

struct NearestState {
    std::size_t best = KdTree::npos;
    double best_d2 = std::numeric_limits<double>::infinity();
};

}  // namespace

std::pair<std::size_t, double> KdTree::nearest(const Vec3& q, std::size_t exclude) const {
    NearestState st;
    // Explicit stack; recursion depth is fine too but this keeps hot queries cheap.
    std::vector<int> stack;
    if (root_ >= 0) stack.push_back(root_);
    while (!stack.empty()) {
        int ni = stack.back();
        stack.pop_back();
        const Node& n = nodes_[ni];
        const Vec3& p = pts_[n.point];
        double plane = q[n.axis] - p[n.axis];
        if (n.point != exclude) {
            double d2 = (q - p).squaredNorm();
            if (d2 < st.best_d2 || (d2 == st.best_d2 && n.point < st.best)) {
                st.best_d2 = d2;
                st.best = n.point;
            }
        }
        int near = plane <= 0 ? n.left : n.right;
        int far = plane <= 0 ? n.right : n.left;
        // Backtrack into the far side whenever the splitting plane is within
        // the current best radius (<= so equal-distance ties are still visited
        // and resolved by index).
        if (far >= 0 && plane * plane <= st.best_d2) stack.push_back(far);
        if (near >= 0) stack.push_back(near);
    }
    return {st.best, st.best_d2};
}

std::vector<std::pair<std::size_t, double>> KdTree::k_nearest(const Vec3& q, std::size_t k,
                                                              std::size_t exclude) const {
    std::vector<std::pair<std::size_t, double>> best;  // kept sorted by (d2, index)
    if (k == 0) return best;
    auto worse = [&](double d2, std::size_t idx) {
        return [d2, idx](const std::pair<std::size_t, double>& e) {
            return e.second > d2 || (e.second == d2 && e.first > idx);
        };
    };
    std::vector<int> stack;
    if (root_ >= 0) stack.push_back(root_);
    while (!stack.empty()) {
        int ni = stack.back();
        stack.pop_back();
        const Node& n = nodes_[ni];
        const Vec3& p = pts_[n.point];
        double plane = q[n.axis] - p[n.axis];
        if (n.point != exclude) {
            double d2 = (q - p).squaredNorm();
            if (best.size() < k || d2 < best.back().second ||
                (d2 == best.back().second && n.point < best.back().first)) {
                auto pos = std::find_if(best.begin(), best.end(), worse(d2, n.point));
                best.insert(pos, {n.point, d2});
                if (best.size() > k) best.pop_back();
            }
        }
        int near = plane <= 0 ? n.left : n.right;
        int far = plane <= 0 ? n.right : n.left;
        double bound = best.size() < k ? std::numeric_limits<double>::infinity()
                                       : best.back().second;
        if (far >= 0 && plane * plane <= bound) stack.push_back(far);
        if (near >= 0) stack.push_back(near);
    }
    return best;
}

std::vector<std::size_t> KdTree::radius(const Vec3& q, double r2) const {
    std::vector<std::size_t> out;
    std::vector<int> stack;
    if (root_ >= 0) stack.push_back(root_);
    while (!stack.empty()) {
        int ni = stack.back();
        stack.pop_back();
        const Node& n = nodes_[ni];
        const Vec3& p = pts_[n.point];
        if ((q - p).squaredNorm() <= r2) out.push_back(n.point);
        double plane = q[n.axis] - p[n.axis];
        int near = plane <= 0 ? n.left : n.right;
        int far = plane <= 0 ? n.right : n.left;
        if (far >= 0 && plane * plane <= r2) stack.push_back(far);
        if (near >= 0) stack.push_back(near);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace frosting
