#ifndef QDLIE_POINT_INDEX_HPP
#define QDLIE_POINT_INDEX_HPP

// Point-set utilities for omega-limit estimates: merging samples into
// representatives at a fixed resolution, and exact nearest-neighbour queries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qdlie/error.hpp"

namespace qdlie {

/// Merges points falling into the same cube of side resolution / sqrt(dim),
/// so every merged point lies within `resolution` of its representative (the
/// first point seen in the cube).
class CellClusterer {
 public:
  CellClusterer(Eigen::Index dim, double resolution)
      : dim_(dim), side_(resolution / std::sqrt(static_cast<double>(dim))) {
    if (dim <= 0) throw InvalidInput("CellClusterer: dimension must be positive");
    if (!(resolution > 0.0) || !std::isfinite(resolution))
      throw InvalidInput("CellClusterer: resolution must be positive");
  }

  /// True if p started a new representative.
  bool add(const Eigen::VectorXd& p) {
    Key k(static_cast<std::size_t>(dim_));
    for (Eigen::Index i = 0; i < dim_; ++i) k[i] = static_cast<std::int64_t>(std::floor(p(i) / side_));
    const auto [it, inserted] = cells_.try_emplace(std::move(k), reps_.size());
    if (inserted) reps_.push_back(p);
    return inserted;
  }

  const std::vector<Eigen::VectorXd>& representatives() const noexcept { return reps_; }

 private:
  using Key = std::vector<std::int64_t>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      std::uint64_t h = 0xcbf29ce484222325ULL;
      for (auto v : k) {
        std::uint64_t z = static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + h;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        h = z ^ (z >> 31);
      }
      return static_cast<std::size_t>(h);
    }
  };

  Eigen::Index dim_;
  double side_;
  std::unordered_map<Key, std::size_t, KeyHash> cells_;
  std::vector<Eigen::VectorXd> reps_;
};

/// Static k-d tree over a fixed point set.
class KdTree {
 public:
  explicit KdTree(std::vector<Eigen::VectorXd> points) : pts_(std::move(points)) {
    if (pts_.empty()) return;
    dim_ = pts_.front().size();
    for (const auto& p : pts_)
      if (p.size() != dim_) throw InvalidInput("KdTree: points of different dimensions");
    order_.resize(pts_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    nodes_.reserve(2 * pts_.size() / kLeaf + 2);
    build(0, pts_.size());
  }

  std::size_t size() const noexcept { return pts_.size(); }
  const Eigen::VectorXd& point(std::size_t i) const { return pts_[i]; }

  /// Index and distance of the nearest point; ties go to the smaller index.
  std::pair<std::size_t, double> nearest(const Eigen::VectorXd& q) const {
    if (pts_.empty()) throw InvalidInput("KdTree::nearest on an empty set");
    if (q.size() != dim_) throw InvalidInput("KdTree::nearest: dimension mismatch");
    Best best;
    search(0, q, best);
    return {best.index, std::sqrt(best.d2)};
  }

 private:
  static constexpr std::size_t kLeaf = 8;

  struct Node {
    std::size_t begin, end;
    Eigen::Index axis = -1;  // -1 marks a leaf
    double split = 0.0;
    std::size_t left = 0, right = 0;
  };

  struct Best {
    std::size_t index = std::numeric_limits<std::size_t>::max();
    double d2 = std::numeric_limits<double>::infinity();
  };

  std::size_t build(std::size_t begin, std::size_t end) {
    const std::size_t id = nodes_.size();
    nodes_.push_back({begin, end});
    if (end - begin <= kLeaf) return id;
    Eigen::Index axis = 0;
    double spread = -1.0;
    for (Eigen::Index a = 0; a < dim_; ++a) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t i = begin; i < end; ++i) {
        lo = std::min(lo, pts_[order_[i]](a));
        hi = std::max(hi, pts_[order_[i]](a));
      }
      if (hi - lo > spread) {
        spread = hi - lo;
        axis = a;
      }
    }
    if (spread <= 0.0) return id;
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::size_t a, std::size_t b) {
                       const double x = pts_[a](axis), y = pts_[b](axis);
                       return x < y || (x == y && a < b);
                     });
    const double split = pts_[order_[mid]](axis);
    const std::size_t left = build(begin, mid);
    const std::size_t right = build(mid, end);
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  void search(std::size_t id, const Eigen::VectorXd& q, Best& best) const {
    const Node& n = nodes_[id];
    if (n.axis < 0) {
      for (std::size_t i = n.begin; i < n.end; ++i) {
        const std::size_t k = order_[i];
        const double d2 = (pts_[k] - q).squaredNorm();
        if (d2 < best.d2 || (d2 == best.d2 && k < best.index)) {
          best.d2 = d2;
          best.index = k;
        }
      }
      return;
    }
    const double diff = q(n.axis) - n.split;
    const std::size_t near = diff < 0.0 ? n.left : n.right;
    const std::size_t far = diff < 0.0 ? n.right : n.left;
    search(near, q, best);
    // Points left of the split have coordinate <= split, right ones >= split.
    if (diff * diff <= best.d2) search(far, q, best);
  }

  std::vector<Eigen::VectorXd> pts_;
  Eigen::Index dim_ = 0;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace qdlie

#endif  // QDLIE_POINT_INDEX_HPP
