#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "evac/dyngraph.hpp"

namespace evac {

inline constexpr std::size_t kMaxNeighbors = 5;
inline constexpr std::size_t kBlockWidth = 6;
inline constexpr std::size_t kHeaderWidth = 6;
inline constexpr std::size_t kFeatureCount = kHeaderWidth + kMaxNeighbors * kBlockWidth; // 36
inline constexpr std::size_t kFilmFeatureCount = 2;
inline constexpr std::size_t kMainFeatureCount = kFeatureCount - kFilmFeatureCount; // 34
inline constexpr std::size_t kOutputCount = kMaxNeighbors;

/// Travel times are divided by the largest band cap before they enter the
/// model.
inline constexpr double kWeightScale = 5.0;

/// Layout: epicenter (x,y), current node (x,y), destination (x,y), then one
/// block per neighbor: neighbor (x,y), weight/5, edge betweenness, distance
/// from neighbor to destination, cosine of the turn toward the destination.
using FeatureVector = std::array<double, kFeatureCount>;
using MainFeatures = std::array<double, kMainFeatureCount>;
using NeighborMask = std::array<bool, kMaxNeighbors>;

namespace feature {
inline constexpr std::size_t kEpiX = 0;
inline constexpr std::size_t kEpiY = 1;
inline constexpr std::size_t kCurrentX = 2;
inline constexpr std::size_t kCurrentY = 3;
inline constexpr std::size_t kDestX = 4;
inline constexpr std::size_t kDestY = 5;
inline constexpr std::size_t kBlockX = 0;
inline constexpr std::size_t kBlockY = 1;
inline constexpr std::size_t kBlockWeight = 2;
inline constexpr std::size_t kBlockBetweenness = 3;
inline constexpr std::size_t kBlockDistance = 4;
inline constexpr std::size_t kBlockCosine = 5;

[[nodiscard]] constexpr std::size_t block(std::size_t slot, std::size_t field) {
    return kHeaderWidth + slot * kBlockWidth + field;
}
} // namespace feature

[[nodiscard]] double euclid(Point p, Point q);

struct Cosine {
    double value = 0.0;
    bool degenerate = false; ///< a zero-length vector; value is 0
};

/// Cosine between (neighbor - current) and (exit - current).
[[nodiscard]] Cosine cosine_dir(Point current, Point neighbor, Point exit);

/// Fraction of ordered shortest paths through each edge, normalized by
/// n(n-1). Brandes accumulation over weighted Dijkstra; equal-cost paths
/// share credit. Pairs in different components contribute nothing.
[[nodiscard]] std::vector<double> edge_betweenness(const CityGraph &graph, std::span<const double> weights);

struct ModelInput {
    FeatureVector features{};
    std::size_t n_neighbors = 0;
    std::array<NodeId, kMaxNeighbors> neighbors{};

    [[nodiscard]] NeighborMask mask() const noexcept;
};

/// Model input at `current` under the environment's present weights.
/// Throws InvariantError for nodes with more than five neighbors.
[[nodiscard]] ModelInput build_input(const Environment &env, NodeId current,
                                     std::span<const double> betweenness);

[[nodiscard]] MainFeatures main_features(const FeatureVector &f) noexcept;
[[nodiscard]] std::array<double, kFilmFeatureCount> film_features(const FeatureVector &f) noexcept;
[[nodiscard]] NeighborMask mask_for(std::size_t n_neighbors) noexcept;

} // namespace evac
