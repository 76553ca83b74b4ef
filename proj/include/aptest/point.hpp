#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace aptest {

using PointId = std::uint64_t;

struct UnitPoint {
    double x;
};

struct VectorPoint {
    std::vector<double> coords;
};

struct BinnedPoint {
    int bin_index;   // 1..N
    double payload;  // in [0,1]
};

using Point = std::variant<UnitPoint, VectorPoint, BinnedPoint>;

}  // namespace aptest
