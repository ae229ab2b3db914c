#pragma once

namespace optex {

/// A point (x, p) of the state space: inventory x >= 0, price p >= 0.
struct State {
    double x = 0.0;
    double p = 0.0;
};

/// Classification of a grid node by the optimal action at that node.
enum class Region : unsigned char { Continue = 0, Trade = 1 };

}  // namespace optex
