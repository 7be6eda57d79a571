#pragma once

#include <string>
#include <utility>
#include <vector>

#include "takagi/exact.hpp"

namespace takagi {

inline constexpr long kMaxPlotDepth = 16;
inline constexpr long kMaxPlotVertices = 2'000'001;

/// Vertices (j/2r^(N-1), f_r^N(j/2r^(N-1))) for j = 0..2r^(N-1), exactly.
std::vector<std::pair<Rational, Rational>> plot_vertices(const Params& p, long depth);

/// SVG of f_r^N with the band [f_r^N, f_r^N + r^-N M_r] that holds f_r.
/// The viewBox spans [0,1] x [0, 1.05 M_r]; output is byte-deterministic.
/// Throws DepthCap above depth 16 or kMaxPlotVertices vertices.
std::string plot_svg(const Params& p, long depth, int width, int height);

} // namespace takagi
