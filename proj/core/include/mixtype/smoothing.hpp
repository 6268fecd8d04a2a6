#pragma once

#include <limits>

#include "mixtype/grid_function.hpp"

namespace mixtype {

/// S_theta: cosine transform of u over the whole box (the even extension
/// across its edges), multiplied by chi(|xi| / theta), transformed back.
/// |xi| is in cycles per unit length, so theta = 1 / (4h) keeps the lower
/// half of the resolvable band; chi = 1 on [0, 1], 0 on [2, inf). Needs u
/// defined on every node.
GridFunction smoothing_apply(const GridFunction& u, double theta);

/// Frequency |xi| (cycles per unit length) of the cosine mode (k, l) on the grid's box.
double mode_frequency(const Grid2D& grid, int k, int l);

enum class Reflection {
  Even,    // u(R + t) = u(R - t): continuous, slope kink at the rim
  Smooth,  // u(R + t) = 6u(R - t) - 8u(R - 2t) + 3u(R - 3t): matches u, u_r, u_rr
};

/// Values of u on every node of `grid` (same spacing, same origin): defined
/// nodes keep theirs, the others reflect radially about |x| = radius, with u
/// interpolated bilinearly. With a finite `taper`, the extension is faded to
/// zero between radius and radius + taper.
GridFunction extend_from_disk(const GridFunction& u, double radius, const Grid2D& grid,
                              double taper = std::numeric_limits<double>::infinity(),
                              Reflection kind = Reflection::Even);

}  // namespace mixtype
