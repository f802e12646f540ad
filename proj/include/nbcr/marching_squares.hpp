#ifndef NBCR_MARCHING_SQUARES_HPP
#define NBCR_MARCHING_SQUARES_HPP

#include <vector>

#include <Eigen/Core>

namespace nbcr {

struct Polyline {
    std::vector<Eigen::Vector2d> points;
    bool closed = false;
};

/// Iso-lines of `field` at `level` by marching squares with linear interpolation.
/// field(i, j) sits at (xs[i], ys[j]); a corner is inside when its value is <= level.
/// Cells with a NaN corner are skipped, so lines stop at masked areas and at the
/// grid border; such lines come back open. Saddle cells are resolved by the
/// mean of the four corners.
std::vector<Polyline> extract_isolines(const Eigen::ArrayXXd& field, double level,
                                       const Eigen::ArrayXd& xs, const Eigen::ArrayXd& ys);

} // namespace nbcr

#endif // NBCR_MARCHING_SQUARES_HPP
