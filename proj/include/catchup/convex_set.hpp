#pragma once

#include <cstddef>
#include <vector>

#include "catchup/linalg.hpp"

// Closed convex sets with exact metric projections. These are the kernels
// beneath every normal-cone resolvent in the operator layer.

namespace catchup {

enum class SetKind { Box, Ball, HalfSpace, Polyhedron };

class ConvexSet {
public:
    static ConvexSet box(Vec lo, Vec hi);
    static ConvexSet ball(Vec center, double radius);
    // { x : <normal, x> <= offset }, normal nonzero.
    static ConvexSet half_space(Vec normal, double offset);
    // { x : G x <= h }; feasibility is verified at construction.
    static ConvexSet polyhedron(Mat g, Vec h);

    SetKind kind() const { return kind_; }
    std::size_t dim() const { return dim_; }

    Vec project(const Vec& x) const;
    double distance(const Vec& x) const;
    bool contains(const Vec& x, double tol) const;

    // Extreme points where constraints meet (boxes and polyhedra); empty for
    // balls and half-spaces. Used by verification samplers that concentrate
    // probes on the boundary.
    std::vector<Vec> vertices() const;

    // Affine image s * C + shift (s > 0), still a set of the same kind.
    // Boxes stay boxes only for positive scale, which is all the operator
    // layer needs.
    const Vec& box_lo() const { return a_; }
    const Vec& box_hi() const { return b_; }
    const Vec& ball_center() const { return a_; }
    double ball_radius() const { return r_; }
    const Vec& hs_normal() const { return a_; }
    double hs_offset() const { return r_; }
    const Mat& poly_g() const { return g_; }
    const Vec& poly_h() const { return h_; }

private:
    ConvexSet() = default;
    SetKind kind_ = SetKind::Box;
    std::size_t dim_ = 0;
    Vec a_, b_;  // box bounds / ball center / half-space normal
    double r_ = 0.0;
    Mat g_;
    Vec h_;

    Vec project_polyhedron(const Vec& x) const;
};

// project(s * C + shift, x) computed through the base set's projection.
Vec project_affine_image(const ConvexSet& base, double scale, const Vec& shift,
                         const Vec& x);

}  // namespace catchup
