#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "catchup/convex_set.hpp"
#include "catchup/linalg.hpp"
#include "catchup/measure.hpp"

// Maximal monotone operator families A(t, x) with exact resolvents, minimal
// sections, graph-membership residuals, and a sampled estimator for the
// graph pseudo-distance between two frozen operators.

namespace catchup {

enum class OperatorKind {
    MovingNormalCone,  // normal cone to an affinely moving convex set
    SubdiffAbs,        // componentwise subdifferential of |.|
    SubdiffQuadratic,  // gradient of 0.5 <Qx, x>, Q symmetric PSD
    SubdiffIndicator,  // normal cone to a fixed convex set
    Linear,            // x -> Mx with M + M^T PSD
};

// Time/state motion of a normal-cone family: the set at (t, x) is
//   scale(t) * base + offset0 + offset_dir * clock(t) + G x,
// with scale(t) = 1 + scale_coef * clock(t) kept positive on [0, T].
// Absent G means a time-only family.
struct MovingSetSpec {
    ConvexSet base;
    Vec offset0;
    Vec offset_dir;
    double scale_coef = 0.0;
    std::optional<Mat> state_map;
};

class OperatorFamily {
public:
    static OperatorFamily moving_normal_cone(MovingSetSpec spec, BVClock clock,
                                             double gamma, double c_growth);
    static OperatorFamily subdiff_abs(std::size_t dim, BVClock clock, double c_growth);
    static OperatorFamily subdiff_quadratic(Mat q, BVClock clock, double c_growth);
    static OperatorFamily subdiff_indicator(ConvexSet set, BVClock clock, double c_growth);
    static OperatorFamily linear(Mat m, BVClock clock, double c_growth);

    OperatorKind kind() const { return kind_; }
    std::size_t dim() const { return dim_; }
    double gamma() const { return gamma_; }
    double c_growth() const { return c_growth_; }
    const BVClock& clock() const { return clock_; }
    bool time_dependent() const { return kind_ == OperatorKind::MovingNormalCone; }
    bool state_dependent() const {
        return kind_ == OperatorKind::MovingNormalCone && moving_->state_map.has_value();
    }

    // Unique z with x in z + eta A(t, state) z. Total on the space for all
    // built-in kinds; eta must be positive.
    Vec resolvent(double t, const Vec& state, double eta, const Vec& x) const;

    // Least-norm element of A(t, state) y; y must lie in the domain.
    Vec minimal_section(double t, const Vec& state, const Vec& y) const;

    // Nonnegative certificate: zero iff z belongs to A(t, state) y.
    double graph_residual(double t, const Vec& state, const Vec& y, const Vec& z) const;

    // Distance of y to the domain of A(t, state).
    double domain_distance(double t, const Vec& state, const Vec& y) const;

    // Nearest domain point to a probe (identity for full-domain kinds).
    Vec domain_project(double t, const Vec& state, const Vec& probe) const;

    // Boundary vertices of the domain where constraints are active; empty
    // for full-domain kinds, balls and half-spaces.
    std::vector<Vec> domain_vertices(double t, const Vec& state) const;

    // The moving set realized at (t, state); only for normal-cone kinds.
    ConvexSet set_at(double t, const Vec& state) const;
    double set_scale_at(double t) const;
    Vec set_shift_at(double t, const Vec& state) const;
    const MovingSetSpec& moving_spec() const { return *moving_; }
    const ConvexSet& fixed_set() const { return *fixed_set_; }

    const Mat& linear_matrix() const { return mat_; }
    const Mat& quadratic_matrix() const { return mat_; }

private:
    OperatorFamily(OperatorKind k, std::size_t dim, BVClock clock)
        : kind_(k), dim_(dim), clock_(std::move(clock)) {}

    OperatorKind kind_;
    std::size_t dim_;
    BVClock clock_;
    double gamma_ = 0.0;
    double c_growth_ = 0.0;
    std::optional<MovingSetSpec> moving_;
    std::optional<ConvexSet> fixed_set_;
    Mat mat_;  // Q or M
};

// An operator frozen at one (t, state): the object the pseudo-distance
// estimator samples graphs of.
struct OperatorSlice {
    const OperatorFamily* family;
    double t;
    Vec state;
};

struct DisSampling {
    double box_radius = 2.0;    // domain probes drawn uniformly in [-r, r]^d
    double normal_scale = 10.0; // magnitude cap for multivalued directions
};

// Sampled lower bound of sup <y - y', x' - x> / (1 + |y| + |y'|) over graph
// pairs of A and B, clipped below at zero. Deterministic for a given seed.
double dis_estimate(const OperatorSlice& a, const OperatorSlice& b,
                    std::size_t n_samples, std::uint64_t seed,
                    const DisSampling& sampling = {});

}  // namespace catchup
