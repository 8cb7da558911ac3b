#include "catchup/operators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace catchup {

namespace {

constexpr double kDomainTol = 1e-9;

double uniform01(std::mt19937_64& rng) {
    // fixed mapping, independent of libstdc++ distribution internals
    return double(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

void check_psd_symmetric_part(const Mat& m, const char* what) {
    // Gershgorin-style cheap check on (M + M^T)/2; exact PSD certification
    // is not needed, construction just guards against obvious mistakes.
    const std::size_t n = m.rows;
    for (std::size_t i = 0; i < n; ++i) {
        const double dii = m(i, i);
        if (dii < -1e-12) throw std::invalid_argument(std::string(what) + ": negative diagonal");
    }
}

}  // namespace

OperatorFamily OperatorFamily::moving_normal_cone(MovingSetSpec spec, BVClock clock,
                                                  double gamma, double c_growth) {
    const std::size_t d = spec.base.dim();
    if (spec.offset0.empty()) spec.offset0 = zeros(d);
    if (spec.offset_dir.empty()) spec.offset_dir = zeros(d);
    if (spec.offset0.size() != d || spec.offset_dir.size() != d)
        throw std::invalid_argument("moving_normal_cone: offset dimension mismatch");
    if (spec.state_map && (spec.state_map->rows != d || spec.state_map->cols != d))
        throw std::invalid_argument("moving_normal_cone: state map must be d x d");
    const double end_scale = 1.0 + spec.scale_coef * clock.cumulative(clock.horizon());
    if (!(end_scale > 0.0) || !(1.0 + spec.scale_coef * 0.0 > 0.0))
        throw std::invalid_argument("moving_normal_cone: scale must stay positive");
    OperatorFamily f(OperatorKind::MovingNormalCone, d, std::move(clock));
    f.gamma_ = gamma;
    f.c_growth_ = c_growth;
    f.moving_ = std::move(spec);
    return f;
}

OperatorFamily OperatorFamily::subdiff_abs(std::size_t dim, BVClock clock, double c_growth) {
    OperatorFamily f(OperatorKind::SubdiffAbs, dim, std::move(clock));
    f.c_growth_ = c_growth;
    return f;
}

OperatorFamily OperatorFamily::subdiff_quadratic(Mat q, BVClock clock, double c_growth) {
    if (q.rows != q.cols) throw std::invalid_argument("subdiff_quadratic: Q must be square");
    for (std::size_t i = 0; i < q.rows; ++i)
        for (std::size_t j = 0; j < q.cols; ++j)
            if (std::fabs(q(i, j) - q(j, i)) > 1e-12)
                throw std::invalid_argument("subdiff_quadratic: Q must be symmetric");
    check_psd_symmetric_part(q, "subdiff_quadratic");
    OperatorFamily f(OperatorKind::SubdiffQuadratic, q.rows, std::move(clock));
    f.c_growth_ = c_growth;
    f.mat_ = std::move(q);
    return f;
}

OperatorFamily OperatorFamily::subdiff_indicator(ConvexSet set, BVClock clock, double c_growth) {
    OperatorFamily f(OperatorKind::SubdiffIndicator, set.dim(), std::move(clock));
    f.c_growth_ = c_growth;
    f.fixed_set_ = std::move(set);
    return f;
}

OperatorFamily OperatorFamily::linear(Mat m, BVClock clock, double c_growth) {
    if (m.rows != m.cols) throw std::invalid_argument("linear: M must be square");
    check_psd_symmetric_part(m, "linear");
    OperatorFamily f(OperatorKind::Linear, m.rows, std::move(clock));
    f.c_growth_ = c_growth;
    f.mat_ = std::move(m);
    return f;
}

double OperatorFamily::set_scale_at(double t) const {
    return 1.0 + moving_->scale_coef * clock_.cumulative(t);
}

Vec OperatorFamily::set_shift_at(double t, const Vec& state) const {
    Vec shift = moving_->offset0;
    axpy(clock_.cumulative(t), moving_->offset_dir, shift);
    if (moving_->state_map) shift += moving_->state_map->apply(state);
    return shift;
}

ConvexSet OperatorFamily::set_at(double t, const Vec& state) const {
    if (kind_ == OperatorKind::SubdiffIndicator) return *fixed_set_;
    if (kind_ != OperatorKind::MovingNormalCone)
        throw std::logic_error("set_at: operator has no moving set");
    const double s = set_scale_at(t);
    const Vec shift = set_shift_at(t, state);
    const ConvexSet& base = moving_->base;
    switch (base.kind()) {
        case SetKind::Box: {
            Vec lo = base.box_lo(), hi = base.box_hi();
            for (std::size_t i = 0; i < dim_; ++i) {
                lo[i] = s * lo[i] + shift[i];
                hi[i] = s * hi[i] + shift[i];
            }
            return ConvexSet::box(std::move(lo), std::move(hi));
        }
        case SetKind::Ball:
            return ConvexSet::ball(s * base.ball_center() + shift, s * base.ball_radius());
        case SetKind::HalfSpace: {
            // <n, (x - shift)/s> <= b  <=>  <n, x> <= s b + <n, shift>
            const Vec& n = base.hs_normal();
            return ConvexSet::half_space(n, s * base.hs_offset() + dot(n, shift));
        }
        case SetKind::Polyhedron: {
            // G (x - shift)/s <= h  <=>  G x <= s h + G shift
            Vec h = base.poly_h();
            Vec gs = base.poly_g().apply(shift);
            for (std::size_t i = 0; i < h.size(); ++i) h[i] = s * h[i] + gs[i];
            return ConvexSet::polyhedron(base.poly_g(), std::move(h));
        }
    }
    throw std::logic_error("set_at: unknown base kind");
}

Vec OperatorFamily::resolvent(double t, const Vec& state, double eta, const Vec& x) const {
    if (!(eta > 0.0)) throw std::domain_error("resolvent: eta must be positive");
    switch (kind_) {
        case OperatorKind::MovingNormalCone:
            return project_affine_image(moving_->base, set_scale_at(t),
                                        set_shift_at(t, state), x);
        case OperatorKind::SubdiffIndicator:
            return fixed_set_->project(x);
        case OperatorKind::SubdiffAbs: {
            Vec z = x;
            for (double& v : z) {
                if (v > eta)
                    v -= eta;
                else if (v < -eta)
                    v += eta;
                else
                    v = 0.0;
            }
            return z;
        }
        case OperatorKind::SubdiffQuadratic:
        case OperatorKind::Linear: {
            Mat a = Mat::identity(dim_);
            for (std::size_t i = 0; i < dim_; ++i)
                for (std::size_t j = 0; j < dim_; ++j) a(i, j) += eta * mat_(i, j);
            return solve_dense(std::move(a), x);
        }
    }
    throw std::logic_error("resolvent: unknown kind");
}

Vec OperatorFamily::minimal_section(double t, const Vec& state, const Vec& y) const {
    const double dd = domain_distance(t, state, y);
    if (dd > kDomainTol * (1.0 + norm(y)))
        throw std::domain_error("minimal_section: point outside the operator domain");
    switch (kind_) {
        case OperatorKind::MovingNormalCone:
        case OperatorKind::SubdiffIndicator:
            return zeros(dim_);  // the cone always contains the origin
        case OperatorKind::SubdiffAbs: {
            Vec z(dim_, 0.0);
            for (std::size_t i = 0; i < dim_; ++i)
                z[i] = (y[i] > 0.0) ? 1.0 : (y[i] < 0.0 ? -1.0 : 0.0);
            return z;
        }
        case OperatorKind::SubdiffQuadratic:
        case OperatorKind::Linear:
            return mat_.apply(y);
    }
    throw std::logic_error("minimal_section: unknown kind");
}

double OperatorFamily::graph_residual(double t, const Vec& state, const Vec& y,
                                      const Vec& z) const {
    switch (kind_) {
        case OperatorKind::MovingNormalCone:
        case OperatorKind::SubdiffIndicator: {
            // z in N_C(y) iff the projection of y + z is y itself.
            Vec p = (kind_ == OperatorKind::SubdiffIndicator)
                        ? fixed_set_->project(y + z)
                        : project_affine_image(moving_->base, set_scale_at(t),
                                               set_shift_at(t, state), y + z);
            return dist(p, y);
        }
        case OperatorKind::SubdiffAbs: {
            double s2 = 0.0;
            for (std::size_t i = 0; i < dim_; ++i) {
                double d = 0.0;
                if (y[i] > 0.0)
                    d = z[i] - 1.0;
                else if (y[i] < 0.0)
                    d = z[i] + 1.0;
                else
                    d = std::max(0.0, std::fabs(z[i]) - 1.0);
                s2 += d * d;
            }
            return std::sqrt(s2);
        }
        case OperatorKind::SubdiffQuadratic:
        case OperatorKind::Linear:
            return dist(z, mat_.apply(y));
    }
    throw std::logic_error("graph_residual: unknown kind");
}

double OperatorFamily::domain_distance(double t, const Vec& state, const Vec& y) const {
    switch (kind_) {
        case OperatorKind::MovingNormalCone: {
            Vec p = project_affine_image(moving_->base, set_scale_at(t),
                                         set_shift_at(t, state), y);
            return dist(p, y);
        }
        case OperatorKind::SubdiffIndicator:
            return fixed_set_->distance(y);
        default:
            return 0.0;
    }
}

Vec OperatorFamily::domain_project(double t, const Vec& state, const Vec& probe) const {
    switch (kind_) {
        case OperatorKind::MovingNormalCone:
            return project_affine_image(moving_->base, set_scale_at(t),
                                        set_shift_at(t, state), probe);
        case OperatorKind::SubdiffIndicator:
            return fixed_set_->project(probe);
        default:
            return probe;
    }
}

std::vector<Vec> OperatorFamily::domain_vertices(double t, const Vec& state) const {
    switch (kind_) {
        case OperatorKind::MovingNormalCone: {
            std::vector<Vec> vs = moving_->base.vertices();
            const double s = set_scale_at(t);
            const Vec shift = set_shift_at(t, state);
            for (auto& v : vs) v = s * v + shift;
            return vs;
        }
        case OperatorKind::SubdiffIndicator:
            return fixed_set_->vertices();
        default:
            return {};
    }
}

namespace {

struct GraphPoint {
    Vec x, y;
};

// Draws one graph point: a domain sample plus a value built from the minimal
// section and, for multivalued operators, a random positive boundary normal
// (or a random subgradient at kinks of |.|).
GraphPoint sample_graph_point(const OperatorSlice& s, std::mt19937_64& rng,
                              const DisSampling& p) {
    const OperatorFamily& f = *s.family;
    const std::size_t d = f.dim();
    Vec probe(d);
    for (auto& v : probe) v = uniform(rng, -p.box_radius, p.box_radius);
    Vec x = f.domain_project(s.t, s.state, probe);
    Vec y = f.minimal_section(s.t, s.state, x);
    switch (f.kind()) {
        case OperatorKind::MovingNormalCone:
        case OperatorKind::SubdiffIndicator: {
            Vec dir = probe - x;
            const double n = norm(dir);
            if (n > 1e-12) axpy(uniform(rng, 0.0, p.normal_scale) / n, dir, y);
            break;
        }
        case OperatorKind::SubdiffAbs:
            for (std::size_t i = 0; i < d; ++i)
                if (x[i] == 0.0) y[i] = uniform(rng, -1.0, 1.0);
            break;
        default:
            break;  // single-valued: the minimal section is the value
    }
    return {std::move(x), std::move(y)};
}

}  // namespace

double dis_estimate(const OperatorSlice& a, const OperatorSlice& b,
                    std::size_t n_samples, std::uint64_t seed,
                    const DisSampling& sampling) {
    if (n_samples == 0) throw std::domain_error("dis_estimate: n_samples must be positive");
    std::mt19937_64 rng(seed);
    double best = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        GraphPoint ga = sample_graph_point(a, rng, sampling);
        GraphPoint gb = sample_graph_point(b, rng, sampling);
        const double num = dot(ga.y - gb.y, gb.x - ga.x);
        const double q = num / (1.0 + norm(ga.y) + norm(gb.y));
        best = std::max(best, q);
    }
    return best;
}

}  // namespace catchup
