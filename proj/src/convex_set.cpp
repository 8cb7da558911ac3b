#include "catchup/convex_set.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace catchup {

namespace {
constexpr double kProjTol = 1e-10;
constexpr int kActiveSetMaxRows = 8;
}  // namespace

ConvexSet ConvexSet::box(Vec lo, Vec hi) {
    if (lo.size() != hi.size() || lo.empty())
        throw std::invalid_argument("box: bound size mismatch");
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (lo[i] > hi[i]) throw std::invalid_argument("box: lo > hi");
    ConvexSet s;
    s.kind_ = SetKind::Box;
    s.dim_ = lo.size();
    s.a_ = std::move(lo);
    s.b_ = std::move(hi);
    return s;
}

ConvexSet ConvexSet::ball(Vec center, double radius) {
    if (center.empty()) throw std::invalid_argument("ball: empty center");
    if (!(radius > 0.0)) throw std::invalid_argument("ball: radius must be positive");
    ConvexSet s;
    s.kind_ = SetKind::Ball;
    s.dim_ = center.size();
    s.a_ = std::move(center);
    s.r_ = radius;
    return s;
}

ConvexSet ConvexSet::half_space(Vec normal, double offset) {
    if (norm(normal) == 0.0) throw std::invalid_argument("half_space: zero normal");
    ConvexSet s;
    s.kind_ = SetKind::HalfSpace;
    s.dim_ = normal.size();
    s.a_ = std::move(normal);
    s.r_ = offset;
    return s;
}

ConvexSet ConvexSet::polyhedron(Mat g, Vec h) {
    if (g.rows == 0 || g.cols == 0 || g.rows != h.size())
        throw std::invalid_argument("polyhedron: shape mismatch");
    ConvexSet s;
    s.kind_ = SetKind::Polyhedron;
    s.dim_ = g.cols;
    s.g_ = std::move(g);
    s.h_ = std::move(h);
    // Feasibility probe: project the origin; an empty set leaves the
    // candidate search without any KKT point.
    try {
        Vec p = s.project_polyhedron(zeros(s.dim_));
        Vec viol = s.g_.apply(p);
        for (std::size_t i = 0; i < s.h_.size(); ++i)
            if (viol[i] > s.h_[i] + 1e-7)
                throw std::invalid_argument("polyhedron: infeasible constraint system");
    } catch (const std::runtime_error&) {
        throw std::invalid_argument("polyhedron: infeasible constraint system");
    }
    return s;
}

Vec ConvexSet::project(const Vec& x) const {
    switch (kind_) {
        case SetKind::Box: {
            Vec p = x;
            for (std::size_t i = 0; i < dim_; ++i)
                p[i] = std::clamp(p[i], a_[i], b_[i]);
            return p;
        }
        case SetKind::Ball: {
            Vec d = x - a_;
            const double n = norm(d);
            if (n <= r_) return x;
            return a_ + (r_ / n) * d;
        }
        case SetKind::HalfSpace: {
            const double g = dot(a_, x) - r_;
            if (g <= 0.0) return x;
            Vec p = x;
            axpy(-g / dot(a_, a_), a_, p);
            return p;
        }
        case SetKind::Polyhedron:
            return project_polyhedron(x);
    }
    throw std::logic_error("project: unknown kind");
}

// Projection onto {Gz <= h}. For few rows, enumerate candidate active sets
// and accept the KKT point (feasible, nonnegative multipliers). Larger
// systems fall back to projected gradient on the dual.
Vec ConvexSet::project_polyhedron(const Vec& x) const {
    const std::size_t m = g_.rows;
    Vec gx = g_.apply(x);
    bool feasible = true;
    for (std::size_t i = 0; i < m; ++i)
        if (gx[i] > h_[i] + kProjTol) feasible = false;
    if (feasible) return x;

    if (m <= kActiveSetMaxRows) {
        bool found = false;
        Vec best;
        double best_dist = 0.0;
        for (unsigned mask = 1; mask < (1u << m); ++mask) {
            std::vector<std::size_t> rows;
            for (std::size_t i = 0; i < m; ++i)
                if (mask & (1u << i)) rows.push_back(i);
            const std::size_t k = rows.size();
            // G_S G_S^T mu = G_S x - h_S ; z = x - G_S^T mu
            Mat gram(k, k);
            Vec rhs(k);
            for (std::size_t r = 0; r < k; ++r) {
                rhs[r] = gx[rows[r]] - h_[rows[r]];
                for (std::size_t c = 0; c < k; ++c) {
                    double s = 0.0;
                    for (std::size_t j = 0; j < dim_; ++j)
                        s += g_(rows[r], j) * g_(rows[c], j);
                    gram(r, c) = s;
                }
            }
            Vec mu;
            try {
                mu = solve_dense(gram, rhs);
            } catch (const std::runtime_error&) {
                continue;  // degenerate subset; a smaller one covers the face
            }
            bool mu_ok = true;
            for (double v : mu)
                if (v < -kProjTol) mu_ok = false;
            if (!mu_ok) continue;
            Vec z = x;
            for (std::size_t r = 0; r < k; ++r)
                for (std::size_t j = 0; j < dim_; ++j) z[j] -= mu[r] * g_(rows[r], j);
            Vec gz = g_.apply(z);
            bool z_ok = true;
            for (std::size_t i = 0; i < m; ++i)
                if (gz[i] > h_[i] + kProjTol * (1.0 + std::fabs(h_[i]))) z_ok = false;
            if (!z_ok) continue;
            const double d = dist(z, x);
            if (!found || d < best_dist) {
                found = true;
                best = z;
                best_dist = d;
            }
        }
        if (found) return best;
        throw std::runtime_error("polyhedron projection: no KKT point (empty set?)");
    }

    // Dual projected gradient: maximize the dual of min ||z-x||^2 s.t. Gz<=h;
    // mu_{k+1} = max(0, mu_k - step (G G^T mu_k - (Gx - h))).
    Mat gt = g_.transposed();
    double lip = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) row += g_(i, j) * g_(i, j);
        lip += row;
    }
    const double step = 1.0 / std::max(lip, 1e-12);
    Vec mu(m, 0.0);
    Vec z = x;
    for (int it = 0; it < 200000; ++it) {
        z = x - gt.apply(mu);
        Vec grad = g_.apply(z);
        double kkt = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double slack = grad[i] - h_[i];
            kkt = std::max(kkt, slack);
            mu[i] = std::max(0.0, mu[i] + step * slack);
        }
        if (kkt <= kProjTol) break;
        if (it == 199999)
            throw std::runtime_error("polyhedron projection: dual iteration stalled (empty set?)");
    }
    return x - gt.apply(mu);
}

double ConvexSet::distance(const Vec& x) const { return dist(x, project(x)); }

bool ConvexSet::contains(const Vec& x, double tol) const { return distance(x) <= tol; }

std::vector<Vec> ConvexSet::vertices() const {
    std::vector<Vec> out;
    if (kind_ == SetKind::Box) {
        if (dim_ > 8) return out;
        for (unsigned mask = 0; mask < (1u << dim_); ++mask) {
            Vec v(dim_);
            for (std::size_t i = 0; i < dim_; ++i)
                v[i] = (mask & (1u << i)) ? b_[i] : a_[i];
            out.push_back(std::move(v));
        }
        return out;
    }
    if (kind_ == SetKind::Polyhedron && g_.rows <= kActiveSetMaxRows) {
        const std::size_t m = g_.rows;
        for (unsigned mask = 1; mask < (1u << m); ++mask) {
            std::vector<std::size_t> rows;
            for (std::size_t i = 0; i < m; ++i)
                if (mask & (1u << i)) rows.push_back(i);
            if (rows.size() != dim_) continue;
            Mat a(dim_, dim_);
            Vec rhs(dim_);
            for (std::size_t r = 0; r < dim_; ++r) {
                rhs[r] = h_[rows[r]];
                for (std::size_t j = 0; j < dim_; ++j) a(r, j) = g_(rows[r], j);
            }
            Vec v;
            try {
                v = solve_dense(a, rhs);
            } catch (const std::runtime_error&) {
                continue;
            }
            if (!contains(v, 1e-8)) continue;
            bool dup = false;
            for (const auto& w : out)
                if (dist(w, v) < 1e-9) dup = true;
            if (!dup) out.push_back(std::move(v));
        }
    }
    return out;
}

Vec project_affine_image(const ConvexSet& base, double scale, const Vec& shift,
                         const Vec& x) {
    if (!(scale > 0.0))
        throw std::invalid_argument("project_affine_image: scale must be positive");
    Vec pre = (1.0 / scale) * (x - shift);
    Vec z = base.project(pre);
    return scale * z + shift;
}

}  // namespace catchup
