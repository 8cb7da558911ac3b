#include "catchup/perturbation.hpp"

#include <cmath>
#include <stdexcept>

namespace catchup {

Perturbation::Perturbation(std::size_t dim, std::vector<std::vector<double>> e_coeffs,
                           Mat l1, std::vector<double> l1_tpoly, Mat l2,
                           std::vector<double> l2_tpoly, std::optional<Saturation> sat)
    : dim_(dim),
      e_coeffs_(std::move(e_coeffs)),
      l1_(std::move(l1)),
      l2_(std::move(l2)),
      sat_(std::move(sat)) {
    if (!l1_tpoly.empty()) l1_tpoly_ = std::move(l1_tpoly);
    if (!l2_tpoly.empty()) l2_tpoly_ = std::move(l2_tpoly);
    if (!e_coeffs_.empty() && e_coeffs_.size() != dim_)
        throw std::invalid_argument("perturbation: e needs one coefficient list per component");
    if (!l1_.empty() && (l1_.rows != dim_ || l1_.cols != dim_))
        throw std::invalid_argument("perturbation: l1 must be d x d");
    if (!l2_.empty() && (l2_.rows != dim_ || l2_.cols != dim_))
        throw std::invalid_argument("perturbation: l2 must be d x d");
    if (sat_) {
        if (sat_->dir.size() != dim_)
            throw std::invalid_argument("perturbation: saturation.dir must have dimension d");
        if (sat_->wx.empty()) sat_->wx = zeros(dim_);
        if (sat_->wy.empty()) sat_->wy = zeros(dim_);
        if (sat_->wx.size() != dim_ || sat_->wy.size() != dim_)
            throw std::invalid_argument("perturbation: saturation weights must have dimension d");
    }
}

Perturbation Perturbation::zero(std::size_t dim) {
    Perturbation f;
    f.dim_ = dim;
    return f;
}

bool Perturbation::is_zero() const {
    bool e_zero = true;
    for (const auto& c : e_coeffs_)
        for (double v : c)
            if (v != 0.0) e_zero = false;
    return e_zero && l1_.empty() && l2_.empty() && !sat_;
}

double Perturbation::poly_eval(const std::vector<double>& c, double t) {
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) v = v * t + c[k];
    return v;
}

double Perturbation::poly_sup(const std::vector<double>& c, double horizon) {
    // coefficient bound: sup |p(t)| <= sum |c_k| T^k, enough for validation
    double s = 0.0, tk = 1.0;
    for (double v : c) {
        s += std::fabs(v) * tk;
        tk *= std::max(horizon, 1e-30);
    }
    return s;
}

Vec Perturbation::eval(double t, const Vec& x, const Vec& y) const {
    Vec out = zeros(dim_);
    if (!e_coeffs_.empty())
        for (std::size_t i = 0; i < dim_; ++i) out[i] = poly_eval(e_coeffs_[i], t);
    if (!l1_.empty()) axpy(poly_eval(l1_tpoly_, t), l1_.apply(x), out);
    if (!l2_.empty()) axpy(poly_eval(l2_tpoly_, t), l2_.apply(y), out);
    if (sat_) {
        const double arg = sat_->alpha * (dot(sat_->wx, x) + dot(sat_->wy, y));
        axpy(sat_->amp * std::tanh(arg), sat_->dir, out);
    }
    return out;
}

double Perturbation::lipschitz_bound(double horizon) const {
    double k = 0.0;
    if (!l1_.empty()) k += poly_sup(l1_tpoly_, horizon) * operator_norm(l1_);
    if (!l2_.empty()) k += poly_sup(l2_tpoly_, horizon) * operator_norm(l2_);
    if (sat_)
        k += sat_->amp * std::fabs(sat_->alpha) * norm(sat_->dir) *
             std::max(norm(sat_->wx), norm(sat_->wy));
    return k;
}

double Perturbation::growth_bound(double horizon) const {
    double e_sup = 0.0;
    for (const auto& c : e_coeffs_) e_sup += poly_sup(c, horizon) * poly_sup(c, horizon);
    e_sup = std::sqrt(e_sup);
    double m = e_sup;
    if (sat_) m += sat_->amp * norm(sat_->dir);
    if (!l1_.empty()) m = std::max(m, poly_sup(l1_tpoly_, horizon) * operator_norm(l1_));
    if (!l2_.empty()) m = std::max(m, poly_sup(l2_tpoly_, horizon) * operator_norm(l2_));
    return m;
}

}  // namespace catchup
