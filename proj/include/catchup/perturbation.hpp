#pragma once

#include <optional>
#include <vector>

#include "catchup/linalg.hpp"

namespace catchup {

// Built-in perturbation family
//   f(t, x, y) = e(t) + p1(t) L1 x + p2(t) L2 y
//              + amp * tanh(alpha (<wx, x> + <wy, y>)) * dir,
// with polynomial e (per component, in t), polynomial scalar gains p1, p2,
// and an optional bounded saturation term. Measurable in t, Lipschitz in
// (x, y), and of linear growth, with both constants computable from the
// declared data.
struct Saturation {
    Vec dir;
    double amp = 0.0;
    double alpha = 1.0;
    Vec wx;
    Vec wy;
};

class Perturbation {
public:
    Perturbation() = default;  // identically zero
    Perturbation(std::size_t dim, std::vector<std::vector<double>> e_coeffs, Mat l1,
                 std::vector<double> l1_tpoly, Mat l2, std::vector<double> l2_tpoly,
                 std::optional<Saturation> sat);

    static Perturbation zero(std::size_t dim);

    std::size_t dim() const { return dim_; }
    bool is_zero() const;

    Vec eval(double t, const Vec& x, const Vec& y) const;

    // Upper bound on the Lipschitz constant of (x, y) -> f(t, x, y),
    // uniform over t in [0, T].
    double lipschitz_bound(double horizon) const;
    // Upper bound for the linear-growth constant: |f| <= m (1 + |x| + |y|).
    double growth_bound(double horizon) const;

    const std::vector<std::vector<double>>& e_coeffs() const { return e_coeffs_; }
    const Mat& l1() const { return l1_; }
    const Mat& l2() const { return l2_; }
    const std::vector<double>& l1_tpoly() const { return l1_tpoly_; }
    const std::vector<double>& l2_tpoly() const { return l2_tpoly_; }
    const std::optional<Saturation>& saturation() const { return sat_; }

private:
    std::size_t dim_ = 0;
    std::vector<std::vector<double>> e_coeffs_;  // per component, global t
    Mat l1_, l2_;
    std::vector<double> l1_tpoly_{1.0}, l2_tpoly_{1.0};
    std::optional<Saturation> sat_;

    static double poly_eval(const std::vector<double>& c, double t);
    static double poly_sup(const std::vector<double>& c, double horizon);
};

}  // namespace catchup
