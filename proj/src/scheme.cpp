#include "catchup/scheme.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace catchup {

AprioriBounds apriori_bounds(double m, double c, double gamma, double u0_norm,
                             double v0_norm, double horizon) {
    if (m < 0 || c < 0 || gamma < 0 || u0_norm < 0 || v0_norm < 0 || horizon <= 0)
        throw std::domain_error("apriori_bounds: constants must be nonnegative, horizon positive");
    AprioriBounds b;
    const double T = horizon;
    b.m1 = m + 1.0;
    b.c1 = 1.5 * (1.0 + c);
    b.gamma1 = 2.0 * gamma;
    b.m2 = (v0_norm + (b.m1 + b.c1) * (1.0 + u0_norm) * T) *
           std::exp((2.0 + T) * b.m1 + 2.0 * b.c1 + b.gamma1);
    b.m3 = (b.m1 + b.c1) * (1.0 + u0_norm + b.m2 * T + b.m2);
    b.m4 = b.gamma1 * b.m2;
    b.M = std::max(b.m2, std::max(b.m3, b.m4));
    b.M1 = 2.0 * b.M + 2.0 * m * (1.0 + 2.0 * b.M);
    b.M2 = b.M + b.M1;
    b.M3 = b.M + m * (1.0 + 2.0 * b.M);
    b.M4 = m * (1.0 + 2.0 * b.M);
    b.M5 = b.M3 + b.M4;
    return b;
}

double DiscreteTrajectory::max_residual() const {
    double r = 0.0;
    for (double v : residuals) r = std::max(r, v);
    return r;
}

namespace {

Vec simpson(const Perturbation& f, double a, double b, const Vec& u, const Vec& v) {
    Vec fa = f.eval(a, u, v);
    Vec fm = f.eval(0.5 * (a + b), u, v);
    Vec fb = f.eval(b, u, v);
    Vec s = fa + fb;
    axpy(4.0, fm, s);
    return ((b - a) / 6.0) * s;
}

void adaptive_simpson(const Perturbation& f, double a, double b, const Vec& u,
                      const Vec& v, const Vec& whole, double tol, int depth, Vec& acc) {
    const double m = 0.5 * (a + b);
    Vec left = simpson(f, a, m, u, v);
    Vec right = simpson(f, m, b, u, v);
    Vec sum = left + right;
    const double err = norm(sum - whole);
    if (err <= 15.0 * tol || depth >= 30) {
        acc += sum;
        axpy(1.0 / 15.0, sum - whole, acc);
        return;
    }
    adaptive_simpson(f, a, m, u, v, left, 0.5 * tol, depth + 1, acc);
    adaptive_simpson(f, m, b, u, v, right, 0.5 * tol, depth + 1, acc);
}

}  // namespace

Vec cell_load(const Perturbation& f, double a, double b, const Vec& u_frozen,
              const Vec& v_frozen) {
    if (b <= a || f.is_zero()) return zeros(u_frozen.size());
    const double scale = 1.0 + norm(f.eval(a, u_frozen, v_frozen));
    const double tol = 1e-12 * scale * (b - a);
    Vec acc = zeros(u_frozen.size());
    adaptive_simpson(f, a, b, u_frozen, v_frozen, simpson(f, a, b, u_frozen, v_frozen),
                     tol, 0, acc);
    return acc;
}

StepResult catch_up_step(const OperatorFamily& fam, double t_next, double beta,
                         const Vec& u, const Vec& v, const Vec& load) {
    if (!(beta > 0.0)) throw std::domain_error("catch_up_step: cell mass must be positive");
    StepResult r;
    r.v_next = fam.resolvent(t_next, u, beta, v - load);
    r.u_next = u;
    axpy(beta, r.v_next, r.u_next);
    Vec incl = (-1.0 / beta) * (r.v_next - v + load);
    r.residual = fam.graph_residual(t_next, u, r.v_next, incl);
    return r;
}

DiscreteTrajectory run(const OperatorFamily& fam, const Perturbation& f,
                       const BVClock& clock, const Partition& partition, Vec u0,
                       Vec v0, const RunOptions& options) {
    if (partition.nodes.empty() ||
        std::fabs(partition.nodes.back() - clock.horizon()) > clock.time_tolerance())
        throw std::invalid_argument("run: partition does not span the clock horizon");
    const double d0 = fam.domain_distance(0.0, u0, v0);
    if (d0 > options.domain_tol)
        throw std::domain_error("run: v0 is outside D(A(0, u0)) by " + std::to_string(d0));

    const std::size_t q = partition.cell_count();
    DiscreteTrajectory traj;
    traj.partition = partition;
    traj.u.reserve(q + 1);
    traj.v.reserve(q + 1);
    traj.loads.reserve(q);
    traj.residuals.reserve(q);
    traj.u.push_back(std::move(u0));
    traj.v.push_back(std::move(v0));

    for (std::size_t k = 0; k < q; ++k) {
        const double a = partition.nodes[k];
        const double b = partition.nodes[k + 1];
        const double beta = partition.cells[k].control;
        Vec load = cell_load(f, a, b, traj.u[k], traj.v[k]);
        StepResult s = catch_up_step(fam, b, beta, traj.u[k], traj.v[k], load);
        if (options.enforce_bounds) {
            const AprioriBounds& ab = *options.enforce_bounds;
            const double beta_prev = k > 0 ? partition.cells[k - 1].control : 0.0;
            if (norm(s.u_next) > ab.M || norm(s.v_next) > ab.M ||
                dist(s.v_next, traj.v[k]) > ab.M * (beta + beta_prev))
                throw std::runtime_error(
                    "run: iterate bound violated at cell " + std::to_string(k) +
                    "; declared scenario constants do not dominate the dynamics");
        }
        traj.loads.push_back(std::move(load));
        traj.residuals.push_back(s.residual);
        traj.u.push_back(std::move(s.u_next));
        traj.v.push_back(std::move(s.v_next));
    }
    return traj;
}

std::pair<Vec, Vec> Interpolant::at(double t) const {
    const Partition& p = traj_->partition;
    const double tol = clock_->time_tolerance();
    const double T = p.nodes.back();
    if (t < -tol || t > T + tol) throw std::domain_error("interpolate: time outside [0, T]");
    if (t >= T - tol) return {traj_->u.back(), traj_->v.back()};

    const std::size_t k = p.cell_left_closed(t, tol);
    const double a = p.nodes[k];
    const double beta = p.cells[k].control;
    const double w = (t <= a) ? 0.0 : control_mass(*clock_, a, t) / beta;

    Vec u = traj_->u[k];
    axpy(w, traj_->u[k + 1] - traj_->u[k], u);

    Vec v = traj_->v[k];
    Vec jump = traj_->v[k + 1] - traj_->v[k] + traj_->loads[k];
    axpy(w, jump, v);
    if (!f_->is_zero() && t > a) v -= cell_load(*f_, a, t, traj_->u[k], traj_->v[k]);
    return {std::move(u), std::move(v)};
}

Vec Interpolant::du_density(double t) const {
    const Partition& p = traj_->partition;
    const double tol = clock_->time_tolerance();
    if (t < -tol || t > p.nodes.back() + tol)
        throw std::domain_error("du_density: time outside [0, T]");
    const std::size_t k = p.cell_containing(t, tol);
    return (1.0 / p.cells[k].control) * (traj_->u[k + 1] - traj_->u[k]);
}

Vec Interpolant::dv_density(double t) const {
    const Partition& p = traj_->partition;
    const double tol = clock_->time_tolerance();
    if (t < -tol || t > p.nodes.back() + tol)
        throw std::domain_error("dv_density: time outside [0, T]");
    const std::size_t k = p.cell_containing(t, tol);
    Vec d = (1.0 / p.cells[k].control) *
            (traj_->v[k + 1] - traj_->v[k] + traj_->loads[k]);
    if (!f_->is_zero()) {
        const double ld = lebesgue_density(*clock_, std::clamp(t, 0.0, p.nodes.back()));
        if (ld != 0.0) axpy(-ld, f_->eval(t, traj_->u[k], traj_->v[k]), d);
    }
    return d;
}

std::vector<double> gronwall_bound(const std::vector<double>& alpha,
                                   const std::vector<double>& beta,
                                   const std::vector<double>& gamma, double a0) {
    const std::size_t n = alpha.size();
    if (beta.size() != n || gamma.size() != n)
        throw std::invalid_argument("gronwall_bound: sequence length mismatch");
    if (a0 < 0.0) throw std::domain_error("gronwall_bound: negative seed");
    for (std::size_t i = 0; i < n; ++i)
        if (alpha[i] < 0.0 || beta[i] < 0.0 || gamma[i] < 0.0)
            throw std::domain_error("gronwall_bound: negative entry");
    std::vector<double> out(n + 1);
    out[0] = a0;
    double alpha_sum = 0.0, exp_sum = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
        alpha_sum += alpha[j - 1];
        exp_sum += double(j - 1) * beta[j - 1] + gamma[j - 1];
        out[j] = (a0 + alpha_sum) * std::exp(exp_sum);
    }
    return out;
}

}  // namespace catchup
