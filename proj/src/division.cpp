#include "symprep/division.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "symprep/errors.hpp"

namespace symprep {

Pencil::Pencil(Matrix b) : b_(std::move(b))
{
    const double asym = asymmetry(b_);
    if (asym > 1e-12) {
        std::ostringstream msg;
        msg << "pencil matrix B must be symmetric (B* = B): ||B - B*|| = " << asym;
        throw PreconditionError(msg.str());
    }
    b_ = hermitian_part(b_);
    eig_ = hermitian_eigendecomposition(b_);
    norm_ = std::max(std::abs(eig_.eigenvalues.front()), std::abs(eig_.eigenvalues.back()));
    if (!(norm_ < 1.0)) {
        std::ostringstream msg;
        msg << "division requires ||B|| < 1, got ||B|| = " << norm_;
        throw PreconditionError(msg.str());
    }
}

Pencil Pencil::transposed() const
{
    return Pencil(b_.transpose());
}

Matrix pencil_eval(const Pencil& p, complex t)
{
    return p.matrix() + Matrix::identity(p.dim()) * t;
}

double resolvent_norm(const Pencil& p, complex t)
{
    double dist = std::numeric_limits<double>::infinity();
    for (double beta : p.spectrum().eigenvalues) {
        dist = std::min(dist, std::abs(t + beta));
    }
    return 1.0 / dist;
}

Matrix pencil_resolvent(const Pencil& p, complex t)
{
    if (std::abs(t.imag()) < kResolventFloor && std::abs(t.real()) < 1.0 + p.norm()) {
        std::ostringstream msg;
        msg << "pencil_resolvent: t = " << t << " lies on the real segment containing the spectrum";
        throw PreconditionError(msg.str());
    }
    const auto& eig = p.spectrum();
    const std::size_t n = p.dim();
    Matrix scaled = eig.basis;
    for (std::size_t c = 0; c < n; ++c) {
        const complex w = 1.0 / (t + eig.eigenvalues[c]);
        for (std::size_t r = 0; r < n; ++r) {
            scaled(r, c) *= w;
        }
    }
    return scaled * eig.basis.adjoint();
}

Matrix eval_polynomial(const MatrixPolynomial& g, complex t)
{
    if (g.empty()) {
        throw Error("eval_polynomial: empty coefficient list");
    }
    Matrix acc = g.back();
    for (std::size_t k = g.size() - 1; k-- > 0;) {
        acc *= t;
        acc += g[k];
    }
    return acc;
}

StripFunction StripFunction::polynomial(MatrixPolynomial coefficients)
{
    if (coefficients.empty()) {
        throw Error("StripFunction: polynomial needs at least one coefficient");
    }
    StripFunction f;
    f.dim_ = coefficients.front().dim();
    for (const auto& c : coefficients) {
        if (c.dim() != f.dim_) {
            throw DimensionError("StripFunction: coefficient dimensions differ");
        }
    }
    f.coeffs_ = std::move(coefficients);
    f.width_ = std::numeric_limits<double>::infinity();
    return f;
}

StripFunction StripFunction::sampler(std::size_t dim, Sampler fn, double strip_half_width, double sup_bound)
{
    if (!(strip_half_width > 0.0) || !(sup_bound > 0.0)) {
        throw Error("StripFunction: sampler needs a positive strip width and sup bound");
    }
    StripFunction f;
    f.dim_ = dim;
    f.sampler_ = std::move(fn);
    f.width_ = strip_half_width;
    f.bound_ = sup_bound;
    return f;
}

Matrix StripFunction::operator()(complex t) const
{
    if (sampler_) {
        Matrix v = sampler_(t);
        if (v.dim() != dim_) {
            throw DimensionError("StripFunction: sampler returned a matrix of the wrong size");
        }
        return v;
    }
    return eval_polynomial(coeffs_, t);
}

namespace {

constexpr int kGaussPoints = 10;

struct GaussRule {
    std::array<double, kGaussPoints> nodes{};    // on [0, 1]
    std::array<double, kGaussPoints> weights{};  // sum to 1
};

// Legendre roots by Newton's method from the Chebyshev-like initial guess.
GaussRule make_gauss_rule()
{
    GaussRule rule;
    constexpr int n = kGaussPoints;
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        rule.nodes[i] = 0.5 * (1.0 - x);
        rule.weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

const GaussRule& gauss_rule()
{
    static const GaussRule rule = make_gauss_rule();
    return rule;
}

struct QuadNode {
    complex s;
    complex w;  // includes ds
};

// Counterclockwise boundary of [x0, x1] x [-eps, eps].
std::vector<QuadNode> rectangle_nodes(double x0, double x1, double eps, int panels)
{
    const std::array<complex, 4> corners{complex{x0, -eps}, complex{x1, -eps}, complex{x1, eps}, complex{x0, eps}};
    const double width = std::min(1.0 / panels, eps);
    const auto& rule = gauss_rule();
    std::vector<QuadNode> nodes;
    for (std::size_t e = 0; e < 4; ++e) {
        const complex a = corners[e];
        const complex b = corners[(e + 1) % 4];
        const double len = std::abs(b - a);
        const int count = std::max(1, static_cast<int>(std::ceil(len / width - 1e-9)));
        const complex step = (b - a) / static_cast<double>(count);
        for (int k = 0; k < count; ++k) {
            const complex start = a + step * static_cast<double>(k);
            for (int g = 0; g < kGaussPoints; ++g) {
                nodes.push_back({start + step * rule.nodes[g], step * rule.weights[g]});
            }
        }
    }
    return nodes;
}

struct NodeValue {
    QuadNode node;
    Matrix integrand;  // G(s) P(s)^{-1}
};

std::vector<NodeValue> sample_integrand(const StripFunction& G, const Pencil& pencil,
                                        const std::vector<QuadNode>& nodes, double& sup_g, double& max_resolvent)
{
    std::vector<NodeValue> out;
    out.reserve(nodes.size());
    for (const auto& q : nodes) {
        const Matrix g = G(q.s);
        if (G.is_polynomial()) {
            sup_g = std::max(sup_g, operator_norm(g));
        }
        max_resolvent = std::max(max_resolvent, resolvent_norm(pencil, q.s));
        out.push_back({q, g * pencil_resolvent(pencil, q.s)});
    }
    return out;
}

} // namespace

DivisionResult contour_divide(const StripFunction& G, const Pencil& pencil, double eps,
                              const std::vector<double>& t_points, int panels)
{
    if (G.dim() != pencil.dim()) {
        throw DimensionError("contour_divide: G and pencil dimensions differ");
    }
    const double max_eps = std::min(1.0, G.strip_half_width());
    if (!(eps > 0.0) || eps > max_eps) {
        std::ostringstream msg;
        msg << "contour_divide: eps = " << eps << " outside (0, " << max_eps << "] (strip half-width of G is "
            << G.strip_half_width() << ")";
        throw PreconditionError(msg.str());
    }
    if (panels < kMinPanelsPerUnit) {
        throw Error("contour_divide: at least " + std::to_string(kMinPanelsPerUnit) + " panels per unit length");
    }
    double t_min = 0.0;
    double t_max = 0.0;
    for (double t : t_points) {
        if (!(std::abs(t) < 2.0)) {
            std::ostringstream msg;
            msg << "contour_divide: evaluation point t = " << t << " must satisfy |t| < 2";
            throw PreconditionError(msg.str());
        }
        t_min = std::min(t_min, t);
        t_max = std::max(t_max, t);
    }

    const std::size_t n = pencil.dim();
    const complex two_pi_i{0.0, 2.0 * std::numbers::pi};

    DivisionResult res;
    res.t_points = t_points;
    res.eps = eps;
    res.panels = panels;

    double sup_g = 0.0;
    double max_resolvent = 0.0;

    const auto r_nodes = sample_integrand(G, pencil, rectangle_nodes(-2.0, 2.0, eps, panels), sup_g, max_resolvent);
    Matrix r(n);
    for (const auto& v : r_nodes) {
        r += v.integrand * v.node.w;
    }
    r *= 1.0 / two_pi_i;
    res.R = std::move(r);

    std::vector<NodeValue> q_nodes;
    if (!t_points.empty()) {
        q_nodes = sample_integrand(G, pencil, rectangle_nodes(std::min(-2.0, t_min - 2.0), std::max(2.0, t_max + 2.0), eps, panels),
                                   sup_g, max_resolvent);
    }
    for (double t : t_points) {
        Matrix q(n);
        for (const auto& v : q_nodes) {
            q += v.integrand * (v.node.w / (v.node.s - t));
        }
        q *= 1.0 / two_pi_i;
        res.Q_values.push_back(std::move(q));
    }
    res.quadrature_nodes = r_nodes.size() + q_nodes.size();
    res.max_resolvent_norm = max_resolvent;
    res.sup_bound = G.declared_bound().value_or(sup_g);

    double sup_q = 0.0;
    for (std::size_t k = 0; k < t_points.size(); ++k) {
        const complex t = t_points[k];
        const Matrix resid = G(t) - res.Q_values[k] * pencil_eval(pencil, t) - res.R;
        res.residual_max = std::max(res.residual_max, operator_norm(resid));
        sup_q = std::max(sup_q, operator_norm(res.Q_values[k]));
    }
    if (res.sup_bound > 0.0) {
        res.est_Q = sup_q * eps * eps / res.sup_bound;
        res.est_R = operator_norm(res.R) * eps / res.sup_bound;
    }
    return res;
}

DivisionResult contour_divide_left(const StripFunction& G, const Pencil& pencil, double eps,
                                   const std::vector<double>& t_points, int panels)
{
    StripFunction gt = G.is_polynomial()
        ? [&] {
              MatrixPolynomial c;
              for (const auto& m : G.coefficients()) {
                  c.push_back(m.transpose());
              }
              return StripFunction::polynomial(std::move(c));
          }()
        : StripFunction::sampler(G.dim(), [G](complex s) { return G(s).transpose(); }, G.strip_half_width(),
                                 *G.declared_bound());
    DivisionResult res = contour_divide(gt, pencil.transposed(), eps, t_points, panels);
    for (auto& q : res.Q_values) {
        q = q.transpose();
    }
    res.R = res.R.transpose();
    // Residual of the left form, recomputed directly.
    res.residual_max = 0.0;
    for (std::size_t k = 0; k < t_points.size(); ++k) {
        const complex t = t_points[k];
        const Matrix resid = G(t) - pencil_eval(pencil, t) * res.Q_values[k] - res.R;
        res.residual_max = std::max(res.residual_max, operator_norm(resid));
    }
    return res;
}

std::pair<MatrixPolynomial, Matrix> polynomial_divide(const MatrixPolynomial& G, const Pencil& pencil)
{
    if (G.empty()) {
        throw Error("polynomial_divide: empty coefficient list");
    }
    const Matrix& b = pencil.matrix();
    const std::size_t d = G.size() - 1;
    if (d == 0) {
        return {MatrixPolynomial{Matrix(pencil.dim())}, G[0]};
    }
    MatrixPolynomial q(d);
    q[d - 1] = G[d];
    for (std::size_t k = d - 1; k >= 1; --k) {
        q[k - 1] = G[k] - q[k] * b;
    }
    Matrix r = G[0] - q[0] * b;
    return {std::move(q), std::move(r)};
}

std::vector<SliceDivision> divide_on_slices(const std::function<StripFunction(const std::vector<double>&)>& G_at,
                                            const std::function<Matrix(const std::vector<double>&)>& M_at,
                                            const std::vector<std::vector<double>>& slices, double eps,
                                            const std::vector<double>& t_points, bool left, int panels)
{
    std::vector<SliceDivision> out;
    out.reserve(slices.size());
    for (const auto& x : slices) {
        const Pencil pencil(M_at(x));
        const StripFunction g = G_at(x);
        out.push_back({x, left ? contour_divide_left(g, pencil, eps, t_points, panels)
                               : contour_divide(g, pencil, eps, t_points, panels)});
    }
    return out;
}

EstimateTable estimate_report(const std::vector<NamedStripFunction>& family, const Pencil& pencil,
                              const std::vector<double>& eps_list, const std::vector<double>& t_points, int panels)
{
    EstimateTable table;
    for (const auto& f : family) {
        for (double eps : eps_list) {
            const DivisionResult r = contour_divide(f.G, pencil, eps, t_points, panels);
            EstimateRow row;
            row.function_id = f.id;
            row.eps = eps;
            for (const auto& q : r.Q_values) {
                row.sup_norm_Q = std::max(row.sup_norm_Q, operator_norm(q));
            }
            row.norm_R = operator_norm(r.R);
            row.est_Q = r.est_Q;
            row.est_R = r.est_R;
            table.max_est_Q = std::max(table.max_est_Q, row.est_Q);
            table.max_est_R = std::max(table.max_est_R, row.est_R);
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

std::vector<double> default_t_points()
{
    std::vector<double> pts;
    for (int k = 0; k <= 16; ++k) {
        pts.push_back(-1.6 + 0.2 * k);
    }
    return pts;
}

} // namespace symprep
