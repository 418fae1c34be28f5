#include "symprep/series.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "symprep/errors.hpp"
#include "symprep/linalg.hpp"

namespace symprep {

int MultiIndex::total() const noexcept
{
    return j + std::accumulate(alpha.begin(), alpha.end(), 0);
}

MultiIndex operator+(const MultiIndex& a, const MultiIndex& b)
{
    if (a.alpha.size() != b.alpha.size()) {
        throw DimensionError("MultiIndex: variable count mismatch");
    }
    MultiIndex r{a.j + b.j, a.alpha};
    for (std::size_t k = 0; k < r.alpha.size(); ++k) {
        r.alpha[k] += b.alpha[k];
    }
    return r;
}

MultiIndex operator-(const MultiIndex& a, const MultiIndex& b)
{
    if (!le(b, a)) {
        throw Error("MultiIndex: subtraction would produce a negative exponent");
    }
    MultiIndex r{a.j - b.j, a.alpha};
    for (std::size_t k = 0; k < r.alpha.size(); ++k) {
        r.alpha[k] -= b.alpha[k];
    }
    return r;
}

bool le(const MultiIndex& a, const MultiIndex& b)
{
    if (a.alpha.size() != b.alpha.size() || a.j > b.j) {
        return false;
    }
    for (std::size_t k = 0; k < a.alpha.size(); ++k) {
        if (a.alpha[k] > b.alpha[k]) {
            return false;
        }
    }
    return true;
}

bool GradedLexLess::operator()(const MultiIndex& a, const MultiIndex& b) const
{
    const int ta = a.total();
    const int tb = b.total();
    if (ta != tb) {
        return ta < tb;
    }
    if (a.j != b.j) {
        return a.j > b.j;
    }
    return a.alpha < b.alpha;
}

namespace {

// Appends every alpha of length `vars` with component sum `sum` to `out`, lexicographically.
void compositions(std::size_t vars, int sum, std::vector<int>& prefix, std::vector<std::vector<int>>& out)
{
    if (prefix.size() + 1 == vars) {
        prefix.push_back(sum);
        out.push_back(prefix);
        prefix.pop_back();
        return;
    }
    for (int first = 0; first <= sum; ++first) {
        prefix.push_back(first);
        compositions(vars, sum - first, prefix, out);
        prefix.pop_back();
    }
}

std::vector<std::vector<int>> alphas_of_degree(std::size_t vars, int sum)
{
    std::vector<std::vector<int>> out;
    if (vars == 0) {
        if (sum == 0) {
            out.emplace_back();
        }
        return out;
    }
    std::vector<int> prefix;
    compositions(vars, sum, prefix, out);
    return out;
}

} // namespace

std::vector<MultiIndex> indices_of_degree(std::size_t num_vars, int degree)
{
    std::vector<MultiIndex> out;
    for (int j = degree; j >= 0; --j) {
        for (auto& alpha : alphas_of_degree(num_vars, degree - j)) {
            out.push_back(MultiIndex{j, std::move(alpha)});
        }
    }
    return out;
}

std::vector<MultiIndex> indices_up_to(std::size_t num_vars, int order)
{
    std::vector<MultiIndex> out;
    for (int p = 0; p <= order; ++p) {
        auto layer = indices_of_degree(num_vars, p);
        out.insert(out.end(), std::make_move_iterator(layer.begin()), std::make_move_iterator(layer.end()));
    }
    return out;
}

std::vector<MultiIndex> sub_indices(const MultiIndex& a)
{
    std::vector<MultiIndex> out;
    MultiIndex cur{0, std::vector<int>(a.alpha.size(), 0)};
    // Odometer over the box [0, a].
    while (true) {
        out.push_back(cur);
        std::size_t k = 0;
        const std::size_t slots = a.alpha.size() + 1;
        for (; k < slots; ++k) {
            int& digit = k == 0 ? cur.j : cur.alpha[k - 1];
            const int cap = k == 0 ? a.j : a.alpha[k - 1];
            if (digit < cap) {
                ++digit;
                break;
            }
            digit = 0;
        }
        if (k == slots) {
            break;
        }
    }
    return out;
}

MSeries::MSeries(std::size_t num_vars, std::size_t dim, int order) : num_vars_(num_vars), dim_(dim), order_(order)
{
    if (dim == 0) {
        throw DimensionError("MSeries: matrix dimension must be positive");
    }
    if (order < 0) {
        throw Error("MSeries: order must be nonnegative");
    }
}

MSeries MSeries::constant(std::size_t num_vars, int order, const Matrix& c)
{
    MSeries s(num_vars, c.dim(), order);
    s.set(MultiIndex{0, std::vector<int>(num_vars, 0)}, c);
    return s;
}

MSeries MSeries::monomial(const MultiIndex& idx, int order, const Matrix& c)
{
    MSeries s(idx.num_vars(), c.dim(), order);
    s.set(idx, c);
    return s;
}

void MSeries::check_index(const MultiIndex& idx) const
{
    if (idx.alpha.size() != num_vars_) {
        throw DimensionError("MSeries: index has " + std::to_string(idx.alpha.size()) + " x-exponents, series has " +
                             std::to_string(num_vars_));
    }
    if (idx.j < 0 || std::any_of(idx.alpha.begin(), idx.alpha.end(), [](int e) { return e < 0; })) {
        throw Error("MSeries: negative exponent");
    }
}

void MSeries::check_matrix(const Matrix& c) const
{
    if (c.dim() != dim_) {
        throw DimensionError("MSeries: coefficient dimension " + std::to_string(c.dim()) + ", series dimension " +
                             std::to_string(dim_));
    }
}

Matrix MSeries::coeff(const MultiIndex& idx) const
{
    const Matrix* c = find(idx);
    return c ? *c : Matrix(dim_);
}

const Matrix* MSeries::find(const MultiIndex& idx) const
{
    auto it = coeffs_.find(idx);
    return it == coeffs_.end() ? nullptr : &it->second;
}

void MSeries::set(const MultiIndex& idx, Matrix c)
{
    check_index(idx);
    check_matrix(c);
    if (idx.total() > order_) {
        if (!c.is_zero()) {
            truncation_loss_ = true;
        }
        return;
    }
    if (c.is_zero()) {
        coeffs_.erase(idx);
    } else {
        coeffs_.insert_or_assign(idx, std::move(c));
    }
}

void MSeries::accumulate(const MultiIndex& idx, const Matrix& c)
{
    check_index(idx);
    check_matrix(c);
    if (idx.total() > order_) {
        if (!c.is_zero()) {
            truncation_loss_ = true;
        }
        return;
    }
    auto [it, inserted] = coeffs_.try_emplace(idx, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) {
            coeffs_.erase(it);
        }
    }
}

bool MSeries::is_t_free() const
{
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const auto& kv) { return kv.first.j == 0; });
}

double MSeries::max_norm() const
{
    double m = 0.0;
    for (const auto& [idx, c] : coeffs_) {
        m = std::max(m, operator_norm(c));
    }
    return m;
}

double MSeries::max_norm_at_degree(int degree) const
{
    double m = 0.0;
    for (const auto& [idx, c] : coeffs_) {
        if (idx.total() == degree) {
            m = std::max(m, operator_norm(c));
        }
    }
    return m;
}

double MSeries::max_asymmetry() const
{
    double m = 0.0;
    for (const auto& [idx, c] : coeffs_) {
        m = std::max(m, asymmetry(c));
    }
    return m;
}

MSeries MSeries::with_order(int order) const
{
    MSeries r(num_vars_, dim_, order);
    r.truncation_loss_ = truncation_loss_;
    for (const auto& [idx, c] : coeffs_) {
        r.set(idx, c);
    }
    return r;
}

XSeries::XSeries(std::size_t num_vars, std::size_t dim, int order) : s_(num_vars, dim, order) {}

XSeries::XSeries(MSeries s) : s_(std::move(s))
{
    if (!s_.is_t_free()) {
        throw Error("XSeries: series depends on t");
    }
}

Matrix XSeries::coeff(const std::vector<int>& alpha) const
{
    return s_.coeff(MultiIndex{0, alpha});
}

void XSeries::set(const std::vector<int>& alpha, Matrix c)
{
    s_.set(MultiIndex{0, alpha}, std::move(c));
}

bool XSeries::is_hermitian(double tol) const
{
    for (const auto& [idx, c] : s_) {
        if (asymmetry(c) > tol * std::max(1.0, operator_norm(c))) {
            return false;
        }
    }
    return true;
}

namespace {

void require_compatible(const MSeries& a, const MSeries& b, const char* op)
{
    if (a.num_vars() != b.num_vars() || a.dim() != b.dim()) {
        std::ostringstream msg;
        msg << op << ": shape mismatch (n=" << a.num_vars() << ", N=" << a.dim() << ") vs (n=" << b.num_vars()
            << ", N=" << b.dim() << ")";
        throw DimensionError(msg.str());
    }
}

template <typename F>
MSeries map_coefficients(const MSeries& a, F&& f)
{
    MSeries r(a.num_vars(), a.dim(), a.order());
    if (a.truncation_loss()) {
        r.mark_truncation_loss();
    }
    for (const auto& [idx, c] : a) {
        r.set(idx, f(c));
    }
    return r;
}

MSeries combine(const MSeries& a, const MSeries& b, complex b_factor, const char* op)
{
    require_compatible(a, b, op);
    MSeries r(a.num_vars(), a.dim(), std::min(a.order(), b.order()));
    if (a.truncation_loss() || b.truncation_loss()) {
        r.mark_truncation_loss();
    }
    for (const auto& [idx, c] : a) {
        r.accumulate(idx, c);
    }
    for (const auto& [idx, c] : b) {
        r.accumulate(idx, c * b_factor);
    }
    return r;
}

} // namespace

MSeries add(const MSeries& a, const MSeries& b)
{
    return combine(a, b, 1.0, "add");
}

MSeries subtract(const MSeries& a, const MSeries& b)
{
    return combine(a, b, -1.0, "subtract");
}

MSeries scale(const MSeries& a, complex c)
{
    return map_coefficients(a, [c](const Matrix& m) { return m * c; });
}

MSeries mul(const MSeries& a, const MSeries& b)
{
    require_compatible(a, b, "mul");
    const int order = std::min(a.order(), b.order());
    MSeries r(a.num_vars(), a.dim(), order);
    if (a.truncation_loss() || b.truncation_loss()) {
        r.mark_truncation_loss();
    }
    MSeries::CoeffMap acc;
    for (const auto& [ia, ca] : a) {
        const int room = order - ia.total();
        for (const auto& [ib, cb] : b) {
            if (ib.total() > room) {
                r.mark_truncation_loss();
                break;
            }
            auto [it, inserted] = acc.try_emplace(ia + ib, a.dim());
            it->second.add_product(ca, cb);
        }
    }
    for (auto& [idx, c] : acc) {
        r.set(idx, std::move(c));
    }
    return r;
}

MSeries adjoint_series(const MSeries& a)
{
    return map_coefficients(a, [](const Matrix& m) { return m.adjoint(); });
}

MSeries hermitian_part_series(const MSeries& a)
{
    return map_coefficients(a, [](const Matrix& m) { return hermitian_part(m); });
}

MSeries dt(const MSeries& a)
{
    MSeries r(a.num_vars(), a.dim(), a.order());
    for (const auto& [idx, c] : a) {
        if (idx.j > 0) {
            r.set(MultiIndex{idx.j - 1, idx.alpha}, c * static_cast<double>(idx.j));
        }
    }
    return r;
}

MSeries integrate_t(const MSeries& a)
{
    MSeries r(a.num_vars(), a.dim(), a.order());
    if (a.truncation_loss()) {
        r.mark_truncation_loss();
    }
    for (const auto& [idx, c] : a) {
        r.set(MultiIndex{idx.j + 1, idx.alpha}, c * (1.0 / (idx.j + 1)));
    }
    return r;
}

MSeries divide_by_t(const MSeries& a, double rel_tol)
{
    const double tol = rel_tol * a.max_norm();
    double worst = 0.0;
    for (const auto& [idx, c] : a) {
        if (idx.j == 0) {
            worst = std::max(worst, operator_norm(c));
        }
    }
    if (worst > tol) {
        std::ostringstream msg;
        msg << "divide_by_t: constant-in-t layer does not vanish (norm " << worst << ", tolerance " << tol << ")";
        throw Error(msg.str());
    }
    MSeries r(a.num_vars(), a.dim(), a.order());
    if (a.truncation_loss()) {
        r.mark_truncation_loss();
    }
    for (const auto& [idx, c] : a) {
        if (idx.j > 0) {
            r.set(MultiIndex{idx.j - 1, idx.alpha}, c);
        }
    }
    return r;
}

XSeries t_zero_slice(const MSeries& a)
{
    MSeries r(a.num_vars(), a.dim(), a.order());
    for (const auto& [idx, c] : a) {
        if (idx.j == 0) {
            r.set(idx, c);
        }
    }
    return XSeries(std::move(r));
}

MSeries series_inverse(const MSeries& a)
{
    const MultiIndex zero{0, std::vector<int>(a.num_vars(), 0)};
    const Matrix c0_inv = inverse(a.coeff(zero));
    MSeries r(a.num_vars(), a.dim(), a.order());
    r.set(zero, c0_inv);
    // a r = 1  =>  r_k = -a_0^{-1} sum_{0 != b <= k} a_b r_{k-b}
    for (const auto& k : indices_up_to(a.num_vars(), a.order())) {
        if (k.total() == 0) {
            continue;
        }
        Matrix s(a.dim());
        for (const auto& b : sub_indices(k)) {
            if (b.total() == 0) {
                continue;
            }
            const Matrix* ab = a.find(b);
            const Matrix* rk = ab ? r.find(k - b) : nullptr;
            if (rk) {
                s.add_product(*ab, *rk);
            }
        }
        r.set(k, -(c0_inv * s));
    }
    return r;
}

Matrix eval(const MSeries& a, double t, std::span<const double> x)
{
    if (x.size() != a.num_vars()) {
        throw DimensionError("eval: expected " + std::to_string(a.num_vars()) + " x-values");
    }
    Matrix sum(a.dim());
    for (const auto& [idx, c] : a) {
        double w = std::pow(t, idx.j);
        for (std::size_t k = 0; k < x.size(); ++k) {
            w *= std::pow(x[k], idx.alpha[k]);
        }
        sum += c * w;
    }
    return sum;
}

} // namespace symprep
