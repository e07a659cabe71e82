#include "gssm/series.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "gssm/error.hpp"

namespace gssm {

MultiIndex::MultiIndex(std::vector<int> exponents) : e_(std::move(exponents)) {
    if (e_.empty()) throw ValidationError("multi-index needs at least one variable");
    for (int v : e_) {
        if (v < 0) throw ValidationError("multi-index exponents must be nonnegative");
        order_ += v;
    }
}

MultiIndex::MultiIndex(std::initializer_list<int> exponents)
    : MultiIndex(std::vector<int>(exponents)) {}

MultiIndex MultiIndex::zero(int dim) { return MultiIndex(std::vector<int>(static_cast<std::size_t>(dim), 0)); }

MultiIndex MultiIndex::unit(int dim, int axis) {
    std::vector<int> e(static_cast<std::size_t>(dim), 0);
    e[static_cast<std::size_t>(axis)] = 1;
    return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
    if (other.dim() != dim()) throw ValidationError("multi-index dimension mismatch");
    MultiIndex r = *this;
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] += other.e_[i];
    r.order_ += other.order_;
    return r;
}

MultiIndex MultiIndex::operator-(const MultiIndex& other) const {
    if (!dominates(other)) throw ValidationError("multi-index difference would be negative");
    MultiIndex r = *this;
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] -= other.e_[i];
    r.order_ -= other.order_;
    return r;
}

bool MultiIndex::dominates(const MultiIndex& other) const {
    if (other.dim() != dim()) return false;
    for (std::size_t i = 0; i < e_.size(); ++i)
        if (other.e_[i] > e_[i]) return false;
    return true;
}

bool MultiIndex::operator<(const MultiIndex& other) const {
    if (order_ != other.order_) return order_ < other.order_;
    if (e_.size() != other.e_.size()) return e_.size() < other.e_.size();
    // Larger leading exponents sort first within one total order.
    return std::lexicographical_compare(other.e_.begin(), other.e_.end(), e_.begin(), e_.end());
}

std::string MultiIndex::str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < e_.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(e_[i]);
    }
    return s + ")";
}

namespace {

void fill_order(int dim, int remaining, std::vector<int>& prefix, std::vector<MultiIndex>& out) {
    if (static_cast<int>(prefix.size()) == dim - 1) {
        prefix.push_back(remaining);
        out.emplace_back(prefix);
        prefix.pop_back();
        return;
    }
    for (int a = remaining; a >= 0; --a) {
        prefix.push_back(a);
        fill_order(dim, remaining - a, prefix, out);
        prefix.pop_back();
    }
}

bool is_zero(const CVec& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (v[i] != cplx(0.0)) return false;
    return true;
}

}  // namespace

std::vector<MultiIndex> indices_of_order(int dim, int order) {
    if (dim < 1) throw ValidationError("dimension must be positive");
    std::vector<MultiIndex> out;
    if (order < 0) return out;
    std::vector<int> prefix;
    fill_order(dim, order, prefix, out);
    return out;
}

std::vector<MultiIndex> indices_up_to(int dim, int hi, int lo) {
    std::vector<MultiIndex> out;
    for (int k = std::max(lo, 0); k <= hi; ++k) {
        auto part = indices_of_order(dim, k);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

std::size_t monomial_count(int dim, int order) {
    // binom(order + dim, dim)
    std::size_t r = 1;
    for (int i = 1; i <= dim; ++i) r = r * static_cast<std::size_t>(order + i) / static_cast<std::size_t>(i);
    return r;
}

// ---------------------------------------------------------------------------

MultiSeries::MultiSeries(int dim_in, int dim_out, int order)
    : dim_in_(dim_in), dim_out_(dim_out), order_(order) {
    if (dim_in < 1 || dim_out < 1) throw ValidationError("series dimensions must be positive");
    if (order < 0) throw ValidationError("series order must be nonnegative");
}

MultiSeries MultiSeries::univariate(std::span<const cplx> coeffs) {
    MultiSeries s(1, 1, coeffs.empty() ? 0 : static_cast<int>(coeffs.size()) - 1);
    for (std::size_t n = 0; n < coeffs.size(); ++n) s.set(MultiIndex{static_cast<int>(n)}, 0, coeffs[n]);
    return s;
}

MultiSeries MultiSeries::univariate(std::span<const double> coeffs) {
    std::vector<cplx> c(coeffs.begin(), coeffs.end());
    return univariate(std::span<const cplx>(c));
}

MultiSeries MultiSeries::identity(int dim, int order) {
    MultiSeries s(dim, dim, std::max(order, 1));
    for (int i = 0; i < dim; ++i) s.set(MultiIndex::unit(dim, i), i, 1.0);
    return s;
}

void MultiSeries::check_index(const MultiIndex& k) const {
    if (k.dim() != dim_in_)
        throw ValidationError("multi-index " + k.str() + " has wrong dimension for series with dim_in " +
                              std::to_string(dim_in_));
    if (k.order() > order_)
        throw ValidationError("multi-index " + k.str() + " exceeds truncation order " + std::to_string(order_));
}

CVec MultiSeries::coeff(const MultiIndex& k) const {
    auto it = terms_.find(k);
    if (it == terms_.end()) return CVec::Zero(dim_out_);
    return it->second;
}

cplx MultiSeries::coeff(const MultiIndex& k, int component) const {
    auto it = terms_.find(k);
    if (it == terms_.end()) return 0.0;
    return it->second[component];
}

const CVec* MultiSeries::find(const MultiIndex& k) const {
    auto it = terms_.find(k);
    return it == terms_.end() ? nullptr : &it->second;
}

void MultiSeries::set(const MultiIndex& k, const CVec& value) {
    check_index(k);
    if (value.size() != dim_out_) throw ValidationError("coefficient length does not match dim_out");
    if (is_zero(value)) {
        terms_.erase(k);
        return;
    }
    terms_[k] = value;
}

void MultiSeries::set(const MultiIndex& k, int component, cplx value) {
    check_index(k);
    if (component < 0 || component >= dim_out_) throw ValidationError("component out of range");
    auto it = terms_.find(k);
    if (it == terms_.end()) {
        if (value == cplx(0.0)) return;
        it = terms_.emplace(k, CVec::Zero(dim_out_)).first;
    }
    it->second[component] = value;
    if (is_zero(it->second)) terms_.erase(it);
}

void MultiSeries::add(const MultiIndex& k, const CVec& value) {
    check_index(k);
    if (value.size() != dim_out_) throw ValidationError("coefficient length does not match dim_out");
    auto it = terms_.find(k);
    if (it == terms_.end()) {
        if (!is_zero(value)) terms_.emplace(k, value);
        return;
    }
    it->second += value;
    if (is_zero(it->second)) terms_.erase(it);
}

void MultiSeries::add(const MultiIndex& k, int component, cplx value) {
    set(k, component, coeff(k, component) + value);
}

void MultiSeries::prune(double tol) {
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (it->second.cwiseAbs().maxCoeff() <= tol)
            it = terms_.erase(it);
        else
            ++it;
    }
}

MultiSeries MultiSeries::truncated(int order) const {
    MultiSeries r(dim_in_, dim_out_, std::min(order, order_));
    for (const auto& [k, v] : terms_)
        if (k.order() <= order) r.terms_.emplace(k, v);
    return r;
}

MultiSeries MultiSeries::component(int i) const {
    if (i < 0 || i >= dim_out_) throw ValidationError("component out of range");
    MultiSeries r(dim_in_, 1, order_);
    for (const auto& [k, v] : terms_)
        if (v[i] != cplx(0.0)) r.terms_.emplace(k, CVec::Constant(1, v[i]));
    return r;
}

void MultiSeries::set_order(int order) {
    if (order < 0) throw ValidationError("series order must be nonnegative");
    order_ = order;
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (it->first.order() > order)
            it = terms_.erase(it);
        else
            ++it;
    }
}

int MultiSeries::lowest_order() const { return terms_.empty() ? -1 : terms_.begin()->first.order(); }

int MultiSeries::highest_order() const { return terms_.empty() ? -1 : terms_.rbegin()->first.order(); }

bool MultiSeries::is_real(double tol) const {
    for (const auto& [k, v] : terms_)
        if (v.imag().cwiseAbs().maxCoeff() > tol) return false;
    return true;
}

std::vector<cplx> MultiSeries::dense_univariate() const {
    if (dim_in_ != 1 || dim_out_ != 1) throw ValidationError("dense_univariate needs a scalar univariate series");
    std::vector<cplx> c(static_cast<std::size_t>(order_) + 1, 0.0);
    for (const auto& [k, v] : terms_) c[static_cast<std::size_t>(k[0])] = v[0];
    return c;
}

MultiSeries& MultiSeries::operator+=(const MultiSeries& other) {
    if (other.dim_in_ != dim_in_ || other.dim_out_ != dim_out_) throw ValidationError("series shape mismatch");
    if (other.order_ < order_) set_order(other.order_);
    for (const auto& [k, v] : other.terms_)
        if (k.order() <= order_) add(k, v);
    return *this;
}

MultiSeries& MultiSeries::operator-=(const MultiSeries& other) {
    if (other.dim_in_ != dim_in_ || other.dim_out_ != dim_out_) throw ValidationError("series shape mismatch");
    if (other.order_ < order_) set_order(other.order_);
    for (const auto& [k, v] : other.terms_)
        if (k.order() <= order_) add(k, -v);
    return *this;
}

MultiSeries& MultiSeries::operator*=(cplx s) {
    if (s == cplx(0.0)) {
        terms_.clear();
        return *this;
    }
    for (auto& [k, v] : terms_) v *= s;
    return *this;
}

MultiSeries MultiSeries::transformed(const CMat& m) const {
    if (m.cols() != dim_out_) throw ValidationError("transform columns must equal dim_out");
    MultiSeries r(dim_in_, static_cast<int>(m.rows()), order_);
    for (const auto& [k, v] : terms_) r.set(k, m * v);
    return r;
}

bool MultiSeries::operator==(const MultiSeries& other) const {
    return dim_in_ == other.dim_in_ && dim_out_ == other.dim_out_ && order_ == other.order_ &&
           terms_ == other.terms_;
}

// ---------------------------------------------------------------------------

CVec evaluate(const MultiSeries& series, std::span<const cplx> point) {
    if (static_cast<int>(point.size()) != series.dim_in())
        throw ValidationError("evaluation point has dimension " + std::to_string(point.size()) +
                              ", series expects " + std::to_string(series.dim_in()));
    const int d = series.dim_in();
    const int order = std::max(series.highest_order(), 0);
    // powers[j][e] = point_j^e
    std::vector<std::vector<cplx>> powers(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        auto& pj = powers[static_cast<std::size_t>(j)];
        pj.resize(static_cast<std::size_t>(order) + 1);
        pj[0] = 1.0;
        for (int e = 1; e <= order; ++e) pj[static_cast<std::size_t>(e)] = pj[static_cast<std::size_t>(e - 1)] * point[static_cast<std::size_t>(j)];
    }
    CVec out = CVec::Zero(series.dim_out());
    for (const auto& [k, v] : series.terms()) {
        cplx mono = 1.0;
        for (int j = 0; j < d; ++j) mono *= powers[static_cast<std::size_t>(j)][static_cast<std::size_t>(k[j])];
        out += mono * v;
    }
    return out;
}

CVec evaluate(const MultiSeries& series, const CVec& point) {
    return evaluate(series, std::span<const cplx>(point.data(), static_cast<std::size_t>(point.size())));
}

CVec evaluate_real(const MultiSeries& series, std::span<const double> point) {
    std::vector<cplx> p(point.begin(), point.end());
    return evaluate(series, std::span<const cplx>(p));
}

MultiSeries multiply_truncated(const MultiSeries& a, const MultiSeries& b, int order) {
    if (a.dim_in() != b.dim_in()) throw ValidationError("multiply: input dimension mismatch");
    if (a.dim_out() != 1 && b.dim_out() != 1) throw ValidationError("multiply: one factor must be scalar-valued");
    const bool a_scalar = a.dim_out() == 1;
    const int out_dim = a_scalar ? b.dim_out() : a.dim_out();
    MultiSeries c(a.dim_in(), out_dim, order);
    for (const auto& [ka, va] : a.terms()) {
        if (ka.order() > order) break;
        for (const auto& [kb, vb] : b.terms()) {
            if (ka.order() + kb.order() > order) break;
            if (a_scalar)
                c.add(ka + kb, va[0] * vb);
            else
                c.add(ka + kb, vb[0] * va);
        }
    }
    return c;
}

MultiSeries compose_truncated(const MultiSeries& outer, const MultiSeries& inner, int order) {
    if (outer.dim_in() != inner.dim_out())
        throw ValidationError("compose: outer dim_in must equal inner dim_out");
    if (inner.find(MultiIndex::zero(inner.dim_in())) != nullptr)
        throw ValidationError("compose: inner series must vanish at the origin");
    const int n = inner.dim_out();
    const int d = inner.dim_in();

    std::vector<MultiSeries> comps;
    comps.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) comps.push_back(inner.component(j).truncated(order));

    // powers[j][e] = inner_j^e truncated at order, filled on demand.
    std::vector<std::vector<MultiSeries>> powers(static_cast<std::size_t>(n));
    auto power = [&](int j, int e) -> const MultiSeries& {
        auto& pj = powers[static_cast<std::size_t>(j)];
        if (pj.empty()) {
            MultiSeries one(d, 1, order);
            one.set(MultiIndex::zero(d), 0, 1.0);
            pj.push_back(std::move(one));
        }
        while (static_cast<int>(pj.size()) <= e)
            pj.push_back(multiply_truncated(pj.back(), comps[static_cast<std::size_t>(j)], order));
        return pj[static_cast<std::size_t>(e)];
    };

    MultiSeries result(d, outer.dim_out(), order);
    for (const auto& [k, coeff] : outer.terms()) {
        if (k.order() > order) break;
        MultiSeries mono(d, 1, order);
        mono.set(MultiIndex::zero(d), 0, 1.0);
        bool vanished = false;
        for (int j = 0; j < n && !vanished; ++j) {
            if (k[j] == 0) continue;
            const MultiSeries& pw = power(j, k[j]);
            if (pw.empty()) {
                vanished = true;
                break;
            }
            mono = multiply_truncated(mono, pw, order);
            vanished = mono.empty();
        }
        if (vanished) continue;
        for (const auto& [km, vm] : mono.terms()) result.add(km, vm[0] * coeff);
    }
    return result;
}

MultiSeries derivative(const MultiSeries& series, int axis) {
    if (axis < 0 || axis >= series.dim_in()) throw ValidationError("derivative axis out of range");
    MultiSeries r(series.dim_in(), series.dim_out(), std::max(series.order() - 1, 0));
    for (const auto& [k, v] : series.terms()) {
        if (k[axis] == 0) continue;
        std::vector<int> e = k.exponents();
        const double f = e[static_cast<std::size_t>(axis)];
        e[static_cast<std::size_t>(axis)] -= 1;
        r.add(MultiIndex(std::move(e)), f * v);
    }
    return r;
}

MultiSeries reciprocal_truncated(const MultiSeries& series, int order) {
    if (series.dim_out() != 1) throw ValidationError("reciprocal needs a scalar series");
    const int d = series.dim_in();
    const cplx b0 = series.coeff(MultiIndex::zero(d), 0);
    if (b0 == cplx(0.0)) throw NumericalError("reciprocal of a series with zero constant term");
    MultiSeries r(d, 1, order);
    // r_k = -(1/b0) sum_{0 < l <= k} b_l r_{k-l}, processed in graded-lex order.
    for (const auto& k : indices_up_to(d, order)) {
        if (k.order() == 0) {
            r.set(k, 0, 1.0 / b0);
            continue;
        }
        cplx acc = 0.0;
        for (const auto& [l, bl] : series.terms()) {
            if (l.order() == 0) continue;
            if (l.order() > k.order()) break;
            if (!k.dominates(l)) continue;
            acc += bl[0] * r.coeff(k - l, 0);
        }
        if (acc != cplx(0.0)) r.set(k, 0, -acc / b0);
    }
    return r;
}

// ---------------------------------------------------------------------------

EvaluationGrid EvaluationGrid::box(std::span<const double> lo, std::span<const double> hi,
                                   std::span<const int> counts) {
    if (lo.size() != hi.size() || lo.size() != counts.size() || lo.empty())
        throw ValidationError("grid bounds and counts must have equal nonzero length");
    EvaluationGrid g;
    const std::size_t d = lo.size();
    for (std::size_t i = 0; i < d; ++i) {
        if (!(hi[i] >= lo[i]) || counts[i] < 1) throw ValidationError("invalid grid axis");
        g.bounds.emplace_back(lo[i], hi[i]);
        g.shape.push_back(counts[i]);
    }
    std::vector<int> idx(d, 0);
    while (true) {
        std::vector<cplx> p(d);
        for (std::size_t i = 0; i < d; ++i) {
            const double t = counts[i] == 1 ? 0.0 : static_cast<double>(idx[i]) / (counts[i] - 1);
            p[i] = lo[i] + t * (hi[i] - lo[i]);
        }
        g.points.push_back(std::move(p));
        std::size_t ax = 0;
        while (ax < d && ++idx[ax] == counts[ax]) idx[ax++] = 0;
        if (ax == d) break;
    }
    return g;
}

EvaluationGrid EvaluationGrid::interval(double lo, double hi, int count) {
    const double l[] = {lo};
    const double h[] = {hi};
    const int c[] = {count};
    return box(l, h, c);
}

void EvaluationGrid::validate() const {
    if (points.empty()) throw ValidationError("evaluation grid is empty");
    for (const auto& p : points) {
        if (static_cast<int>(p.size()) != dim()) throw ValidationError("grid point has wrong dimension");
        for (int i = 0; i < dim(); ++i) {
            const auto [lo, hi] = bounds[static_cast<std::size_t>(i)];
            const double x = p[static_cast<std::size_t>(i)].real();
            const double tol = 1e-12 * std::max(1.0, std::abs(hi - lo));
            if (x < lo - tol || x > hi + tol) throw ValidationError("grid point outside bounds");
        }
    }
}

// ---------------------------------------------------------------------------

void write_series(std::ostream& os, const MultiSeries& s) {
    const auto flags = os.flags();
    const auto prec = os.precision();
    os << "series " << s.dim_in() << ' ' << s.dim_out() << ' ' << s.order() << '\n';
    os << std::setprecision(17);
    for (const auto& [k, v] : s.terms()) {
        for (int j = 0; j < k.dim(); ++j) os << (j ? " " : "") << k[j];
        os << ' ';
        for (Eigen::Index i = 0; i < v.size(); ++i) os << ' ' << v[i].real() << ' ' << v[i].imag();
        os << '\n';
    }
    os << "end\n";
    os.flags(flags);
    os.precision(prec);
}

MultiSeries read_series(std::istream& is) {
    std::string line;
    auto next_line = [&]() -> bool {
        while (std::getline(is, line)) {
            auto pos = line.find_first_not_of(" \t\r");
            if (pos == std::string::npos || line[pos] == '#') continue;
            return true;
        }
        return false;
    };
    if (!next_line()) throw ValidationError("series: unexpected end of input");
    std::istringstream head(line);
    std::string tag;
    int d = 0, l = 0, order = 0;
    if (!(head >> tag >> d >> l >> order) || tag != "series")
        throw ValidationError("series: malformed header '" + line + "'");
    MultiSeries s(d, l, order);
    while (true) {
        if (!next_line()) throw ValidationError("series: missing 'end'");
        std::istringstream row(line);
        std::string first;
        row >> first;
        if (first == "end") break;
        row.clear();
        row.str(line);
        std::vector<int> e(static_cast<std::size_t>(d));
        for (auto& v : e)
            if (!(row >> v)) throw ValidationError("series: bad exponent in '" + line + "'");
        CVec c(l);
        for (int i = 0; i < l; ++i) {
            double re = 0.0, im = 0.0;
            if (!(row >> re >> im)) throw ValidationError("series: bad coefficient in '" + line + "'");
            c[i] = cplx(re, im);
        }
        std::string extra;
        if (row >> extra) throw ValidationError("series: trailing data in '" + line + "'");
        s.set(MultiIndex(std::move(e)), c);
    }
    return s;
}

}  // namespace gssm
