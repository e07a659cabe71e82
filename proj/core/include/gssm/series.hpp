#pragma once

// Truncated multivariate power series with complex vector coefficients.
//
// A MultiSeries maps multi-indices k = (k_1, ..., k_d) to coefficient vectors
// of length dim_out. Storage is sparse; exact zeros are never kept. Iteration
// follows graded lexicographic order: by total order first, then by
// exponents compared lexicographically with larger leading exponents first,
// so (2,0) < (1,1) < (0,2).

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace gssm {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> exponents);
    MultiIndex(std::initializer_list<int> exponents);

    static MultiIndex zero(int dim);
    static MultiIndex unit(int dim, int axis);

    int dim() const noexcept { return static_cast<int>(e_.size()); }
    int order() const noexcept { return order_; }
    int operator[](int i) const { return e_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& exponents() const noexcept { return e_; }

    MultiIndex operator+(const MultiIndex& other) const;
    // Componentwise difference; requires other <= *this.
    MultiIndex operator-(const MultiIndex& other) const;
    // True when other_j <= this_j for every j.
    bool dominates(const MultiIndex& other) const;

    bool operator==(const MultiIndex& other) const { return e_ == other.e_; }
    bool operator<(const MultiIndex& other) const;

    std::string str() const;

private:
    std::vector<int> e_;
    int order_ = 0;
};

// All multi-indices of the given total order, in graded-lex order.
std::vector<MultiIndex> indices_of_order(int dim, int order);
// All multi-indices with total order in [lo, hi], in graded-lex order.
std::vector<MultiIndex> indices_up_to(int dim, int hi, int lo = 0);
// Number of monomials in dim variables of total order <= order.
std::size_t monomial_count(int dim, int order);

class MultiSeries {
public:
    using Terms = std::map<MultiIndex, CVec>;

    MultiSeries() = default;
    MultiSeries(int dim_in, int dim_out, int order);

    // Scalar univariate series from a coefficient list c_0, c_1, ...
    static MultiSeries univariate(std::span<const cplx> coeffs);
    static MultiSeries univariate(std::span<const double> coeffs);
    // Identity map of dimension dim truncated at order.
    static MultiSeries identity(int dim, int order);

    int dim_in() const noexcept { return dim_in_; }
    int dim_out() const noexcept { return dim_out_; }
    int order() const noexcept { return order_; }
    bool empty() const noexcept { return terms_.empty(); }
    std::size_t size() const noexcept { return terms_.size(); }
    const Terms& terms() const noexcept { return terms_; }

    // Coefficient vector (zero when absent).
    CVec coeff(const MultiIndex& k) const;
    cplx coeff(const MultiIndex& k, int component) const;
    const CVec* find(const MultiIndex& k) const;

    void set(const MultiIndex& k, const CVec& value);
    void set(const MultiIndex& k, int component, cplx value);
    void add(const MultiIndex& k, const CVec& value);
    void add(const MultiIndex& k, int component, cplx value);
    void erase(const MultiIndex& k) { terms_.erase(k); }

    // Drops coefficients with every entry below tol in magnitude.
    void prune(double tol);

    MultiSeries truncated(int order) const;
    MultiSeries component(int i) const;
    // Raises or lowers the recorded truncation order without touching terms
    // (lowering drops terms above the new order).
    void set_order(int order);

    int lowest_order() const;   // -1 for the zero series
    int highest_order() const;  // -1 for the zero series
    bool is_real(double tol = 0.0) const;

    // Univariate scalar coefficients c_0..c_order as a dense list.
    std::vector<cplx> dense_univariate() const;

    MultiSeries& operator+=(const MultiSeries& other);
    MultiSeries& operator-=(const MultiSeries& other);
    MultiSeries& operator*=(cplx s);
    friend MultiSeries operator+(MultiSeries a, const MultiSeries& b) { return a += b; }
    friend MultiSeries operator-(MultiSeries a, const MultiSeries& b) { return a -= b; }
    friend MultiSeries operator*(cplx s, MultiSeries a) { return a *= s; }

    // Left-multiplies every coefficient vector: result_k = m * coeff_k.
    MultiSeries transformed(const CMat& m) const;

    bool operator==(const MultiSeries& other) const;

private:
    void check_index(const MultiIndex& k) const;

    int dim_in_ = 1;
    int dim_out_ = 1;
    int order_ = 0;
    Terms terms_;
};

// Sum over stored terms of coeff_k * point^k.
CVec evaluate(const MultiSeries& series, std::span<const cplx> point);
CVec evaluate(const MultiSeries& series, const CVec& point);
// Real-argument convenience; returns the complex result.
CVec evaluate_real(const MultiSeries& series, std::span<const double> point);

// Cauchy product truncated at order; one factor must be scalar-valued.
MultiSeries multiply_truncated(const MultiSeries& a, const MultiSeries& b, int order);

// Taylor coefficients of outer(inner(z)) through order. The inner series
// must vanish at the origin.
MultiSeries compose_truncated(const MultiSeries& outer, const MultiSeries& inner, int order);

// Partial derivative with respect to variable axis (order drops by one).
MultiSeries derivative(const MultiSeries& series, int axis);

// Reciprocal of a scalar series with unit constant term, through order.
MultiSeries reciprocal_truncated(const MultiSeries& series, int order);

// Grid of evaluation points inside per-axis bounds.
struct EvaluationGrid {
    std::vector<std::vector<cplx>> points;
    std::vector<std::pair<double, double>> bounds;
    // Per-axis counts for tensor grids (first axis fastest); empty otherwise.
    std::vector<int> shape;

    int dim() const { return bounds.empty() ? 0 : static_cast<int>(bounds.size()); }

    // Tensor grid with counts[i] equispaced samples on [lo_i, hi_i].
    static EvaluationGrid box(std::span<const double> lo, std::span<const double> hi,
                              std::span<const int> counts);
    static EvaluationGrid interval(double lo, double hi, int count);
    void validate() const;
};

// Text format:
//   series <dim_in> <dim_out> <order>
//   k1 ... kd  re im [re im ...]
//   end
void write_series(std::ostream& os, const MultiSeries& series);
MultiSeries read_series(std::istream& is);

}  // namespace gssm
