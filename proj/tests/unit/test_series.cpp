#include <sstream>
#include <vector>

#include "doctest.h"
#include "gssm/error.hpp"
#include "gssm/series.hpp"
#include "gssm/systems.hpp"

using namespace gssm;

namespace {

MultiSeries uni(std::vector<double> c) { return MultiSeries::univariate(std::span<const double>(c)); }

MultiSeries bivariate(std::initializer_list<std::pair<MultiIndex, double>> terms, int order) {
    MultiSeries s(2, 1, order);
    for (const auto& [k, v] : terms) s.set(k, 0, v);
    return s;
}

cplx at(const MultiSeries& s, std::vector<cplx> p) { return evaluate(s, std::span<const cplx>(p))[0]; }

}  // namespace

TEST_SUITE("series") {

TEST_CASE("multi-index ordering is graded lexicographic") {
    const auto idx = indices_of_order(2, 2);
    REQUIRE(idx.size() == 3);
    CHECK(idx[0] == MultiIndex{2, 0});
    CHECK(idx[1] == MultiIndex{1, 1});
    CHECK(idx[2] == MultiIndex{0, 2});
    CHECK(MultiIndex{1, 0} < MultiIndex{2, 0});
    CHECK(monomial_count(2, 3) == 10);
    CHECK(indices_up_to(3, 2).size() == monomial_count(3, 2));
    CHECK_THROWS_AS(MultiIndex({1, -1}), ValidationError);
    CHECK_THROWS_AS(MultiIndex{1} - MultiIndex{2}, ValidationError);
}

TEST_CASE("evaluate") {
    CHECK(at(uni({0, 1, -1}), {0.5}).real() == doctest::Approx(0.25));
    const MultiSeries e = euler_series(3);
    CHECK(at(e, {0.1}).real() == doctest::Approx(0.092).epsilon(1e-12));
    const MultiSeries s = bivariate({{{0, 0}, 3.5}, {{1, 0}, 2.0}, {{1, 1}, -1.0}}, 3);
    CHECK(at(s, {0.0, 0.0}).real() == doctest::Approx(3.5));
    CHECK_THROWS_AS(at(s, {1.0}), ValidationError);
}

TEST_CASE("zero coefficients are not stored") {
    MultiSeries s(1, 1, 3);
    s.set(MultiIndex{1}, 0, 2.0);
    s.add(MultiIndex{1}, 0, -2.0);
    CHECK(s.empty());
    CHECK(s.lowest_order() == -1);
    CHECK_THROWS_AS(s.set(MultiIndex{4}, 0, 1.0), ValidationError);
}

TEST_CASE("multiply_truncated") {
    const auto p = multiply_truncated(uni({1, 1}), uni({1, -1}), 2);
    CHECK(p.dense_univariate() == std::vector<cplx>{1.0, 0.0, -1.0});
    const auto q = multiply_truncated(uni({1, 1, 1}), uni({1, 1, 1}), 2);
    CHECK(q.dense_univariate() == std::vector<cplx>{1.0, 2.0, 3.0});
    const auto a = bivariate({{{1, 0}, 1.0}, {{0, 1}, 1.0}}, 2);
    const auto b = bivariate({{{1, 0}, 1.0}, {{0, 1}, -1.0}}, 2);
    CHECK(multiply_truncated(a, b, 2) == bivariate({{{2, 0}, 1.0}, {{0, 2}, -1.0}}, 2));
}

TEST_CASE("compose_truncated") {
    const auto c = compose_truncated(uni({0, 0, 1, 0}), uni({0, 1, 1, 0}), 3);
    CHECK(c.dense_univariate() == std::vector<cplx>{0.0, 0.0, 1.0, 2.0});

    // cube of a linear parametrization q1 = a p + b pbar
    const cplx a(0.3, 0.4), b(0.3, -0.4);
    MultiSeries inner(2, 1, 3);
    inner.set(MultiIndex{1, 0}, 0, a);
    inner.set(MultiIndex{0, 1}, 0, b);
    const auto cube = compose_truncated(uni({0, 0, 0, 1}), inner, 3);
    CHECK(std::abs(cube.coeff(MultiIndex{3, 0}, 0) - a * a * a) < 1e-15);
    CHECK(std::abs(cube.coeff(MultiIndex{2, 1}, 0) - 3.0 * a * a * b) < 1e-15);
    CHECK(cube.lowest_order() == 3);

    const auto id = compose_truncated(MultiSeries::identity(1, 3), inner, 3);
    CHECK(id == inner);
    CHECK_THROWS_AS(compose_truncated(uni({0, 1}), uni({1, 1}), 2), ValidationError);
}

TEST_CASE("derivative and reciprocal") {
    const auto d = derivative(uni({1, 2, 3}), 0);
    CHECK(d.dense_univariate() == std::vector<cplx>{2.0, 6.0});
    const auto r = reciprocal_truncated(uni({1, 1}), 4);
    CHECK(r.dense_univariate() == std::vector<cplx>{1.0, -1.0, 1.0, -1.0, 1.0});
}

TEST_CASE("text round trip is exact") {
    MultiSeries s(2, 2, 3);
    s.set(MultiIndex{1, 0}, 0, cplx(0.1, 1.0 / 3.0));
    s.set(MultiIndex{1, 2}, 1, cplx(-2.5e-17, 7.0));
    std::ostringstream os;
    write_series(os, s);
    std::istringstream is(os.str());
    CHECK(read_series(is) == s);
}

TEST_CASE("evaluation grids") {
    const std::vector<double> lo{0.0, -1.0}, hi{1.0, 1.0};
    const std::vector<int> n{3, 5};
    const auto g = EvaluationGrid::box(lo, hi, n);
    CHECK(g.points.size() == 15);
    CHECK(g.points[1][0].real() == doctest::Approx(0.5));
    CHECK(g.points[3][1].real() == doctest::Approx(-0.5));
    CHECK(EvaluationGrid::interval(0.0, 2.0, 5).points.size() == 5);
}

}
