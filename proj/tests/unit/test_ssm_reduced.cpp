#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "gssm/error.hpp"
#include "gssm/reduced.hpp"
#include "gssm/systems.hpp"

using namespace gssm;

namespace {

PolySystem linear_system(RMat a) {
    PolySystem s;
    const int n = static_cast<int>(a.rows());
    s.linear = std::move(a);
    s.nonlinearity = MultiSeries(n, n, 2);
    return s;
}

PolySystem oscillator() { return linear_system(RMat{{0.0, 1.0}, {-4.0, -0.2}}); }

SSMModel model_of(const PolySystem& sys, int d, Style style, int order) {
    SSMOptions o;
    o.style = style;
    o.order = order;
    return compute_ssm(sys, spectral_analysis(sys, d), o);
}

MultiSeries linear_field(const RMat& a) {
    const int n = static_cast<int>(a.rows());
    MultiSeries r(n, n, 1);
    for (int j = 0; j < n; ++j) r.set(MultiIndex::unit(n, j), a.col(j).cast<cplx>());
    return r;
}

TrajectoryData sampled(const std::function<double(double)>& f, double dt, int n) {
    TrajectoryData tr;
    for (int i = 0; i < n; ++i) {
        tr.t.push_back(i * dt);
        tr.x.push_back(RVec::Constant(1, f(i * dt)));
    }
    return tr;
}

}  // namespace

TEST_SUITE("ssm") {

TEST_CASE("spectral data of a decoupled system") {
    const auto spec = spectral_analysis(linear_system(RMat{{-2.0, 0.0}, {0.0, -1.0}}), 1);
    CHECK(spec.eigenvalues[0].real() == doctest::Approx(-1.0));
    CHECK(spec.master == std::vector<int>{0});
    CHECK(std::abs(spec.right(1, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(spec.right(0, 0)) < 1e-15);
    CHECK((spec.left * spec.right - CMat::Identity(2, 2)).norm() < 1e-14);
}

TEST_CASE("Shaw-Pierre master pair") {
    const auto ns = make_system("shaw_pierre");
    const auto spec = spectral_analysis(ns.system, 2);
    CHECK(spec.oscillatory_pair());
    const auto lam = spec.master_eigenvalues();
    CHECK(lam[0].imag() == doctest::Approx(1.7320).epsilon(1e-4));
    CHECK(lam[1] == std::conj(lam[0]));
}

TEST_CASE("resonances are rejected") {
    SpectralOptions o;
    o.check_order = 3;
    CHECK_THROWS_AS(spectral_analysis(linear_system(RMat{{-1.0, 0.0}, {0.0, -2.0}}), 1, o), ResonanceError);
    CHECK_THROWS_AS(spectral_analysis(oscillator(), 1), ValidationError);
    CHECK_THROWS_AS(spectral_analysis(oscillator(), 3), ValidationError);
}

TEST_CASE("Dauchot-Manneville graph coefficients") {
    const auto ns = make_system("dauchot_manneville");
    SSMOptions o;
    o.style = Style::graph;
    o.order = 3;
    o.projection = Projection::coordinate;
    const auto m = compute_ssm(ns.system, spectral_analysis(ns.system, 1), o);
    CHECK(m.W.coeff(MultiIndex{2}, 1).real() == doctest::Approx(-1.0823).epsilon(1e-4));
    CHECK(m.W.coeff(MultiIndex{3}, 1).real() == doctest::Approx(-2.6440).epsilon(1e-4));
    CHECK(m.W.coeff(MultiIndex{1}, 0).real() == doctest::Approx(1.0));
    CHECK(std::abs(m.W.coeff(MultiIndex{2}, 0)) < 1e-14);
    validate_model(m);

    const auto st = invariance_residual(ns.system, m, radial_grid(m, 1e-4, 1e-2, 8, 1));
    CHECK(st.slope == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("linear system: W is the eigenvector inclusion") {
    const auto sys = oscillator();
    for (Style style : {Style::graph, Style::normal_form}) {
        const auto m = model_of(sys, 2, style, 5);
        CHECK(m.W.highest_order() == 1);
        CHECK(m.R.highest_order() == 1);
        CHECK(std::abs(m.R.coeff(MultiIndex{1, 0}, 0) - m.spectral.eigenvalues[m.spectral.master[0]]) < 1e-14);
        CHECK(std::abs(m.R.coeff(MultiIndex{0, 1}, 0)) < 1e-14);
        const auto st = invariance_residual(sys, m, radial_grid(m, 0.1, 1.0, 4, 8));
        CHECK(st.max_residual < 1e-14);
    }
}

TEST_CASE("polar form of a linear oscillator") {
    const auto p = extract_polar(model_of(oscillator(), 2, Style::normal_form, 5));
    CHECK(p.kappa[0] == doctest::Approx(-0.1));
    CHECK(p.omega[0] == doctest::Approx(std::sqrt(3.99)));
    for (std::size_t n = 1; n < p.omega.size(); ++n) CHECK(std::abs(p.omega[n]) < 1e-14);
    CHECK_THROWS_AS(extract_polar(model_of(make_system("dauchot_manneville").system, 1, Style::normal_form, 3)),
                    ValidationError);
}

TEST_CASE("Shaw-Pierre residual slope") {
    const auto ns = make_system("shaw_pierre");
    const auto m = model_of(ns.system, 2, Style::normal_form, 3);
    const auto st = invariance_residual(ns.system, m, radial_grid(m, 1e-3, 1e-1, 10, 16));
    CHECK(st.slope >= 3.75);
    const auto sw = residual_sweep(ns.system, model_of(ns.system, 2, Style::normal_form, 7));
    CHECK(sw.slope >= 7.75);
}

TEST_CASE("gauge rescaling") {
    PolarNormalForm p{{-0.1, 0.2}, {1.0, 0.5, -0.25}};
    const auto q = p.rescaled(2.0);
    CHECK(q.omega[1] == doctest::Approx(1.0));
    CHECK(q.omega[2] == doctest::Approx(-1.0));
    CHECK(q.omega_at(1.0) == doctest::Approx(p.omega_at(std::sqrt(2.0))));
}

TEST_CASE("model text round trip") {
    const auto m = model_of(make_system("shaw_pierre").system, 2, Style::normal_form, 5);
    std::ostringstream os;
    write_model(os, m);
    std::istringstream is(os.str());
    const auto r = read_model(is);
    CHECK(r.W == m.W);
    CHECK(r.R == m.R);
    CHECK(r.order == 5);
    CHECK(r.style == Style::normal_form);
}

}

TEST_SUITE("reduced") {

TEST_CASE("exponential decay") {
    MultiSeries r(1, 1, 1);
    r.set(MultiIndex{1}, 0, -1.0);
    const auto f = ReducedField::from_polynomial(r);
    const auto tr = integrate_reduced(f, RVec::Constant(1, 1.0), 0.0, 1.0);
    CHECK(tr.status == Termination::completed);
    CHECK(tr.t.back() == doctest::Approx(1.0));
    CHECK(std::abs(tr.x.back()[0] - std::exp(-1.0)) < 1e-8);
}

TEST_CASE("rational field hits its pole") {
    // x' = 1 / (1 - x) from x = 0.5 reaches x = 1 at t = 1/8
    RationalMap r = RationalMap::polynomial(MultiSeries::univariate(std::vector<double>{1.0}));
    r.M = 1;
    r.denominators = {MultiSeries::univariate(std::vector<double>{1.0, -1.0})};
    r.numerator.set_order(1);
    const auto tr = integrate_reduced(ReducedField::from_rational(r), RVec::Constant(1, 0.5), 0.0, 1.0);
    CHECK(tr.status == Termination::pole);
}

TEST_CASE("lift of the origin and of a linear model") {
    const auto sys = oscillator();
    const auto m = model_of(sys, 2, Style::normal_form, 3);
    const auto f = ReducedField::from_model(m);
    const auto still = lift(m, f, integrate_reduced(f, RVec::Zero(2), 0.0, 1.0));
    for (const auto& x : still.x) CHECK(x.norm() == 0.0);

    const auto red = integrate_reduced(f, f.state(CVec::Constant(1, cplx(0.5, 0.0))), 0.0, 3.0);
    const auto amb = lift(m, f, red);
    OdeOptions o;
    o.sample_dt = red.t[1] - red.t[0];
    const auto full = integrate_reduced(ReducedField::from_system(sys), amb.x.front(), 0.0, 3.0, o);
    REQUIRE(full.size() == amb.size());
    CHECK((full.x.back() - amb.x.back()).norm() < 1e-7);
}

TEST_CASE("backbone") {
    const PolarNormalForm printed{{-0.0015}, {1.7320, 0.0385, -0.0037, 0.0004}};
    const std::vector<double> rho{0.0, 1.0};
    const auto b = backbone(PolarFunctions::from_taylor(printed), rho);
    CHECK(b[0].omega == doctest::Approx(1.7320));
    CHECK(b[1].omega == doctest::Approx(1.7672));
    for (const auto& pt : b) CHECK(pt.kappa == doctest::Approx(-0.0015));
}

TEST_CASE("forced response of a linear oscillator") {
    const PolarNormalForm lin{{-0.1}, {1.0}};
    const auto pf = PolarFunctions::from_taylor(lin);
    std::vector<double> rho;
    for (int i = 1; i <= 400; ++i) rho.push_back(0.15 * i / 400.0);
    const auto br = forced_response(pf, 0.01, rho);
    const auto* pk = br.peak();
    REQUIRE(pk != nullptr);
    CHECK(pk->rho == doctest::Approx(0.1).epsilon(0.01));
    CHECK(pk->Omega == doctest::Approx(1.0).epsilon(0.01));
    for (const auto& p : br.points) {
        CHECK(std::abs(frc_residual(pf, 0.01, p.rho, p.Omega)) < 1e-12);
        CHECK(p.stable);
    }
    CHECK(forced_response(pf, 0.01, std::vector<double>{0.5}).points.empty());
}

TEST_CASE("Poincare samples of a forced linear field") {
    MultiSeries r(1, 1, 1);
    r.set(MultiIndex{1}, 0, -1.0);
    auto f = ReducedField::from_polynomial(r);
    f.forcing_dir = CVec::Constant(1, 1.0);
    f.epsilon = 0.5;
    f.omega = 2.0;
    const auto s = poincare_sample(f, RVec::Constant(1, 3.0), 5);
    REQUIRE(s.size() == 5);
    for (const auto& x : s) CHECK(x[0] == doctest::Approx(s.front()[0]).epsilon(1e-6));
}

TEST_CASE("Lyapunov exponents of linear fields") {
    OdeOptions o;
    o.rtol = 1e-12;
    o.atol = 1e-14;
    const auto stable = lyapunov_estimate(ReducedField::from_polynomial(linear_field(RMat::Constant(1, 1, -1.0))),
                                          RVec::Constant(1, 1.0), 1e-7, 20.0, 1.0, 0.0, o);
    CHECK(stable.exponent == doctest::Approx(-1.0).epsilon(0.02));
    const auto saddle = lyapunov_estimate(ReducedField::from_polynomial(linear_field(RMat{{1.0, 0.0}, {0.0, -1.0}})),
                                          RVec::Zero(2), 1e-7, 20.0, 1.0, 0.0, o);
    CHECK(saddle.exponent == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("power spectra") {
    const double dt = 0.01;
    const auto one = psd_estimate(sampled([](double t) { return std::sin(2 * std::numbers::pi * 5.0 * t); }, dt, 1000), 0);
    const auto peak = std::max_element(one.power.begin(), one.power.end()) - one.power.begin();
    CHECK(one.frequency[static_cast<std::size_t>(peak)] == doctest::Approx(5.0));
    CHECK(peak_fraction(one) > 0.9);

    const auto two = psd_estimate(
        sampled([](double t) { return std::sin(2 * std::numbers::pi * 5.0 * t) + 0.5 * std::cos(2 * std::numbers::pi * 12.0 * t); },
                dt, 1000),
        0);
    std::vector<std::size_t> order(two.power.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return two.power[a] > two.power[b]; });
    CHECK(two.frequency[order[0]] == doctest::Approx(5.0));
    CHECK(two.frequency[order[1]] == doctest::Approx(12.0));

    auto bad = sampled([](double t) { return t; }, dt, 10);
    bad.t[3] += 0.003;
    CHECK_THROWS_AS(psd_estimate(bad, 0), ValidationError);
}

}
