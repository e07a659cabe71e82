#include "gssm/pade.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "gssm/error.hpp"

namespace gssm {

const MultiSeries& RationalMap::denominator(int component) const {
    if (denominators.empty()) throw ValidationError("rational map has no denominator");
    if (shared()) return denominators.front();
    if (component < 0 || component >= static_cast<int>(denominators.size()))
        throw ValidationError("denominator component out of range");
    return denominators[static_cast<std::size_t>(component)];
}

RationalMap RationalMap::polynomial(const MultiSeries& p) {
    RationalMap r;
    r.dim_in = p.dim_in();
    r.dim_out = p.dim_out();
    r.N = p.order();
    r.M = 0;
    r.numerator = p;
    MultiSeries one(p.dim_in(), 1, 0);
    one.set(MultiIndex::zero(p.dim_in()), 0, 1.0);
    r.denominators.push_back(std::move(one));
    return r;
}

namespace {

struct UniPade {
    std::vector<cplx> a;
    std::vector<cplx> b;
    bool reduced = false;
};

double scale_for(const std::vector<cplx>& c) {
    int lo = -1, hi = -1;
    for (int i = 0; i < static_cast<int>(c.size()); ++i) {
        if (std::abs(c[static_cast<std::size_t>(i)]) > 0.0) {
            if (lo < 0) lo = i;
            hi = i;
        }
    }
    if (lo < 0 || hi == lo) return 1.0;
    const double ratio = std::abs(c[static_cast<std::size_t>(lo)]) / std::abs(c[static_cast<std::size_t>(hi)]);
    return std::pow(ratio, 1.0 / (hi - lo));
}

UniPade robust_pade(std::vector<cplx> c, int m, int n, double tol) {
    UniPade out;
    c.resize(static_cast<std::size_t>(m + n + 1), 0.0);

    const double sigma = scale_for(c);
    {
        double s = 1.0;
        for (auto& v : c) {
            v *= s;
            s *= sigma;
        }
    }

    double cnorm = 0.0;
    for (const auto& v : c) cnorm += std::norm(v);
    cnorm = std::sqrt(cnorm);
    const double ts = tol * cnorm;

    double head = 0.0;
    for (int i = 0; i <= m; ++i) head += std::norm(c[static_cast<std::size_t>(i)]);
    if (std::sqrt(head) <= ts) {
        out.a = {0.0};
        out.b = {1.0};
        out.reduced = n > 0 || m > 0;
        return out;
    }

    auto toeplitz = [&](int mm, int nn) {
        CMat Z = CMat::Zero(mm + nn + 1, nn + 1);
        for (int i = 0; i <= mm + nn; ++i)
            for (int j = 0; j <= std::min(i, nn); ++j) Z(i, j) = c[static_cast<std::size_t>(i - j)];
        return Z;
    };

    CMat Z;
    CMat C;
    while (true) {
        if (n == 0) break;
        Z = toeplitz(m, n);
        C = Z.bottomRows(n);
        Eigen::JacobiSVD<CMat> svd(C);
        const auto& s = svd.singularValues();
        int rho = 0;
        if (s.size() > 0 && s(0) > 0.0)
            for (Eigen::Index i = 0; i < s.size(); ++i)
                if (s(i) > tol * s(0)) ++rho;
        if (rho == n) break;
        out.reduced = true;
        m -= n - rho;
        n = rho;
        if (m < 0) {
            n += m;
            m = 0;
        }
    }

    std::vector<cplx> a, b;
    if (n == 0) {
        a.assign(c.begin(), c.begin() + m + 1);
        b = {1.0};
    } else {
        Eigen::JacobiSVD<CMat> svd(C, Eigen::ComputeFullV);
        CVec bv = svd.matrixV().col(n);
        // Reweighted null vector: favors a solution with small trailing entries.
        const double root_eps = std::sqrt(std::numeric_limits<double>::epsilon());
        RVec dw = bv.cwiseAbs().array() + root_eps;
        CMat CD = C * dw.asDiagonal();
        Eigen::HouseholderQR<CMat> qr(CD.adjoint());
        CMat Q = qr.householderQ() * CMat::Identity(n + 1, n + 1);
        bv = dw.asDiagonal() * Q.col(n);
        bv /= bv.norm();
        CVec av = Z.topRows(m + 1) * bv;
        a.assign(av.data(), av.data() + av.size());
        b.assign(bv.data(), bv.data() + bv.size());

        std::size_t lead = 0;
        while (lead < b.size() && std::abs(b[lead]) <= tol) ++lead;
        if (lead > 0) {
            out.reduced = true;
            b.erase(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(lead));
            a.erase(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(std::min(lead, a.size())));
        }
        while (b.size() > 1 && std::abs(b.back()) <= tol) {
            b.pop_back();
            out.reduced = true;
        }
        while (!a.empty() && std::abs(a.back()) <= ts) {
            a.pop_back();
            out.reduced = true;
        }
        if (a.empty()) a = {0.0};
        const cplx b0 = b.front();
        for (auto& v : a) v /= b0;
        for (auto& v : b) v /= b0;
    }

    double s = 1.0;
    for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
        if (i < a.size()) a[i] /= s;
        if (i < b.size()) b[i] /= s;
        s *= sigma;
    }
    b[0] = 1.0;
    out.a = std::move(a);
    out.b = std::move(b);
    return out;
}

std::string point_str(std::span<const cplx> p) {
    std::ostringstream os;
    os.precision(6);
    os << "(";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) os << ", ";
        if (p[i].imag() == 0.0)
            os << p[i].real();
        else
            os << p[i];
    }
    os << ")";
    return os.str();
}

}  // namespace

RationalMap pade_univariate(const MultiSeries& coeffs, int N, int M, double svd_tol) {
    if (coeffs.dim_in() != 1) throw ValidationError("pade_univariate needs a univariate series");
    if (N < 0 || M < 0) throw ValidationError("Padé degrees must be nonnegative");
    if (coeffs.order() < N + M)
        throw ValidationError("series order " + std::to_string(coeffs.order()) + " is below N+M = " +
                              std::to_string(N + M));
    const int l = coeffs.dim_out();
    RationalMap r;
    r.dim_in = 1;
    r.dim_out = l;
    r.numerator = MultiSeries(1, l, N);
    int nmax = 0, mmax = 0;
    for (int comp = 0; comp < l; ++comp) {
        std::vector<cplx> c(static_cast<std::size_t>(N + M + 1), 0.0);
        for (const auto& [k, v] : coeffs.terms())
            if (k[0] <= N + M) c[static_cast<std::size_t>(k[0])] = v[comp];
        UniPade p = robust_pade(std::move(c), N, M, svd_tol);
        if (p.reduced) r.flagged = true;
        for (std::size_t i = 0; i < p.a.size(); ++i)
            if (p.a[i] != cplx(0.0)) r.numerator.set(MultiIndex{static_cast<int>(i)}, comp, p.a[i]);
        MultiSeries den(1, 1, static_cast<int>(p.b.size()) - 1);
        for (std::size_t i = 0; i < p.b.size(); ++i) den.set(MultiIndex{static_cast<int>(i)}, 0, p.b[i]);
        nmax = std::max(nmax, static_cast<int>(p.a.size()) - 1);
        mmax = std::max(mmax, static_cast<int>(p.b.size()) - 1);
        r.denominators.push_back(std::move(den));
    }
    r.N = nmax;
    r.M = mmax;
    r.numerator.set_order(nmax);
    if (r.flagged) r.note = "degrees reduced to [" + std::to_string(nmax) + "/" + std::to_string(mmax) + "]";
    return r;
}

RationalMap pade_multivariate(const MultiSeries& coeffs, int N, int M, bool shared_denominator, double svd_tol) {
    if (N < 0 || M < 0) throw ValidationError("Padé degrees must be nonnegative");
    if (coeffs.order() < N + M)
        throw ValidationError("series order " + std::to_string(coeffs.order()) + " is below N+M = " +
                              std::to_string(N + M));
    const int d = coeffs.dim_in();
    const int l = coeffs.dim_out();

    // Uniform variable scaling z -> sigma z balancing the order-wise coefficient norms.
    std::vector<double> onorm(static_cast<std::size_t>(N + M + 1), 0.0);
    for (const auto& [k, v] : coeffs.terms())
        if (k.order() <= N + M) onorm[static_cast<std::size_t>(k.order())] = std::max(onorm[static_cast<std::size_t>(k.order())], v.cwiseAbs().maxCoeff());
    std::vector<cplx> probe(onorm.begin(), onorm.end());
    const double sigma = scale_for(probe);
    auto scaled = [&](const MultiIndex& k, cplx v) { return v * std::pow(sigma, k.order()); };

    const auto unknowns = indices_up_to(d, M, 1);
    const auto num_idx = indices_up_to(d, N, 0);
    const auto eq_idx = indices_up_to(d, N + M, N + 1);
    const int nu = static_cast<int>(unknowns.size());

    RationalMap r;
    r.dim_in = d;
    r.dim_out = l;
    r.N = N;
    r.M = M;
    r.numerator = MultiSeries(d, l, N);

    auto solve_block = [&](const std::vector<int>& comps) -> MultiSeries {
        MultiSeries den(d, 1, M);
        den.set(MultiIndex::zero(d), 0, 1.0);
        if (nu == 0) return den;
        const int rows = static_cast<int>(eq_idx.size() * comps.size());
        CMat A = CMat::Zero(rows, nu);
        CVec rhs = CVec::Zero(rows);
        int row = 0;
        for (int comp : comps) {
            for (const auto& m : eq_idx) {
                rhs[row] = -scaled(m, coeffs.coeff(m, comp));
                for (int j = 0; j < nu; ++j) {
                    const auto& k = unknowns[static_cast<std::size_t>(j)];
                    if (!m.dominates(k)) continue;
                    const auto diff = m - k;
                    A(row, j) = scaled(diff, coeffs.coeff(diff, comp));
                }
                ++row;
            }
        }
        Eigen::BDCSVD<CMat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& s = svd.singularValues();
        const double smax = s.size() ? s(0) : 0.0;
        svd.setThreshold(svd_tol);
        if (smax == 0.0) {
            r.flagged = true;
            r.note = "zero lattice system; denominator set to 1";
            return den;
        }
        if (svd.rank() < nu) {
            r.flagged = true;
            r.note = "rank-deficient denominator system (rank " + std::to_string(svd.rank()) + " of " +
                     std::to_string(nu) + "); minimum-norm solution";
        }
        CVec b = svd.solve(rhs);
        for (int j = 0; j < nu; ++j) {
            const auto& k = unknowns[static_cast<std::size_t>(j)];
            den.set(k, 0, b[j] / std::pow(sigma, k.order()));
        }
        return den;
    };

    auto fill_numerator = [&](int comp, const MultiSeries& den) {
        for (const auto& m : num_idx) {
            cplx acc = 0.0;
            for (const auto& [k, bk] : den.terms()) {
                if (k.order() > m.order()) break;
                if (!m.dominates(k)) continue;
                acc += bk[0] * coeffs.coeff(m - k, comp);
            }
            if (acc != cplx(0.0)) r.numerator.set(m, comp, acc);
        }
    };

    if (shared_denominator) {
        std::vector<int> all(static_cast<std::size_t>(l));
        for (int i = 0; i < l; ++i) all[static_cast<std::size_t>(i)] = i;
        r.denominators.push_back(solve_block(all));
        for (int i = 0; i < l; ++i) fill_numerator(i, r.denominators.front());
    } else {
        for (int i = 0; i < l; ++i) {
            r.denominators.push_back(solve_block({i}));
            fill_numerator(i, r.denominators.back());
        }
    }
    return r;
}

cplx evaluate_denominator(const RationalMap& r, std::span<const cplx> point, int component) {
    return evaluate(r.denominator(component), point)[0];
}

CVec evaluate_rational(const RationalMap& r, std::span<const cplx> point, double floor) {
    CVec num = evaluate(r.numerator, point);
    if (r.shared()) {
        const cplx q = evaluate(r.denominators.front(), point)[0];
        if (std::abs(q) < floor)
            throw PoleProximityError("denominator " + std::to_string(std::abs(q)) + " below floor at " +
                                         point_str(point),
                                     point_str(point), std::abs(q));
        return num / q;
    }
    for (int i = 0; i < r.dim_out; ++i) {
        const cplx q = evaluate(r.denominators[static_cast<std::size_t>(i)], point)[0];
        if (std::abs(q) < floor)
            throw PoleProximityError("denominator of component " + std::to_string(i) + " is " +
                                         std::to_string(std::abs(q)) + " at " + point_str(point),
                                     point_str(point), std::abs(q));
        num[i] /= q;
    }
    return num;
}

CVec evaluate_rational(const RationalMap& r, const CVec& point, double floor) {
    return evaluate_rational(r, std::span<const cplx>(point.data(), static_cast<std::size_t>(point.size())), floor);
}

MultiSeries taylor_of_rational(const RationalMap& r, int order) {
    MultiSeries out(r.dim_in, r.dim_out, order);
    std::vector<MultiSeries> inv;
    for (const auto& den : r.denominators) inv.push_back(reciprocal_truncated(den, order));
    for (int i = 0; i < r.dim_out; ++i) {
        const auto& q = r.shared() ? inv.front() : inv[static_cast<std::size_t>(i)];
        MultiSeries part = multiply_truncated(r.numerator.component(i), q, order);
        for (const auto& [k, v] : part.terms()) out.set(k, i, v[0]);
    }
    return out;
}

void write_rational(std::ostream& os, const RationalMap& r) {
    os << "pade " << r.dim_in << ' ' << r.dim_out << ' ' << r.N << ' ' << r.M << '\n';
    os << "NUMERATOR\n";
    write_series(os, r.numerator);
    if (r.shared()) {
        os << "DENOMINATOR shared\n";
        write_series(os, r.denominators.front());
        return;
    }
    for (std::size_t i = 0; i < r.denominators.size(); ++i) {
        os << "DENOMINATOR " << i << '\n';
        write_series(os, r.denominators[i]);
    }
}

RationalMap read_rational(std::istream& is) {
    std::string line;
    auto next_line = [&]() {
        while (std::getline(is, line)) {
            auto pos = line.find_first_not_of(" \t\r");
            if (pos != std::string::npos && line[pos] != '#') return true;
        }
        throw ValidationError("pade: unexpected end of input");
    };
    next_line();
    std::istringstream head(line);
    std::string tag;
    RationalMap r;
    if (!(head >> tag >> r.dim_in >> r.dim_out >> r.N >> r.M) || tag != "pade")
        throw ValidationError("pade: malformed header '" + line + "'");
    next_line();
    if (line.find("NUMERATOR") == std::string::npos) throw ValidationError("pade: expected NUMERATOR block");
    r.numerator = read_series(is);
    if (r.numerator.dim_in() != r.dim_in || r.numerator.dim_out() != r.dim_out)
        throw ValidationError("pade: numerator shape does not match header");
    next_line();
    std::istringstream dh(line);
    std::string dtag, which;
    dh >> dtag >> which;
    if (dtag != "DENOMINATOR") throw ValidationError("pade: expected DENOMINATOR block");
    const int count = which == "shared" ? 1 : r.dim_out;
    for (int i = 0; i < count; ++i) {
        if (i > 0) {
            next_line();
            if (line.find("DENOMINATOR") == std::string::npos)
                throw ValidationError("pade: expected DENOMINATOR block " + std::to_string(i));
        }
        MultiSeries den = read_series(is);
        if (den.dim_in() != r.dim_in || den.dim_out() != 1) throw ValidationError("pade: bad denominator shape");
        if (den.coeff(MultiIndex::zero(r.dim_in), 0) != cplx(1.0))
            throw ValidationError("pade: denominator constant term must be 1");
        r.denominators.push_back(std::move(den));
    }
    return r;
}

}  // namespace gssm
