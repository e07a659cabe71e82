#include "gssm/singularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "gssm/error.hpp"

namespace gssm {

namespace {

struct Nonzero {
    std::vector<int> index;
    std::vector<cplx> value;
};

Nonzero nonzero_terms(const MultiSeries& s, int min_index) {
    if (s.dim_in() != 1 || s.dim_out() != 1) throw ValidationError("expected a scalar univariate series");
    double cmax = 0.0;
    for (const auto& [k, v] : s.terms())
        if (k[0] >= min_index) cmax = std::max(cmax, std::abs(v[0]));
    Nonzero nz;
    for (const auto& [k, v] : s.terms()) {
        if (k[0] < min_index || std::abs(v[0]) <= 1e-12 * cmax) continue;
        nz.index.push_back(k[0]);
        nz.value.push_back(v[0]);
    }
    return nz;
}

}  // namespace

RadiusEstimate estimate_radius(const MultiSeries& coeffs) {
    const Nonzero nz = nonzero_terms(coeffs, 0);
    if (nz.index.size() < 6)
        throw ValidationError("radius estimate needs at least 6 nonzero coefficients (have " +
                              std::to_string(nz.index.size()) + ")");
    int g = 0;
    for (std::size_t i = 1; i < nz.index.size(); ++i) g = std::gcd(g, nz.index[i] - nz.index[i - 1]);
    RadiusEstimate est;
    est.stride = g;

    std::vector<double> x, y;
    for (std::size_t i = 1; i < nz.index.size(); ++i) {
        const int gap = nz.index[i] - nz.index[i - 1];
        const double ratio = std::pow(std::abs(nz.value[i - 1] / nz.value[i]), 1.0 / gap);
        x.push_back(1.0 / nz.index[i]);
        y.push_back(ratio);
    }
    const std::size_t start = x.size() / 2;
    const std::size_t m = x.size() - start;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = start; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = static_cast<double>(m) * sxx - sx * sx;
    double slope = 0.0, icpt = sy / static_cast<double>(m);
    if (m >= 2 && den > 0.0) {
        slope = (static_cast<double>(m) * sxy - sx * sy) / den;
        icpt = (sy - slope * sx) / static_cast<double>(m);
    }
    double ss = 0.0;
    for (std::size_t i = start; i < x.size(); ++i) {
        const double r = y[i] - icpt - slope * x[i];
        ss += r * r;
    }
    est.fit_residual = std::sqrt(ss / static_cast<double>(m));
    const double ymin = *std::min_element(y.begin() + static_cast<std::ptrdiff_t>(start), y.end());
    if (icpt <= 0.1 * ymin) {
        est.zero_radius = true;
        est.radius = std::max(icpt, 0.0);
    } else {
        est.radius = icpt;
    }
    return est;
}

std::string SingularityEstimate::summary() const {
    std::ostringstream os;
    os.precision(8);
    os << radius << ' ' << theta << ' ' << pattern << ' ' << confidence;
    return os.str();
}

SingularityEstimate classify_sign_pattern(const MultiSeries& coeffs) {
    if (coeffs.dim_in() != 1 || coeffs.dim_out() != 1) throw ValidationError("expected a scalar univariate series");
    SingularityEstimate est;
    try {
        est.radius = estimate_radius(coeffs).radius;
    } catch (const ValidationError&) {
        est.radius = std::numeric_limits<double>::quiet_NaN();
    }

    // Signs of c_k for k >= 1 over the stride of the support.
    double cmax = 0.0;
    for (const auto& [k, v] : coeffs.terms())
        if (k[0] >= 1) cmax = std::max(cmax, std::abs(v[0].real()));
    std::vector<int> ks;
    for (const auto& [k, v] : coeffs.terms())
        if (k[0] >= 1 && std::abs(v[0].real()) > 1e-12 * cmax) ks.push_back(k[0]);
    if (ks.size() < 4) {
        est.pattern = "inconclusive";
        return est;
    }
    int g = 0;
    for (std::size_t i = 1; i < ks.size(); ++i) g = std::gcd(g, ks[i] - ks[i - 1]);
    std::vector<int> idx;
    std::vector<int> sgn;
    for (int k = ks.front(); k <= ks.back(); k += g) {
        const double c = coeffs.coeff(MultiIndex{k}, 0).real();
        idx.push_back(k);
        sgn.push_back(std::abs(c) <= 1e-12 * cmax ? 0 : (c > 0 ? 1 : -1));
    }
    int nonzero = 0;
    for (int s : sgn) nonzero += s != 0;
    if (nonzero < 4) {
        est.pattern = "inconclusive";
        return est;
    }

    auto mismatch = [&](double theta) {
        int bad = 0;
        // An overall sign is free: compare against both polarities.
        int bad_neg = 0;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            const double c = std::cos(idx[i] * theta);
            const int s = std::abs(c) < 1e-9 ? 0 : (c > 0 ? 1 : -1);
            bad += s != sgn[i];
            bad_neg += -s != sgn[i];
        }
        return std::min(bad, bad_neg);
    };

    bool same = true, alternating = true;
    int first = 0;
    for (std::size_t i = 0; i < sgn.size(); ++i) {
        if (sgn[i] == 0) {
            same = alternating = false;
            continue;
        }
        if (first == 0) first = sgn[i] * ((i % 2) ? -1 : 1);
        same = same && sgn[i] == sgn[0];
        alternating = alternating && sgn[i] * ((i % 2) ? -1 : 1) == first;
    }
    if (same) {
        est.pattern = "all-positive";
        est.theta = 0.0;
    } else if (alternating) {
        est.pattern = "alternating";
        est.theta = std::numbers::pi / g;
    } else {
        // Least-squares sign fit over a grid containing the simple fractions of pi.
        const int K = 3600;
        int best = std::numeric_limits<int>::max();
        for (int j = 0; j <= K; ++j) {
            const double th = std::numbers::pi * j / K;
            const int b = mismatch(th);
            if (b < best) {
                best = b;
                est.theta = th;
            }
        }
        int period = 0;
        for (int p = 3; p <= static_cast<int>(sgn.size()) / 2 && period == 0; ++p) {
            bool ok = true;
            for (std::size_t i = static_cast<std::size_t>(p); i < sgn.size() && ok; ++i) ok = sgn[i] == sgn[i - static_cast<std::size_t>(p)];
            if (ok) period = p;
        }
        est.pattern = period ? "period-" + std::to_string(period) : "irregular";
    }
    est.confidence = 1.0 - static_cast<double>(mismatch(est.theta)) / static_cast<double>(sgn.size());
    return est;
}

std::vector<ZeroFlag> denominator_zero_scan(const RationalMap& r, const EvaluationGrid& domain, double floor) {
    domain.validate();
    if (domain.dim() != r.dim_in) throw ValidationError("grid dimension differs from the rational map input");
    std::vector<ZeroFlag> flags;
    const int ncomp = static_cast<int>(r.denominators.size());
    const std::size_t np = domain.points.size();
    for (int c = 0; c < ncomp; ++c) {
        const MultiSeries& q = r.denominators[static_cast<std::size_t>(c)];
        const double q0 = std::abs(q.coeff(MultiIndex::zero(r.dim_in), 0));
        std::vector<cplx> val(np);
        for (std::size_t i = 0; i < np; ++i) val[i] = evaluate(q, domain.points[i])[0];
        std::vector<char> flagged(np, 0), by_sign(np, 0);
        for (std::size_t i = 0; i < np; ++i)
            if (std::abs(val[i]) < floor * q0) flagged[i] = 1;
        if (!domain.shape.empty()) {
            std::size_t stride = 1;
            for (std::size_t ax = 0; ax < domain.shape.size(); ++ax) {
                const auto cnt = static_cast<std::size_t>(domain.shape[ax]);
                for (std::size_t i = 0; i < np; ++i) {
                    if ((i / stride) % cnt == cnt - 1) continue;
                    const std::size_t j = i + stride;
                    if (val[i].real() * val[j].real() < 0.0) {
                        const std::size_t pick = std::abs(val[i]) <= std::abs(val[j]) ? i : j;
                        flagged[pick] = 1;
                        by_sign[pick] = 1;
                    }
                }
                stride *= cnt;
            }
        }
        for (std::size_t i = 0; i < np; ++i)
            if (flagged[i]) flags.push_back({domain.points[i], c, val[i], by_sign[i] != 0});
    }
    return flags;
}

LadderResult pade_ladder(const MultiSeries& coeffs, int N, int M, const EvaluationGrid& domain, bool shared_denominator,
                         double floor) {
    if (N < 0 || M < 0) throw ValidationError("Pade orders must be non-negative");
    std::vector<std::pair<int, int>> rungs = {{N, M}};
    if (M >= 1) rungs.emplace_back(N, M - 1);
    if (N >= 1 && M >= 1) rungs.emplace_back(N - 1, M - 1);
    LadderResult out;
    for (const auto& [n, m] : rungs) {
        RationalMap r = coeffs.dim_in() == 1 && !shared_denominator
                            ? pade_univariate(coeffs, n, m)
                            : pade_multivariate(coeffs, n, m, shared_denominator);
        LadderStep step{n, m, denominator_zero_scan(r, domain, floor)};
        const bool clean = step.flags.empty();
        out.steps.push_back(std::move(step));
        out.map = std::move(r);
        if (clean) {
            out.clean = true;
            break;
        }
    }
    return out;
}

}  // namespace gssm
