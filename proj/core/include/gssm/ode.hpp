#pragma once

// Adaptive explicit integration (Dormand-Prince 5(4)) with dense output on a
// uniform time grid.

#include <functional>
#include <string>
#include <vector>

#include "gssm/series.hpp"

namespace gssm {

enum class Termination { completed, blowup, pole, failure };
std::string to_string(Termination t);

struct TrajectoryData {
    std::vector<double> t;
    std::vector<RVec> x;
    Termination status = Termination::completed;
    std::string message;
    std::vector<std::size_t> flagged;  // sample indices with evaluation problems (lift)

    std::size_t size() const { return t.size(); }
    int dim() const { return x.empty() ? 0 : static_cast<int>(x.front().size()); }
    std::vector<double> component(int i) const;
    // Throws ValidationError unless timestamps are equispaced.
    double uniform_step() const;
};

struct OdeOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double dt_init = 1e-3;
    double sample_dt = 0.0;      // output spacing; 0 = 200 samples over the span
    double blowup_factor = 1e6;  // |x| > factor * max(|x0|, blowup_floor) stops
    double blowup_floor = 1e-3;
};

// dx = f(t, x). The right-hand side may throw PoleProximityError, which ends
// the run with Termination::pole.
using OdeRhs = std::function<void(double t, const RVec& x, RVec& dx)>;

// Integrates from t0 to t1 (t1 < t0 integrates backward).
TrajectoryData integrate(const OdeRhs& f, const RVec& x0, double t0, double t1, const OdeOptions& opt = {});

}  // namespace gssm
