#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "prandtl/error.hpp"
#include "prandtl/grid.hpp"

namespace prandtl {

struct DecayFit {
    double slope = 0.0;
    double r2 = 0.0;
    std::size_t samples = 0;
};

/// Least-squares slope of log X against log <t> over samples with t in [t0, t1].
inline DecayFit fit_decay(std::span<const double> t, std::span<const double> x, double t0, double t1) {
    std::vector<double> a, b;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t0 || t[i] > t1) continue;
        if (!(x[i] > 0.0))
            throw Error(ErrorKind::Numerical, "insufficient-samples", "fit_decay needs X_sum > 0 inside the window");
        a.push_back(std::log(bracket_t(t[i])));
        b.push_back(std::log(x[i]));
    }
    if (a.size() < 20)
        throw Error(ErrorKind::Numerical, "insufficient-samples", "fit_decay needs at least 20 samples in the window");
    const double n = static_cast<double>(a.size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double cxx = 0, cxy = 0, cyy = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cxx += (a[i] - ma) * (a[i] - ma);
        cxy += (a[i] - ma) * (b[i] - mb);
        cyy += (b[i] - mb) * (b[i] - mb);
    }
    DecayFit f;
    f.samples = a.size();
    f.slope = cxy / cxx;
    // a constant column is fitted exactly by slope 0
    f.r2 = cyy > 1e-28 * n ? (cxy * cxy) / (cxx * cyy) : 1.0;
    return f;
}

}  // namespace prandtl
