#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "prandtl/error.hpp"

namespace prandtl {

/// <t> = t + 1, the time scale of the heat self-similar variable.
inline double bracket_t(double t) noexcept { return t + 1.0; }

/// How the stored normal coordinate relates to the physical wall distance y.
///
/// SelfSimilarZ stores z = y / <t>^{1/2}; the node set is time independent and
/// the Gaussian weight is stationary. PhysicalY stores y itself, with nodes
/// equal to the z-nodes at the reference time t = 0.
enum class CoordinateMode { PhysicalY, SelfSimilarZ };

inline std::string to_string(CoordinateMode mode) {
    return mode == CoordinateMode::PhysicalY ? "physical_y" : "self_similar_z";
}

inline CoordinateMode coordinate_mode_from_string(const std::string& s) {
    if (s == "physical_y" || s == "PhysicalY") return CoordinateMode::PhysicalY;
    if (s == "self_similar_z" || s == "SelfSimilarZ") return CoordinateMode::SelfSimilarZ;
    throw Error(ErrorKind::Config, "type-mismatch",
                "grid.mode must be physical_y or self_similar_z, got '" + s + "'");
}

struct GridConfig {
    int nx = 32;
    double lx = 2.0 * std::numbers::pi;
    int nz = 128;
    double zmax = 12.0;
    CoordinateMode mode = CoordinateMode::SelfSimilarZ;
    /// sinh clustering strength towards the wall; 0 means uniform nodes.
    double stretch = 0.0;
};

/// Tensor grid: periodic Fourier direction x times a truncated normal direction.
///
/// Normal nodes are zeta_j = zeta(xi_j) with xi_j = j / (nz - 1) and
/// zeta(xi) = zmax * sinh(s xi) / sinh(s) (or zmax * xi when s = 0). The map is
/// odd in xi, so parity reflections across the wall carry over to zeta.
class Grid {
public:
    explicit Grid(const GridConfig& cfg) : cfg_(cfg) {
        const auto n = static_cast<std::size_t>(cfg.nz);
        zeta_.resize(n);
        dzeta_.resize(n);
        d2zeta_.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double xi = static_cast<double>(j) / static_cast<double>(n - 1);
            if (cfg.stretch == 0.0) {
                zeta_[j] = cfg.zmax * xi;
                dzeta_[j] = cfg.zmax;
                d2zeta_[j] = 0.0;
            } else {
                const double s = cfg.stretch;
                const double norm = cfg.zmax / std::sinh(s);
                zeta_[j] = norm * std::sinh(s * xi);
                dzeta_[j] = norm * s * std::cosh(s * xi);
                d2zeta_[j] = norm * s * s * std::sinh(s * xi);
            }
        }
        zeta_.front() = 0.0;
        zeta_.back() = cfg.zmax;

        // composite trapezoid weights on the (possibly non-uniform) nodes
        trap_.assign(n, 0.0);
        for (std::size_t j = 0; j + 1 < n; ++j) {
            const double h = zeta_[j + 1] - zeta_[j];
            trap_[j] += 0.5 * h;
            trap_[j + 1] += 0.5 * h;
        }
    }

    int nx() const noexcept { return cfg_.nx; }
    int nz() const noexcept { return cfg_.nz; }
    double lx() const noexcept { return cfg_.lx; }
    double zmax() const noexcept { return cfg_.zmax; }
    double stretch() const noexcept { return cfg_.stretch; }
    CoordinateMode mode() const noexcept { return cfg_.mode; }
    const GridConfig& config() const noexcept { return cfg_; }

    double dx() const noexcept { return cfg_.lx / cfg_.nx; }
    double x(int i) const noexcept { return dx() * i; }
    /// Computational spacing in xi.
    double dxi() const noexcept { return 1.0 / (cfg_.nz - 1); }
    /// Angular wavenumber of Fourier index k.
    double wavenumber(int k) const noexcept { return 2.0 * std::numbers::pi * k / cfg_.lx; }
    /// Highest Fourier index kept by the 2/3 dealiasing rule.
    int dealias_cutoff() const noexcept { return cfg_.nx / 3; }

    std::span<const double> nodes() const noexcept { return zeta_; }
    std::span<const double> metric() const noexcept { return dzeta_; }
    std::span<const double> metric2() const noexcept { return d2zeta_; }
    std::span<const double> trapezoid_weights() const noexcept { return trap_; }

    /// y = scale(t) * zeta.
    double scale(double t) const noexcept {
        return cfg_.mode == CoordinateMode::SelfSimilarZ ? std::sqrt(bracket_t(t)) : 1.0;
    }
    /// d(scale)/dt / scale, the coefficient of the coordinate drift zeta d/dzeta.
    double scale_rate(double t) const noexcept {
        return cfg_.mode == CoordinateMode::SelfSimilarZ ? 0.5 / bracket_t(t) : 0.0;
    }
    double y(double t, int j) const noexcept { return scale(t) * zeta_[static_cast<std::size_t>(j)]; }
    double z(double t, int j) const noexcept { return y(t, j) / std::sqrt(bracket_t(t)); }

    bool operator==(const Grid& o) const noexcept {
        return cfg_.nx == o.cfg_.nx && cfg_.lx == o.cfg_.lx && cfg_.nz == o.cfg_.nz &&
               cfg_.zmax == o.cfg_.zmax && cfg_.mode == o.cfg_.mode && cfg_.stretch == o.cfg_.stretch;
    }

private:
    GridConfig cfg_;
    std::vector<double> zeta_, dzeta_, d2zeta_, trap_;
};

using GridPtr = std::shared_ptr<const Grid>;

inline bool is_power_of_two(int n) noexcept { return n > 0 && (n & (n - 1)) == 0; }

/// Validates the configuration and builds the node set.
inline GridPtr make_grid(const GridConfig& cfg) {
    if (cfg.nx < 4 || !is_power_of_two(cfg.nx))
        throw Error(ErrorKind::Config, "grid-nx", "n_x must be a power of two >= 4");
    if (cfg.nz < 16) throw Error(ErrorKind::Config, "grid-nz", "n_z must be >= 16");
    if (!(cfg.lx > 0.0) || !std::isfinite(cfg.lx))
        throw Error(ErrorKind::Config, "grid-lx", "l_x must be positive and finite");
    if (!(cfg.zmax >= 8.0) || !std::isfinite(cfg.zmax))
        throw Error(ErrorKind::Config, "weight-tail",
                    "z_max must be >= 8 so the Gaussian weight tail is resolved");
    if (!(cfg.stretch >= 0.0) || !std::isfinite(cfg.stretch))
        throw Error(ErrorKind::Config, "grid-stretch", "stretch must be >= 0");
    return std::make_shared<const Grid>(cfg);
}

/// Real samples on the tensor grid, row-major with x outer: v[i * nz + j].
class Field {
public:
    Field() = default;
    Field(GridPtr grid, double t)
        : grid_(std::move(grid)), t_(t),
          values_(static_cast<std::size_t>(grid_->nx()) * static_cast<std::size_t>(grid_->nz()), 0.0) {}

    const Grid& grid() const noexcept { return *grid_; }
    const GridPtr& grid_ptr() const noexcept { return grid_; }
    double time() const noexcept { return t_; }
    void set_time(double t) noexcept { t_ = t; }

    double& operator()(int i, int j) noexcept { return values_[index(i, j)]; }
    double operator()(int i, int j) const noexcept { return values_[index(i, j)]; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    /// Normal profile at tangential node i.
    std::span<const double> column(int i) const noexcept {
        return std::span<const double>(values_).subspan(index(i, 0), static_cast<std::size_t>(grid_->nz()));
    }
    std::span<double> column(int i) noexcept {
        return std::span<double>(values_).subspan(index(i, 0), static_cast<std::size_t>(grid_->nz()));
    }

    bool all_finite() const noexcept {
        for (double v : values_)
            if (!std::isfinite(v)) return false;
        return true;
    }
    double max_abs() const noexcept {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::abs(v));
        return m;
    }

    /// Samples f(x, z) with z the self-similar variable at the field's time.
    template <class F>
    static Field sample(GridPtr grid, double t, F&& f) {
        Field out(std::move(grid), t);
        const Grid& g = out.grid();
        for (int i = 0; i < g.nx(); ++i)
            for (int j = 0; j < g.nz(); ++j) out(i, j) = f(g.x(i), g.z(t, j));
        return out;
    }

    Field& operator+=(const Field& o) {
        for (std::size_t n = 0; n < values_.size(); ++n) values_[n] += o.values_[n];
        return *this;
    }
    Field& operator-=(const Field& o) {
        for (std::size_t n = 0; n < values_.size(); ++n) values_[n] -= o.values_[n];
        return *this;
    }
    Field& operator*=(double c) {
        for (double& v : values_) v *= c;
        return *this;
    }
    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(double c, Field a) { return a *= c; }

private:
    std::size_t index(int i, int j) const noexcept {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(grid_->nz()) + static_cast<std::size_t>(j);
    }

    GridPtr grid_;
    double t_ = 0.0;
    std::vector<double> values_;
};

/// log theta_alpha(t, y) = alpha y^2 / (4 <t>).
inline double log_weight_theta(double alpha, double t, double y) noexcept {
    return alpha * y * y / (4.0 * bracket_t(t));
}

/// Gaussian weight theta_alpha(t, y) = exp(alpha z^2 / 4).
inline double weight_theta(double alpha, double t, double y) noexcept {
    return std::exp(log_weight_theta(alpha, t, y));
}

/// theta^2 f^2 without forming theta when the exponent would overflow.
inline double weighted_square(double log_theta, double f) noexcept {
    if (f == 0.0) return 0.0;
    if (log_theta > 350.0) return std::exp(2.0 * log_theta + 2.0 * std::log(std::abs(f)));
    const double w = std::exp(log_theta) * f;
    return w * w;
}

struct WeightedL2 {
    double value = 0.0;
    /// Share of the squared norm carried by the last 10% of normal nodes.
    double tail_fraction = 0.0;
    bool tail_warning = false;
};

/// ||theta_alpha f||_{L^2(dy dx)} by exact Fourier quadrature in x and the
/// composite trapezoid rule in the normal direction. The measure dy equals
/// scale(t) dzeta, so in SelfSimilarZ mode the result carries <t>^{1/4}.
inline WeightedL2 l2_weighted_report(const Field& f, double alpha) {
    const Grid& g = f.grid();
    const double t = f.time();
    const auto w = g.trapezoid_weights();
    const int tail_start = g.nz() - std::max(1, g.nz() / 10);
    double total = 0.0, tail = 0.0;
    for (int j = 0; j < g.nz(); ++j) {
        const double lt = log_weight_theta(alpha, t, g.y(t, j));
        double row = 0.0;
        for (int i = 0; i < g.nx(); ++i) row += weighted_square(lt, f(i, j));
        row *= w[static_cast<std::size_t>(j)];
        total += row;
        if (j >= tail_start) tail += row;
    }
    total *= g.dx() * g.scale(t);
    tail *= g.dx() * g.scale(t);
    WeightedL2 out;
    out.value = std::sqrt(total);
    out.tail_fraction = total > 0.0 ? tail / total : 0.0;
    out.tail_warning = out.tail_fraction > 1e-6;
    return out;
}

inline double l2_weighted(const Field& f, double alpha) { return l2_weighted_report(f, alpha).value; }

}  // namespace prandtl
