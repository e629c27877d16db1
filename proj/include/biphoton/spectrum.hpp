#pragma once

// Normalized biphoton intensity spectrum |Gamma(dw)|^2 over the detuning
// from degeneracy. The density is symmetric in detuning and integrates
// to 1; tabulated inputs are symmetrized and renormalized on construction.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "biphoton/errors.hpp"
#include "biphoton/units.hpp"

namespace biphoton {

struct TabulatedPoint {
    double detuning;  // rad/s
    double density;   // 1/(rad/s), unnormalized on input
};

// Fold a table onto |detuning| and average the two sides:
// density_sym(w) = (density(w) + density(-w)) / 2, linearly interpolated.
// Applying this to an already symmetric table reproduces it exactly.
inline std::vector<TabulatedPoint> symmetrize_table(std::vector<TabulatedPoint> points) {
    if (points.size() < 2) throw InvalidSpectrumError("symmetrize_table: need at least two points");
    std::sort(points.begin(), points.end(),
              [](const TabulatedPoint& a, const TabulatedPoint& b) { return a.detuning < b.detuning; });

    std::vector<double> grid;
    grid.reserve(points.size());
    for (const auto& p : points) grid.push_back(std::abs(p.detuning));
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    auto raw = [&points](double w) -> double {
        if (w < points.front().detuning || w > points.back().detuning) return 0.0;
        auto it = std::lower_bound(points.begin(), points.end(), w,
                                   [](const TabulatedPoint& p, double x) { return p.detuning < x; });
        if (it != points.end() && it->detuning == w) return it->density;
        if (it == points.begin()) return it->density;
        const auto hi = it;
        const auto lo = it - 1;
        if (hi == points.end()) return lo->density;
        const double span = hi->detuning - lo->detuning;
        if (span <= 0.0) return lo->density;
        const double t = (w - lo->detuning) / span;
        return lo->density + t * (hi->density - lo->density);
    };

    std::vector<TabulatedPoint> out;
    out.reserve(2 * grid.size());
    std::vector<double> folded(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) folded[i] = 0.5 * (raw(grid[i]) + raw(-grid[i]));
    for (std::size_t i = grid.size(); i-- > 0;)
        if (grid[i] > 0.0) out.push_back({-grid[i], folded[i]});
    for (std::size_t i = 0; i < grid.size(); ++i) out.push_back({grid[i], folded[i]});
    return out;
}

class SpectralDensity {
public:
    enum class Shape { gaussian, rectangular, tabulated };

    static SpectralDensity gaussian(double sigma_omega, double center_wavelength) {
        if (!(sigma_omega > 0.0) || !(center_wavelength > 0.0))
            throw InvalidSpectrumError("gaussian spectrum: sigma and wavelength must be positive");
        SpectralDensity s;
        s.shape_ = Shape::gaussian;
        s.sigma_omega_ = sigma_omega;
        s.center_wavelength_ = center_wavelength;
        return s;
    }

    static SpectralDensity rectangular(double half_width_omega, double center_wavelength) {
        if (!(half_width_omega > 0.0) || !(center_wavelength > 0.0))
            throw InvalidSpectrumError("rectangular spectrum: width and wavelength must be positive");
        SpectralDensity s;
        s.shape_ = Shape::rectangular;
        s.half_width_omega_ = half_width_omega;
        s.center_wavelength_ = center_wavelength;
        return s;
    }

    // Builds a symmetrized, normalized piecewise-linear density from
    // arbitrary (detuning, density) samples. Density values must be
    // nonnegative and not identically zero.
    static SpectralDensity tabulated(std::vector<TabulatedPoint> points, double center_wavelength) {
        if (!(center_wavelength > 0.0))
            throw InvalidSpectrumError("tabulated spectrum: wavelength must be positive");
        if (points.size() < 2)
            throw InvalidSpectrumError("tabulated spectrum: need at least two points");
        for (const auto& p : points) {
            if (!(p.density >= 0.0) || !std::isfinite(p.density) || !std::isfinite(p.detuning))
                throw InvalidSpectrumError("tabulated spectrum: density must be finite and nonnegative");
        }
        SpectralDensity s;
        s.shape_ = Shape::tabulated;
        s.center_wavelength_ = center_wavelength;
        const auto folded = symmetrize_table(std::move(points));
        for (const auto& p : folded) {
            if (p.detuning < 0.0) continue;
            s.grid_.push_back(p.detuning);
            s.values_.push_back(p.density);
        }
        s.scale_ = 1.0;
        s.renormalize();
        return s;
    }

    Shape shape() const { return shape_; }
    double center_wavelength() const { return center_wavelength_; }

    // Gaussian accessor; throws for other shapes.
    double sigma_omega() const {
        if (shape_ != Shape::gaussian) throw DomainError("sigma_omega: spectrum is not gaussian");
        return sigma_omega_;
    }

    double half_width_omega() const {
        if (shape_ != Shape::rectangular) throw DomainError("half_width_omega: spectrum is not rectangular");
        return half_width_omega_;
    }

    // Normalized density at a given detuning, symmetric by construction.
    double density(double detuning) const {
        switch (shape_) {
            case Shape::gaussian: {
                const double u = detuning / sigma_omega_;
                return std::exp(-0.5 * u * u) / (sigma_omega_ * std::sqrt(kTwoPi));
            }
            case Shape::rectangular:
                return std::abs(detuning) <= half_width_omega_ ? 0.5 / half_width_omega_ : 0.0;
            case Shape::tabulated:
                return interpolate(std::abs(detuning)) * scale_;
        }
        return 0.0;
    }

    // Detuning beyond which the density carries negligible mass
    // (< 1e-12 of the total for the gaussian case; exact support otherwise).
    double support_max() const {
        switch (shape_) {
            case Shape::gaussian: return 8.0 * sigma_omega_;
            case Shape::rectangular: return half_width_omega_;
            case Shape::tabulated: return grid_.empty() ? 0.0 : grid_.back();
        }
        return 0.0;
    }

    // Positive half of the tabulated grid (quadrature breakpoints).
    const std::vector<double>& grid() const { return grid_; }

    // The symmetrized table as explicit points over the full detuning axis.
    std::vector<TabulatedPoint> table() const {
        std::vector<TabulatedPoint> out;
        if (shape_ != Shape::tabulated) return out;
        out.reserve(2 * grid_.size());
        for (std::size_t i = grid_.size(); i-- > 0;) {
            if (grid_[i] > 0.0) out.push_back({-grid_[i], values_[i] * scale_});
        }
        for (std::size_t i = 0; i < grid_.size(); ++i)
            out.push_back({grid_[i], values_[i] * scale_});
        return out;
    }

    // Integral of the density over all detunings (trapezoid for tabulated,
    // exact for analytic shapes).
    double integral() const {
        switch (shape_) {
            case Shape::gaussian:
            case Shape::rectangular:
                return 1.0;
            case Shape::tabulated: {
                return scale_ * table_integral();
            }
        }
        return 0.0;
    }

    // Returns a copy rescaled to unit integral. Analytic shapes are
    // normalized by construction and come back unchanged.
    SpectralDensity normalized() const {
        SpectralDensity s = *this;
        if (shape_ == Shape::tabulated) s.renormalize();
        return s;
    }

private:
    SpectralDensity() = default;

    void renormalize() {
        const double total = table_integral() * scale_;
        if (!(total > 0.0) || !std::isfinite(total))
            throw InvalidSpectrumError("spectrum normalization: integral is zero or not finite");
        scale_ /= total;
    }

    // Trapezoid integral of the stored (unscaled) symmetric table over the
    // full axis: twice the positive half, minus the doubly counted origin.
    double table_integral() const {
        double half = 0.0;
        for (std::size_t i = 1; i < grid_.size(); ++i)
            half += 0.5 * (values_[i] + values_[i - 1]) * (grid_[i] - grid_[i - 1]);
        double total = 2.0 * half;
        if (grid_.front() > 0.0) {
            // Table does not touch zero: the gap [-g0, g0] contributes a
            // flat extension of the innermost value.
            total += 2.0 * grid_.front() * values_.front();
        }
        return total;
    }

    double interpolate(double w) const {
        if (grid_.empty()) return 0.0;
        if (w <= grid_.front()) return values_.front();
        if (w >= grid_.back()) return w == grid_.back() ? values_.back() : 0.0;
        auto it = std::lower_bound(grid_.begin(), grid_.end(), w);
        const std::size_t hi = static_cast<std::size_t>(it - grid_.begin());
        if (grid_[hi] == w) return values_[hi];
        const std::size_t lo = hi - 1;
        const double span = grid_[hi] - grid_[lo];
        const double t = (w - grid_[lo]) / span;
        return values_[lo] + t * (values_[hi] - values_[lo]);
    }

    Shape shape_ = Shape::gaussian;
    double center_wavelength_ = 0.0;
    double sigma_omega_ = 0.0;
    double half_width_omega_ = 0.0;
    std::vector<double> grid_;    // |detuning|, ascending
    std::vector<double> values_;  // unscaled symmetric density
    double scale_ = 1.0;
};

// Free-function spelling used throughout the pipelines.
inline SpectralDensity normalize(const SpectralDensity& s) { return s.normalized(); }

} // namespace biphoton
