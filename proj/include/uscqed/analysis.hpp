#pragma once

#include <vector>

namespace uscqed {

struct Peak {
    int index;        // grid index of the local maximum
    double position;  // grid value at index
    double height;
};

/// Strict local maxima higher than rel_threshold * global max, by descending height.
std::vector<Peak> find_peaks(const std::vector<double>& x, const std::vector<double>& y, double rel_threshold = 1e-3);

/// Full width at half maximum of the peak at `index`, with linear
/// interpolation of both half-maximum crossings. Throws InvalidArgument if a
/// crossing lies outside the grid.
double fwhm(const std::vector<double>& x, const std::vector<double>& y, int index);

/// h (w/2)^2 / ((x - x0)^2 + (w/2)^2): height h, FWHM w, area pi h w / 2.
struct Lorentzian {
    double height;
    double center;
    double width;

    double operator()(double x) const;
    double area() const;
};

struct TwoLorentzianFit {
    Lorentzian lower;
    Lorentzian upper;
    /// max |fit - data| over the fitted points, relative to the larger height.
    double residual;
    int iterations;
};

/// Least-squares fit of two Lorentzians to the points with |x - c| <= half_window
/// for c in {lower_guess, upper_guess}. Initial widths from fwhm() when possible.
TwoLorentzianFit fit_two_lorentzians(const std::vector<double>& x, const std::vector<double>& y, double lower_guess,
                                     double upper_guess, double half_window);

/// Integrated |a - b| over integrated b (trapezoid on x).
double relative_l1_difference(const std::vector<double>& x, const std::vector<double>& a, const std::vector<double>& b);

/// Maximum |a - b| over max |b|.
double relative_max_difference(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace uscqed
