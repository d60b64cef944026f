#include "uscqed/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/LevenbergMarquardt>
#include <unsupported/Eigen/NumericalDiff>

#include "uscqed/errors.hpp"

namespace uscqed {

namespace {

void check_grid(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw DimensionMismatch("grid and values differ in length");
    if (x.size() < 3) throw InvalidArgument("need at least 3 grid points");
}

double crossing(double x0, double y0, double x1, double y1, double level) {
    return x0 + (level - y0) * (x1 - x0) / (y1 - y0);
}

struct TwoLorentzianResidual : Eigen::DenseFunctor<double> {
    const std::vector<double>& xs;
    const std::vector<double>& ys;

    TwoLorentzianResidual(const std::vector<double>& x, const std::vector<double>& y)
        : Eigen::DenseFunctor<double>(6, static_cast<int>(x.size())), xs(x), ys(y) {}

    int operator()(const InputType& p, ValueType& r) const {
        const Lorentzian a{p(0), p(1), p(2)};
        const Lorentzian b{p(3), p(4), p(5)};
        for (size_t i = 0; i < xs.size(); ++i) r(static_cast<Eigen::Index>(i)) = a(xs[i]) + b(xs[i]) - ys[i];
        return 0;
    }
};

}  // namespace

std::vector<Peak> find_peaks(const std::vector<double>& x, const std::vector<double>& y, double rel_threshold) {
    check_grid(x, y);
    const double top = *std::max_element(y.begin(), y.end());
    std::vector<Peak> out;
    for (size_t i = 1; i + 1 < y.size(); ++i) {
        if (y[i] > y[i - 1] && y[i] >= y[i + 1] && y[i] > rel_threshold * top) {
            out.push_back({static_cast<int>(i), x[i], y[i]});
        }
    }
    std::sort(out.begin(), out.end(), [](const Peak& a, const Peak& b) { return a.height > b.height; });
    return out;
}

double fwhm(const std::vector<double>& x, const std::vector<double>& y, int index) {
    check_grid(x, y);
    if (index < 0 || index >= static_cast<int>(y.size())) throw InvalidArgument("fwhm: index out of range");
    const double half = 0.5 * y[index];
    int l = index;
    while (l > 0 && y[l] > half) --l;
    int r = index;
    while (r + 1 < static_cast<int>(y.size()) && y[r] > half) ++r;
    if (y[l] > half || y[r] > half) throw InvalidArgument("fwhm: half maximum not reached inside the grid");
    const double xl = crossing(x[l], y[l], x[l + 1], y[l + 1], half);
    const double xr = crossing(x[r - 1], y[r - 1], x[r], y[r], half);
    return xr - xl;
}

double Lorentzian::operator()(double x) const {
    const double hw = 0.5 * width;
    return height * hw * hw / ((x - center) * (x - center) + hw * hw);
}

double Lorentzian::area() const { return std::numbers::pi * height * std::abs(width) / 2.0; }

TwoLorentzianFit fit_two_lorentzians(const std::vector<double>& x, const std::vector<double>& y, double lower_guess,
                                     double upper_guess, double half_window) {
    check_grid(x, y);
    std::vector<double> xs, ys;
    for (size_t i = 0; i < x.size(); ++i) {
        if (std::abs(x[i] - lower_guess) <= half_window || std::abs(x[i] - upper_guess) <= half_window) {
            xs.push_back(x[i]);
            ys.push_back(y[i]);
        }
    }
    if (xs.size() < 6) throw InvalidArgument("fit_two_lorentzians: fewer than 6 points in the windows");

    const auto seed = [&](double c) {
        size_t best = 0;
        for (size_t i = 0; i < x.size(); ++i) {
            if (std::abs(x[i] - c) <= half_window && (best == 0 || y[i] > y[best])) best = i;
        }
        double w = half_window / 3.0;
        try {
            w = fwhm(x, y, static_cast<int>(best));
        } catch (const InvalidArgument&) {
        }
        return Lorentzian{y[best], x[best], w};
    };
    const Lorentzian a0 = seed(lower_guess);
    const Lorentzian b0 = seed(upper_guess);

    Eigen::VectorXd p(6);
    p << a0.height, a0.center, a0.width, b0.height, b0.center, b0.width;
    TwoLorentzianResidual f(xs, ys);
    Eigen::NumericalDiff<TwoLorentzianResidual> nd(f);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<TwoLorentzianResidual>> lm(nd);
    lm.setXtol(1e-12);
    lm.setFtol(1e-12);
    lm.setMaxfev(4000);
    lm.minimize(p);

    TwoLorentzianFit out;
    Lorentzian a{p(0), p(1), std::abs(p(2))};
    Lorentzian b{p(3), p(4), std::abs(p(5))};
    if (a.center > b.center) std::swap(a, b);
    out.lower = a;
    out.upper = b;
    out.iterations = static_cast<int>(lm.iterations());
    double worst = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) worst = std::max(worst, std::abs(a(xs[i]) + b(xs[i]) - ys[i]));
    out.residual = worst / std::max(std::abs(a.height), std::abs(b.height));
    return out;
}

double relative_l1_difference(const std::vector<double>& x, const std::vector<double>& a, const std::vector<double>& b) {
    check_grid(x, a);
    check_grid(x, b);
    double num = 0.0, den = 0.0;
    for (size_t i = 1; i < x.size(); ++i) {
        const double h = x[i] - x[i - 1];
        num += 0.5 * h * (std::abs(a[i] - b[i]) + std::abs(a[i - 1] - b[i - 1]));
        den += 0.5 * h * (std::abs(b[i]) + std::abs(b[i - 1]));
    }
    return num / den;
}

double relative_max_difference(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw DimensionMismatch("relative_max_difference: lengths differ");
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        num = std::max(num, std::abs(a[i] - b[i]));
        den = std::max(den, std::abs(b[i]));
    }
    return den > 0.0 ? num / den : num;
}

}  // namespace uscqed
