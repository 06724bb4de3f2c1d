#include "iamnet/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace iamnet {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::round(x); }

double rgamma(double x) { return is_nonpositive_integer(x) ? 0.0 : 1.0 / std::tgamma(x); }

// Plain Maclaurin series; caller keeps |z| < 1.
double series_2f1(double a, double b, double c, double z, long max_terms = 50'000'000) {
    double term = 1.0;
    double sum = 1.0;
    int small = 0;
    for (long n = 0; n < max_terms; ++n) {
        const double dn = static_cast<double>(n);
        term *= (a + dn) * (b + dn) / ((c + dn) * (dn + 1.0)) * z;
        sum += term;
        if (term == 0.0) return sum;
        if (std::abs(term) <= 0.25 * kEps * std::abs(sum)) {
            if (++small == 3) return sum;
        } else {
            small = 0;
        }
    }
    throw std::runtime_error("gauss_2f1: series did not converge");
}

// Euler integral, valid for c > b > 0 and z <= 0:
// Gamma(c)/(Gamma(b)Gamma(c-b)) int_0^1 t^{b-1} (1-t)^{c-b-1} (1-zt)^{-a} dt.
double euler_integral_2f1(double a, double b, double c, double z) {
    boost::math::quadrature::tanh_sinh<double> ts;
    auto f = [&](double t, double tc) {
        // tc is 1 - t computed without cancellation near t = 1.
        const double one_minus_t = tc > 0.0 ? tc : 1.0 - t;
        return std::pow(t, b - 1.0) * std::pow(one_minus_t, c - b - 1.0) * std::pow(1.0 - z * t, -a);
    };
    const double integral = ts.integrate(f, 0.0, 1.0);
    return std::exp(std::lgamma(c) - std::lgamma(b) - std::lgamma(c - b)) * integral;
}

}  // namespace

double gauss_2f1(double a, double b, double c, double z) {
    if (z > 0.0 || std::isnan(z)) throw std::domain_error("gauss_2f1: z must be <= 0");
    if (is_nonpositive_integer(c)) throw std::domain_error("gauss_2f1: c is a non-positive integer");
    if (z == 0.0) return 1.0;
    if (z > -0.5) return series_2f1(a, b, c, z);
    if (z >= -2.0) {
        // Pfaff: argument z/(z-1) lies in [1/3, 2/3].
        return std::pow(1.0 - z, -a) * series_2f1(a, c - b, c, z / (z - 1.0));
    }
    const double d = b - a;
    if (std::abs(d - std::round(d)) < 1e-6) {
        // Degenerate connection coefficients. The Euler integral is symmetric in a and b.
        if (c > b && b > 0.0) return euler_integral_2f1(a, b, c, z);
        if (c > a && a > 0.0) return euler_integral_2f1(b, a, c, z);
        // Pfaff still converges, only slowly and with accumulated rounding.
        return std::pow(1.0 - z, -a) * series_2f1(a, c - b, c, z / (z - 1.0));
    }
    // Connection to 1/(1-z), which lies in (0, 1/3).
    const double w = 1.0 / (1.0 - z);
    const double t1 = std::tgamma(c) * std::tgamma(d) * rgamma(b) * rgamma(c - a) * std::pow(w, a) *
                      series_2f1(a, c - b, a - b + 1.0, w);
    const double t2 = std::tgamma(c) * std::tgamma(-d) * rgamma(a) * rgamma(c - b) * std::pow(w, b) *
                      series_2f1(b, c - a, b - a + 1.0, w);
    return t1 + t2;
}

double upper_incomplete_gamma(double s, double x) {
    if (!(s > 0.0) || !(x >= 0.0)) throw std::domain_error("upper_incomplete_gamma: need s > 0, x >= 0");
    if (x == 0.0) return std::tgamma(s);
    if (std::isinf(x)) return 0.0;
    const double log_pref = -x + s * std::log(x);
    if (x < s + 1.0) {
        // Gamma(s) minus the lower incomplete gamma series.
        double ap = s;
        double term = 1.0 / s;
        double sum = term;
        for (int n = 0; n < 100000; ++n) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * kEps * 0.25) break;
        }
        return std::tgamma(s) - sum * std::exp(log_pref);
    }
    // Modified Lentz continued fraction.
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 100000; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return std::exp(log_pref) * h;
}

QuadratureError::QuadratureError(double estimate, double error_bound)
    : std::runtime_error("quadrature did not converge: estimate " + std::to_string(estimate) +
                         ", error bound " + std::to_string(error_bound)),
      estimate_(estimate),
      error_bound_(error_bound) {}

namespace {

double gk_piece(const Integrand& f, double a, double b, const QuadSpec& q, double& err) {
    using boost::math::quadrature::gauss_kronrod;
    double e = 0.0;
    const double r = gauss_kronrod<double, 31>::integrate(f, a, b, q.max_depth, q.rel_tol, &e);
    err = e;
    return r;
}

void check(double value, double err, const QuadSpec& q) {
    if (!std::isfinite(value) || !(err <= std::max(q.abs_tol, q.rel_tol * std::abs(value))))
        throw QuadratureError(value, err);
}

}  // namespace

double integrate(const Integrand& f, double a, double b, const QuadSpec& q) {
    if (a == b) return 0.0;
    double err = 0.0;
    const double r = gk_piece(f, a, b, q, err);
    check(r, err, q);
    return r;
}

double integrate_piecewise(const Integrand& f, std::vector<double> points, const QuadSpec& q) {
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    double total = 0.0;
    double err_total = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        double err = 0.0;
        total += gk_piece(f, points[i], points[i + 1], q, err);
        err_total += err;
    }
    check(total, err_total, q);
    return total;
}

double integrate_2d(const std::function<double(double, double)>& f, double a, double b,
                    const Integrand& ylo, const Integrand& yhi, const QuadSpec& q) {
    return integrate(
        [&](double x) { return integrate([&](double y) { return f(x, y); }, ylo(x), yhi(x), q); },
        a, b, q);
}

std::vector<double> geometric_points(double lo, double hi, double ratio) {
    std::vector<double> p;
    for (double x = lo; x < hi; x *= ratio) p.push_back(x);
    p.push_back(hi);
    return p;
}

}  // namespace iamnet
