#include <abcil/error.hpp>
#include <abcil/quadrature.hpp>

#include <array>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

namespace abcil {

namespace {

// Kronrod abscissae (descending, positive half) and weights; the Gauss
// 7-point rule uses the odd-indexed abscissae.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment
{
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment kronrod15(const std::function<double(double)>& f, double a, double b)
{
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * pair;
        if (j % 2 == 1)
            gauss += kWg[j / 2] * pair;
    }
    kronrod *= half;
    gauss *= half;
    if (!std::isfinite(kronrod))
        throw NumericalError("quadrature: integrand is not finite on [" + std::to_string(a) + ", " +
                             std::to_string(b) + "]");
    return {a, b, kronrod, std::abs(kronrod - gauss)};
}

} // namespace

void QuadratureSpec::validate() const
{
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
        throw ConfigError("quadrature tolerances must be positive");
    if (max_subdivisions == 0)
        throw ConfigError("quadrature needs at least one subdivision");
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureSpec& spec)
{
    spec.validate();
    std::priority_queue<Segment> work;
    Segment first = kronrod15(f, a, b);
    double total = first.value;
    double total_err = first.error;
    work.push(first);

    std::size_t intervals = 1;
    while (total_err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
        if (intervals >= spec.max_subdivisions) {
            std::ostringstream msg;
            msg << "quadrature: subdivision budget " << spec.max_subdivisions
                << " exhausted, achieved abs error " << total_err << " on value " << total;
            throw NumericalError(msg.str());
        }
        const Segment worst = work.top();
        work.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Segment left = kronrod15(f, worst.a, mid);
        const Segment right = kronrod15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        work.push(left);
        work.push(right);
        ++intervals;
    }

    // Re-sum from the pieces to shed the drift of the running updates.
    double value = 0.0, error = 0.0;
    while (!work.empty()) {
        value += work.top().value;
        error += work.top().error;
        work.pop();
    }
    return {value, error, intervals};
}

} // namespace abcil
