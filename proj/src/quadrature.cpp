#include "halfspace/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include "halfspace/errors.hpp"

namespace halfspace {

const Rule1D& gauss_legendre(int p) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<Rule1D>> cache;
    if (p < 1) throw DomainError("Gauss-Legendre rule needs p >= 1");
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(p);
    if (it != cache.end()) return *it->second;
    auto rule = std::make_unique<Rule1D>();
    // Nonnegative zeros only; mirror them.
    std::vector<double> zeros = boost::math::legendre_p_zeros<double>(p);
    std::vector<std::pair<double, double>> nw;
    for (double x : zeros) {
        double dp = boost::math::legendre_p_prime(p, x);
        double w = 2.0 / ((1 - x * x) * dp * dp);
        nw.push_back({x, w});
        if (x != 0.0) nw.push_back({-x, w});
    }
    std::sort(nw.begin(), nw.end());
    for (auto& [x, w] : nw) {
        rule->nodes.push_back(x);
        rule->weights.push_back(w);
    }
    auto& ref = *rule;
    cache.emplace(p, std::move(rule));
    return ref;
}

Rule1D gauss_legendre(int p, double a, double b) {
    const Rule1D& ref = gauss_legendre(p);
    Rule1D r;
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    r.nodes.resize(ref.size());
    r.weights.resize(ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
        r.nodes[i] = mid + half * ref.nodes[i];
        r.weights[i] = half * ref.weights[i];
    }
    return r;
}

Rule1D composite_rule(const std::vector<double>& breaks, int p) {
    const Rule1D& ref = gauss_legendre(p);
    Rule1D r;
    if (breaks.size() < 2) return r;
    r.nodes.reserve((breaks.size() - 1) * ref.size());
    r.weights.reserve((breaks.size() - 1) * ref.size());
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        double a = breaks[i], b = breaks[i + 1];
        double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (std::size_t q = 0; q < ref.size(); ++q) {
            r.nodes.push_back(mid + half * ref.nodes[q]);
            r.weights.push_back(half * ref.weights[q]);
        }
    }
    return r;
}

std::vector<double> graded_breaks(double a, double b, double h, double c, double ratio, int levels) {
    std::vector<double> br;
    if (!(b > a)) return br;
    int nu = std::max(1, static_cast<int>(std::ceil((b - a) / h)));
    for (int i = 0; i <= nu; ++i) br.push_back(a + (b - a) * i / nu);
    br.back() = b;
    if (c >= a && c <= b) br.push_back(c);
    double d = h;
    for (int k = 1; k <= levels; ++k) {
        d *= ratio;
        for (double s : {c - d, c + d})
            if (s > a && s < b) br.push_back(s);
    }
    std::sort(br.begin(), br.end());
    // Drop duplicates and slivers far below the finest geometric scale.
    std::vector<double> out;
    double tiny = (b - a) * 1e-15;
    for (double s : br)
        if (out.empty() || s - out.back() > tiny) out.push_back(s);
    out.back() = b;
    return out;
}

Integral integrate_adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol,
                            unsigned max_depth) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    Integral r;
    if (std::isfinite(a) && std::isfinite(b)) {
        // GK's error estimate has an absolute epsilon floor, so short panels never meet a
        // relative tolerance; integrate on [0, 1] and scale instead.
        double h = b - a;
        auto g = [&](double s) { return f(a + h * s); };
        r.value = h * GK::integrate(g, 0.0, 1.0, max_depth, rel_tol, &r.error);
        r.error *= std::abs(h);
        return r;
    }
    r.value = GK::integrate(f, a, b, max_depth, rel_tol, &r.error);
    return r;
}

}  // namespace halfspace
