#include "mmwc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "mmwc/dd.hpp"

namespace mmwc::spectral {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kInvE = 0.36787944117144233;

bool on_negative_cut(const cplx& z) { return z.imag() == 0.0 && z.real() < 0.0; }

cplx halley_w(cplx w, const cplx& z) {
    // near the root |f| ~ |z| |dw|, and double precision floors |dw| at
    // ~eps |w|, so the tolerance must scale with |w|
    const double zmag = std::max(std::abs(z), 1e-290);
    for (int it = 0; it < 100; ++it) {
        cplx ew = std::exp(w);
        cplx f = w * ew - z;
        if (std::abs(f) <= 8e-16 * zmag * (4.0 + std::abs(w))) return w;
        cplx wp1 = w + 1.0;
        cplx denom = ew * wp1 - f * (w + 2.0) / (2.0 * wp1);
        cplx dw = f / denom;
        w -= dw;
        if (std::abs(dw) <= 1e-15 * (1.0 + std::abs(w))) {
            cplx resid = w * std::exp(w) - z;
            if (std::abs(resid) <= 1e-12 * zmag * (4.0 + std::abs(w))) return w;
        }
    }
    throw std::runtime_error("lambert_w: Halley iteration did not converge");
}

cplx seed_for_branch(int k, const cplx& z) {
    if (k == 0) {
        double near_branch = std::abs(z + kInvE);
        if (near_branch < 0.25) {
            cplx p = std::sqrt(2.0 * (std::exp(1.0) * z + 1.0));
            return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
        }
        if (std::abs(z) < 0.25) {
            cplx w = z * (1.0 - z * (1.0 - z * 1.5));
            return w;
        }
        if (std::abs(z) < 3.5) return std::log(1.0 + z); // mid-range basin
        cplx l = std::log(z);
        cplx ll = std::log(l);
        return l - ll + ll / l;
    }
    if (k == -1 && std::abs(z + kInvE) < 0.25) {
        cplx p = std::sqrt(2.0 * (std::exp(1.0) * z + 1.0));
        return -1.0 - p - p * p / 3.0 - 11.0 / 72.0 * p * p * p;
    }
    cplx l = std::log(z) + cplx(0.0, 2.0 * kPi * k);
    return l - std::log(l);
}

// Seeds are reliable away from the negative real axis; close to it the
// Halley basin of the neighbouring branch intrudes. Approach such z by
// continuation along the constant-radius arc, which never crosses the cut.
cplx solve_branch(int k, const cplx& z) {
    const bool near_branch_point = (k == 0 || k == -1) && std::abs(z + kInvE) < 0.25;
    const bool small_principal = k == 0 && std::abs(z) < 0.25;
    double theta = std::arg(z); // in [0, pi] for our callers
    if (near_branch_point || small_principal || theta <= 2.2)
        return halley_w(seed_for_branch(k, z), z);
    const double r = std::abs(z);
    cplx w = halley_w(seed_for_branch(k, std::polar(r, 2.0)), std::polar(r, 2.0));
    const int steps = static_cast<int>(std::ceil((theta - 2.0) / 0.35));
    for (int i = 1; i <= steps; ++i) {
        double th = 2.0 + (theta - 2.0) * i / steps;
        cplx zi = (i == steps) ? z : std::polar(r, th);
        w = halley_w(w, zi);
    }
    return w;
}

} // namespace

cplx lambert_w(int k, cplx z) {
    if (z == cplx(0.0, 0.0)) {
        if (k == 0) return {0.0, 0.0};
        throw std::domain_error("lambert_w: z = 0 is not in the domain of branch " + std::to_string(k));
    }
    // branch point: exact closed form, no iteration through the singularity
    if ((k == 0 || k == -1) && z.imag() == 0.0 && std::abs(z.real() + kInvE) < 4e-16)
        return {-1.0, 0.0};
    // lower half plane via the reflection identity W_k(z) = conj(W_{-k}(conj z))
    if (z.imag() < 0.0) return std::conj(lambert_w(-k, std::conj(z)));
    // on the cut, negative branches are conjugates of the matching
    // nonnegative branch (closure from above), except W_{-1} on (-1/e, 0)
    // where it is real-valued.
    if (k < 0 && on_negative_cut(z)) {
        int m = -k - 1;
        if (!(m == 0 && z.real() > -kInvE)) return std::conj(lambert_w(m, cplx(z.real(), 0.0)));
    }
    cplx w = solve_branch(k, z);
    // keep the from-above convention on the cut: branch 0 there has Im >= 0
    if (k == 0 && on_negative_cut(z) && z.real() < -kInvE && w.imag() < 0.0) w = std::conj(w);
    return w;
}

cplx tree_function(cplx z) {
    if (z.imag() == 0.0 && z.real() > kInvE)
        throw std::domain_error("tree_function: real z > 1/e is outside the principal domain");
    return -lambert_w(0, -z);
}

cplx tau(double lambda, cplx s) {
    if (!(lambda > 0.0)) throw std::domain_error("tau: lambda must be positive");
    return 1.0 / lambda - std::exp(s) + s * std::exp(s);
}

// ---------- closed form ----------

GClosed g_closed_checked(double lambda, double x) {
    if (!(lambda > 0.0)) throw std::domain_error("g_closed: lambda must be positive");
    if (!(x >= 0.0)) throw std::domain_error("g_closed: x must be >= 0");
    const int terms = static_cast<int>(std::ceil(x));
    GClosed out;

    if (x <= 120.0) {
        // sum in double-double; only transcendental is the final e^x factor
        using namespace ddops;
        dd sum(1.0); // k = 0 term
        dd abs_sum(1.0);
        dd fact(1.0);
        for (int k = 1; k < terms; ++k) {
            fact = mul(fact, dd(static_cast<double>(k)));
            dd base = div(mul(dd(x - k), inv_e()), dd(lambda));
            dd pw(1.0);
            for (int j = 0; j < k; ++j) pw = mul(pw, base);
            dd term = div(pw, fact);
            abs_sum = add(abs_sum, dd(std::fabs(static_cast<double>(term))));
            if (k % 2 == 1) term = neg(term);
            sum = add(sum, term);
        }
        const double ex = std::exp(x);
        out.value = ex * static_cast<double>(sum);
        // double-double roundoff, plus the final double rounding
        out.err_estimate =
            ex * (static_cast<double>(abs_sum) * 1e-30 + std::fabs(static_cast<double>(sum)) * 3e-16);
    } else {
        // log-space fallback; the alternating sum here is genuinely
        // ill-conditioned, which the alarm reports
        double sum = 1.0, abs_sum = 1.0;
        const double le = std::log(lambda) + 1.0;
        for (int k = 1; k < terms; ++k) {
            double lt = k * std::log(x - k) - k * le - std::lgamma(k + 1.0);
            double t = std::exp(lt);
            abs_sum += t;
            sum += (k % 2 == 1) ? -t : t;
        }
        double ex_log = x; // value = e^x * sum
        out.value = std::exp(ex_log + std::log(std::fabs(sum))) * (sum < 0 ? -1.0 : 1.0);
        out.err_estimate = std::exp(ex_log) * abs_sum * (std::fabs(x) + 40.0) * 1e-16;
        if (!std::isfinite(out.value)) {
            out.err_estimate = std::numeric_limits<double>::infinity();
        }
    }
    out.cancellation_alarm = !(out.err_estimate <= 1e-8 * std::fabs(out.value));
    return out;
}

double g_closed(double lambda, double x) {
    GClosed g = g_closed_checked(lambda, x);
    if (g.cancellation_alarm)
        throw std::runtime_error("g_closed: cancellation alarm at x = " + std::to_string(x) +
                                 "; use the pole series");
    return g.value;
}

// ---------- pole series ----------

GSeries g_series(double lambda, double x, int K) {
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw std::domain_error("g_series: lambda must be in (0, 1]");
    if (!(x > 0.0)) throw std::domain_error("g_series: x must be positive");
    if (K < 1) throw std::domain_error("g_series: K must be >= 1");

    const cplx z(-1.0 / (std::exp(1.0) * lambda), 0.0);
    double sum;
    if (lambda == 1.0) {
        sum = 2.0 * (x + 1.0 / 3.0);
    } else {
        cplx s0 = 1.0 + lambert_w(0, z);
        sum = 2.0 * std::real(std::exp(s0 * x) / s0);
    }
    double c_x = 0.0;
    for (int k = 1; k <= K; ++k) {
        cplx sk = 1.0 + lambert_w(k, z);
        double mag = std::abs(std::exp(sk * x) / sk);
        sum += 2.0 * std::real(std::exp(sk * x) / sk);
        if (k <= 20) c_x = std::max(c_x, mag * std::pow(static_cast<double>(k), 1.0 + x));
    }
    GSeries out;
    out.value = sum;
    // |e^{s_k x}/s_k| <= C_x / k^{1+x}: integral tail bound, with headroom
    // for the asymptotic-envelope fit over the first 20 roots
    out.tail_bound = 2.0 * 1.5 * c_x / (x * std::pow(static_cast<double>(K), x));
    return out;
}

double g_eval(double lambda, double x) {
    if (x <= 12.0) {
        GClosed g = g_closed_checked(lambda, x);
        if (!g.cancellation_alarm) return g.value;
    }
    if (x <= 0.0) throw std::runtime_error("g_eval: series requires x > 0");
    return g_series(lambda, x, 50).value;
}

// ---------- root finding ----------

namespace {

// Brent's method on a sign-changing bracket.
template <class F>
double brent(F f, double a, double b, double fa, double fb, double xtol) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0) == (fb > 0)) throw std::runtime_error("brent: no sign change");
    double c = a, fc = fa, d = b - a, e = b - a;
    for (int it = 0; it < 200; ++it) {
        if ((fb > 0) == (fc > 0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        double tol1 = 2.0 * 2.2e-16 * std::fabs(b) + 0.5 * xtol;
        double xm = 0.5 * (c - b);
        if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            double s = fb / fa, p, q;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                double qq = fa / fc, r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0) q = -q;
            p = std::fabs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::fabs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
        fb = f(b);
    }
    return b;
}

std::vector<cplx> compute_roots(double lambda, int K) {
    const cplx z(-1.0 / (std::exp(1.0) * lambda), 0.0);
    std::vector<cplx> roots(2 * K + 1);
    for (int j = 0; j <= K; ++j) roots[static_cast<std::size_t>(j + K)] = 1.0 + lambert_w(j, z);
    // on-cut pairing: s_{-j} = conj(s_{j-1})
    for (int j = 1; j <= K; ++j)
        roots[static_cast<std::size_t>(K - j)] = std::conj(roots[static_cast<std::size_t>(K + j - 1)]);
    return roots;
}

void verify_solution(const SpectralSolution& sol) {
    for (int j = -sol.K; j <= sol.K; ++j) {
        cplx r = sol.root(j);
        if (std::abs(tau(sol.lambda, r)) > 1e-10)
            throw std::runtime_error("principal_lambda: root residual exceeds 1e-10 at branch " +
                                     std::to_string(j));
    }
    for (int j = 0; j < sol.K; ++j) {
        cplx a = sol.root(j), b = sol.root(-j - 1);
        if (!(a.real() == b.real() && a.imag() == -b.imag()))
            throw std::runtime_error("principal_lambda: conjugate pairing violated");
    }
}

double g_at_root_scan(double lambda, double x) {
    // evaluation used by the lambda scan: closed form is exact enough for
    // x <= 12 at any lambda; the series handles larger intervals
    if (x <= 12.0) return g_closed_checked(lambda, x).value;
    return g_series(lambda, x, 50).value;
}

} // namespace

SpectralSolution principal_lambda(double H, int K) {
    if (!(H > 0.0)) throw std::domain_error("principal_lambda: H must be positive");
    if (K < 1) throw std::domain_error("principal_lambda: K must be >= 1");
    SpectralSolution sol;
    sol.H = H;
    sol.K = K;
    if (H <= 1.0) {
        sol.lambda = H * std::exp(-1.0);
    } else {
        const double x = H + 1.0;
        const double step = 1.0 / (4.0 * std::ceil(H));
        double hi = 1.0, fhi = g_at_root_scan(1.0, x);
        double lo = hi, flo = fhi;
        bool found = false;
        while (lo > step * 0.5) {
            lo = hi - step;
            flo = g_at_root_scan(lo, x);
            if ((flo > 0) != (fhi > 0) || flo == 0.0) {
                found = true;
                break;
            }
            hi = lo;
            fhi = flo;
        }
        if (!found) throw std::runtime_error("principal_lambda: no sign change of g(H+1) in (0,1)");
        sol.lambda = brent([&](double l) { return g_at_root_scan(l, x); }, lo, hi, flo, fhi, 1e-13);
    }
    sol.delta = -std::log(sol.lambda);
    sol.roots = compute_roots(sol.lambda, K);
    verify_solution(sol);
    return sol;
}

std::vector<double> real_eigenvalues(double H, int max_count) {
    if (!(H > 0.0)) throw std::domain_error("real_eigenvalues: H must be positive");
    std::vector<double> out;
    if (H <= 1.0) {
        out.push_back(H * std::exp(-1.0));
        return out;
    }
    const double x = H + 1.0;
    const double step = 1.0 / (8.0 * std::ceil(H));
    double hi = 1.0, fhi = g_at_root_scan(1.0, x);
    while (hi > step && static_cast<int>(out.size()) < max_count) {
        double lo = hi - step;
        if (lo < step * 0.25) break;
        double flo = g_at_root_scan(lo, x);
        if ((flo > 0) != (fhi > 0) || flo == 0.0)
            out.push_back(brent([&](double l) { return g_at_root_scan(l, x); }, lo, hi, flo, fhi, 1e-13));
        hi = lo;
        fhi = flo;
    }
    return out;
}

// ---------- quadrature ----------

namespace {

struct GaussLegendre {
    std::vector<double> nodes;   // on (-1, 1)
    std::vector<double> weights;
};

GaussLegendre gauss_legendre(int n) {
    GaussLegendre gl;
    gl.nodes.resize(n);
    gl.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            double dp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
            double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
        }
        double dp = n * (x * p0 - p1) / (x * x - 1.0);
        gl.nodes[i] = x;
        gl.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return gl;
}

// integrate f over [a,b] with panels split at the interior points of `cuts`
template <class F>
double panel_integrate(F f, double a, double b, const std::vector<double>& cuts,
                       const GaussLegendre& gl) {
    if (b <= a) return 0.0;
    std::vector<double> pts{a, b};
    for (double c : cuts)
        if (c > a + 1e-14 && c < b - 1e-14) pts.push_back(c);
    std::sort(pts.begin(), pts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double lo = pts[i], hi = pts[i + 1];
        double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        double s = 0.0;
        for (std::size_t j = 0; j < gl.nodes.size(); ++j)
            s += gl.weights[j] * f(mid + half * gl.nodes[j]);
        total += s * half;
    }
    return total;
}

std::vector<double> integer_cuts(double limit) {
    std::vector<double> cuts;
    for (int m = 1; m < static_cast<int>(std::ceil(limit)) + 1; ++m)
        cuts.push_back(static_cast<double>(m));
    return cuts;
}

} // namespace

double eigen_residual(double lambda, double H, int quad_points) {
    if (!(H > 0.0)) throw std::domain_error("eigen_residual: H must be positive");
    if (quad_points < 4) throw std::domain_error("eigen_residual: quad_points too small");
    GaussLegendre gl = gauss_legendre(quad_points);
    std::vector<double> cuts = integer_cuts(H);

    auto g = [&](double u) { return g_eval(lambda, u); };
    const int grid = 201;
    double max_resid = 0.0, max_g = 0.0;
    for (int i = 0; i < grid; ++i) {
        double x = H * i / (grid - 1);
        double a = std::max(0.0, x - 1.0);
        double integral = panel_integrate([&](double u) { return g(u) * std::exp(-u); }, a, H, cuts, gl);
        double resid = std::fabs(lambda * g(x) - std::exp(x - 1.0) * integral);
        max_resid = std::max(max_resid, resid);
        max_g = std::max(max_g, std::fabs(g(x)));
    }
    if (max_g == 0.0) throw std::runtime_error("eigen_residual: g vanished on the grid");
    return max_resid / max_g;
}

double right_eigen_residual(double lambda, double H, int quad_points) {
    if (!(H > 0.0)) throw std::domain_error("right_eigen_residual: H must be positive");
    GaussLegendre gl = gauss_legendre(quad_points);
    // f(y) = g(H - y); kinks of g at integers map to y in H - Z
    std::vector<double> cuts;
    for (int m = 0; m <= static_cast<int>(std::ceil(H)); ++m) {
        double c = H - m;
        if (c > 0.0 && c < H) cuts.push_back(c);
    }
    auto f = [&](double y) { return g_eval(lambda, H - y); };
    const int grid = 201;
    double max_resid = 0.0, max_f = 0.0;
    for (int i = 0; i < grid; ++i) {
        double x = H * i / (grid - 1);
        double b = std::min(H, x + 1.0);
        double integral =
            panel_integrate([&](double y) { return f(y) * std::exp(y - x - 1.0); }, 0.0, b, cuts, gl);
        double resid = std::fabs(lambda * f(x) - integral);
        max_resid = std::max(max_resid, resid);
        max_f = std::max(max_f, std::fabs(f(x)));
    }
    return max_resid / max_f;
}

std::function<double(double)> right_eigenfunction(double lambda, double H) {
    double resid = right_eigen_residual(lambda, H);
    if (!(resid <= 1e-8))
        throw std::runtime_error("right_eigenfunction: residual " + std::to_string(resid) +
                                 " exceeds 1e-8; (lambda, H) is not an eigenpair");
    return [lambda, H](double x) { return g_eval(lambda, H - x); };
}

double reflected_inner_product(double lambda1, double lambda2, double H, int quad_points) {
    GaussLegendre gl = gauss_legendre(quad_points);
    std::vector<double> cuts = integer_cuts(H);
    for (int m = 0; m <= static_cast<int>(std::ceil(H)); ++m) {
        double c = H - m;
        if (c > 0.0 && c < H) cuts.push_back(c);
    }
    return panel_integrate(
        [&](double x) { return g_eval(lambda1, x) * g_eval(lambda2, H - x); }, 0.0, H, cuts, gl);
}

double height_for_delta(double delta) {
    if (!(delta > 0.0 && delta <= 0.05))
        throw std::domain_error("height_for_delta: delta must be in (0, 0.05]");
    const double lambda = std::exp(-delta);
    const double x_prime = 3.0;
    // no sign change of g on [0, x'] (numeric scan; g(0) = 1)
    double prev = g_eval(lambda, 0.0 + 1e-12);
    for (double x = 0.01; x <= x_prime + 1e-9; x += 0.01) {
        double v = g_eval(lambda, x);
        if ((v > 0) != (prev > 0))
            throw std::runtime_error("height_for_delta: unexpected sign change of g below x'");
        prev = v;
    }
    // first zero beyond x'
    double a = x_prime, fa = g_series(lambda, a, 50).value;
    double xs = 0.0;
    bool found = false;
    for (double b = a + 0.25; b < kPi / std::sqrt(2.0 * delta) + 8.0; b += 0.25) {
        double fb = g_series(lambda, b, 50).value;
        if ((fb > 0) != (fa > 0) || fb == 0.0) {
            xs = brent([&](double x) { return g_series(lambda, x, 50).value; }, a, b, fa, fb, 1e-12);
            found = true;
            break;
        }
        a = b;
        fa = fb;
    }
    if (!found) throw std::runtime_error("height_for_delta: no zero of g found beyond x'");
    double H = xs - 1.0;
    double check = principal_lambda(H).delta;
    if (std::fabs(check - delta) > 1e-10)
        throw std::runtime_error("height_for_delta: inverse consistency failed: " +
                                 std::to_string(check) + " vs " + std::to_string(delta));
    return H;
}

std::pair<double, double> c_critical(std::uint64_t n) {
    if (n < 8) throw std::domain_error("c_critical: need n >= 8");
    const double logn = std::log(static_cast<double>(n));
    double lambda = principal_lambda(logn).lambda;
    double c_circ = 1.0 / (std::exp(1.0) * lambda);
    double c_star = std::exp(-1.0) * (1.0 + kPi * kPi / (2.0 * logn * logn));
    return {c_circ, c_star};
}

} // namespace mmwc::spectral
