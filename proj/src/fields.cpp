#include "halfspace/fields.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>

#include "halfspace/errors.hpp"
#include "halfspace/spectral.hpp"

namespace halfspace {

// ---------------------------------------------------------------- grid

TensorGrid::TensorGrid(int n_, double L_, double H_, std::vector<int> counts_)
    : n(n_), L(L_), H(H_), counts(std::move(counts_)) {
    validate();
}

TensorGrid TensorGrid::plane(double L, double H, int n_tangential, int n_normal) {
    return TensorGrid(2, L, H, {n_tangential, n_normal});
}

void TensorGrid::validate() const {
    if (n != 2 && n != 3) throw DomainError("grid dimension must be 2 or 3");
    if (int(counts.size()) != n) throw DomainError("grid needs one count per axis");
    for (int c : counts)
        if (c < 8) throw DomainError("grid counts must be >= 8");
    if (!(L > 0) || !(H > 0)) throw DomainError("grid extents must be positive");
}

std::size_t TensorGrid::node_count() const {
    std::size_t s = 1;
    for (int c : counts) s *= std::size_t(c);
    return s;
}

double TensorGrid::min_spacing() const { return std::min(tangential_spacing(), normal_spacing()); }

void TensorGrid::coords(std::size_t node, double* out) const {
    int nn = counts.back();
    out[n - 1] = normal_spacing() * double(node % nn);
    std::size_t rest = node / nn;
    double ht = tangential_spacing();
    for (int a = n - 2; a >= 0; --a) {
        out[a] = -L + ht * double(rest % counts[a]);
        rest /= counts[a];
    }
}

Vec TensorGrid::coords(std::size_t node) const {
    Vec x(n);
    coords(node, x.data());
    return x;
}

double TensorGrid::cell_weight(std::size_t node) const {
    int nn = counts.back();
    int k = int(node % nn);
    double w = normal_spacing() * ((k == 0 || k == nn - 1) ? 0.5 : 1.0);
    for (int a = 0; a < n - 1; ++a) w *= tangential_spacing();
    return w;
}

bool TensorGrid::same_as(const TensorGrid& o) const {
    return n == o.n && L == o.L && H == o.H && counts == o.counts;
}

// ---------------------------------------------------------------- field

Field::Field(const TensorGrid& g, int comps) : grid(g), components(comps) {
    grid.validate();
    if (comps < 1) throw DomainError("field needs at least one component");
    values.assign(grid.node_count() * std::size_t(comps), 0.0);
}

std::vector<double> Field::component(int c) const {
    std::size_t nodes = grid.node_count();
    std::vector<double> v(nodes);
    for (std::size_t i = 0; i < nodes; ++i) v[i] = values[i * components + c];
    return v;
}

void Field::set_component(int c, const std::vector<double>& v) {
    std::size_t nodes = grid.node_count();
    for (std::size_t i = 0; i < nodes; ++i) values[i * components + c] = v[i];
}

double Field::max_abs() const {
    double m = 0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double Field::max_norm() const {
    double m = 0;
    std::size_t nodes = grid.node_count();
    for (std::size_t i = 0; i < nodes; ++i) {
        double s = 0;
        for (int c = 0; c < components; ++c) s += values[i * components + c] * values[i * components + c];
        m = std::max(m, s);
    }
    return std::sqrt(m);
}

namespace {
void check_compatible(const Field& a, const Field& b) {
    if (!a.grid.same_as(b.grid) || a.components != b.components) throw DomainError("incompatible fields");
}
}  // namespace

Field& Field::operator+=(const Field& o) {
    check_compatible(*this, o);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
    return *this;
}

Field& Field::operator-=(const Field& o) {
    check_compatible(*this, o);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
    return *this;
}

Field& Field::operator*=(double s) {
    for (double& v : values) v *= s;
    return *this;
}

bool Field::all_finite() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

Field sample(const TensorGrid& g, int comps, const std::function<Vec(const Vec&)>& f) {
    Field out(g, comps);
    Vec x(g.n);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        g.coords(i, x.data());
        Vec v = f(x);
        if (int(v.size()) != comps) throw DomainError("sample function returned wrong component count");
        for (int c = 0; c < comps; ++c) out.values[i * comps + c] = v[c];
    }
    return out;
}

// ---------------------------------------------------------------- norms

WeightedNormSpec WeightedNormSpec::Lq(double q) { return {NormFamily::Lq, q, 0, 0, 0}; }
WeightedNormSpec WeightedNormSpec::Ya(double a) { return {NormFamily::Ya, 2, a, 0, 0}; }
WeightedNormSpec WeightedNormSpec::Za(double a) { return {NormFamily::Za, 2, a, 0, 0}; }
WeightedNormSpec WeightedNormSpec::Yab(double a, double b) { return {NormFamily::Yab, 2, a, b, 0}; }
WeightedNormSpec WeightedNormSpec::Zaal(double a, double al) { return {NormFamily::Zaal, 2, a, 0, al}; }
WeightedNormSpec WeightedNormSpec::Lq_uloc(double q) { return {NormFamily::Lq_uloc, q, 0, 0, 0}; }

void WeightedNormSpec::validate() const {
    if ((family == NormFamily::Lq || family == NormFamily::Lq_uloc) && !(q >= 1))
        throw DomainError("q must lie in [1, inf]");
    if (a < 0 || b < 0 || alpha < 0) throw DomainError("weights must be nonnegative");
    if (family == NormFamily::Zaal && alpha > 1) throw DomainError("Z_{a,alpha} needs alpha <= 1");
}

std::string WeightedNormSpec::name() const {
    auto q_str = [&] { return std::isinf(q) ? std::string("inf") : format_double(q); };
    switch (family) {
        case NormFamily::Lq: return "L" + q_str();
        case NormFamily::Ya: return "Y_" + format_double(a);
        case NormFamily::Za: return "Z_" + format_double(a);
        case NormFamily::Yab: return "Y_" + format_double(a) + "," + format_double(b);
        case NormFamily::Zaal: return "Z_" + format_double(a) + "," + format_double(alpha);
        case NormFamily::Lq_uloc: return "L" + q_str() + "_uloc";
    }
    return "?";
}

namespace {

std::vector<double> magnitudes(const Field& f) {
    std::size_t nodes = f.grid.node_count();
    std::vector<double> m(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        double s = 0;
        for (int c = 0; c < f.components; ++c) s += f.values[i * f.components + c] * f.values[i * f.components + c];
        m[i] = std::sqrt(s);
    }
    return m;
}

double uloc_norm(const Field& f, double q) {
    const TensorGrid& g = f.grid;
    std::vector<double> mag = magnitudes(f);
    int nn = g.normal_count();
    double ht = g.tangential_spacing(), hn = g.normal_spacing();
    int rt = int(std::ceil(1.0 / ht)), rn = int(std::ceil(1.0 / hn));
    std::vector<double> cy;
    for (double c = -g.L; c < g.L - 1e-12; c += 0.5) cy.push_back(c);
    std::vector<double> cn;
    for (double c = 0; c <= g.H + 1e-12; c += 0.5) cn.push_back(c);
    bool sup = std::isinf(q);
    double best = 0;
    int n3 = g.n == 3 ? g.counts[1] : 1;
    std::vector<double> cz = g.n == 3 ? cy : std::vector<double>{0.0};
    for (double c1 : cy)
        for (double c2 : cz)
            for (double c3 : cn) {
                double acc = 0;
                int i1c = int(std::lround((c1 + g.L) / ht));
                int i2c = int(std::lround((c2 + g.L) / ht));
                int kc = int(std::lround(c3 / hn));
                for (int d1 = -rt; d1 <= rt; ++d1) {
                    int i1 = ((i1c + d1) % g.counts[0] + g.counts[0]) % g.counts[0];
                    double x1 = d1 * ht + (i1c * ht - (c1 + g.L));
                    for (int d2 = (g.n == 3 ? -rt : 0); d2 <= (g.n == 3 ? rt : 0); ++d2) {
                        int i2 = g.n == 3 ? ((i2c + d2) % n3 + n3) % n3 : 0;
                        double x2 = g.n == 3 ? d2 * ht + (i2c * ht - (c2 + g.L)) : 0.0;
                        for (int k = std::max(0, kc - rn); k <= std::min(nn - 1, kc + rn); ++k) {
                            double x3 = k * hn - c3;
                            if (x1 * x1 + x2 * x2 + x3 * x3 > 1.0) continue;
                            std::size_t node = (std::size_t(i1) * n3 + i2) * nn + k;
                            double v = mag[node];
                            if (sup) acc = std::max(acc, v);
                            else acc += g.cell_weight(node) * std::pow(v, q);
                        }
                    }
                }
                best = std::max(best, sup ? acc : std::pow(acc, 1.0 / q));
            }
    return best;
}

}  // namespace

double weighted_norm(const Field& f, const WeightedNormSpec& spec) {
    spec.validate();
    if (!f.all_finite()) throw DomainError("field has non-finite values");
    const TensorGrid& g = f.grid;
    std::vector<double> mag = magnitudes(f);
    std::size_t nodes = g.node_count();
    if (spec.family == NormFamily::Lq) {
        if (std::isinf(spec.q)) return *std::max_element(mag.begin(), mag.end());
        double s = 0;
        for (std::size_t i = 0; i < nodes; ++i) s += g.cell_weight(i) * std::pow(mag[i], spec.q);
        return std::pow(s, 1.0 / spec.q);
    }
    if (spec.family == NormFamily::Lq_uloc) return uloc_norm(f, spec.q);
    double best = 0;
    Vec x(g.n);
    for (std::size_t i = 0; i < nodes; ++i) {
        g.coords(i, x.data());
        double r2 = 0;
        for (double v : x) r2 += v * v;
        double xn = x[g.n - 1];
        double w;
        switch (spec.family) {
            case NormFamily::Ya: w = std::pow(japanese(r2), spec.a); break;
            case NormFamily::Za: w = std::pow(japanese(xn * xn), spec.a); break;
            case NormFamily::Yab: w = std::pow(japanese(r2), spec.a) * std::pow(japanese(xn * xn), spec.b); break;
            case NormFamily::Zaal:
                if (spec.alpha > 0 && xn == 0) continue;
                w = std::pow(japanese(r2), spec.a) * std::pow(japanese(xn * xn), spec.alpha) /
                    std::pow(xn, spec.alpha);
                break;
            default: w = 1;
        }
        best = std::max(best, mag[i] * w);
    }
    return best;
}

// ---------------------------------------------------------------- differences

namespace {

// d/dx_axis of one component stored contiguously (node order).
std::vector<double> partial(const std::vector<double>& f, const TensorGrid& g, int axis, DiffScheme scheme) {
    std::size_t nodes = g.node_count();
    std::vector<double> out(nodes);
    int nn = g.normal_count();
    if (scheme == DiffScheme::HighOrder) {
        if (g.n != 2) throw DomainError("high-order differences are implemented for n = 2");
        auto sp = Spectral2D::for_grid(g);
        if (axis == 1) {
            std::vector<double> col(nn), dcol(nn);
            for (std::size_t i = 0; i < std::size_t(g.counts[0]); ++i)
                sp->normal_derivative(&f[i * nn], &out[i * nn]);
            return out;
        }
        std::vector<cplx> s(std::size_t(sp->modes()) * nn);
        sp->forward(f.data(), s.data());
        for (int m = 0; m < sp->modes(); ++m) {
            cplx mult = sp->is_nyquist(m) ? cplx(0) : cplx(0, sp->xi(m));
            for (int k = 0; k < nn; ++k) s[std::size_t(m) * nn + k] *= mult;
        }
        sp->inverse(s.data(), out.data());
        return out;
    }
    if (axis == g.n - 1) {
        double h = g.normal_spacing();
        for (std::size_t base = 0; base < nodes; base += nn) {
            const double* c = &f[base];
            double* o = &out[base];
            o[0] = (-3 * c[0] + 4 * c[1] - c[2]) / (2 * h);
            for (int k = 1; k + 1 < nn; ++k) o[k] = (c[k + 1] - c[k - 1]) / (2 * h);
            o[nn - 1] = (3 * c[nn - 1] - 4 * c[nn - 2] + c[nn - 3]) / (2 * h);
        }
        return out;
    }
    // Tangential, periodic centered.
    double h = g.tangential_spacing();
    std::size_t stride = nn;
    for (int a = g.n - 2; a > axis; --a) stride *= g.counts[a];
    std::size_t cnt = g.counts[axis];
    for (std::size_t i = 0; i < nodes; ++i) {
        std::size_t idx = (i / stride) % cnt;
        std::size_t up = i + ((idx + 1) % cnt) * stride - idx * stride;
        std::size_t dn = i + ((idx + cnt - 1) % cnt) * stride - idx * stride;
        out[i] = (f[up] - f[dn]) / (2 * h);
    }
    return out;
}

}  // namespace

Field divergence(const Field& u, DiffScheme scheme) {
    const TensorGrid& g = u.grid;
    if (u.components != g.n) throw DomainError("divergence needs n components");
    Field d(g, 1);
    for (int a = 0; a < g.n; ++a) {
        std::vector<double> p = partial(u.component(a), g, a, scheme);
        for (std::size_t i = 0; i < p.size(); ++i) d.values[i] += p[i];
    }
    return d;
}

Field gradient(const Field& f, DiffScheme scheme) {
    const TensorGrid& g = f.grid;
    Field out(g, f.components * g.n);
    for (int c = 0; c < f.components; ++c) {
        std::vector<double> comp = f.component(c);
        for (int a = 0; a < g.n; ++a) out.set_component(c * g.n + a, partial(comp, g, a, scheme));
    }
    return out;
}

double TraceField::max_abs() const {
    double m = 0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

TraceField boundary_trace(const Field& u) {
    TraceField t;
    int nn = u.grid.normal_count();
    t.points = u.grid.tangential_count();
    t.components = u.components;
    t.values.resize(t.points * u.components);
    for (std::size_t p = 0; p < t.points; ++p)
        for (int c = 0; c < u.components; ++c) t.values[p * u.components + c] = u.at(p * nn, c);
    return t;
}

SolenoidalResidual solenoidal_residual(const Field& u) {
    SolenoidalResidual r;
    double scale = u.max_norm();
    if (scale == 0) return r;
    Field d = divergence(u, u.grid.n == 2 ? DiffScheme::HighOrder : DiffScheme::Centered2);
    r.divergence = u.grid.min_spacing() * d.max_abs() / scale;
    TraceField tr = boundary_trace(u);
    double m = 0;
    for (std::size_t p = 0; p < tr.points; ++p) m = std::max(m, std::abs(tr.values[p * tr.components + u.grid.n - 1]));
    r.normal_trace = m / scale;
    return r;
}

// ---------------------------------------------------------------- projection

Field leray_project(const Field& u, Diagnostics* diag) {
    const TensorGrid& g = u.grid;
    if (g.n != 2 || u.components != 2) throw DomainError("leray_project is implemented for n = 2 vector fields");
    if (!u.all_finite()) throw DomainError("field has non-finite values");
    auto sp = Spectral2D::for_grid(g);
    int nn = sp->nn();
    if (diag) {
        double interior = u.max_norm(), edge = 0;
        for (std::size_t node = 0; node < g.node_count(); ++node) {
            std::size_t i = node / nn;
            int k = int(node % nn);
            if (i == 0 || k == nn - 1)
                edge = std::max(edge, std::hypot(u.at(node, 0), u.at(node, 1)));
        }
        if (interior > 0 && edge > 1e-6 * interior)
            diag->warnings.push_back("leray_project: field does not decay at the truncation boundary (ratio " +
                                     format_double(edge / interior) + ")");
    }
    auto s = to_spectral(*sp, u);
    std::vector<cplx> A1(nn), B1(nn), A2(nn), B2(nn);
    for (int m = 0; m < sp->modes(); ++m) {
        cplx* u1 = &s[0][std::size_t(m) * nn];
        cplx* u2 = &s[1][std::size_t(m) * nn];
        if (sp->is_nyquist(m)) {
            std::fill(u1, u1 + nn, cplx(0));
            std::fill(u2, u2 + nn, cplx(0));
            continue;
        }
        if (m == 0) {
            std::fill(u2, u2 + nn, cplx(0));
            continue;
        }
        double xi = sp->xi(m), lam = xi;
        sp->exp_forward(m, u1, A1.data());
        sp->exp_backward(m, u1, B1.data());
        sp->exp_forward(m, u2, A2.data());
        sp->exp_backward(m, u2, B2.data());
        cplx b10 = B1[0], b20 = B2[0];
        cplx ixi(0, xi);
        for (int k = 0; k < nn; ++k) {
            double e = std::exp(-lam * k * g.normal_spacing());
            cplx phi_t = 0.5 * xi * (A1[k] + B1[k] + e * b10) + 0.5 * ixi * (A2[k] - B2[k] - e * b20);
            cplx phi_n = 0.5 * ixi * (A1[k] - B1[k] + e * b10) +
                         0.5 * (2.0 * u2[k] - lam * (A2[k] + B2[k]) + lam * e * b20);
            u1[k] -= phi_t;
            u2[k] -= phi_n;
        }
    }
    return from_spectral(*sp, g, s);
}

// ---------------------------------------------------------------- io

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::string metadata(const Field& f) {
    std::ostringstream os;
    os << "# halfspace-field n=" << f.grid.n << " L=" << format_double(f.grid.L) << " H=" << format_double(f.grid.H)
       << " counts=";
    for (std::size_t a = 0; a < f.grid.counts.size(); ++a) os << (a ? "," : "") << f.grid.counts[a];
    os << " components=" << f.components;
    return os.str();
}

Field parse_metadata(const std::string& line) {
    std::istringstream is(line);
    std::string tok;
    int n = 0, comps = 0;
    double L = 0, H = 0;
    std::vector<int> counts;
    while (is >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "n") n = std::stoi(val);
        else if (key == "L") L = std::stod(val);
        else if (key == "H") H = std::stod(val);
        else if (key == "components") comps = std::stoi(val);
        else if (key == "counts") {
            std::istringstream cs(val);
            std::string c;
            while (std::getline(cs, c, ',')) counts.push_back(std::stoi(c));
        }
    }
    return Field(TensorGrid(n, L, H, counts), comps);
}

}  // namespace

void write_csv(const Field& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path);
    os << metadata(f) << "\n";
    for (int a = 0; a < f.grid.n; ++a) os << "x" << a + 1 << ",";
    for (int c = 0; c < f.components; ++c) os << "c" << c << (c + 1 < f.components ? "," : "\n");
    Vec x(f.grid.n);
    for (std::size_t i = 0; i < f.grid.node_count(); ++i) {
        f.grid.coords(i, x.data());
        for (double v : x) os << format_double(v) << ",";
        for (int c = 0; c < f.components; ++c)
            os << format_double(f.at(i, c)) << (c + 1 < f.components ? "," : "\n");
    }
    if (!os) throw IoError("write failed for " + path);
}

Field read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);
    std::string line;
    std::getline(is, line);
    Field f = parse_metadata(line);
    std::getline(is, line);
    for (std::size_t i = 0; i < f.grid.node_count(); ++i) {
        if (!std::getline(is, line)) throw IoError("truncated field file " + path);
        std::istringstream ls(line);
        std::string cell;
        for (int a = 0; a < f.grid.n; ++a) std::getline(ls, cell, ',');
        for (int c = 0; c < f.components; ++c) {
            std::getline(ls, cell, ',');
            f.at(i, c) = std::stod(cell);
        }
    }
    return f;
}

void write_binary(const Field& f, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path);
    auto put_i = [&](std::int32_t v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); };
    auto put_d = [&](double v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); };
    os.write("HSFD", 4);
    put_i(1);
    put_i(f.grid.n);
    put_d(f.grid.L);
    put_d(f.grid.H);
    for (int c : f.grid.counts) put_i(c);
    put_i(f.components);
    os.write(reinterpret_cast<const char*>(f.values.data()), std::streamsize(f.values.size() * sizeof(double)));
    if (!os) throw IoError("write failed for " + path);
}

Field read_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (std::string(magic, 4) != "HSFD") throw IoError("not a field file: " + path);
    auto get_i = [&] { std::int32_t v; is.read(reinterpret_cast<char*>(&v), sizeof v); return int(v); };
    auto get_d = [&] { double v; is.read(reinterpret_cast<char*>(&v), sizeof v); return v; };
    if (get_i() != 1) throw IoError("unsupported field file version");
    int n = get_i();
    double L = get_d(), H = get_d();
    if (n != 2 && n != 3) throw IoError("corrupt field file: " + path);
    std::vector<int> counts(n);
    for (int& c : counts) c = get_i();
    int comps = get_i();
    Field f(TensorGrid(n, L, H, counts), comps);
    is.read(reinterpret_cast<char*>(f.values.data()), std::streamsize(f.values.size() * sizeof(double)));
    if (!is) throw IoError("truncated field file " + path);
    return f;
}

}  // namespace halfspace
