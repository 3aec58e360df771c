// halfspace: kernel evaluation, estimate sweeps, decay experiments, Picard solves, plots.

#include <fcntl.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "halfspace/errors.hpp"
#include "halfspace/green_tensor.hpp"
#include "halfspace/kernels.hpp"
#include "halfspace/mild_solvers.hpp"
#include "halfspace/report.hpp"
#include "halfspace/verifier.hpp"

namespace fs = std::filesystem;
using namespace halfspace;

namespace {

/// Invalid user input; exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw UsageError(where + " must be a JSON object");
    for (const auto& [k, v] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok |= k == a;
        if (!ok) throw UsageError("unknown key '" + k + "' in " + where);
    }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        if constexpr (std::is_same_v<T, double>) return number_from_json(j.at(key));
        else return j.at(key).get<T>();
    } catch (const std::exception& e) {
        throw UsageError(std::string("bad value for '") + key + "': " + e.what());
    }
}

std::vector<double> numbers_of(const Json& j, const char* key, std::vector<double> fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_array()) throw UsageError(std::string("'") + key + "' must be an array");
    std::vector<double> v;
    for (const auto& e : j.at(key)) v.push_back(number_from_json(e));
    return v;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "inf") {
            out.push_back(INFINITY);
            continue;
        }
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("not a number: '" + item + "'");
        }
    }
    return out;
}

Json load_config(const std::string& path) {
    if (path.empty()) return Json::object();
    std::string text = read_text(path);
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw UsageError("config " + path + ": " + e.what());
    }
}

/// Exclusive ownership of the output directory for the lifetime of the object.
class OutputLock {
public:
    explicit OutputLock(const std::string& dir) : path_((fs::path(dir) / ".lock").string()) {
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
        fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0) throw IoError("output directory " + dir + " is locked (remove " + path_ + " if stale)");
    }
    ~OutputLock() {
        ::close(fd_);
        ::unlink(path_.c_str());
    }
    OutputLock(const OutputLock&) = delete;
    OutputLock& operator=(const OutputLock&) = delete;

private:
    std::string path_;
    int fd_ = -1;
};

std::string out_file(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

Json envelope(const std::string& command, const Json& config) {
    Json j;
    j["command"] = command;
    j["config"] = config;
    j["config_hash"] = config_hash(config);
    return j;
}

// ------------------------------------------------------------------------ kernel eval

struct KernelArgs {
    std::string kernel;
    int n = 2;
    std::string x, y, deriv;
    std::optional<double> xn, yn;
    double t = 1.0;
    int i = 1, j = 1;
    std::string points;
};

HalfSpacePoint make_point(const std::string& list, std::optional<double> normal, int n, const char* name) {
    std::vector<double> c = list.empty() ? std::vector<double>{} : parse_list(list);
    if (normal) {
        if (c.empty()) c.assign(n - 1, 0.0);
        if (int(c.size()) != n - 1) throw UsageError(std::string("--") + name + " needs n-1 tangential values with --" + name + "n");
        return HalfSpacePoint(c, *normal);
    }
    if (int(c.size()) != n) throw UsageError(std::string("--") + name + " needs " + std::to_string(n) + " coordinates");
    double xn = c.back();
    c.pop_back();
    return HalfSpacePoint(c, xn);
}

MultiIndex parse_deriv(const std::string& s) {
    MultiIndex d;
    if (s.empty()) return d;
    auto v = parse_list(s);
    if (v.size() != 4) throw UsageError("--deriv takes l,k,q,m");
    for (double e : v)
        if (e < 0 || e != std::floor(e)) throw UsageError("derivative orders must be non-negative integers");
    d.l = int(v[0]), d.k = int(v[1]), d.q = int(v[2]), d.m = int(v[3]);
    return d;
}

double eval_kernel(const KernelArgs& a, const HalfSpacePoint& x, const HalfSpacePoint& y, double t) {
    MultiIndex d = parse_deriv(a.deriv);
    const std::string& k = a.kernel;
    if (k == "gamma") {
        if (d.q != 0) throw UsageError("gamma has no y_n derivative");
        Vec xc = x.coords();
        return heat_kernel(xc, t, d);
    }
    if (k == "laplace") return laplace_fundamental(x.coords());
    if (k == "gn") return green_heat_N(x, y, t, d);
    if (k == "gd") return green_heat_D(x, y, t, d);
    TensorIndex idx{a.i, a.j};
    if (k == "gstar") return d.total() == 0 ? g_star(idx, x, y, t).value : g_star_deriv(idx, x, y, t, d).value;
    if (k == "gbreve") {
        if (d.total() != 0) throw UsageError("gbreve is evaluated without derivatives");
        return g_breve(idx, x, y, t).value;
    }
    throw UsageError("unknown kernel '" + k + "' (gamma, laplace, gn, gd, gstar, gbreve)");
}

int cmd_kernel_eval(const KernelArgs& a) {
    if (a.n != 2 && a.n != 3) throw UsageError("--n must be 2 or 3");
    if (a.points.empty()) {
        HalfSpacePoint x = make_point(a.x, a.xn, a.n, "x");
        HalfSpacePoint y = (a.y.empty() && !a.yn) ? HalfSpacePoint(Vec(a.n - 1, 0.0), 0.0) : make_point(a.y, a.yn, a.n, "y");
        std::cout << format_double(eval_kernel(a, x, y, a.t)) << "\n";
        return 0;
    }
    // CSV rows x_1..x_n, y_1..y_n, t
    std::stringstream in(read_text(a.points));
    std::string line;
    std::cout << "row,value\n";
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto v = parse_list(line);
        if (int(v.size()) != 2 * a.n + 1) throw UsageError("point rows need 2n+1 values");
        HalfSpacePoint x(Vec(v.begin(), v.begin() + a.n - 1), v[a.n - 1]);
        HalfSpacePoint y(Vec(v.begin() + a.n, v.begin() + 2 * a.n - 1), v[2 * a.n - 1]);
        std::cout << row++ << ',' << format_double(eval_kernel(a, x, y, v[2 * a.n])) << "\n";
    }
    return 0;
}

// ----------------------------------------------------------------------------- verify

std::vector<EstimateReport> run_lemma(const std::string& id, const Json& sweep) {
    bool def = sweep.empty();
    if (id == "lemma21") {
        if (def) return {check_lemma21(lemma21_default_sweep())};
        check_keys(sweep, {"cases"}, "sweep");
        std::vector<RadialCase> cs;
        for (const auto& c : sweep.at("cases")) {
            check_keys(c, {"L", "a", "d", "k"}, "case");
            cs.push_back({number_from_json(c.at("L")), number_from_json(c.at("a")), number_from_json(c.at("d")),
                          number_from_json(c.at("k"))});
        }
        return {check_lemma21(cs)};
    }
    if (id == "lemma22") {
        if (def) return {check_lemma22(lemma22_default_sweep())};
        check_keys(sweep, {"cases"}, "sweep");
        std::vector<TwoCenterCase> cs;
        for (const auto& c : sweep.at("cases")) {
            check_keys(c, {"d", "a", "b", "k", "m", "x"}, "case");
            cs.push_back({c.at("d").get<int>(), number_from_json(c.at("a")), number_from_json(c.at("b")),
                          number_from_json(c.at("k")), number_from_json(c.at("m")), number_from_json(c.at("x"))});
        }
        return {check_lemma22(cs)};
    }
    if (id == "lemma22d1") {
        if (def) return {check_lemma22d1(lemma22d1_default_sweep())};
        check_keys(sweep, {"cases"}, "sweep");
        std::vector<LineCase> cs;
        for (const auto& c : sweep.at("cases")) {
            check_keys(c, {"k", "m", "A"}, "case");
            cs.push_back({number_from_json(c.at("k")), number_from_json(c.at("m")), number_from_json(c.at("A"))});
        }
        return {check_lemma22d1(cs)};
    }
    if (id == "log") {
        check_keys(sweep, {"k", "r", "t"}, "sweep");
        auto r = numbers_of(sweep, "r", {0.01, 0.1, 1, 10, 100, 1000});
        auto t = numbers_of(sweep, "t", {0.01, 0.1, 1, 10, 100, 1e4});
        if (sweep.contains("k")) return {check_log_lemma(number_from_json(sweep.at("k")), r, t)};
        std::vector<EstimateReport> out;
        for (double k : {0.0, 1.0, 2.0, 3.0}) out.push_back(check_log_lemma(k, r, t));
        return out;
    }
    if (id == "heat_decay") {
        check_keys(sweep, {"k", "a", "x", "t"}, "sweep");
        auto x = numbers_of(sweep, "x", {0, 0.3, 1, 3, 10, 30, 100, 300, 1000});
        auto t = numbers_of(sweep, "t", {0.01, 0.1, 1, 10, 100, 1000, 1e4});
        if (sweep.contains("k") != sweep.contains("a")) throw UsageError("heat_decay sweep needs both k and a");
        if (sweep.contains("k")) return {check_heat_decay_conv(sweep.at("k").get<int>(), number_from_json(sweep.at("a")), x, t)};
        std::vector<EstimateReport> out;
        for (int k = 1; k <= 3; ++k)
            for (double a : {0.5 * k, double(k), k + 1.0}) out.push_back(check_heat_decay_conv(k, a, x, t));
        return out;
    }
    throw UsageError("unknown lemma '" + id + "' (lemma21, lemma22, lemma22d1, log, heat_decay)");
}

std::vector<EstimateReport> run_bound(const std::string& id, const Json& sweep) {
    KernelKind kind;
    if (id == "gstar") kind = KernelKind::Gstar;
    else if (id == "gn") kind = KernelKind::GN;
    else if (id == "gd") kind = KernelKind::GD;
    else throw UsageError("unknown bound '" + id + "' (gstar, gn, gd)");
    check_keys(sweep, {"targets", "box", "c", "points"}, "sweep");
    SampleBox box;
    if (sweep.contains("box")) {
        const Json& b = sweep.at("box");
        check_keys(b, {"tangential", "normal", "times", "points"}, "box");
        auto tg = numbers_of(b, "tangential", {box.tangential_lo, box.tangential_hi});
        auto nm = numbers_of(b, "normal", {box.normal_lo, box.normal_hi});
        if (tg.size() != 2 || nm.size() != 2) throw UsageError("box ranges take two values");
        box.tangential_lo = tg[0], box.tangential_hi = tg[1], box.normal_lo = nm[0], box.normal_hi = nm[1];
        box.times = numbers_of(b, "times", box.times);
        box.points = get_or<int>(b, "points", box.points);
    }
    std::vector<PointwiseTarget> targets = first_order_targets(kind);
    if (sweep.contains("targets")) {
        targets.clear();
        for (const auto& t : sweep.at("targets")) {
            check_keys(t, {"i", "j", "l", "k", "q", "m"}, "target");
            PointwiseTarget p;
            p.idx = {get_or<int>(t, "i", 1), get_or<int>(t, "j", 1)};
            p.deriv.l = get_or<int>(t, "l", 0), p.deriv.k = get_or<int>(t, "k", 0);
            p.deriv.q = get_or<int>(t, "q", 0), p.deriv.m = get_or<int>(t, "m", 0);
            targets.push_back(p);
        }
    }
    double c = get_or<double>(sweep, "c", 0.125);
    std::vector<SweepResolution> res;
    if (kind == KernelKind::Gstar) {
        StripQuadrature q;
        res = {{box.points, q}, {box.points, q.refined()}};
    } else {
        res = {{box.points, {}}, {2 * box.points - 1, {}}};
    }
    return sweep_pointwise_bounds(kind, targets, box, res, c);
}

std::vector<EstimateReport> run_scaling(const std::string& id, const Json& sweep) {
    ScalingOp op;
    try {
        op = parse_scaling_op(id);
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    check_keys(sweep, {"norm", "t", "mu"}, "sweep");
    WeightedNormSpec spec;
    std::vector<double> t;
    switch (op) {
        case ScalingOp::HeatGradLq: spec = WeightedNormSpec::Lq(2); t = {0.05, 0.1, 0.2, 0.4, 0.8}; break;
        case ScalingOp::HeatLinearYa: spec = WeightedNormSpec::Ya(2); t = {0.05, 0.2, 1, 4, 16}; break;
        case ScalingOp::StokesLinearYab: spec = WeightedNormSpec::Yab(1, 0.5); t = {0.05, 0.2, 1, 4}; break;
        case ScalingOp::MixedBilinear: spec = WeightedNormSpec::Yab(1, 0.5); t = {0.01, 0.02, 0.04, 0.08, 0.16, 0.25}; break;
        case ScalingOp::BoundaryBilinear: spec = WeightedNormSpec::Zaal(1, 1); t = {0.01, 0.02, 0.04, 0.08, 0.16, 0.25}; break;
    }
    if (sweep.contains("norm")) spec = norm_from_json(sweep.at("norm"));
    t = numbers_of(sweep, "t", t);
    return {sweep_semigroup_scaling(op, spec, t, get_or<double>(sweep, "mu", 0.05))};
}

int cmd_verify(const std::string& lemma, const std::string& bound, const std::string& scaling,
               const std::string& sweep_arg, const std::string& out, long seed) {
    int chosen = !lemma.empty() + !bound.empty() + !scaling.empty();
    if (chosen != 1) throw UsageError("give exactly one of --lemma, --bound, --scaling");
    Json sweep = sweep_arg == "default" ? Json::object() : load_config(sweep_arg);
    Json config;
    config["target"] = !lemma.empty() ? "lemma:" + lemma : !bound.empty() ? "bound:" + bound : "scaling:" + scaling;
    config["sweep"] = sweep;
    config["seed"] = seed;
    OutputLock lock(out);
    std::vector<EstimateReport> reports;
    if (!lemma.empty()) reports = run_lemma(lemma, sweep);
    else if (!bound.empty()) reports = run_bound(bound, sweep);
    else reports = run_scaling(scaling, sweep);
    Json j = envelope("verify", config);
    j["reports"] = Json::array();
    bool all_bounded = true;
    for (const auto& r : reports) {
        j["reports"].push_back(to_json(r));
        all_bounded &= r.verdict == "bounded";
    }
    j["verdict"] = all_bounded ? "bounded" : "unstable";
    write_json(j, out_file(out, "report.json"));
    write_text(estimates_csv(reports), out_file(out, "estimates.csv"));
    for (const auto& r : reports)
        std::cout << r.id << " [" << r.anchor << "] sup_ratio=" << format_double(r.sup_ratio)
                  << " delta=" << format_double(r.refinement_delta) << " " << r.verdict << "\n";
    return 0;
}

// ------------------------------------------------------------------------------ decay

int cmd_decay(Json cfg, const std::string& out) {
    check_keys(cfg, {"n", "q", "L", "H", "N", "times", "seed"}, "decay config");
    int n = get_or<int>(cfg, "n", 2);
    if (n != 2) throw UsageError("decay experiments run in n = 2");
    auto q = numbers_of(cfg, "q", {1, 2, INFINITY});
    double L = get_or<double>(cfg, "L", 20.0), H = get_or<double>(cfg, "H", 20.0);
    int N = get_or<int>(cfg, "N", 128);
    auto times = numbers_of(cfg, "times", {1, 2, 4, 8, 16});
    Json config = {{"n", n}, {"L", L}, {"H", H}, {"N", N}, {"seed", get_or<long>(cfg, "seed", 0)}};
    config["q"] = Json::array();
    for (double v : q) config["q"].push_back(json_number(v));
    config["times"] = Json::array();
    for (double v : times) config["times"].push_back(json_number(v));
    OutputLock lock(out);
    TensorGrid g = TensorGrid::plane(L, H, N, N);
    DecayTable tab = decay_experiment(dipole_data(g), q, times);
    Json j = envelope("decay", config);
    j["anchor"] = "l1-lq-decay";
    j["table"] = to_json(tab);
    write_json(j, out_file(out, "report.json"));
    write_text(decay_csv(tab), out_file(out, "decay.csv"));
    std::vector<PlotSeries> series;
    for (const auto& r : tab.rows) {
        std::string qs = std::isinf(r.q) ? "inf" : format_double(r.q);
        series.push_back({r.quantity + " q=" + qs, tab.times, r.values});
    }
    write_text(svg_loglog(series, "Stokes flow of a compact dipole", "t", "norm"), out_file(out, "decay.svg"));
    std::cout << "quantity,q,slope,expected,r2\n";
    for (const auto& r : tab.rows)
        std::cout << r.quantity << ',' << (std::isinf(r.q) ? "inf" : format_double(r.q)) << ','
                  << format_double(r.slope) << ',' << format_double(r.expected) << ',' << format_double(r.r2) << "\n";
    return 0;
}

// ------------------------------------------------------------------------------ solve

int cmd_solve(const std::string& system_flag, Json cfg, const std::string& out) {
    check_keys(cfg, {"system", "T", "time_intervals", "norm", "max_iter", "tol", "schedule_nodes", "d_const", "grid",
                     "data", "seed"},
               "solve config");
    std::string sys_name = system_flag.empty() ? get_or<std::string>(cfg, "system", "") : system_flag;
    if (sys_name.empty()) throw UsageError("no system given (--system or \"system\" in the config)");
    if (cfg.contains("system") && cfg.at("system").get<std::string>() != sys_name)
        throw UsageError("--system disagrees with the config");
    PicardConfig pc;
    try {
        pc.system = parse_system(sys_name);
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    bool nlcf = pc.system == SystemKind::NlcfN || pc.system == SystemKind::NlcfD;
    bool magnetic = pc.system == SystemKind::Mhd || pc.system == SystemKind::FmMhd;
    pc.T = get_or<double>(cfg, "T", pc.T);
    pc.time_intervals = get_or<int>(cfg, "time_intervals", pc.time_intervals);
    pc.norm = nlcf ? WeightedNormSpec::Ya(1) : pc.norm;
    if (cfg.contains("norm")) pc.norm = norm_from_json(cfg.at("norm"));
    pc.max_iter = get_or<int>(cfg, "max_iter", pc.max_iter);
    pc.tol = get_or<double>(cfg, "tol", pc.tol);
    pc.schedule_nodes = get_or<int>(cfg, "schedule_nodes", pc.schedule_nodes);
    if (nlcf) pc.d_const = numbers_of(cfg, "d_const", {0.0, 1.0});
    Json grid = cfg.value("grid", Json::object());
    check_keys(grid, {"L", "H", "N_tangential", "N_normal"}, "grid");
    TensorGrid g = TensorGrid::plane(get_or<double>(grid, "L", 8.0), get_or<double>(grid, "H", 8.0),
                                     get_or<int>(grid, "N_tangential", 128), get_or<int>(grid, "N_normal", 128));
    Json data = cfg.value("data", Json::object());
    check_keys(data, {"u_amplitude", "b_amplitude", "d_amplitude"}, "data");
    double ua = get_or<double>(data, "u_amplitude", nlcf ? 0.05 : 0.1);
    double ba = get_or<double>(data, "b_amplitude", 0.1);
    double da = get_or<double>(data, "d_amplitude", 0.05);
    pc.validate(g.n);

    Json config = {{"system", sys_name},       {"T", pc.T},
                   {"time_intervals", pc.time_intervals}, {"norm", to_json(pc.norm)},
                   {"max_iter", pc.max_iter},  {"tol", pc.tol},
                   {"schedule_nodes", pc.schedule_nodes},
                   {"grid", {{"L", g.L}, {"H", g.H}, {"N_tangential", g.counts[0]}, {"N_normal", g.counts[1]}}},
                   {"data", {{"u_amplitude", ua}, {"b_amplitude", ba}, {"d_amplitude", da}}},
                   {"seed", get_or<long>(cfg, "seed", 0)}};
    if (nlcf) config["d_const"] = pc.d_const;

    OutputLock lock(out);
    Field u0 = solenoidal_bump(g, ua, pc.norm);
    Field second;
    if (magnetic) second = solenoidal_bump(g, ba, pc.norm, 0.7, 0.4);
    if (nlcf) second = director_bump(g, da, pc.norm);
    PicardResult res = picard_solve(u0, second, pc);
    Json j = envelope("solve", config);
    j["anchor"] = nlcf ? "nlcf-mild-iteration" : magnetic ? "mhd-mild-iteration" : "ns-mild-iteration";
    j["times"] = res.times;
    j["trace"] = to_json(res.trace);
    write_json(j, out_file(out, "report.json"));
    write_text(trace_csv(res.trace), out_file(out, "trace.csv"));
    write_csv(res.u.back(), out_file(out, "u_T.csv"));
    if (!res.second.empty()) write_csv(res.second.back(), out_file(out, nlcf ? "d_T.csv" : "b_T.csv"));
    std::cout << sys_name << ": " << res.trace.verdict << " after " << res.trace.iterations << " iterations";
    if (!res.trace.ratios.empty()) std::cout << ", last ratio " << format_double(res.trace.ratios.back());
    std::cout << "\n";
    for (const auto& w : res.trace.warnings) std::cerr << "warning: " << w << "\n";
    return 0;
}

// ------------------------------------------------------------------------------- plot

int cmd_plot(const std::string& input, const std::string& output) {
    Json j;
    try {
        j = Json::parse(read_text(input));
    } catch (const Json::parse_error& e) {
        throw IoError(input + ": " + e.what());
    }
    std::string cmd = j.value("command", "");
    std::vector<PlotSeries> series;
    std::string title, xl, yl;
    if (cmd == "decay") {
        const Json& tab = j.at("table");
        std::vector<double> t;
        for (const auto& v : tab.at("times")) t.push_back(number_from_json(v));
        for (const auto& r : tab.at("rows")) {
            std::vector<double> y;
            for (const auto& v : r.at("values")) y.push_back(number_from_json(v));
            double q = number_from_json(r.at("q"));
            series.push_back({r.at("quantity").get<std::string>() + " q=" + (std::isinf(q) ? "inf" : format_double(q)), t, y});
        }
        title = "decay", xl = "t", yl = "norm";
    } else if (cmd == "solve") {
        std::vector<double> it, d;
        int k = 0;
        for (const auto& v : j.at("trace").at("diffs")) {
            it.push_back(++k);
            d.push_back(number_from_json(v));
        }
        series.push_back({"successive difference", it, d});
        title = "Picard iteration (" + j.at("config").at("system").get<std::string>() + ")", xl = "iteration", yl = "difference";
    } else if (cmd == "verify") {
        std::vector<double> idx, s;
        int k = 0;
        for (const auto& r : j.at("reports")) {
            idx.push_back(++k);
            s.push_back(number_from_json(r.at("sup_ratio")));
        }
        series.push_back({"sup ratio", idx, s});
        title = "estimate sweep", xl = "report", yl = "sup LHS/RHS";
    } else {
        throw UsageError(input + " is not a decay, solve or verify report");
    }
    write_text(svg_loglog(series, title, xl, yl), output);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"half-space Stokes kernels, estimate sweeps and mild solvers"};
    app.require_subcommand(1);

    auto* kernel = app.add_subcommand("kernel", "kernel evaluation");
    kernel->require_subcommand(1);
    auto* keval = kernel->add_subcommand("eval", "evaluate a kernel at one point pair or a CSV point list");
    KernelArgs ka;
    double xn = 0, yn = 0;
    keval->add_option("--kernel", ka.kernel, "gamma | laplace | gn | gd | gstar | gbreve")->required();
    keval->add_option("--n", ka.n, "dimension (2 or 3)");
    keval->add_option("--x", ka.x, "x coordinates, comma separated (tangential only with --xn)");
    auto* oxn = keval->add_option("--xn", xn, "normal coordinate of x");
    keval->add_option("--y", ka.y, "y coordinates (tangential only with --yn)");
    auto* oyn = keval->add_option("--yn", yn, "normal coordinate of y");
    keval->add_option("--t", ka.t, "time");
    keval->add_option("--i", ka.i, "tensor row (1-based)");
    keval->add_option("--j", ka.j, "tensor column (1-based)");
    keval->add_option("--deriv", ka.deriv, "derivative orders l,k,q,m");
    keval->add_option("--points", ka.points, "CSV file with rows x..., y..., t");

    auto* verify = app.add_subcommand("verify", "run an estimate sweep");
    std::string lemma, bound, scaling, sweep = "default", vout = "verify_out";
    long seed = 0;
    verify->add_option("--lemma", lemma, "lemma21 | lemma22 | lemma22d1 | log | heat_decay");
    verify->add_option("--bound", bound, "gstar | gn | gd");
    verify->add_option("--scaling", scaling, "heat_grad_lq | heat_linear_ya | stokes_linear_yab | mixed_bilinear | boundary_bilinear");
    verify->add_option("--sweep", sweep, "'default' or a JSON sweep file");
    verify->add_option("--out", vout, "output directory");
    verify->add_option("--seed", seed, "recorded in the report");

    auto* decay = app.add_subcommand("decay", "decay-rate experiment for a compact dipole");
    std::string dconfig, dq, dtimes, dout = "decay_out";
    int dn = 2, dN = 0;
    double dL = 0, dH = 0;
    auto* odn = decay->add_option("--n", dn, "dimension (2)");
    decay->add_option("--q", dq, "comma separated q values ('inf' allowed)");
    decay->add_option("--L", dL, "tangential half-width");
    decay->add_option("--H", dH, "box height");
    decay->add_option("--N", dN, "nodes per axis");
    decay->add_option("--times", dtimes, "comma separated times");
    decay->add_option("--config", dconfig, "JSON config (flags override)");
    decay->add_option("--out", dout, "output directory");
    auto* dseed = decay->add_option("--seed", seed, "recorded in the report");

    auto* solve = app.add_subcommand("solve", "Picard iteration for a mild solution");
    std::string system, sconfig, sout = "solve_out";
    solve->add_option("--system", system, "nse | mhd | fm_mhd | nlcf_n | nlcf_d");
    solve->add_option("--config", sconfig, "JSON config");
    solve->add_option("--out", sout, "output directory");

    auto* plot = app.add_subcommand("plot", "SVG plot of a report");
    std::string pin, pout = "plot.svg";
    plot->add_option("--input", pin, "report.json")->required();
    plot->add_option("--output", pout, "SVG file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (keval->parsed()) {
            if (oxn->count()) ka.xn = xn;
            if (oyn->count()) ka.yn = yn;
            return cmd_kernel_eval(ka);
        }
        if (verify->parsed()) return cmd_verify(lemma, bound, scaling, sweep, vout, seed);
        if (decay->parsed()) {
            Json cfg = load_config(dconfig);
            if (odn->count()) cfg["n"] = dn;
            if (!dq.empty()) {
                cfg["q"] = Json::array();
                for (double v : parse_list(dq)) cfg["q"].push_back(json_number(v));
            }
            if (dL > 0) cfg["L"] = dL;
            if (dH > 0) cfg["H"] = dH;
            if (dN > 0) cfg["N"] = dN;
            if (!dtimes.empty()) cfg["times"] = parse_list(dtimes);
            if (dseed->count()) cfg["seed"] = seed;
            return cmd_decay(cfg, dout);
        }
        if (solve->parsed()) return cmd_solve(system, load_config(sconfig), sout);
        if (plot->parsed()) return cmd_plot(pin, pout);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Json::exception& e) {
        std::cerr << "error: bad config: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
