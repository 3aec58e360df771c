#include "halfspace/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <openssl/evp.h>

#include "halfspace/errors.hpp"

namespace halfspace {

Json json_number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

double number_from_json(const Json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw DomainError("expected a number, got " + j.dump());
}

namespace {

Json pairs(const std::vector<std::pair<std::string, double>>& v) {
    Json o = Json::object();
    for (const auto& [k, x] : v) o[k] = json_number(x);
    return o;
}

Json numbers(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(json_number(x));
    return a;
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return format_double(v);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

Json to_json(const EstimateReport& r) {
    Json j;
    j["id"] = r.id;
    j["anchor"] = r.anchor;
    j["params"] = pairs(r.params);
    j["samples"] = r.samples;
    j["sup_ratio"] = json_number(r.sup_ratio);
    Json arg = Json::object();
    for (std::size_t i = 0; i < r.argmax.size(); ++i)
        arg[i < r.argmax_labels.size() ? r.argmax_labels[i] : "c" + std::to_string(i)] = json_number(r.argmax[i]);
    j["argmax"] = arg;
    j["refinement_delta"] = json_number(r.refinement_delta);
    j["verdict"] = r.verdict;
    j["extras"] = pairs(r.extras);
    j["notes"] = r.notes;
    return j;
}

Json to_json(const DecayTable& t) {
    Json j;
    j["times"] = numbers(t.times);
    j["outer_mass_fraction"] = json_number(t.outer_mass_fraction);
    j["notes"] = t.notes;
    Json rows = Json::array();
    for (const auto& r : t.rows) {
        Json o;
        o["quantity"] = r.quantity;
        o["q"] = json_number(r.q);
        o["values"] = numbers(r.values);
        o["slope"] = json_number(r.slope);
        o["intercept"] = json_number(r.intercept);
        o["r2"] = json_number(r.r2);
        o["expected"] = json_number(r.expected);
        o["conclusive"] = r.conclusive;
        rows.push_back(o);
    }
    j["rows"] = rows;
    return j;
}

Json to_json(const PicardTrace& t) {
    Json j;
    j["norms"] = numbers(t.norms);
    j["diffs"] = numbers(t.diffs);
    j["ratios"] = numbers(t.ratios);
    j["div_residual"] = numbers(t.div_residual);
    j["trace_residual"] = numbers(t.trace_residual);
    j["director_drift"] = numbers(t.director_drift);
    j["verdict"] = t.verdict;
    j["iterations"] = t.iterations;
    j["fixed_point_residual"] = json_number(t.fixed_point_residual);
    j["linear_norm"] = json_number(t.linear_norm);
    j["magnetic_divergence"] = json_number(t.magnetic_divergence);
    j["far_field_initial"] = json_number(t.far_field_initial);
    j["far_field_final"] = json_number(t.far_field_final);
    j["critical_exponent"] = t.critical_exponent;
    j["warnings"] = t.warnings;
    return j;
}

Json to_json(const WeightedNormSpec& s) {
    Json j;
    switch (s.family) {
        case NormFamily::Lq: j["family"] = "Lq"; j["q"] = json_number(s.q); break;
        case NormFamily::Lq_uloc: j["family"] = "Lq_uloc"; j["q"] = json_number(s.q); break;
        case NormFamily::Ya: j["family"] = "Ya"; j["a"] = s.a; break;
        case NormFamily::Za: j["family"] = "Za"; j["a"] = s.a; break;
        case NormFamily::Yab: j["family"] = "Yab"; j["a"] = s.a; j["b"] = s.b; break;
        case NormFamily::Zaal: j["family"] = "Zaal"; j["a"] = s.a; j["alpha"] = s.alpha; break;
    }
    return j;
}

WeightedNormSpec norm_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("family")) throw DomainError("norm must be an object with a family");
    std::string fam = j.at("family").get<std::string>();
    std::vector<std::string> allowed{"family"};
    auto get = [&](const char* k) {
        if (!j.contains(k)) throw DomainError(std::string("norm ") + fam + " needs '" + k + "'");
        return number_from_json(j.at(k));
    };
    WeightedNormSpec s;
    if (fam == "Lq" || fam == "Lq_uloc") {
        allowed.push_back("q");
        s = fam == "Lq" ? WeightedNormSpec::Lq(get("q")) : WeightedNormSpec::Lq_uloc(get("q"));
    } else if (fam == "Ya" || fam == "Za") {
        allowed.push_back("a");
        s = fam == "Ya" ? WeightedNormSpec::Ya(get("a")) : WeightedNormSpec::Za(get("a"));
    } else if (fam == "Yab") {
        allowed.insert(allowed.end(), {"a", "b"});
        s = WeightedNormSpec::Yab(get("a"), get("b"));
    } else if (fam == "Zaal") {
        allowed.insert(allowed.end(), {"a", "alpha"});
        s = WeightedNormSpec::Zaal(get("a"), get("alpha"));
    } else {
        throw DomainError("unknown norm family '" + fam + "'");
    }
    for (const auto& [k, v] : j.items())
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
            throw DomainError("unknown key '" + k + "' in norm");
    s.validate();
    return s;
}

std::string config_hash(const Json& config) {
    std::string text = config.dump();
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256 failed");
    std::ostringstream os;
    for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
}

void write_text(const std::string& text, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path);
    os << text;
    if (!os) throw IoError("write failed for " + path);
}

void write_json(const Json& j, const std::string& path) { write_text(j.dump(2) + "\n", path); }

std::string read_text(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::string estimates_csv(const std::vector<EstimateReport>& reports) {
    std::ostringstream os;
    os << "id,anchor,params,samples,sup_ratio,refinement_delta,verdict\n";
    for (const auto& r : reports) {
        std::string p;
        for (const auto& [k, v] : r.params) p += (p.empty() ? "" : ";") + k + "=" + fmt(v);
        os << csv_field(r.id) << ',' << csv_field(r.anchor) << ',' << csv_field(p) << ',' << r.samples << ','
           << fmt(r.sup_ratio) << ',' << fmt(r.refinement_delta) << ',' << r.verdict << '\n';
    }
    return os.str();
}

std::string decay_csv(const DecayTable& t) {
    std::ostringstream os;
    os << "kind,quantity,q,t,value\n";
    for (const auto& r : t.rows)
        for (std::size_t i = 0; i < r.values.size(); ++i)
            os << "value," << r.quantity << ',' << fmt(r.q) << ',' << fmt(t.times[i]) << ',' << fmt(r.values[i]) << '\n';
    for (const auto& r : t.rows) {
        os << "slope," << r.quantity << ',' << fmt(r.q) << ",," << fmt(r.slope) << '\n';
        os << "expected," << r.quantity << ',' << fmt(r.q) << ",," << fmt(r.expected) << '\n';
        os << "r2," << r.quantity << ',' << fmt(r.q) << ",," << fmt(r.r2) << '\n';
    }
    return os.str();
}

std::string trace_csv(const PicardTrace& t) {
    std::ostringstream os;
    os << "iteration,norm,diff,ratio,div_residual,trace_residual,director_drift\n";
    auto at = [](const std::vector<double>& v, std::size_t i) { return i < v.size() ? fmt(v[i]) : std::string(); };
    for (std::size_t i = 0; i < t.norms.size(); ++i)
        os << i + 1 << ',' << at(t.norms, i) << ',' << at(t.diffs, i) << ',' << at(t.ratios, i) << ','
           << at(t.div_residual, i) << ',' << at(t.trace_residual, i) << ',' << at(t.director_drift, i) << '\n';
    return os.str();
}

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string px(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << v;
    return os.str();
}

}  // namespace

std::string svg_loglog(const std::vector<PlotSeries>& series, const std::string& title, const std::string& xlabel,
                       const std::string& ylabel) {
    const double W = 640, Hh = 440, ml = 70, mr = 150, mt = 40, mb = 55;
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : series)
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
            if (s.x[i] > 0 && s.y[i] > 0) {
                x0 = std::min(x0, std::log10(s.x[i]));
                x1 = std::max(x1, std::log10(s.x[i]));
                y0 = std::min(y0, std::log10(s.y[i]));
                y1 = std::max(y1, std::log10(s.y[i]));
            }
    if (!(x1 >= x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    x0 = std::floor(x0), x1 = std::ceil(x1), y0 = std::floor(y0), y1 = std::ceil(y1);
    if (x1 == x0) x1 += 1;
    if (y1 == y0) y1 += 1;
    auto X = [&](double v) { return ml + (W - ml - mr) * (std::log10(v) - x0) / (x1 - x0); };
    auto Y = [&](double v) { return Hh - mb - (Hh - mt - mb) * (std::log10(v) - y0) / (y1 - y0); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << Hh << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << px(W / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << xml_escape(title) << "</text>\n";
    for (int e = int(x0); e <= int(x1); ++e) {
        double x = X(std::pow(10.0, e));
        os << "<line x1=\"" << px(x) << "\" y1=\"" << px(mt) << "\" x2=\"" << px(x) << "\" y2=\"" << px(Hh - mb)
           << "\" stroke=\"#ddd\"/>\n<text x=\"" << px(x) << "\" y=\"" << px(Hh - mb + 16)
           << "\" text-anchor=\"middle\">1e" << e << "</text>\n";
    }
    for (int e = int(y0); e <= int(y1); ++e) {
        double y = Y(std::pow(10.0, e));
        os << "<line x1=\"" << px(ml) << "\" y1=\"" << px(y) << "\" x2=\"" << px(W - mr) << "\" y2=\"" << px(y)
           << "\" stroke=\"#ddd\"/>\n<text x=\"" << px(ml - 6) << "\" y=\"" << px(y + 4)
           << "\" text-anchor=\"end\">1e" << e << "</text>\n";
    }
    os << "<rect x=\"" << px(ml) << "\" y=\"" << px(mt) << "\" width=\"" << px(W - ml - mr) << "\" height=\""
       << px(Hh - mt - mb) << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"" << px(ml + (W - ml - mr) / 2) << "\" y=\"" << px(Hh - 12) << "\" text-anchor=\"middle\">"
       << xml_escape(xlabel) << "</text>\n";
    os << "<text transform=\"translate(16," << px(mt + (Hh - mt - mb) / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
       << xml_escape(ylabel) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* c = colors[k % 7];
        os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.8\" points=\"";
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
            if (s.x[i] > 0 && s.y[i] > 0) os << px(X(s.x[i])) << ',' << px(Y(s.y[i])) << ' ';
        os << "\"/>\n";
        double ly = mt + 14 + 18 * k;
        os << "<line x1=\"" << px(W - mr + 10) << "\" y1=\"" << px(ly) << "\" x2=\"" << px(W - mr + 30) << "\" y2=\""
           << px(ly) << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n<text x=\"" << px(W - mr + 35) << "\" y=\""
           << px(ly + 4) << "\">" << xml_escape(s.label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace halfspace
