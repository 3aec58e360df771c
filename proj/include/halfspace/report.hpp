#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "halfspace/fields.hpp"
#include "halfspace/mild_solvers.hpp"
#include "halfspace/verifier.hpp"

namespace halfspace {

using Json = nlohmann::json;

/// Finite values as numbers, +-inf and nan as the strings "inf", "-inf", "nan".
Json json_number(double v);
/// Inverse of json_number; throws DomainError on anything else.
double number_from_json(const Json& j);

Json to_json(const EstimateReport& r);
Json to_json(const DecayTable& t);
Json to_json(const PicardTrace& t);
Json to_json(const WeightedNormSpec& s);
/// Accepts {"family": "Yab", "a": 1, "b": 0.5} style objects; unknown keys rejected.
WeightedNormSpec norm_from_json(const Json& j);

/// SHA-256 (hex) of the compact dump of `config`; keys are sorted, so equal configs hash equal.
std::string config_hash(const Json& config);

/// Pretty JSON with a trailing newline. Throws IoError.
void write_json(const Json& j, const std::string& path);
void write_text(const std::string& text, const std::string& path);
std::string read_text(const std::string& path);

/// One row per report: id, anchor, params, samples, sup_ratio, refinement_delta, verdict.
std::string estimates_csv(const std::vector<EstimateReport>& reports);
/// Long format: quantity, q, t, value, plus one slope row per fit.
std::string decay_csv(const DecayTable& t);
/// iteration, norm, diff, ratio, div_residual, trace_residual, director_drift.
std::string trace_csv(const PicardTrace& t);

struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
};

/// Static log-log line plot; positive data only (other points are dropped).
std::string svg_loglog(const std::vector<PlotSeries>& series, const std::string& title, const std::string& xlabel,
                       const std::string& ylabel);

}  // namespace halfspace
