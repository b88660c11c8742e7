#pragma once

// JSON mapping of the domain types. Rationals are written as "p/q" strings
// so exact values survive a round trip.

#include <json.hpp>

#include "mrt/core.hpp"
#include "mrt/mc.hpp"
#include "mrt/trace.hpp"

namespace nlohmann {

template <>
struct adl_serializer<mpq_class> {
  static void to_json(json& j, const mpq_class& q) { j = q.get_str(); }
  static void from_json(const json& j, mpq_class& q);
};

}  // namespace nlohmann

namespace mrt {

using json = nlohmann::json;

void to_json(json& j, const ResidenceSample& s);
void from_json(const json& j, ResidenceSample& s);

void to_json(json& j, const OccupancyTrace& t);
void from_json(const json& j, OccupancyTrace& t);

void to_json(json& j, const FloatMoments& m);
void from_json(const json& j, FloatMoments& m);
void to_json(json& j, const ExactMoments& m);
void from_json(const json& j, ExactMoments& m);

void to_json(json& j, const Term& t);
void from_json(const json& j, Term& t);
void to_json(json& j, const VarianceExpression& e);
void from_json(const json& j, VarianceExpression& e);

void to_json(json& j, const IndexPattern& p);
void from_json(const json& j, IndexPattern& p);

void to_json(json& j, const DistributionSpec& d);
void from_json(const json& j, DistributionSpec& d);

void to_json(json& j, const EstimateReport& r);
void from_json(const json& j, EstimateReport& r);

void to_json(json& j, const FilterConfig& c);
void from_json(const json& j, FilterConfig& c);
void to_json(json& j, const ExtractionPolicy& p);
void from_json(const json& j, ExtractionPolicy& p);

void to_json(json& j, const ExperimentConfig& c);
void from_json(const json& j, ExperimentConfig& c);

}  // namespace mrt
